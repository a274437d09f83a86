//! Exact sampling of isotropic multiparameter fractional Brownian motion
//! (Lévy fBm): centered Gaussian, B(0) = 0, covariance
//! (‖x‖^{2H} + ‖y‖^{2H} − ‖x−y‖^{2H})/2.
//!
//! Two exact routes: pivoted Cholesky factorization for arbitrary point sets
//! (the covariance is only positive semidefinite — the origin row vanishes —
//! so plain Cholesky would fail), and Davies–Harte circulant embedding of the
//! stationary increment sequence for equally spaced 1-D lattices from the
//! origin.

use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::Scalar;

/// Relative tolerance for indefiniteness, against the largest diagonal /
/// eigenvalue.
const INDEFINITE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FbmMethod {
    Cholesky,
    Circulant1d,
}

/// One fBm sample on a point set.
#[derive(Clone, Debug)]
pub struct FbmField<T: Scalar> {
    pub hurst: T,
    pub dim: usize,
    pub points: Vec<[T; 2]>,
    pub values: Vec<T>,
    pub method: FbmMethod,
}

fn norm<T: Scalar>(dim: usize, p: [T; 2]) -> T {
    match dim {
        1 => p[0].abs(),
        _ => (p[0] * p[0] + p[1] * p[1]).sqrt(),
    }
}

/// Covariance (‖x‖^{2H} + ‖y‖^{2H} − ‖x−y‖^{2H})/2.
pub fn fbm_covariance<T: Scalar>(dim: usize, x: [T; 2], y: [T; 2], hurst: T) -> T {
    let two_h = T::real(2.0) * hurst;
    let diff = [x[0] - y[0], x[1] - y[1]];
    let half = T::real(0.5);
    half * (norm(dim, x).powf(two_h) + norm(dim, y).powf(two_h) - norm(dim, diff).powf(two_h))
}

fn check_hurst<T: Scalar>(h: T) -> Result<()> {
    if !(h > T::zero() && h < T::one()) {
        return Err(Error::ParameterDomain(format!(
            "Hurst index {h} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Exact sampler over an arbitrary point set via pivoted Cholesky.
pub struct FbmSampler<T: Scalar> {
    hurst: T,
    dim: usize,
    points: Vec<[T; 2]>,
    /// Lower-triangular factor columns in pivoted order.
    factor: Vec<Vec<T>>,
    /// perm[j] = original row index handled at elimination step j.
    perm: Vec<usize>,
    rank: usize,
}

impl<T: Scalar> FbmSampler<T> {
    pub fn new(dim: usize, points: &[[T; 2]], hurst: T) -> Result<Self> {
        check_hurst(hurst)?;
        let n = points.len();
        if n == 0 || n > 4096 {
            return Err(Error::Config(format!(
                "factorization path supports 1..=4096 points, got {n}"
            )));
        }
        let cov = |i: usize, j: usize| fbm_covariance(dim, points[i], points[j], hurst);
        let mut diag: Vec<T> = (0..n).map(|i| cov(i, i)).collect();
        let max0 = diag.iter().cloned().fold(T::zero(), T::max).max(T::one());
        let tol = T::real(INDEFINITE_TOL) * max0;

        let mut perm: Vec<usize> = (0..n).collect();
        // factor[j][i] = L[perm-position i][column j] for i ≥ j
        let mut factor: Vec<Vec<T>> = Vec::new();
        let mut rank = n;
        for j in 0..n {
            // pivot: largest remaining diagonal
            let (p, dmax) =
                (j..n)
                    .map(|i| (i, diag[perm[i]]))
                    .fold(
                        (j, T::neg_infinity()),
                        |acc, it| if it.1 > acc.1 { it } else { acc },
                    );
            if dmax < -tol {
                return Err(Error::Factorization(format!(
                    "covariance matrix indefinite: pivot {dmax:e} at step {j}"
                )));
            }
            if dmax <= tol {
                rank = j;
                break;
            }
            perm.swap(j, p);
            for c in factor.iter_mut() {
                c.swap(j, p);
            }
            let pj = perm[j];
            let ljj = dmax.sqrt();
            let mut col = vec![T::zero(); n];
            col[j] = ljj;
            for i in (j + 1)..n {
                let pi = perm[i];
                let mut s = cov(pi, pj);
                for c in factor.iter().take(j) {
                    s -= c[i] * c[j];
                }
                let lij = s / ljj;
                col[i] = lij;
                diag[pi] -= lij * lij;
            }
            factor.push(col);
        }
        Ok(FbmSampler {
            hurst,
            dim,
            points: points.to_vec(),
            factor,
            perm,
            rank,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Draw one field; `tag` separates draws sharing a stream.
    pub fn sample(&self, stream: Stream, tag: u64) -> FbmField<T> {
        let n = self.points.len();
        let z: Vec<T> = (0..self.rank)
            .map(|k| T::real(stream.normal(tag, k as u64, 0)))
            .collect();
        let mut values = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = T::zero();
            for (j, zj) in z.iter().enumerate() {
                acc += self.factor[j][i] * *zj;
            }
            values[self.perm[i]] = acc;
        }
        FbmField {
            hurst: self.hurst,
            dim: self.dim,
            points: self.points.clone(),
            values,
            method: FbmMethod::Cholesky,
        }
    }

    /// The covariance the factorization reproduces (for diagnostics).
    pub fn covariance(&self, i: usize, j: usize) -> T {
        fbm_covariance(self.dim, self.points[i], self.points[j], self.hurst)
    }
}

/// Davies–Harte sampler on the lattice {0, Δ, …, nΔ} (B(0) = 0 pinned by
/// integrating exact stationary increments).
pub struct CirculantSampler<T: Scalar> {
    hurst: T,
    delta: T,
    n: usize,
    /// √(λ_k) of the circulant embedding, length m.
    sqrt_eig: Vec<T>,
    m: usize,
}

impl<T: Scalar> CirculantSampler<T> {
    pub fn new(n: usize, delta: T, hurst: T, padding: usize) -> Result<Self> {
        check_hurst(hurst)?;
        if n < 2 {
            return Err(Error::Config(format!(
                "lattice needs n ≥ 2 increments, got {n}"
            )));
        }
        if !(delta > T::zero()) {
            return Err(Error::Config(format!(
                "lattice spacing {delta} must be positive"
            )));
        }
        let pad = padding.max(1);
        let half = n * pad;
        let m = 2 * half;
        let two_h = T::real(2.0) * hurst;
        let scale = delta.powf(two_h) * T::real(0.5);
        let autocov = |k: usize| -> T {
            let k = T::usize(k);
            scale
                * ((k + T::one()).powf(two_h) + (k - T::one()).abs().powf(two_h)
                    - T::real(2.0) * k.powf(two_h))
        };
        // circulant first row: c0 … c_{half} c_{half−1} … c_1
        let mut row: Vec<Complex<T>> = Vec::with_capacity(m);
        for k in 0..=half {
            row.push(Complex::new(autocov(k), T::zero()));
        }
        for k in (1..half).rev() {
            row.push(Complex::new(autocov(k), T::zero()));
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft(m, FftDirection::Forward);
        fft.process(&mut row);
        let max_eig = row.iter().map(|c| c.re).fold(T::neg_infinity(), T::max);
        let min_eig = row.iter().map(|c| c.re).fold(T::infinity(), T::min);
        if min_eig < -T::real(INDEFINITE_TOL) * max_eig {
            return Err(Error::Embedding {
                min_eigenvalue: min_eig.f64(),
                suggested_padding: pad * 2,
            });
        }
        let sqrt_eig = row.iter().map(|c| c.re.max(T::zero()).sqrt()).collect();
        Ok(CirculantSampler {
            hurst,
            delta,
            n,
            sqrt_eig,
            m,
        })
    }

    /// Draw one path on {0, Δ, …, nΔ}.
    pub fn sample(&self, stream: Stream, tag: u64) -> FbmField<T> {
        let m = self.m;
        let mut w = vec![Complex::new(T::zero(), T::zero()); m];
        let inv_m = (T::one() / T::usize(m)).sqrt();
        let inv_2m = (T::one() / T::usize(2 * m)).sqrt();
        for k in 0..=m / 2 {
            let (z0, z1) = stream.normal_pair(tag, k as u64, 0);
            let (z0, z1) = (T::real(z0), T::real(z1));
            if k == 0 || k == m / 2 {
                w[k] = Complex::new(self.sqrt_eig[k] * inv_m * z0, T::zero());
            } else {
                let a = self.sqrt_eig[k] * inv_2m;
                w[k] = Complex::new(a * z0, a * z1);
                w[m - k] = Complex::new(a * z0, -(a * z1));
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft(m, FftDirection::Forward);
        fft.process(&mut w);
        // integrate the first n increments from the origin
        let mut values = Vec::with_capacity(self.n + 1);
        let mut points = Vec::with_capacity(self.n + 1);
        values.push(T::zero());
        points.push([T::zero(); 2]);
        let mut acc = T::zero();
        for (j, wj) in w.iter().take(self.n).enumerate() {
            acc += wj.re;
            values.push(acc);
            points.push([T::usize(j + 1) * self.delta, T::zero()]);
        }
        FbmField {
            hurst: self.hurst,
            dim: 1,
            points,
            values,
            method: FbmMethod::Circulant1d,
        }
    }
}

/// Sample one fBm field on a point set, picking the sampler automatically:
/// an equally spaced 1-D lattice from the origin goes through the circulant
/// embedding, anything else through the pivoted factorization.
pub fn sample_fbm<T: Scalar>(
    dim: usize,
    points: &[[T; 2]],
    hurst: T,
    stream: Stream,
    tag: u64,
) -> Result<FbmField<T>> {
    if dim == 1 && points.len() >= 3 {
        let delta = points[1][0] - points[0][0];
        let lattice = points[0][0].abs() < T::real(1e-12)
            && delta > T::zero()
            && points
                .windows(2)
                .all(|w| ((w[1][0] - w[0][0]) - delta).abs() < T::real(1e-9) * delta);
        if lattice {
            let sampler = CirculantSampler::new(points.len() - 1, delta, hurst, 1)?;
            return Ok(sampler.sample(stream, tag));
        }
    }
    Ok(FbmSampler::new(dim, points, hurst)?.sample(stream, tag))
}

/// V^{n,1/H}_{[0,1]} of one exactly sampled fBm path: the 1/H-variation of
/// the path over the unit interval at dyadic resolution n.
pub fn fbm_variation_oracle<T: Scalar>(hurst: T, n: usize, stream: Stream, tag: u64) -> Result<T> {
    check_hurst(hurst)?;
    if n < 2 {
        return Err(Error::Config(format!("variation needs n ≥ 2, got {n}")));
    }
    let sampler = CirculantSampler::new(n, T::one() / T::usize(n), hurst, 1)?;
    let path = sampler.sample(stream, tag);
    let q = T::one() / hurst;
    let mut v = T::zero();
    for w in path.values.windows(2) {
        v += (w[1] - w[0]).abs().powf(q);
    }
    Ok(v)
}
