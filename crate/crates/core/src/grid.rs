//! Periodic spatial grid and forward/inverse spectral transforms.
//!
//! Convention: the box is [−L/2, L/2)^d sampled at n points per axis; angular
//! frequencies are ξ_k = 2πk/L with k ∈ {−n/2, …, n/2−1} (the Nyquist index
//! n/2 is read as −n/2). The forward transform approximates the continuum
//! F f(ξ) = ∫ e^{−iξ·x} f(x) dx as h^d Σ f e^{−iξ·x}; the inverse carries
//! 1/L^d, so forward ∘ inverse is the identity.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Hard cap on total grid points.
pub const MAX_POINTS: usize = 1 << 26;

#[derive(Clone)]
pub struct Grid<T: Scalar> {
    dim: usize,
    extent: T,
    n: usize,
    spacing: T,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> std::fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("extent", &self.extent)
            .field("n", &self.n)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl<T: Scalar> Grid<T> {
    /// Build a validated grid: dim ∈ {1, 2}, n even and ≥ 8, extent > 0,
    /// total points within [`MAX_POINTS`].
    pub fn make(dim: usize, extent: T, points_per_axis: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::Config(format!(
                "dim = {dim}; supported dims are 1 and 2"
            )));
        }
        if points_per_axis % 2 != 0 {
            return Err(Error::Config(format!(
                "points_per_axis = {points_per_axis} must be even"
            )));
        }
        if points_per_axis < 8 {
            return Err(Error::Config(format!(
                "points_per_axis = {points_per_axis} must be at least 8"
            )));
        }
        if !(extent > T::zero() && extent.is_finite()) {
            return Err(Error::Config(format!(
                "extent = {extent} must be positive and finite"
            )));
        }
        let total = points_per_axis
            .checked_pow(dim as u32)
            .filter(|&t| t <= MAX_POINTS)
            .ok_or_else(|| {
                Error::Config(format!(
                    "grid of {points_per_axis}^{dim} points exceeds the {MAX_POINTS}-point cap"
                ))
            })?;
        let _ = total;
        let mut planner = FftPlanner::new();
        Ok(Grid {
            dim,
            extent,
            n: points_per_axis,
            spacing: extent / T::usize(points_per_axis),
            fwd: planner.plan_fft(points_per_axis, FftDirection::Forward),
            inv: planner.plan_fft(points_per_axis, FftDirection::Inverse),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn extent(&self) -> T {
        self.extent
    }
    pub fn points_per_axis(&self) -> usize {
        self.n
    }
    pub fn spacing(&self) -> T {
        self.spacing
    }
    /// Total number of grid points n^d.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Cell volume h^d.
    pub fn cell_volume(&self) -> T {
        self.spacing.powi(self.dim as i32)
    }

    /// Axis indices of a flat index (axis 0 fastest).
    #[inline]
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat % self.n, flat / self.n],
        }
    }

    #[inline]
    pub fn flat_index(&self, ix: [usize; 2]) -> usize {
        match self.dim {
            1 => ix[0],
            _ => ix[1] * self.n + ix[0],
        }
    }

    /// Site coordinate in [−L/2, L/2)^d.
    pub fn site_coord(&self, flat: usize) -> [T; 2] {
        let ix = self.axis_indices(flat);
        let half = self.extent * T::real(0.5);
        let mut out = [T::zero(); 2];
        for a in 0..self.dim {
            out[a] = T::usize(ix[a]) * self.spacing - half;
        }
        out
    }

    /// Signed torus offset coordinate of an index difference, in [−L/2, L/2).
    pub fn offset_coord(&self, flat: usize) -> [T; 2] {
        let ix = self.axis_indices(flat);
        let mut out = [T::zero(); 2];
        for a in 0..self.dim {
            let i = ix[a];
            let signed = if i < self.n / 2 {
                i as isize
            } else {
                i as isize - self.n as isize
            };
            out[a] = T::real(signed as f64) * self.spacing;
        }
        out
    }

    /// Torus distance of an offset index from the origin.
    pub fn offset_norm(&self, flat: usize) -> T {
        let c = self.offset_coord(flat);
        match self.dim {
            1 => c[0].abs(),
            _ => (c[0] * c[0] + c[1] * c[1]).sqrt(),
        }
    }

    /// Signed integer frequency of an axis index: {−n/2, …, n/2−1}.
    #[inline]
    fn signed_freq(&self, k: usize) -> isize {
        if k < self.n / 2 {
            k as isize
        } else {
            k as isize - self.n as isize
        }
    }

    /// Signed frequency component ξ along one axis of a flat spectral index.
    pub fn xi_signed(&self, flat: usize, axis: usize) -> T {
        let ix = self.axis_indices(flat);
        let step = T::real(2.0) * T::PI() / self.extent;
        step * T::real(self.signed_freq(ix[axis]) as f64)
    }

    /// ‖ξ_k‖ of a flat spectral index.
    pub fn xi_norm(&self, flat: usize) -> T {
        let ix = self.axis_indices(flat);
        let step = T::real(2.0) * T::PI() / self.extent;
        match self.dim {
            1 => step * T::real(self.signed_freq(ix[0]).unsigned_abs() as f64),
            _ => {
                let k0 = self.signed_freq(ix[0]) as f64;
                let k1 = self.signed_freq(ix[1]) as f64;
                step * T::real((k0 * k0 + k1 * k1).sqrt())
            }
        }
    }

    /// Largest ‖ξ‖ on the lattice (the Nyquist corner).
    pub fn xi_max(&self) -> T {
        let per_axis = T::PI() * T::usize(self.n) / self.extent;
        match self.dim {
            1 => per_axis,
            _ => per_axis * T::real(std::f64::consts::SQRT_2),
        }
    }

    /// Flat index of −k (the Hermitian partner).
    pub fn conj_index(&self, flat: usize) -> usize {
        let ix = self.axis_indices(flat);
        let neg = |k: usize| (self.n - k) % self.n;
        match self.dim {
            1 => neg(ix[0]),
            _ => self.flat_index([neg(ix[0]), neg(ix[1])]),
        }
    }

    /// Shift a flat site index by `cells` lattice steps along `axis` (wrapping).
    pub fn shift_index(&self, flat: usize, axis: usize, cells: isize) -> usize {
        let mut ix = self.axis_indices(flat);
        let n = self.n as isize;
        let moved = ((ix[axis] as isize - cells) % n + n) % n;
        // NOTE: shifting the evaluation point by −cells looks up u(x − εe)
        ix[axis] = moved as usize;
        self.flat_index(ix)
    }

    fn fft_all_axes(&self, data: &mut [Complex<T>], plan: &Arc<dyn Fft<T>>) {
        assert_eq!(data.len(), self.len());
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        match self.dim {
            1 => plan.process_with_scratch(data, &mut scratch),
            _ => {
                // rows (axis 0 contiguous)
                for row in data.chunks_exact_mut(self.n) {
                    plan.process_with_scratch(row, &mut scratch);
                }
                // columns via transpose
                let mut col = vec![Complex::new(T::zero(), T::zero()); self.n];
                for c in 0..self.n {
                    for r in 0..self.n {
                        col[r] = data[r * self.n + c];
                    }
                    plan.process_with_scratch(&mut col, &mut scratch);
                    for r in 0..self.n {
                        data[r * self.n + c] = col[r];
                    }
                }
            }
        }
    }

    /// Forward transform of a real field: û_k = h^d Σ_x u(x) e^{−iξ_k·x-index}.
    pub fn forward(&self, field: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = field.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.fft_all_axes(&mut buf, &self.fwd);
        let scale = self.cell_volume();
        for v in &mut buf {
            *v = *v * scale;
        }
        buf
    }

    /// Inverse transform: u(x) = L^{−d} Σ_k û_k e^{+iξ_k·x-index}, complex out.
    pub fn inverse(&self, spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = spectrum.to_vec();
        self.fft_all_axes(&mut buf, &self.inv);
        let scale = T::one() / self.extent.powi(self.dim as i32);
        for v in &mut buf {
            *v = *v * scale;
        }
        buf
    }

    /// Inverse transform of a Hermitian spectrum, returning the real part.
    pub fn inverse_real(&self, spectrum: &[Complex<T>]) -> Vec<T> {
        self.inverse(spectrum).into_iter().map(|c| c.re).collect()
    }
}
