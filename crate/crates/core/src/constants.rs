//! The model constants: Riesz normalization, gradient-limit constant,
//! kernel integrals, and the variation constant.
//!
//! Everything is evaluated under the angular Fourier convention
//! F f(ξ) = ∫ e^{−iξ·x} f(x) dx with heat symbol e^{−t‖ξ‖^α} and noise
//! spectral density ‖ξ‖^{−γ}; Plancherel then carries a (2π)^{−d} factor,
//! which [`linear_variance`] exposes where the variance law needs it.
//! Closed forms are used where the radial substitution forces them,
//! adaptive quadrature elsewhere.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quad::{integrate, power_cos_tail};
use crate::scalar::Scalar;
use crate::special::{gamma, gaussian_abs_moment, unit_sphere_area};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstantName {
    /// Riesz kernel normalization c_{1,1}.
    C11,
    /// Gradient-limit constant c_{α,γ,d}.
    CAlphaGammaD,
    /// ∫ ‖ξ‖^{−γ} e^{−2‖ξ‖^α} dξ.
    C21,
    /// Temporal increment constant c_{2,6}.
    C26,
    /// Variation constant c_{1,4} = c_{α,γ,d}^{1/H} E|N|^{1/H}.
    C14,
    /// Hurst index H = (α − d + γ)/2.
    Hurst,
}

impl ConstantName {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstantName::C11 => "c11",
            ConstantName::CAlphaGammaD => "c_agd",
            ConstantName::C21 => "c21",
            ConstantName::C26 => "c26",
            ConstantName::C14 => "c14",
            ConstantName::Hurst => "hurst",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        }
    }
}

/// One evaluated constant with its provenance.
#[derive(Clone, Copy, Debug)]
pub struct ConstantReport<T: Scalar> {
    pub name: ConstantName,
    pub value: T,
    pub method: Method,
    pub est_abs_error: T,
}

impl<T: Scalar> ConstantReport<T> {
    fn new(name: ConstantName, value: T, method: Method, est_abs_error: T) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Numeric(format!(
                "constant {} evaluated to a non-finite value",
                name.as_str()
            )));
        }
        Ok(ConstantReport {
            name,
            value,
            method,
            est_abs_error,
        })
    }
}

/// Hurst index H = (α − d + γ)/2 for admissible parameters.
pub fn hurst<T: Scalar>(params: &ModelParams<T>) -> Result<T> {
    params.hurst()
}

/// Riesz constant c_{1,1} = 2^{d−γ} π^{d/2} Γ((d−γ)/2) / Γ(γ/2).
pub fn riesz_c11<T: Scalar>(dim: usize, gam: T) -> Result<T> {
    if dim == 0 {
        return Err(Error::ParameterDomain("dim must be positive".into()));
    }
    let d = T::usize(dim);
    if !(gam > T::zero() && gam < d) {
        return Err(Error::ParameterDomain(format!(
            "gamma = {gam} violates gamma ∈ (0, d) for d = {dim}"
        )));
    }
    let two = T::real(2.0);
    let pi = T::PI();
    Ok(two.powf(d - gam) * pi.powf(d / two) * gamma((d - gam) / two) / gamma(gam / two))
}

/// Direction-resolved gradient-limit constant
/// c = (2π)^{−d/2} ( ∫ ‖w‖^{−(α+γ)} (1 − cos(w·e)) dw )^{1/2}.
///
/// The integral is reduced to a radial integral (d = 1) or a radial–angular
/// trapezoid product (d = 2) that keeps the supplied unit vector `e` in play,
/// so rotation invariance is a genuine numerical check. Tails are handled
/// analytically (power part) and by integration-by-parts evaluation of the
/// oscillatory part.
pub fn c_alpha_gamma_d_dir<T: Scalar>(
    params: &ModelParams<T>,
    e: &[T],
) -> Result<ConstantReport<T>> {
    params.validate()?;
    if e.len() != params.dim {
        return Err(Error::Config(format!(
            "direction has {} components, model dim is {}",
            e.len(),
            params.dim
        )));
    }
    let norm2: T = e.iter().map(|&c| c * c).sum();
    if (norm2 - T::one()).abs() > T::real(1e-9) {
        return Err(Error::Config(format!(
            "probe direction must be a unit vector, got ‖e‖² = {norm2}"
        )));
    }
    let p = params.alpha + params.gamma;
    let (integral, err) = match params.dim {
        1 => radial_integral_1d(p)?,
        2 => radial_angular_integral_2d(p, e[0], e[1])?,
        d => return Err(Error::Config(format!("dim {d} not supported"))),
    };
    let two_pi = T::real(2.0) * T::PI();
    let d_half = T::usize(params.dim) / T::real(2.0);
    let value = two_pi.powf(-d_half) * integral.sqrt();
    // d c / d I = c / (2 I)
    let c_err = value * err / (T::real(2.0) * integral);
    ConstantReport::new(ConstantName::CAlphaGammaD, value, Method::Quadrature, c_err)
}

/// Gradient-limit constant along the first axis (the value is e-independent).
pub fn c_alpha_gamma_d<T: Scalar>(params: &ModelParams<T>) -> Result<ConstantReport<T>> {
    let mut e = vec![T::zero(); params.dim];
    e[0] = T::one();
    c_alpha_gamma_d_dir(params, &e)
}

/// 1 − cos(x) without cancellation.
#[inline]
fn one_minus_cos<T: Scalar>(x: T) -> T {
    let s = (x * T::real(0.5)).sin();
    T::real(2.0) * s * s
}

/// ∫_0^{r0} w^{−p} (1 − cos w) dw by the cosine Taylor series: the integrand
/// is w^{2−p}/2 + … near the origin, which defeats floating-point evaluation
/// for p close to its admissible supremum.
fn origin_series_1d<T: Scalar>(p: T, r0: T) -> (T, T) {
    let mut value = T::zero();
    let mut factorial = T::real(2.0); // (2k)! starting at k = 1
    let mut sign = T::one();
    let mut term = T::zero();
    for k in 1..=7u32 {
        let expo = T::real(2.0 * k as f64 + 1.0) - p;
        term = sign * r0.powf(expo) / (factorial * expo);
        value += term;
        sign = -sign;
        let next = 2.0 * (k + 1) as f64;
        factorial *= T::real(next * (next - 1.0));
    }
    (value, term.abs())
}

/// ∫_ℝ |w|^{−p} (1 − cos w) dw: analytic origin series, adaptive middle,
/// analytic power tail, IBP-evaluated cosine tail beyond R = 100.
fn radial_integral_1d<T: Scalar>(p: T) -> Result<(T, T)> {
    let tol = T::real(1e-12);
    let r0 = T::real(0.25);
    let big_r = T::real(100.0);
    let (near, e1) = origin_series_1d(p, r0);
    let (mid, e2) = integrate(|w: T| w.powf(-p) * one_minus_cos(w), r0, big_r, tol)?;
    // ∫_R^∞ w^{−p} dw − ∫_R^∞ w^{−p} cos w dw
    let power_tail = big_r.powf(T::one() - p) / (p - T::one());
    let (cos_tail, e3) = power_cos_tail(-p, big_r, T::zero(), tol);
    let half = near + mid + power_tail - cos_tail;
    Ok((T::real(2.0) * half, T::real(2.0) * (e1 + e2 + e3)))
}

/// ∫_{ℝ²} ‖w‖^{−p} (1 − cos(w·e)) dw via polar coordinates: the angular
/// factor uses the supplied direction through a 512-point trapezoid (exact
/// for the bandwidths reached below r = 80), the radial tail beyond R uses
/// the angular average's large-argument asymptotics.
fn radial_angular_integral_2d<T: Scalar>(p: T, e0: T, e1: T) -> Result<(T, T)> {
    const M: usize = 512;
    let tol = T::real(1e-11);
    let big_r = T::real(80.0);
    let two_pi = T::real(2.0) * T::PI();
    let angular = |r: T| -> T {
        let mut acc = T::zero();
        for j in 0..M {
            let th = two_pi * T::usize(j) / T::usize(M);
            let proj = e0 * th.cos() + e1 * th.sin();
            acc += one_minus_cos(r * proj);
        }
        acc * two_pi / T::usize(M)
    };
    // Origin piece by the angular-moment series: ∫ A_e(r)/2π dθ-average of
    // 1 − cos(r cosθ) = Σ (−1)^{k+1} m_{2k} r^{2k}/(2k)! with the circular
    // moments m_{2k} = (2k−1)!!/(2k)!! (rotation-invariant, so the supplied
    // direction only enters the resolved part below).
    let r0 = T::real(0.25);
    let (near, er1) = {
        const M2K: [f64; 7] = [
            0.5,
            0.375,
            0.3125,
            0.2734375,
            0.24609375,
            0.2255859375,
            0.20947265625,
        ];
        let mut value = T::zero();
        let mut factorial = T::real(2.0);
        let mut sign = T::one();
        let mut term = T::zero();
        for (k, &m2k) in M2K.iter().enumerate() {
            let expo = T::real(2.0 * (k + 1) as f64 + 2.0) - p;
            term = sign * two_pi * T::real(m2k) * r0.powf(expo) / (factorial * expo);
            value += term;
            sign = -sign;
            let next = 2.0 * (k + 2) as f64;
            factorial *= T::real(next * (next - 1.0));
        }
        (value, term.abs())
    };
    let f = |r: T| r.powf(T::one() - p) * angular(r);
    let (mid, er2) = integrate(f, r0, big_r, tol)?;

    // Tail: ∫_R^∞ r^{1−p} [2π − 2π J₀(r)] dr. The flat part is analytic; the
    // Bessel part uses J₀(r) ≈ √(2/(πr)) [cos(r−π/4)(1 − 9/(128 r²))
    // + sin(r−π/4)/(8r)], each term integrated by parts.
    let two = T::real(2.0);
    let flat_tail = two_pi * big_r.powf(two - p) / (p - two);
    let amp = two_pi * (two / T::PI()).sqrt();
    let quarter_pi = T::PI() / T::real(4.0);
    let (t1, b1) = power_cos_tail(T::real(0.5) - p, big_r, -quarter_pi, tol);
    let (t2, b2) = power_cos_tail(T::real(-0.5) - p, big_r, -T::real(3.0) * quarter_pi, tol);
    let (t3, b3) = power_cos_tail(T::real(-1.5) - p, big_r, -quarter_pi, tol);
    let bessel_tail = amp * (t1 + t2 / T::real(8.0) - t3 * T::real(9.0 / 128.0));
    // residual of the three-term asymptotics: next term is O(r^{-3}) inside the envelope
    let asym_residual =
        amp * T::real(75.0 / 1024.0) * big_r.powf(-T::real(1.5) - p) / (p + T::real(0.5));
    let value = near + mid + flat_tail - bessel_tail;
    let err = er1 + er2 + amp * (b1 + b2 + b3) + asym_residual;
    Ok((value, err))
}

/// c_{2,1} = ∫ ‖ξ‖^{−γ} e^{−2‖ξ‖^α} dξ, in closed form
/// S_{d−1} Γ((d−γ)/α) / (α 2^{(d−γ)/α}), cross-checked by radial quadrature.
pub fn c21<T: Scalar>(params: &ModelParams<T>) -> Result<ConstantReport<T>> {
    kernel_integral(params, T::real(2.0), ConstantName::C21)
}

fn kernel_integral<T: Scalar>(
    params: &ModelParams<T>,
    rate: T,
    name: ConstantName,
) -> Result<ConstantReport<T>> {
    params.validate()?;
    let d = T::usize(params.dim);
    let (alpha, gam) = (params.alpha, params.gamma);
    if d - gam >= alpha {
        return Err(Error::ParameterDomain(format!(
            "d − γ = {} must be < α = {alpha} for the kernel integral to be finite",
            d - gam
        )));
    }
    let s = unit_sphere_area::<T>(params.dim);
    let expo = (d - gam) / alpha;
    let closed = s * gamma(expo) / (alpha * rate.powf(expo));
    // quadrature cross-check of the radial integral ∫ r^{d−1−γ} e^{−rate·r^α} dr
    let f = |r: T| r.powf(d - T::one() - gam) * (-rate * r.powf(alpha)).exp();
    let upper = (T::real(700.0) / rate).powf(T::one() / alpha);
    let (q1, e1) = integrate(&f, T::real(1e-300), T::one(), T::real(1e-12))?;
    let (q2, e2) = integrate(&f, T::one(), upper, T::real(1e-12))?;
    let quad_value = s * (q1 + q2);
    let err = (closed - quad_value).abs() + s * (e1 + e2);
    ConstantReport::new(name, closed, Method::ClosedForm, err)
}

/// Temporal increment constant
/// c_{2,6} = [ α / ((2π)^d 2^{(d−γ)/α} (α−d+γ)) · ∫‖ξ‖^{−γ} e^{−‖ξ‖^α} dξ ]^{1/2}.
///
/// Reported with the bracket exactly as printed; the value is sensitive to
/// the Fourier convention (see module docs), so only its positivity and the
/// H/α temporal exponent are asserted downstream.
pub fn c26<T: Scalar>(params: &ModelParams<T>) -> Result<ConstantReport<T>> {
    let inner = kernel_integral(params, T::one(), ConstantName::C26)?;
    let d = T::usize(params.dim);
    let two_pi = T::real(2.0) * T::PI();
    let pref = params.alpha
        / (two_pi.powf(d)
            * T::real(2.0).powf((d - params.gamma) / params.alpha)
            * (params.alpha - d + params.gamma));
    let value = (pref * inner.value).sqrt();
    let err = if value > T::zero() {
        pref * inner.est_abs_error / (T::real(2.0) * value)
    } else {
        inner.est_abs_error
    };
    ConstantReport::new(ConstantName::C26, value, Method::ClosedForm, err)
}

/// Variation constant c_{1,4} = c_{α,γ,d}^{1/H} · E|N|^{1/H}.
pub fn c14<T: Scalar>(params: &ModelParams<T>) -> Result<ConstantReport<T>> {
    let c = c_alpha_gamma_d(params)?;
    let h = params.hurst()?;
    let q = T::one() / h;
    let moment = gaussian_abs_moment(q);
    let value = c.value.powf(q) * moment;
    // d/dc [c^q]·δc
    let err = q * c.value.powf(q - T::one()) * moment * c.est_abs_error;
    ConstantReport::new(ConstantName::C14, value, Method::Quadrature, err)
}

/// Pointwise variance of the linear solution at time t under the adopted
/// convention: (2π)^{−d} c_{2,1} t^{1−(d−γ)/α} / (1 − (d−γ)/α).
pub fn linear_variance<T: Scalar>(params: &ModelParams<T>, t: T) -> Result<T> {
    let c = c21(params)?;
    let d = T::usize(params.dim);
    let expo = T::one() - (d - params.gamma) / params.alpha;
    let two_pi = T::real(2.0) * T::PI();
    Ok(two_pi.powf(-d) * c.value * t.powf(expo) / expo)
}

/// Every named constant for one parameter set.
pub fn battery<T: Scalar>(params: &ModelParams<T>) -> Result<Vec<ConstantReport<T>>> {
    params.validate()?;
    let h = params.hurst()?;
    Ok(vec![
        ConstantReport::new(ConstantName::Hurst, h, Method::ClosedForm, T::zero())?,
        ConstantReport::new(
            ConstantName::C11,
            riesz_c11(params.dim, params.gamma)?,
            Method::ClosedForm,
            T::zero(),
        )?,
        c_alpha_gamma_d(params)?,
        c21(params)?,
        c26(params)?,
        c14(params)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;

    fn p(alpha: f64, gamma: f64, dim: usize) -> ModelParams<f64> {
        ModelParams::new(alpha, gamma, dim)
    }

    // Independent closed-form oracle for ∫‖w‖^{−(α+γ)}(1−cos(w·e))dw:
    // π^{d/2} Γ(1−H) / (2^{2H} H Γ(H + d/2)) with H = (α+γ−d)/2,
    // validated offline against 30-digit quadrature.
    fn integral_oracle(alpha: f64, gam: f64, dim: usize) -> f64 {
        let d = dim as f64;
        let h = (alpha + gam - d) / 2.0;
        std::f64::consts::PI.powf(d / 2.0) * gamma(1.0 - h)
            / (2f64.powf(2.0 * h) * h * gamma(h + d / 2.0))
    }

    fn oracle_c(alpha: f64, gam: f64, dim: usize) -> f64 {
        (2.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0)
            * integral_oracle(alpha, gam, dim).sqrt()
    }

    #[test]
    fn riesz_c11_values() {
        // γ = d − γ makes the Γ factors cancel
        assert!(
            (riesz_c11(1, 0.5f64).unwrap() - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12
        );
        assert!((riesz_c11(2, 1.0f64).unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        // golden value from the 30-digit gamma oracle
        assert!(
            ((riesz_c11(1, 0.2f64).unwrap() - 0.719533533794797) / 0.719533533794797).abs() < 1e-12
        );
        assert!(riesz_c11(1, 1.2f64).is_err());
        assert!(riesz_c11(1, 0.0f64).is_err());
    }

    #[test]
    fn c_agd_classical_value() {
        // α+γ = 2, d = 1: ∫ (1−cos w)/w² dw = π, c = 2^{−1/2}
        let r = c_alpha_gamma_d(&p(1.5, 0.5, 1)).unwrap();
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-9, "c = {}", r.value);
        assert!(r.est_abs_error < 1e-8);
    }

    #[test]
    fn c_agd_quadrature_matches_gamma_oracle_1d() {
        for (a, g) in [(2.0, 0.5), (1.2, 0.3), (1.9, 0.9), (1.5, 0.25)] {
            let r = c_alpha_gamma_d(&p(a, g, 1)).unwrap();
            let want = oracle_c(a, g, 1);
            assert!(
                (r.value - want).abs() < 1e-10,
                "({a},{g}): got {} want {want}",
                r.value
            );
        }
        // frozen golden value
        let r = c_alpha_gamma_d(&p(2.0, 0.5, 1)).unwrap();
        assert!((r.value - 0.729330542713825725).abs() < 1e-10);
    }

    #[test]
    fn c_agd_2d_and_rotation_invariance() {
        let params = p(1.5, 1.5, 2);
        let want = oracle_c(1.5, 1.5, 2);
        let axes: [[f64; 2]; 3] = [
            [1.0, 0.0],
            [
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ],
            [0.6, 0.8],
        ];
        let mut vals = Vec::new();
        for e in axes {
            let r = c_alpha_gamma_d_dir(&params, &e).unwrap();
            assert!(
                (r.value - want).abs() < 1e-9,
                "e={e:?}: {} vs {want}",
                r.value
            );
            vals.push(r.value);
        }
        for w in vals.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-9);
        }
        // golden: H = 0.5 in d = 2 gives exactly (2π)^{−1/2}
        assert!((vals[0] - 0.398942280401432678f64).abs() < 1e-9);
    }

    #[test]
    fn rotation_invariance_random_directions() {
        let params = p(1.7, 1.1, 2);
        let base = c_alpha_gamma_d(&params).unwrap().value;
        let s = crate::rng::Stream::root(11);
        for i in 0..3u64 {
            let th = 2.0 * std::f64::consts::PI * s.uniform(i, 0, 0);
            let r = c_alpha_gamma_d_dir(&params, &[th.cos(), th.sin()]).unwrap();
            assert!(
                (r.value - base).abs() < 1e-9,
                "theta {th}: {} vs {base}",
                r.value
            );
        }
    }

    #[test]
    fn c21_closed_form_values_and_quadrature_agreement() {
        // 2 Γ(1/4)/(2·2^{1/4})
        let r = c21(&p(2.0, 0.5, 1)).unwrap();
        let want = 2.0 * gamma(0.25f64) / (2.0 * 2f64.powf(0.25));
        assert!((r.value - want).abs() < 1e-12);
        assert!((r.value - 3.04876237493215169).abs() < 1e-10);
        assert!(
            r.est_abs_error < 1e-9,
            "cross-check gap {}",
            r.est_abs_error
        );

        let r = c21(&p(1.5, 0.5, 1)).unwrap();
        let want = 2.0 * gamma(1.0f64 / 3.0) / (1.5 * 2f64.powf(1.0 / 3.0));
        assert!((r.value - want).abs() < 1e-12);
        assert!((r.value - 2.83503323210215030).abs() < 1e-10);
    }

    #[test]
    fn c21_closed_vs_quadrature_sweep() {
        for (a, g, d) in [
            (1.5, 0.5, 1),
            (2.0, 0.5, 1),
            (1.2, 0.9, 1),
            (1.5, 1.5, 2),
            (1.9, 1.2, 2),
        ] {
            let r = c21(&p(a, g, d)).unwrap();
            assert!(
                r.est_abs_error < 1e-9,
                "closed vs quadrature differ by {} at ({a},{g},{d})",
                r.est_abs_error
            );
        }
    }

    #[test]
    fn c21_near_gamma_equals_d_stays_finite() {
        let r = c21(&p(2.0, 1.999, 2)).unwrap();
        assert!(r.value.is_finite() && r.value > 0.0);
        assert!((r.value - 6279.19690261480463).abs() / 6279.2 < 1e-10);
    }

    #[test]
    fn c21_rejects_slow_kernel() {
        // d − γ ≥ α can only happen outside admissibility; the dedicated check
        // still fires first on the params gate.
        assert!(c21(&p(1.2, 0.5, 2)).is_err());
    }

    #[test]
    fn c26_golden_values_and_positivity() {
        let r = c26(&p(1.5, 0.5, 1)).unwrap();
        assert!((r.value - 0.822687260797366880).abs() < 1e-10);
        let r = c26(&p(2.0, 0.5, 1)).unwrap();
        assert!((r.value - 0.804342880686288972).abs() < 1e-10);
        for (a, g, d) in [(1.7, 0.3, 1), (1.5, 1.8, 2), (1.1, 0.2, 1)] {
            assert!(c26(&p(a, g, d)).unwrap().value > 0.0);
        }
    }

    #[test]
    fn c14_values() {
        // H = 1/2, c² = 1/2, E N² = 1 → 0.5 exactly
        let r = c14(&p(1.5, 0.5, 1)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9, "c14 = {}", r.value);
        // H = 3/4 golden value
        let r = c14(&p(2.0, 0.5, 1)).unwrap();
        assert!((r.value - 0.545457439844317475).abs() < 1e-9);
    }

    #[test]
    fn battery_finite_positive_on_sweep() {
        let mut count = 0;
        for a in [1.2, 1.5, 1.8, 2.0] {
            for g in [0.2, 0.5, 0.8] {
                let params = p(a, g, 1);
                for rep in battery(&params).unwrap() {
                    assert!(rep.value.is_finite() && rep.value > 0.0, "{:?}", rep);
                    if rep.method == Method::Quadrature {
                        assert!(rep.est_abs_error < 1e-8);
                    }
                    count += 1;
                }
            }
            for g in [1.2, 1.5, 1.9] {
                if g > 2.0 - a {
                    let params = p(a, g, 2);
                    for rep in battery(&params).unwrap() {
                        assert!(rep.value.is_finite() && rep.value > 0.0, "{:?}", rep);
                        count += 1;
                    }
                }
            }
        }
        assert!(count >= 20 * 6, "sweep covered {count} reports");
    }

    #[test]
    fn linear_variance_value() {
        // (2π)^{−1}·c21·t^{2/3}·(3/2) at t = 1
        let v = linear_variance(&p(1.5, 0.5, 1), 1.0).unwrap();
        let want = 2.83503323210215 / (2.0 * std::f64::consts::PI) * 1.5;
        assert!((v - want).abs() < 1e-10);
    }
}
