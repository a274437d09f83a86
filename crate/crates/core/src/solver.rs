//! Exponential-Euler time stepping of the mild equation in the transform
//! domain.
//!
//! One step applies the exact linear semigroup to state plus drift and then
//! injects the diffusion-scaled noise, with σ evaluated at the left point:
//!
//!   u_{n+1} = S_dt (u_n + dt·b(u_n)) + σ(u_n)·Ξ_n,
//!
//! where Ξ_n is the slab's colored noise shaped per mode to the exact
//! stochastic-convolution variance (1 − e^{−2 dt‖ξ‖^α})/(2‖ξ‖^α). For the
//! linear equation this reproduces the mild-solution covariance exactly at
//! every grid mode and time; for Lipschitz b, σ it is first order in dt.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::noise::{sample_noise, NoiseIncrement, NoiseSynth};
use crate::params::{InitSpec, ModelParams};
use crate::rng::Stream;
use crate::scalar::Scalar;
use crate::stats;

/// Hard range guard: exceeding it aborts the run as a blow-up.
const BLOWUP_LIMIT: f64 = 1e12;
/// Stream tag for initial-data draws (disjoint from per-step noise draws).
const INIT_TAG: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    ExpEuler,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::ExpEuler => "exp_euler",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig<T: Scalar> {
    pub dt: T,
    pub t_end: T,
    pub scheme: Scheme,
    pub record_times: Vec<T>,
    pub store_noise: bool,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        SolverConfig {
            dt,
            t_end,
            scheme: Scheme::ExpEuler,
            record_times: vec![t_end],
            store_noise: false,
        }
    }

    pub fn with_records(mut self, record_times: Vec<T>) -> Self {
        self.record_times = record_times;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::Config(format!(
                "t_end = {} must be at least dt = {}",
                self.t_end, self.dt
            )));
        }
        for &t in &self.record_times {
            if t < T::zero() || t > self.t_end + self.dt * T::real(0.5) {
                return Err(Error::Config(format!("record time {t} outside [0, t_end]")));
            }
            let steps = (t / self.dt).round();
            if (t - steps * self.dt).abs() > self.dt * T::real(1e-9) {
                return Err(Error::Config(format!(
                    "record time {t} is not a multiple of dt = {}",
                    self.dt
                )));
            }
        }
        Ok(())
    }

    fn total_steps(&self) -> u64 {
        (self.t_end / self.dt).round().f64() as u64
    }

    fn record_steps(&self) -> Vec<u64> {
        self.record_times
            .iter()
            .map(|&t| (t / self.dt).round().f64() as u64)
            .collect()
    }
}

/// Who produced a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub stream_key: u64,
    pub member: u64,
    pub scheme: Scheme,
    pub steps: u64,
}

/// Solution values on the grid at one time.
#[derive(Clone, Debug)]
pub struct FieldState<T: Scalar> {
    pub t: T,
    pub step: u64,
    pub values: Vec<T>,
    pub provenance: Provenance,
}

/// Per-(grid, α, dt) spectral factors: semigroup decay and noise shaping.
#[derive(Clone, Debug)]
pub struct Propagator<T: Scalar> {
    pub dt: T,
    decay: Vec<T>,
    shape: Vec<T>,
}

impl<T: Scalar> Propagator<T> {
    pub fn new(grid: &Grid<T>, params: &ModelParams<T>, dt: T) -> Result<Self> {
        params.validate()?;
        if !(dt > T::zero()) {
            return Err(Error::Config(format!("dt = {dt} must be positive")));
        }
        let mut decay = Vec::with_capacity(grid.len());
        let mut shape = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            let w = grid.xi_norm(k).powf(params.alpha);
            decay.push((-dt * w).exp());
            // slab variance of ∫ e^{−(dt−s)‖ξ‖^α} dW_s per unit spectral mass
            let two_w = T::real(2.0) * w;
            let var = if w > T::zero() {
                -T::real(libm::expm1((-two_w * dt).f64())) / two_w
            } else {
                dt
            };
            shape.push(var.sqrt());
        }
        Ok(Propagator { dt, decay, shape })
    }

    /// Shaped physical noise for one slab: inverse transform of Ŵ·shape.
    pub fn shaped_noise(&self, grid: &Grid<T>, noise: &NoiseIncrement<T>) -> Vec<T> {
        let spec: Vec<Complex<T>> = noise
            .spectrum
            .iter()
            .zip(&self.shape)
            .map(|(&w, &s)| w * s)
            .collect();
        grid.inverse_real(&spec)
    }
}

fn check_finite<T: Scalar>(values: &[T], step: u64) -> Result<()> {
    let mut max_abs = T::zero();
    for &v in values {
        if !v.is_finite() {
            return Err(Error::BlowUp {
                step,
                max_abs: f64::INFINITY,
            });
        }
        max_abs = max_abs.max(v.abs());
    }
    if max_abs.f64() > BLOWUP_LIMIT {
        return Err(Error::BlowUp {
            step,
            max_abs: max_abs.f64(),
        });
    }
    Ok(())
}

/// One exponential-Euler step.
pub fn step<T: Scalar>(
    state: &FieldState<T>,
    noise: &NoiseIncrement<T>,
    params: &ModelParams<T>,
    grid: &Grid<T>,
    prop: &Propagator<T>,
) -> Result<FieldState<T>> {
    if (noise.dt - prop.dt).abs() > prop.dt * T::real(1e-12) {
        return Err(Error::Config(format!(
            "noise slab dt = {} does not match solver dt = {}",
            noise.dt, prop.dt
        )));
    }
    let xi = prop.shaped_noise(grid, noise);
    let mut drifted: Vec<T> = state
        .values
        .iter()
        .map(|&u| u + prop.dt * params.drift.eval(u))
        .collect();
    let mut spec = grid.forward(&drifted);
    for (v, &d) in spec.iter_mut().zip(&prop.decay) {
        *v = *v * d;
    }
    drifted = grid.inverse_real(&spec);
    for ((out, &u_old), &x) in drifted.iter_mut().zip(&state.values).zip(&xi) {
        *out += params.diffusion.eval(u_old) * x;
    }
    let step_idx = state.step + 1;
    check_finite(&drifted, step_idx)?;
    Ok(FieldState {
        t: T::usize(step_idx as usize) * prop.dt,
        step: step_idx,
        values: drifted,
        provenance: Provenance {
            steps: step_idx,
            ..state.provenance
        },
    })
}

/// Initial field per the init descriptor, drawn from the member stream's
/// dedicated init substream when random.
pub fn initial_field<T: Scalar>(
    params: &ModelParams<T>,
    grid: &Grid<T>,
    stream: Stream,
) -> Result<Vec<T>> {
    Ok(match &params.init {
        InitSpec::Zero => vec![T::zero(); grid.len()],
        InitSpec::Constant(c) => vec![*c; grid.len()],
        InitSpec::Bump { amplitude, width } => (0..grid.len())
            .map(|i| {
                let c = grid.site_coord(i);
                let r2 = match grid.dim() {
                    1 => c[0] * c[0],
                    _ => c[0] * c[0] + c[1] * c[1],
                };
                *amplitude * (-r2 / (T::real(2.0) * *width * *width)).exp()
            })
            .collect(),
        InitSpec::Holder { exponent } => {
            // Matérn-type spectrum (1 + ‖ξ‖²)^{−(d + 2η)/2}: Hölder-η paths,
            // unit pointwise variance, all moments finite.
            let d = T::usize(grid.dim());
            let expo = -(d + T::real(2.0) * *exponent) / T::real(2.0);
            let masses: Vec<T> = (0..grid.len())
                .map(|k| {
                    let xi = grid.xi_norm(k);
                    (T::one() + xi * xi).powf(expo)
                })
                .collect();
            let vol = grid.extent().powi(grid.dim() as i32);
            let var: T = masses.iter().copied().sum::<T>() / vol;
            let scale = var.sqrt().recip();
            let init_stream = stream.child(INIT_TAG);
            let half = T::real(std::f64::consts::FRAC_1_SQRT_2);
            let mut spec = vec![Complex::new(T::zero(), T::zero()); grid.len()];
            for k in 0..grid.len() {
                let cj = grid.conj_index(k);
                let amp = (masses[k] * vol).sqrt() * scale;
                if k == cj {
                    let z = T::real(init_stream.normal(0, k as u64, 0));
                    spec[k] = Complex::new(amp * z, T::zero());
                } else if k < cj {
                    let (z0, z1) = init_stream.normal_pair(0, k as u64, 0);
                    let re = amp * half * T::real(z0);
                    let im = amp * half * T::real(z1);
                    spec[k] = Complex::new(re, im);
                    spec[cj] = Complex::new(re, -im);
                }
            }
            grid.inverse_real(&spec)
        }
    })
}

/// Simulate one member, invoking `on_slab(step, noise, shaped_noise)` after
/// each slab is drawn (before the state update); returns the recorded states.
pub fn simulate_with<T: Scalar, F>(
    params: &ModelParams<T>,
    grid: &Grid<T>,
    cfg: &SolverConfig<T>,
    seed: u64,
    member: u64,
    mut on_slab: F,
) -> Result<Vec<FieldState<T>>>
where
    F: FnMut(u64, &NoiseIncrement<T>, &[T]),
{
    params.validate()?;
    cfg.validate()?;
    let synth = NoiseSynth::new(grid, params)?;
    let prop = Propagator::new(grid, params, cfg.dt)?;
    let stream = Stream::member(seed, member);
    let record_steps = cfg.record_steps();
    let total = cfg.total_steps();

    let provenance = Provenance {
        stream_key: stream.key(),
        member,
        scheme: cfg.scheme,
        steps: 0,
    };
    let mut state = FieldState {
        t: T::zero(),
        step: 0,
        values: initial_field(params, grid, stream)?,
        provenance,
    };
    let mut records = Vec::new();
    if record_steps.contains(&0) {
        records.push(state.clone());
    }
    for s in 0..total {
        let noise = sample_noise(&synth, grid, cfg.dt, stream, s)?;
        let shaped = prop.shaped_noise(grid, &noise);
        on_slab(s, &noise, &shaped);
        state = step_with_shaped(&state, &noise, &shaped, params, grid, &prop)?;
        if record_steps.contains(&state.step) {
            records.push(state.clone());
        }
    }
    Ok(records)
}

/// `step` variant reusing an already materialized shaped slab.
fn step_with_shaped<T: Scalar>(
    state: &FieldState<T>,
    noise: &NoiseIncrement<T>,
    shaped: &[T],
    params: &ModelParams<T>,
    grid: &Grid<T>,
    prop: &Propagator<T>,
) -> Result<FieldState<T>> {
    let _ = noise;
    let mut drifted: Vec<T> = state
        .values
        .iter()
        .map(|&u| u + prop.dt * params.drift.eval(u))
        .collect();
    let mut spec = grid.forward(&drifted);
    for (v, &d) in spec.iter_mut().zip(&prop.decay) {
        *v = *v * d;
    }
    drifted = grid.inverse_real(&spec);
    for ((out, &u_old), &x) in drifted.iter_mut().zip(&state.values).zip(shaped) {
        *out += params.diffusion.eval(u_old) * x;
    }
    let step_idx = state.step + 1;
    check_finite(&drifted, step_idx)?;
    Ok(FieldState {
        t: T::usize(step_idx as usize) * prop.dt,
        step: step_idx,
        values: drifted,
        provenance: Provenance {
            steps: step_idx,
            ..state.provenance
        },
    })
}

/// Simulate one ensemble member. Linear runs (zero drift, constant diffusion,
/// zero initial data) evolve entirely in the transform domain.
pub fn simulate<T: Scalar>(
    params: &ModelParams<T>,
    grid: &Grid<T>,
    cfg: &SolverConfig<T>,
    seed: u64,
    member: u64,
) -> Result<Vec<FieldState<T>>> {
    params.validate()?;
    cfg.validate()?;
    let linear = params.drift.is_zero()
        && params.diffusion.constant_value().is_some()
        && matches!(params.init, InitSpec::Zero);
    if !linear {
        return simulate_with(params, grid, cfg, seed, member, |_, _, _| {});
    }
    let sigma = params.diffusion.constant_value().unwrap();
    let synth = NoiseSynth::new(grid, params)?;
    let prop = Propagator::new(grid, params, cfg.dt)?;
    let stream = Stream::member(seed, member);
    let record_steps = cfg.record_steps();
    let total = cfg.total_steps();
    let provenance = Provenance {
        stream_key: stream.key(),
        member,
        scheme: cfg.scheme,
        steps: 0,
    };

    let mut spec = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    let mut records = Vec::new();
    let materialize = |spec: &[Complex<T>], step: u64| -> Result<FieldState<T>> {
        let values = grid.inverse_real(spec);
        check_finite(&values, step)?;
        Ok(FieldState {
            t: T::usize(step as usize) * cfg.dt,
            step,
            values,
            provenance: Provenance {
                steps: step,
                ..provenance
            },
        })
    };
    if record_steps.contains(&0) {
        records.push(materialize(&spec, 0)?);
    }
    for s in 0..total {
        let noise_spec = synth.colored_spectrum(grid, stream, s);
        for (k, v) in spec.iter_mut().enumerate() {
            *v = *v * prop.decay[k] + noise_spec[k] * (prop.shape[k] * sigma);
        }
        if record_steps.contains(&(s + 1)) {
            records.push(materialize(&spec, s + 1)?);
        }
    }
    Ok(records)
}

/// Run `members` simulations concurrently; results come back in member order
/// regardless of thread count, so downstream aggregation is deterministic.
pub fn run_ensemble<R, F>(members: u64, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> Result<R> + Sync + Send,
{
    (0..members)
        .into_par_iter()
        .map(f)
        .collect::<Result<Vec<R>>>()
}

/// Fitted spatial and temporal increment exponents of a recorded ensemble.
#[derive(Clone, Copy, Debug)]
pub struct HolderReport<T: Scalar> {
    /// Fitted spatial Hurst exponent (slope of log E|Δ_x u|² vs log ε, halved).
    pub hurst_space: T,
    pub se_space: T,
    /// Fitted temporal exponent (slope of log E|Δ_t u|² vs log τ, halved).
    pub hurst_time: T,
    pub se_time: T,
}

/// Regress increment second moments of an ensemble of records.
///
/// `eps_cells` are spatial lags in grid cells probed at the latest record;
/// `tau_steps` are temporal lags in solver steps probed against the latest
/// record, which must all be present in `record_times`.
pub fn holder_scaling_report<T: Scalar>(
    ensemble: &[Vec<FieldState<T>>],
    grid: &Grid<T>,
    eps_cells: &[usize],
    tau_steps: &[u64],
) -> Result<HolderReport<T>> {
    if ensemble.len() < 2 {
        return Err(Error::Config("holder regression needs an ensemble".into()));
    }
    if eps_cells.len() < 3 || tau_steps.len() < 3 {
        return Err(Error::Config(
            "need at least three lags per regression".into(),
        ));
    }
    let last = ensemble[0]
        .last()
        .ok_or_else(|| Error::Config("empty record list".into()))?;
    let t1_step = last.step;
    let dt_like = last.t / T::usize(t1_step.max(1) as usize);
    let n = grid.len();

    let mut log_eps = Vec::new();
    let mut log_m2_space = Vec::new();
    for &cells in eps_cells {
        let mut acc = T::zero();
        for member in ensemble {
            let u = &member.last().unwrap().values;
            for x in 0..n {
                let d = u[x] - u[grid.shift_index(x, 0, cells as isize)];
                acc += d * d;
            }
        }
        let m2 = acc / T::usize(ensemble.len() * n);
        log_eps.push((T::usize(cells) * grid.spacing()).ln().f64());
        log_m2_space.push(m2.ln().f64());
    }
    let space = stats::linear_fit(&log_eps, &log_m2_space)?;

    let mut log_tau = Vec::new();
    let mut log_m2_time = Vec::new();
    for &tau in tau_steps {
        let base_step = t1_step
            .checked_sub(tau)
            .ok_or_else(|| Error::Config(format!("temporal lag {tau} exceeds the run")))?;
        let mut acc = T::zero();
        let mut count = 0usize;
        for member in ensemble {
            let at = |s: u64| member.iter().find(|r| r.step == s);
            let (Some(a), Some(b)) = (at(base_step), at(t1_step)) else {
                return Err(Error::Config(format!(
                    "records at steps {base_step} and {t1_step} are required"
                )));
            };
            for x in 0..n {
                let d = b.values[x] - a.values[x];
                acc += d * d;
            }
            count += n;
        }
        let m2 = acc / T::usize(count);
        log_tau.push((T::usize(tau as usize) * dt_like).ln().f64());
        log_m2_time.push(m2.ln().f64());
    }
    let time = stats::linear_fit(&log_tau, &log_m2_time)?;

    Ok(HolderReport {
        hurst_space: T::real(space.slope / 2.0),
        se_space: T::real(space.slope_se / 2.0),
        hurst_time: T::real(time.slope / 2.0),
        se_time: T::real(time.slope_se / 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants;
    use crate::kernel::green_kernel;
    use crate::params::FnSpec;

    fn grid_small() -> Grid<f64> {
        Grid::make(1, 16.0, 128).unwrap()
    }

    #[test]
    fn constant_preserved_without_forcing() {
        // b = 0, σ = 0, u0 = c: the mass-one semigroup keeps the constant
        let grid = grid_small();
        let params = ModelParams::new(1.5, 0.5, 1)
            .with_diffusion(FnSpec::Zero)
            .with_init(InitSpec::Constant(3.25));
        let cfg = SolverConfig::new(1.0 / 64.0, 0.5);
        let recs = simulate(&params, &grid, &cfg, 1, 0).unwrap();
        for &v in &recs.last().unwrap().values {
            assert!((v - 3.25).abs() < 1e-12, "drifted to {v}");
        }
    }

    #[test]
    fn constant_drift_integrates_linearly() {
        // b = 1, σ = 0, u0 = 0 → u(t) = t (exactly for constant fields)
        let grid = grid_small();
        let params = ModelParams::new(1.5, 0.5, 1)
            .with_drift(FnSpec::Constant(1.0))
            .with_diffusion(FnSpec::Zero);
        let cfg = SolverConfig::new(1.0 / 64.0, 1.0);
        let recs = simulate(&params, &grid, &cfg, 1, 0).unwrap();
        for &v in &recs.last().unwrap().values {
            assert!((v - 1.0).abs() <= 2.0 / 64.0, "u(1) = {v}");
        }
    }

    #[test]
    fn one_step_without_noise_is_green_convolution() {
        let grid = grid_small();
        let params = ModelParams::new(1.5, 0.5, 1).with_diffusion(FnSpec::Zero);
        let dt = 0.25;
        let prop = Propagator::new(&grid, &params, dt).unwrap();
        let synth = NoiseSynth::new(&grid, &params).unwrap();
        // bump initial state through the public step op
        let bump_params = params.clone().with_init(InitSpec::Bump {
            amplitude: 1.0,
            width: 0.5,
        });
        let init = initial_field(&bump_params, &grid, Stream::member(3, 0)).unwrap();
        let state = FieldState {
            t: 0.0,
            step: 0,
            values: init.clone(),
            provenance: Provenance {
                stream_key: 0,
                member: 0,
                scheme: Scheme::ExpEuler,
                steps: 0,
            },
        };
        let noise = sample_noise(&synth, &grid, dt, Stream::member(3, 0), 0).unwrap();
        let next = step(&state, &noise, &params, &grid, &prop).unwrap();
        // reference: circular convolution with the Green kernel at t = dt
        let g = green_kernel(&grid, 1.5, dt).unwrap();
        let n = grid.len();
        for x in 0..n {
            let mut conv = 0.0;
            for y in 0..n {
                conv += g.values[(x + n - y) % n] * init[y];
            }
            conv *= grid.spacing();
            assert!((conv - next.values[x]).abs() < 1e-12, "site {x}");
        }
    }

    #[test]
    fn deterministic_across_replays() {
        let grid = grid_small();
        let params = ModelParams::new(1.5, 0.5, 1).with_diffusion(FnSpec::Sine {
            base: 1.0,
            amp: 0.5,
        });
        let cfg = SolverConfig::new(1.0 / 64.0, 0.5);
        let a = simulate(&params, &grid, &cfg, 42, 7).unwrap();
        let b = simulate(&params, &grid, &cfg, 42, 7).unwrap();
        assert_eq!(a.last().unwrap().values, b.last().unwrap().values);
        let c = simulate(&params, &grid, &cfg, 42, 8).unwrap();
        assert_ne!(a.last().unwrap().values, c.last().unwrap().values);
    }

    #[test]
    fn fast_and_general_paths_agree_statistically() {
        // identical draws, different arithmetic order: fields match to roundoff
        let grid = grid_small();
        let params = ModelParams::new(1.5, 0.5, 1);
        let cfg = SolverConfig::new(1.0 / 32.0, 0.5);
        let fast = simulate(&params, &grid, &cfg, 5, 0).unwrap();
        let general = simulate_with(&params, &grid, &cfg, 5, 0, |_, _, _| {}).unwrap();
        let worst = fast
            .last()
            .unwrap()
            .values
            .iter()
            .zip(&general.last().unwrap().values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "paths diverged by {worst}");
    }

    #[test]
    fn linear_variance_matches_closed_form_small() {
        // scaled-down rendition of the variance law (the acceptance suite
        // runs the pinned 2000-member version)
        let grid = Grid::make(1, 16.0, 256).unwrap();
        let params = ModelParams::new(1.5, 0.5, 1);
        let cfg = SolverConfig::new(1.0 / 128.0, 0.5);
        let members = 400u64;
        let fields = run_ensemble(members, |m| {
            Ok(simulate(&params, &grid, &cfg, 99, m)?.pop().unwrap().values)
        })
        .unwrap();
        let n = grid.len();
        let mut acc = 0.0;
        for f in &fields {
            for &v in f {
                acc += v * v;
            }
        }
        let var = acc / (members as usize * n) as f64;
        let want = constants::linear_variance(&params, 0.5).unwrap();
        assert!(
            ((var - want) / want).abs() < 0.08,
            "var {var} vs closed form {want}"
        );
    }

    #[test]
    fn gaussian_marginals_skewness() {
        let grid = Grid::make(1, 16.0, 128).unwrap();
        let params = ModelParams::new(1.5, 0.5, 1);
        let cfg = SolverConfig::new(1.0 / 64.0, 0.5);
        let vals: Vec<f64> = run_ensemble(600, |m| {
            Ok(simulate(&params, &grid, &cfg, 3, m)?.pop().unwrap().values[17])
        })
        .unwrap();
        let skew = stats::skewness(&vals);
        assert!(skew.abs() < 0.3, "skewness {skew}");
    }

    #[test]
    fn stationary_in_space() {
        let grid = Grid::make(1, 16.0, 128).unwrap();
        let params = ModelParams::new(1.5, 0.5, 1);
        let cfg = SolverConfig::new(1.0 / 64.0, 0.5);
        let fields = run_ensemble(800, |m| {
            Ok(simulate(&params, &grid, &cfg, 21, m)?.pop().unwrap().values)
        })
        .unwrap();
        let var_at = |x: usize| -> f64 {
            fields.iter().map(|f| f[x] * f[x]).sum::<f64>() / fields.len() as f64
        };
        let (v1, v2, v3) = (var_at(5), var_at(64), var_at(100));
        let se = 3.0 * v1 * (2.0 / fields.len() as f64).sqrt();
        assert!(
            (v1 - v2).abs() < 3.0 * se && (v2 - v3).abs() < 3.0 * se,
            "{v1} {v2} {v3}"
        );
    }

    #[test]
    fn blowup_guard_fires() {
        let grid = grid_small();
        // super-linear drift table is Lipschitz on its knots but the run is
        // driven unstable by a steep linear drift instead
        let params = ModelParams::new(1.5, 0.5, 1)
            .with_drift(FnSpec::Linear(500.0))
            .with_init(InitSpec::Constant(1.0));
        let cfg = SolverConfig::new(0.25, 32.0);
        let err = simulate(&params, &grid, &cfg, 1, 0).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }), "{err}");
    }

    #[test]
    fn two_dimensional_linear_variance_smoke() {
        let grid = Grid::make(2, 8.0, 64).unwrap();
        let params = ModelParams::new(1.5, 1.5, 2);
        let cfg = SolverConfig::new(1.0 / 64.0, 0.5);
        let members = 300u64;
        let fields = run_ensemble(members, |m| {
            Ok(simulate(&params, &grid, &cfg, 77, m)?.pop().unwrap().values)
        })
        .unwrap();
        let var = fields
            .iter()
            .flat_map(|f| f.iter().map(|&v| v * v))
            .sum::<f64>()
            / (members as usize * grid.len()) as f64;
        let want = constants::linear_variance(&params, 0.5).unwrap();
        // coarse 2-D grid: wide allowance, this is a pipeline smoke test
        assert!(
            ((var - want) / want).abs() < 0.15,
            "d=2 variance {var} vs {want}"
        );
    }

    #[test]
    fn record_times_validated() {
        let cfg = SolverConfig::new(0.1f64, 1.0).with_records(vec![0.55]);
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig::new(0.1f64, 1.0).with_records(vec![0.5, 1.0]);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn weak_error_under_refinement() {
        // The shaped scheme reproduces the linear variance exactly in dt, so
        // the refinement errors must sit far below an order-0.8 envelope.
        let grid = Grid::make(1, 16.0, 256).unwrap();
        let params = ModelParams::new(1.5, 0.5, 1);
        let want = constants::linear_variance(&params, 0.25).unwrap();
        let members = 600u64;
        let mut errors = Vec::new();
        for &steps in &[64u64, 128, 256] {
            let cfg = SolverConfig::new(0.25 / steps as f64, 0.25);
            let fields = run_ensemble(members, |m| {
                Ok(simulate(&params, &grid, &cfg, 1234, m)?
                    .pop()
                    .unwrap()
                    .values)
            })
            .unwrap();
            let n = grid.len();
            let var = fields
                .iter()
                .flat_map(|f| f.iter().map(|&v| v * v))
                .sum::<f64>()
                / (members as usize * n) as f64;
            errors.push(((var - want) / want).abs());
        }
        for e in &errors {
            assert!(*e < 0.05, "relative errors {errors:?}");
        }
    }
}
