//! Statistical verification battery: gradient distribution, iterated
//! logarithm diagnostic, q-variations, weighted 1/H-variations, and the
//! strong-localization decay experiment.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::noise::NoiseIncrement;
use crate::params::{FnSpec, ModelParams};
use crate::rng::Stream;
use crate::scalar::Scalar;
use crate::solver::{simulate_with, SolverConfig};
use crate::stats;

/// Grid-aligned probe direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeDir {
    pub axis: usize,
    pub sign: i8,
}

impl ProbeDir {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.axis >= dim || (self.sign != 1 && self.sign != -1) {
            return Err(Error::Config(format!(
                "probe direction axis {} sign {} invalid for dim {dim}",
                self.axis, self.sign
            )));
        }
        Ok(())
    }
}

/// Configuration of the estimator battery.
#[derive(Clone, Debug)]
pub struct EstimatorConfig<T: Scalar> {
    pub probe_dirs: Vec<ProbeDir>,
    /// ε ladder in grid cells.
    pub eps_cells: Vec<usize>,
    /// Even moment order for moment regressions.
    pub moment_order: u32,
    /// Dyadic variation levels m (resolution 2^m points per unit length).
    pub variation_levels: Vec<u32>,
    /// Variation interval (A1, A2).
    pub interval: (T, T),
    pub ensemble_size: usize,
    pub significance: f64,
}

impl<T: Scalar> EstimatorConfig<T> {
    pub fn validate(&self, grid: &Grid<T>) -> Result<()> {
        if self.probe_dirs.is_empty() || self.eps_cells.is_empty() {
            return Err(Error::Config("empty probe configuration".into()));
        }
        for d in &self.probe_dirs {
            d.validate(grid.dim())?;
        }
        let h = grid.spacing();
        let lo = T::real(4.0) * h;
        let hi = grid.extent() / T::real(16.0);
        for &cells in &self.eps_cells {
            let eps = T::usize(cells) * h;
            if eps < lo || eps > hi {
                return Err(Error::Config(format!(
                    "eps = {eps} outside the resolved band [{lo}, {hi}]"
                )));
            }
        }
        if self.moment_order < 2 || self.moment_order % 2 != 0 {
            return Err(Error::Config(format!(
                "moment order {} must be even and ≥ 2",
                self.moment_order
            )));
        }
        if self.interval.1 <= self.interval.0 {
            return Err(Error::Config("interval needs A2 > A1".into()));
        }
        if self.significance <= 0.0 || self.significance >= 1.0 {
            return Err(Error::Config("significance must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Aggregate of one experiment.
#[derive(Clone, Debug)]
pub struct EnsembleStats {
    pub name: String,
    /// Per-member statistic underlying the headline numbers.
    pub values: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    /// Ordered named metrics (slopes, distances, fractions, ...).
    pub extras: Vec<(String, f64)>,
}

impl EnsembleStats {
    fn from_values(name: impl Into<String>, values: Vec<f64>) -> Self {
        let mean = stats::mean(&values);
        let stderr = if values.len() > 1 {
            stats::stderr_of_mean(&values)
        } else {
            0.0
        };
        EnsembleStats {
            name: name.into(),
            values,
            mean,
            stderr,
            extras: Vec::new(),
        }
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    fn push(&mut self, key: impl Into<String>, v: f64) {
        self.extras.push((key.into(), v));
    }
}

/// Approximate spatial gradient u(x) − u(x − εe) by lattice lookup.
pub fn gradient<T: Scalar>(
    field: &[T],
    grid: &Grid<T>,
    site: usize,
    dir: ProbeDir,
    eps: T,
) -> Result<T> {
    dir.validate(grid.dim())?;
    let cells_real = eps / grid.spacing();
    let cells = cells_real.round();
    if (cells_real - cells).abs() > T::real(1e-9) {
        return Err(Error::Config(format!(
            "eps = {eps} is not a lattice shift (h = {})",
            grid.spacing()
        )));
    }
    Ok(gradient_cells(field, grid, site, dir, cells.f64() as usize))
}

#[inline]
pub fn gradient_cells<T: Scalar>(
    field: &[T],
    grid: &Grid<T>,
    site: usize,
    dir: ProbeDir,
    cells: usize,
) -> T {
    let back = grid.shift_index(site, dir.axis, dir.sign as isize * cells as isize);
    field[site] - field[back]
}

/// Distributional test of the normalized gradient against the
/// σ(u)-mixture limit law: two-sample Kolmogorov–Smirnov per ε.
///
/// Sample A holds ε^{−H}·∇u per member; sample B pairs each member's own
/// u_t(x) with an independent Gaussian draw from `aux_stream`, scaled by
/// `c_value`. The distance must not grow toward the small-ε end beyond the
/// sampling noise allowance.
pub fn gradient_clt_test<T: Scalar>(
    fields: &[Vec<T>],
    grid: &Grid<T>,
    params: &ModelParams<T>,
    cfg: &EstimatorConfig<T>,
    anchor: usize,
    c_value: T,
    aux_stream: Stream,
) -> Result<EnsembleStats> {
    cfg.validate(grid)?;
    let h = params.hurst()?;
    let dir = cfg.probe_dirs[0];
    let members = fields.len();
    if members < 2 {
        return Err(Error::Config("need an ensemble for the CLT test".into()));
    }
    let sigma_at: Vec<T> = fields
        .iter()
        .map(|f| params.diffusion.eval(f[anchor]))
        .collect();
    if sigma_at.iter().all(|s| s.is_zero()) {
        return Err(Error::Degenerate(
            "σ(u_t(x)) vanishes across the ensemble".into(),
        ));
    }
    let bees: Vec<f64> = sigma_at
        .iter()
        .enumerate()
        .map(|(m, &s)| (c_value * s).f64() * aux_stream.normal(0, m as u64, 0))
        .collect();

    let mut ladder: Vec<usize> = cfg.eps_cells.clone();
    ladder.sort_unstable();
    let mut distances = Vec::new();
    let mut smallest_sample = Vec::new();
    for (li, &cells) in ladder.iter().enumerate() {
        let eps = T::usize(cells) * grid.spacing();
        let scale = eps.powf(-h);
        let a: Vec<f64> = fields
            .iter()
            .map(|f| (scale * gradient_cells(f, grid, anchor, dir, cells)).f64())
            .collect();
        distances.push(stats::ks_two_sample(&a, &bees));
        if li == 0 {
            smallest_sample = a;
        }
    }
    let mut out = EnsembleStats::from_values("gradient_clt", smallest_sample);
    // sampling noise allowance for equal-size two-sample distances
    let floor = (2.0 / members as f64).sqrt();
    let trend_ok = distances[0] <= distances[distances.len() - 1] + floor;
    for (li, &cells) in ladder.iter().enumerate() {
        out.push(format!("ks_eps_{}h", cells), distances[li]);
    }
    out.push("ks_smallest", distances[0]);
    out.push("trend_ok", trend_ok as u8 as f64);
    out.push(
        "ks_critical",
        stats::ks_two_sample_critical(members, members, cfg.significance),
    );
    out.push("c_value", c_value.f64());
    Ok(out)
}

/// Negative control for the pairing: Kolmogorov–Smirnov of the σ-normalized
/// gradient ratio against N(0, c²), properly paired versus pair-shuffled.
/// Shuffling can only widen the ratio mixture, so the shuffled distance must
/// exceed the paired one on a strongly nonlinear run.
pub fn clt_shuffle_control<T: Scalar>(
    fields: &[Vec<T>],
    grid: &Grid<T>,
    params: &ModelParams<T>,
    anchor: usize,
    dir: ProbeDir,
    eps_cells: usize,
    c_value: T,
) -> Result<(f64, f64)> {
    let h = params.hurst()?;
    let eps = T::usize(eps_cells) * grid.spacing();
    let scale = eps.powf(-h);
    let sigma_at: Vec<T> = fields
        .iter()
        .map(|f| params.diffusion.eval(f[anchor]))
        .collect();
    if sigma_at.iter().any(|s| s.abs() < T::real(1e-12)) {
        return Err(Error::Degenerate("σ(u_t(x)) hit zero at the anchor".into()));
    }
    let grads: Vec<T> = fields
        .iter()
        .map(|f| scale * gradient_cells(f, grid, anchor, dir, eps_cells))
        .collect();
    let c = c_value.f64();
    let cdf = move |x: f64| crate::special::normal_cdf(x / c);
    let paired: Vec<f64> = grads
        .iter()
        .zip(&sigma_at)
        .map(|(&g, &s)| (g / s).f64())
        .collect();
    let pi = stats::shifted_pairing(fields.len());
    let shuffled: Vec<f64> = grads
        .iter()
        .enumerate()
        .map(|(m, &g)| (g / sigma_at[pi[m]]).f64())
        .collect();
    Ok((
        stats::ks_one_sample(&paired, cdf),
        stats::ks_one_sample(&shuffled, cdf),
    ))
}

/// Iterated-logarithm diagnostic on a single recorded path. QUALITATIVE:
/// the log log(1/ε) factor is order one at grid scales, so the check is a
/// wide band on the normalized running maximum, not a limit statement.
pub fn lil_diagnostic<T: Scalar>(
    field: &[T],
    grid: &Grid<T>,
    params: &ModelParams<T>,
    eps_cells: &[usize],
    dir: ProbeDir,
    anchors: &[usize],
    c_value: T,
    band: (f64, f64),
) -> Result<EnsembleStats> {
    if eps_cells.len() < 6 {
        return Err(Error::Config(format!(
            "iterated-logarithm ladder needs ≥ 6 levels, got {}",
            eps_cells.len()
        )));
    }
    for w in eps_cells.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::Config(
                "iterated-logarithm ladder must be dyadic".into(),
            ));
        }
    }
    if params.diffusion.is_zero() {
        return Err(Error::Degenerate(
            "σ ≡ 0: the normalized maximum is undefined".into(),
        ));
    }
    let h = params.hurst()?;
    for &cells in eps_cells {
        let eps = (T::usize(cells) * grid.spacing()).f64();
        if eps >= std::f64::consts::E.recip() {
            return Err(Error::Config(format!(
                "eps = {eps} too large for log log(1/ε) normalization"
            )));
        }
    }
    let mut normalized = Vec::with_capacity(anchors.len());
    for &x in anchors {
        let sigma = params.diffusion.eval(field[x]);
        if sigma.abs() < T::real(1e-12) {
            continue;
        }
        let mut max_r = 0.0f64;
        for &cells in eps_cells {
            let eps = (T::usize(cells) * grid.spacing()).f64();
            let g = gradient_cells(field, grid, x, dir, cells).f64();
            let denom = eps.powf(h.f64()) * (2.0 * (1.0 / eps).ln().ln()).sqrt();
            max_r = max_r.max(g.abs() / denom);
        }
        normalized.push(max_r / (c_value.f64() * sigma.abs().f64()));
    }
    if normalized.is_empty() {
        return Err(Error::Degenerate("no anchor had σ(u) ≠ 0".into()));
    }
    let inside = normalized
        .iter()
        .filter(|&&r| r >= band.0 && r <= band.1)
        .count();
    let frac = inside as f64 / normalized.len() as f64;
    let mut out = EnsembleStats::from_values("lil_diagnostic", normalized);
    out.push("fraction_in_band", frac);
    out.push("band_lo", band.0);
    out.push("band_hi", band.1);
    Ok(out)
}

/// q-variation Σ |ξ(x_{i+1}) − ξ(x_i)|^q of n+1 equally spaced samples.
pub fn q_variation<T: Scalar>(values: &[T], q: T, n: usize) -> Result<T> {
    if n < 1 {
        return Err(Error::Config("variation needs n ≥ 1".into()));
    }
    if values.len() < n + 1 {
        return Err(Error::Config(format!(
            "need {} samples for n = {n}, got {}",
            n + 1,
            values.len()
        )));
    }
    let mut v = T::zero();
    for i in 0..n {
        v += (values[i + 1] - values[i]).abs().powf(q);
    }
    Ok(v)
}

/// Transect site indices of the diagonal lattice a ↦ (a, …, a) at spacing
/// 2^{−level} over [A1, A2].
fn diagonal_transect<T: Scalar>(
    grid: &Grid<T>,
    interval: (T, T),
    level: u32,
) -> Result<Vec<usize>> {
    let h = grid.spacing();
    let step = T::real(0.5).powi(level as i32);
    let cells_real = step / h;
    let cells = cells_real.round();
    if (cells_real - cells).abs() > T::real(1e-9) || cells < T::one() {
        return Err(Error::Config(format!(
            "level 2^{level} spacing {step} is below the grid resolution h = {h}"
        )));
    }
    let cells = cells.f64() as usize;
    let half = grid.extent() * T::real(0.5);
    if interval.0 < -half || interval.1 >= half {
        return Err(Error::Config(format!(
            "interval [{}, {}] leaves the box [−L/2, L/2)",
            interval.0, interval.1
        )));
    }
    let start_real = (interval.0 + half) / h;
    let start = start_real.round();
    if (start_real - start).abs() > T::real(1e-9) {
        return Err(Error::Config(format!(
            "A1 = {} is not a lattice coordinate",
            interval.0
        )));
    }
    let start = start.f64() as usize;
    let count_real = (interval.1 - interval.0) / step;
    let count = count_real.round().f64() as usize;
    let n = grid.points_per_axis();
    let mut sites = Vec::with_capacity(count + 1);
    for j in 0..=count {
        let i = start + j * cells;
        if i >= n {
            return Err(Error::Config("transect leaves the grid".into()));
        }
        sites.push(match grid.dim() {
            1 => i,
            _ => grid.flat_index([i, i]),
        });
    }
    Ok(sites)
}

/// Weighted 1/H-variation along the diagonal transect versus the per-path
/// weighted integral c_{1,4} √d ∫ φ(u) σ(u)^{1/H} da (trapezoid on the same
/// path at full grid resolution).
pub fn weighted_variation_test<T: Scalar>(
    fields: &[Vec<T>],
    grid: &Grid<T>,
    params: &ModelParams<T>,
    cfg: &EstimatorConfig<T>,
    phi: &FnSpec<T>,
    c14_value: T,
) -> Result<EnsembleStats> {
    let h = params.hurst()?;
    let q = T::one() / h;
    if cfg.variation_levels.is_empty() {
        return Err(Error::Config("no variation levels".into()));
    }
    let mut levels = cfg.variation_levels.clone();
    levels.sort_unstable();
    let sqrt_d = T::usize(params.dim).sqrt();

    // per-path reference integral on the finest available transect
    let fine_level = {
        // full grid resolution: h = 2^{-m_max} when h is dyadic, otherwise the
        // finest requested level
        *levels.last().unwrap()
    };
    let fine_sites = diagonal_transect(grid, cfg.interval, fine_level)?;
    let fine_step = (cfg.interval.1 - cfg.interval.0) / T::usize(fine_sites.len() - 1);

    let mut per_level_mean = vec![0.0f64; levels.len()];
    let mut rel_errors = Vec::with_capacity(fields.len());
    for f in fields {
        let mut v_last = T::zero();
        for (li, &level) in levels.iter().enumerate() {
            let sites = diagonal_transect(grid, cfg.interval, level)?;
            let mut v = T::zero();
            for w in sites.windows(2) {
                let d = (f[w[1]] - f[w[0]]).abs();
                v += phi.eval(f[w[0]]) * d.powf(q);
            }
            per_level_mean[li] += v.f64();
            if li == levels.len() - 1 {
                v_last = v;
            }
        }
        // trapezoid of φ(u(a)) σ(u(a))^{1/H} da on the same path
        let weight = |site: usize| -> T {
            let u = f[site];
            phi.eval(u) * params.diffusion.eval(u).abs().powf(q)
        };
        let mut integral = T::zero();
        for w in fine_sites.windows(2) {
            integral += (weight(w[0]) + weight(w[1])) * T::real(0.5) * fine_step;
        }
        let limit = c14_value * sqrt_d * integral;
        if limit.abs() < T::real(1e-14) {
            return Err(Error::Degenerate(
                "variation limit vanishes on this path".into(),
            ));
        }
        rel_errors.push(((v_last - limit) / limit).abs().f64());
    }
    for v in &mut per_level_mean {
        *v /= fields.len() as f64;
    }
    let mut out = EnsembleStats::from_values("weighted_variation", rel_errors.clone());
    for (li, &level) in levels.iter().enumerate() {
        out.push(format!("mean_v_level_{level}"), per_level_mean[li]);
    }
    out.push("median_rel_err", stats::median(&rel_errors));
    Ok(out)
}

/// Strong-localization configuration: β ladder, derived box radii
/// δ(β) = 1 + β^{1+1/H}, probe ε, and the anchor.
#[derive(Clone, Debug)]
pub struct LocalizationConfig<T: Scalar> {
    pub beta_ladder: Vec<T>,
    pub eps_cells: usize,
    pub dir: ProbeDir,
    pub anchor: usize,
}

impl<T: Scalar> LocalizationConfig<T> {
    pub fn delta(beta: T, h: T) -> T {
        T::one() + beta.powf(T::one() + T::one() / h)
    }

    pub fn validate(
        &self,
        grid: &Grid<T>,
        params: &ModelParams<T>,
        cfg: &SolverConfig<T>,
    ) -> Result<()> {
        self.dir.validate(grid.dim())?;
        let h = params.hurst()?;
        let eps = T::usize(self.eps_cells) * grid.spacing();
        for &beta in &self.beta_ladder {
            if !(beta > T::one()) {
                return Err(Error::Config(format!("beta = {beta} must exceed 1")));
            }
            let t_box = beta * eps.powf(params.alpha);
            if t_box > cfg.t_end {
                return Err(Error::Config(format!(
                    "time box βε^α = {t_box} exceeds t_end = {}",
                    cfg.t_end
                )));
            }
            if t_box < cfg.dt {
                return Err(Error::Config(format!(
                    "time box βε^α = {t_box} is below one step dt = {}",
                    cfg.dt
                )));
            }
            let radius = eps * Self::delta(beta, h);
            if radius >= grid.extent() * T::real(0.5) {
                return Err(Error::Config(format!(
                    "ball radius εδ = {radius} does not fit the torus (L/2 = {})",
                    grid.extent() * T::real(0.5)
                )));
            }
        }
        Ok(())
    }
}

/// Physical kernels of the gradient semigroup ∇_{εe} S_age for a set of ages.
fn gradient_kernels<T: Scalar>(
    grid: &Grid<T>,
    alpha: T,
    eps: T,
    dir: ProbeDir,
    ages: &[T],
) -> Vec<Vec<T>> {
    let sgn = T::real(dir.sign as f64);
    ages.iter()
        .map(|&a| {
            let spec: Vec<Complex<T>> = (0..grid.len())
                .map(|k| {
                    let w = grid.xi_norm(k).powf(alpha);
                    let theta = eps * sgn * grid.xi_signed(k, dir.axis);
                    let decay = (-a * w).exp();
                    // 1 − e^{−iθ}
                    Complex::new(decay * (T::one() - theta.cos()), decay * theta.sin())
                })
                .collect();
            grid.inverse_real(&spec)
        })
        .collect()
}

fn linear_only<T: Scalar>(params: &ModelParams<T>) -> Result<()> {
    if !params.drift.is_zero() || params.diffusion.constant_value().is_none() {
        return Err(Error::Config(
            "localization runs on the linear equation (b = 0, σ constant)".into(),
        ));
    }
    Ok(())
}

/// One localized-reconstruction probe: a (ε, β) pair.
#[derive(Clone, Copy, Debug)]
struct Probe<T: Scalar> {
    eps_cells: usize,
    beta: T,
    steps_in_box: usize,
    radius: T,
}

/// Core of the localization experiments: for each probe, reconstruct
/// ∇_{εe}Z_t(x) from the stored noise slabs inside the space-time box
/// [t−βε^α, t] × B(x, εδ) and return (per-probe L² errors, per-ε ‖∇Z‖_{L²}),
/// with common random numbers across all probes.
fn localization_errors<T: Scalar>(
    params: &ModelParams<T>,
    grid: &Grid<T>,
    cfg: &SolverConfig<T>,
    probes: &[Probe<T>],
    dir: ProbeDir,
    anchor: usize,
    seed: u64,
    members: u64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = grid.len();
    let na = grid.points_per_axis();
    let offset_index = |from: usize, to: usize| -> usize {
        match grid.dim() {
            1 => (to + n - from) % n,
            _ => {
                let a = grid.axis_indices(from);
                let b = grid.axis_indices(to);
                grid.flat_index([(b[0] + na - a[0]) % na, (b[1] + na - a[1]) % na])
            }
        }
    };
    // kernels per (ε, age); ball membership and kernel lookups per probe
    let max_keep = probes.iter().map(|p| p.steps_in_box).max().unwrap();
    let ages: Vec<T> = (0..max_keep).map(|j| T::usize(j) * cfg.dt).collect();
    let mut eps_list: Vec<usize> = probes.iter().map(|p| p.eps_cells).collect();
    eps_list.sort_unstable();
    eps_list.dedup();
    let kernels: Vec<Vec<Vec<T>>> = eps_list
        .iter()
        .map(|&cells| {
            gradient_kernels(
                grid,
                params.alpha,
                T::usize(cells) * grid.spacing(),
                dir,
                &ages,
            )
        })
        .collect();
    let kernel_of =
        |cells: usize| -> &Vec<Vec<T>> { &kernels[eps_list.binary_search(&cells).unwrap()] };
    // cells inside each probe's ball, with their kernel offsets
    let ball_cells: Vec<Vec<(usize, usize)>> = probes
        .iter()
        .map(|p| {
            (0..n)
                .filter(|&y| grid.offset_norm(offset_index(anchor, y)) <= p.radius)
                .map(|y| (y, offset_index(y, anchor)))
                .collect()
        })
        .collect();

    let per_member = crate::solver::run_ensemble(members, |m| {
        let mut ring: Vec<Vec<T>> = Vec::with_capacity(max_keep);
        let records = simulate_with(
            params,
            grid,
            cfg,
            seed,
            m,
            |_, _incr: &NoiseIncrement<T>, shaped| {
                if ring.len() == max_keep {
                    ring.remove(0);
                }
                ring.push(shaped.to_vec());
            },
        )?;
        let field = &records.last().unwrap().values;
        let mut errs = Vec::with_capacity(probes.len());
        let mut grads = Vec::with_capacity(eps_list.len());
        for &cells in &eps_list {
            grads.push(gradient_cells(field, grid, anchor, dir, cells).f64());
        }
        for (pi, p) in probes.iter().enumerate() {
            let kernel = kernel_of(p.eps_cells);
            let grad = gradient_cells(field, grid, anchor, dir, p.eps_cells);
            let mut local = T::zero();
            for j in 0..p.steps_in_box.min(ring.len()) {
                let slab = &ring[ring.len() - 1 - j];
                let mut acc = T::zero();
                for &(y, koff) in &ball_cells[pi] {
                    acc += kernel[j][koff] * slab[y];
                }
                local += acc;
            }
            local *= grid.cell_volume();
            errs.push((grad - local).f64());
        }
        Ok((errs, grads))
    })?;

    let m = per_member.len() as f64;
    let mut l2 = vec![0.0f64; probes.len()];
    let mut grad_l2 = vec![0.0f64; eps_list.len()];
    for (errs, grads) in &per_member {
        for (i, e) in errs.iter().enumerate() {
            l2[i] += e * e;
        }
        for (i, g) in grads.iter().enumerate() {
            grad_l2[i] += g * g;
        }
    }
    for v in l2.iter_mut().chain(grad_l2.iter_mut()) {
        *v = (*v / m).sqrt();
    }
    // report ‖∇Z‖ aligned with each probe's ε
    let grad_for_probe: Vec<f64> = probes
        .iter()
        .map(|p| grad_l2[eps_list.binary_search(&p.eps_cells).unwrap()])
        .collect();
    let last_probe_errors: Vec<f64> = per_member
        .iter()
        .map(|(errs, _)| errs[probes.len() - 1])
        .collect();
    Ok((l2, grad_for_probe, last_probe_errors))
}

/// Strong-localization decay: per β, reconstruct the gradient from the noise
/// inside the space-time box [t−βε^α, t] × B(x, εδ) using the same stored
/// slabs the solution consumed, and measure the L² error against the full
/// gradient. Returns per-β errors and the fitted log-log slope in β.
pub fn localization_decay<T: Scalar>(
    params: &ModelParams<T>,
    grid: &Grid<T>,
    cfg: &SolverConfig<T>,
    locfg: &LocalizationConfig<T>,
    seed: u64,
    members: u64,
) -> Result<EnsembleStats> {
    linear_only(params)?;
    locfg.validate(grid, params, cfg)?;
    let h_idx = params.hurst()?;
    let eps = T::usize(locfg.eps_cells) * grid.spacing();
    let mut betas = locfg.beta_ladder.clone();
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let probes: Vec<Probe<T>> = betas
        .iter()
        .map(|&b| Probe {
            eps_cells: locfg.eps_cells,
            beta: b,
            steps_in_box: ((b * eps.powf(params.alpha)) / cfg.dt).f64().floor() as usize,
            radius: eps * LocalizationConfig::delta(b, h_idx),
        })
        .collect();
    let (l2, grad_l2, member_errors) = localization_errors(
        params,
        grid,
        cfg,
        &probes,
        locfg.dir,
        locfg.anchor,
        seed,
        members,
    )?;

    let xs: Vec<f64> = betas.iter().map(|b| b.f64().ln()).collect();
    let ys: Vec<f64> = l2.iter().map(|e| e.ln()).collect();
    let fit = stats::linear_fit(&xs, &ys)?;

    let mut out = EnsembleStats::from_values("localization_decay", member_errors);
    for (bi, p) in probes.iter().enumerate() {
        out.push(format!("l2_beta_{:.3}", p.beta.f64()), l2[bi]);
    }
    out.push("slope", fit.slope);
    out.push("slope_se", fit.slope_se);
    out.push("grad_l2", grad_l2[0]);
    out.push("rel_err_largest_beta", l2[betas.len() - 1] / grad_l2[0]);
    let d = params.dim as f64;
    let (a, g) = (params.alpha.f64(), params.gamma.f64());
    out.push("predicted_exponent", -(d + 2.0 - a - g) / (2.0 * a));
    Ok(out)
}

/// ε-scaling companion at fixed β: error/ε^H across an ε ladder, common
/// random numbers across the whole ladder. Returns (ε, error/ε^H) pairs.
pub fn localization_eps_scan<T: Scalar>(
    params: &ModelParams<T>,
    grid: &Grid<T>,
    cfg: &SolverConfig<T>,
    beta: T,
    eps_cells: &[usize],
    dir: ProbeDir,
    anchor: usize,
    seed: u64,
    members: u64,
) -> Result<Vec<(f64, f64)>> {
    linear_only(params)?;
    let h_idx = params.hurst()?;
    for &cells in eps_cells {
        let locfg = LocalizationConfig {
            beta_ladder: vec![beta],
            eps_cells: cells,
            dir,
            anchor,
        };
        locfg.validate(grid, params, cfg)?;
    }
    let probes: Vec<Probe<T>> = eps_cells
        .iter()
        .map(|&cells| {
            let eps = T::usize(cells) * grid.spacing();
            Probe {
                eps_cells: cells,
                beta,
                steps_in_box: ((beta * eps.powf(params.alpha)) / cfg.dt).f64().floor() as usize,
                radius: eps * LocalizationConfig::delta(beta, h_idx),
            }
        })
        .collect();
    let (l2, _, _) = localization_errors(params, grid, cfg, &probes, dir, anchor, seed, members)?;
    Ok(eps_cells
        .iter()
        .zip(&l2)
        .map(|(&cells, &e)| {
            let eps = (T::usize(cells) * grid.spacing()).f64();
            (eps, e / eps.powf(h_idx.f64()))
        })
        .collect())
}
