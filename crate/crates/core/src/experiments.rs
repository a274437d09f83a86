//! Orchestrated verification experiments: each one runs an ensemble, applies
//! the estimator battery, and reduces to a pass/fail verdict plus a levels
//! table. The CLI `verify` subcommands and the acceptance suite both drive
//! these entry points.

use crate::constants;
use crate::error::{Error, Result};
use crate::estimators::{self, EnsembleStats, EstimatorConfig, LocalizationConfig, ProbeDir};
use crate::grid::Grid;
use crate::params::{FnSpec, ModelParams};
use crate::rng::Stream;
use crate::solver::{self, SolverConfig};
use crate::Real;

/// Auxiliary draw family for the CLT comparison sample; tags above 2^32
/// never collide with ensemble member streams.
const AUX_CLT_TAG: u64 = 0xC17_0000_0001;

/// Machine-readable outcome of one experiment.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub experiment: String,
    pub pass: bool,
    /// "QUALITATIVE" for the iterated-logarithm band check.
    pub label: Option<&'static str>,
    pub metrics: Vec<(String, f64)>,
}

/// Per-level numeric table for CSV output.
#[derive(Clone, Debug, Default)]
pub struct LevelTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub verdict: Verdict,
    pub table: LevelTable,
    pub stats: EnsembleStats,
}

/// Common bundle: model, grid, stepping, ensemble.
#[derive(Clone, Debug)]
pub struct RunSetup {
    pub params: ModelParams<Real>,
    pub grid: Grid<Real>,
    pub solver: SolverConfig<Real>,
    pub members: u64,
    pub seed: u64,
}

impl RunSetup {
    fn final_fields(&self) -> Result<Vec<Vec<Real>>> {
        let setup = self;
        solver::run_ensemble(setup.members, |m| {
            let recs = solver::simulate(&setup.params, &setup.grid, &setup.solver, setup.seed, m)?;
            Ok(recs
                .last()
                .ok_or_else(|| Error::Config("no record times configured".into()))?
                .values
                .clone())
        })
    }
}

fn verdict_metrics(stats: &EnsembleStats) -> Vec<(String, f64)> {
    stats.extras.clone()
}

/// Gradient-distribution test (KS against the σ(u)-mixture limit law),
/// optionally with the shuffled-pairing negative control.
pub struct CltOptions {
    pub estimator: EstimatorConfig<Real>,
    /// KS threshold at the smallest ε.
    pub ks_threshold: f64,
    /// Run the paired-ratio negative control (needs non-constant σ).
    pub shuffle_control: bool,
    /// Anchor site index.
    pub anchor: usize,
}

pub fn clt_experiment(setup: &RunSetup, opt: &CltOptions) -> Result<ExperimentOutput> {
    opt.estimator.validate(&setup.grid)?;
    let c = constants::c_alpha_gamma_d(&setup.params)?.value;
    let fields = setup.final_fields()?;
    let aux = Stream::root(setup.seed).child(AUX_CLT_TAG);
    let mut stats = estimators::gradient_clt_test(
        &fields,
        &setup.grid,
        &setup.params,
        &opt.estimator,
        opt.anchor,
        c,
        aux,
    )?;
    let ks_smallest = stats.metric("ks_smallest").unwrap();
    let trend_ok = stats.metric("trend_ok").unwrap() > 0.5;
    let mut pass = ks_smallest < opt.ks_threshold && trend_ok;
    if opt.shuffle_control {
        let mut ladder = opt.estimator.eps_cells.clone();
        ladder.sort_unstable();
        let (paired, shuffled) = estimators::clt_shuffle_control(
            &fields,
            &setup.grid,
            &setup.params,
            opt.anchor,
            opt.estimator.probe_dirs[0],
            ladder[0],
            c,
        )?;
        stats.extras.push(("ks_paired_ratio".into(), paired));
        stats.extras.push(("ks_shuffled_ratio".into(), shuffled));
        pass = pass && shuffled > paired;
    }
    stats.extras.push(("ks_threshold".into(), opt.ks_threshold));

    let mut ladder = opt.estimator.eps_cells.clone();
    ladder.sort_unstable();
    let mut table = LevelTable {
        headers: vec!["eps".into(), "ks_distance".into()],
        rows: Vec::new(),
    };
    for &cells in &ladder {
        let eps = cells as f64 * setup.grid.spacing();
        let ks = stats.metric(&format!("ks_eps_{}h", cells)).unwrap();
        table.rows.push(vec![eps, ks]);
    }
    Ok(ExperimentOutput {
        verdict: Verdict {
            experiment: "clt".into(),
            pass,
            label: None,
            metrics: verdict_metrics(&stats),
        },
        table,
        stats,
    })
}

/// Iterated-logarithm band diagnostic (qualitative).
pub struct LilOptions {
    /// Dyadic ε ladder in grid cells (≥ 6 levels).
    pub eps_cells: Vec<usize>,
    pub dir: ProbeDir,
    pub anchors: usize,
    pub band: (f64, f64),
    pub min_fraction: f64,
}

pub fn lil_experiment(setup: &RunSetup, opt: &LilOptions) -> Result<ExperimentOutput> {
    let c = constants::c_alpha_gamma_d(&setup.params)?.value;
    let recs = solver::simulate(&setup.params, &setup.grid, &setup.solver, setup.seed, 0)?;
    let field = &recs
        .last()
        .ok_or_else(|| Error::Config("no records".into()))?
        .values;
    let n = setup.grid.len();
    let stride = (n / opt.anchors).max(1);
    let anchors: Vec<usize> = (0..opt.anchors).map(|i| (i * stride) % n).collect();
    let stats = estimators::lil_diagnostic(
        field,
        &setup.grid,
        &setup.params,
        &opt.eps_cells,
        opt.dir,
        &anchors,
        c,
        opt.band,
    )?;
    let frac = stats.metric("fraction_in_band").unwrap();
    let mut table = LevelTable {
        headers: vec!["anchor".into(), "normalized_max".into()],
        rows: Vec::new(),
    };
    for (i, &v) in stats.values.iter().enumerate() {
        table.rows.push(vec![i as f64, v]);
    }
    Ok(ExperimentOutput {
        verdict: Verdict {
            experiment: "lil".into(),
            pass: frac >= opt.min_fraction,
            label: Some("QUALITATIVE"),
            metrics: verdict_metrics(&stats),
        },
        table,
        stats,
    })
}

/// Weighted 1/H-variation against the per-path quadrature limit.
pub struct VariationOptions {
    pub estimator: EstimatorConfig<Real>,
    pub phi: FnSpec<Real>,
    pub median_rel_err_threshold: f64,
}

pub fn variation_experiment(setup: &RunSetup, opt: &VariationOptions) -> Result<ExperimentOutput> {
    let c14 = constants::c14(&setup.params)?.value;
    let fields = setup.final_fields()?;
    let stats = estimators::weighted_variation_test(
        &fields,
        &setup.grid,
        &setup.params,
        &opt.estimator,
        &opt.phi,
        c14,
    )?;
    let median = stats.metric("median_rel_err").unwrap();
    let mut table = LevelTable {
        headers: vec!["level".into(), "mean_variation".into()],
        rows: Vec::new(),
    };
    let mut levels = opt.estimator.variation_levels.clone();
    levels.sort_unstable();
    for &level in &levels {
        let v = stats.metric(&format!("mean_v_level_{level}")).unwrap();
        table.rows.push(vec![level as f64, v]);
    }
    Ok(ExperimentOutput {
        verdict: Verdict {
            experiment: "variation".into(),
            pass: median < opt.median_rel_err_threshold,
            label: None,
            metrics: verdict_metrics(&stats),
        },
        table,
        stats,
    })
}

/// Strong-localization decay in β.
pub struct LocalizeOptions {
    pub localization: LocalizationConfig<Real>,
    /// Acceptance margin added to the predicted exponent.
    pub slope_margin: f64,
}

pub fn localize_experiment(setup: &RunSetup, opt: &LocalizeOptions) -> Result<ExperimentOutput> {
    let stats = estimators::localization_decay(
        &setup.params,
        &setup.grid,
        &setup.solver,
        &opt.localization,
        setup.seed,
        setup.members,
    )?;
    let slope = stats.metric("slope").unwrap();
    let bound = stats.metric("predicted_exponent").unwrap() + opt.slope_margin;
    let mut table = LevelTable {
        headers: vec!["beta".into(), "l2_error".into()],
        rows: Vec::new(),
    };
    let mut betas = opt.localization.beta_ladder.clone();
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &b in &betas {
        let v = stats.metric(&format!("l2_beta_{b:.3}")).unwrap();
        table.rows.push(vec![b, v]);
    }
    Ok(ExperimentOutput {
        verdict: Verdict {
            experiment: "localize".into(),
            pass: slope <= bound,
            label: None,
            metrics: verdict_metrics(&stats),
        },
        table,
        stats,
    })
}

/// Hölder exponent regressions (spatial H, temporal H/α).
pub struct HolderOptions {
    /// Spatial lag ladder in grid cells.
    pub eps_cells: Vec<usize>,
    /// Temporal lags in solver steps; records at t_end − τ·dt must exist.
    pub tau_steps: Vec<u64>,
    pub tolerance: f64,
}

pub fn holder_experiment(setup: &RunSetup, opt: &HolderOptions) -> Result<ExperimentOutput> {
    let h = setup.params.hurst()?;
    let ensemble = solver::run_ensemble(setup.members, |m| {
        solver::simulate(&setup.params, &setup.grid, &setup.solver, setup.seed, m)
    })?;
    let report =
        solver::holder_scaling_report(&ensemble, &setup.grid, &opt.eps_cells, &opt.tau_steps)?;
    let want_time = h / setup.params.alpha;
    let pass = (report.hurst_space - h).abs() <= opt.tolerance
        && (report.hurst_time - want_time).abs() <= opt.tolerance;
    let mut stats = EnsembleStats {
        name: "holder_scaling".into(),
        values: vec![report.hurst_space, report.hurst_time],
        mean: report.hurst_space,
        stderr: report.se_space,
        extras: Vec::new(),
    };
    stats
        .extras
        .push(("hurst_space".into(), report.hurst_space));
    stats.extras.push(("se_space".into(), report.se_space));
    stats.extras.push(("hurst_time".into(), report.hurst_time));
    stats.extras.push(("se_time".into(), report.se_time));
    stats.extras.push(("expected_space".into(), h));
    stats.extras.push(("expected_time".into(), want_time));
    let table = LevelTable {
        headers: vec![
            "fitted_space".into(),
            "expected_space".into(),
            "fitted_time".into(),
            "expected_time".into(),
        ],
        rows: vec![vec![report.hurst_space, h, report.hurst_time, want_time]],
    };
    Ok(ExperimentOutput {
        verdict: Verdict {
            experiment: "holder".into(),
            pass,
            label: None,
            metrics: verdict_metrics(&stats),
        },
        table,
        stats,
    })
}
