//! Command implementations behind the CLI surface.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fracshe_core::constants;
use fracshe_core::error::{Error, Result};
use fracshe_core::estimators::ProbeDir;
use fracshe_core::experiments::{self, ExperimentOutput, RunSetup};
use fracshe_core::fbm::CirculantSampler;
use fracshe_core::kernel::green_kernel;
use fracshe_core::params::ModelParams;
use fracshe_core::rng::Stream;
use fracshe_core::solver;
use fracshe_core::stats;
use fracshe_core::Real;

use crate::config::ExperimentConfig;
use crate::manifest::{
    self, code_version, load_manifest, run_id, RunRecord, RunWriter, VerdictRecord,
};

/// Render a float with shortest round-trip formatting (byte-stable replays).
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

pub fn constants_command(alpha: f64, gamma: f64, dim: usize, json: bool) -> Result<String> {
    let params = ModelParams::new(alpha, gamma, dim);
    let reports = constants::battery(&params)?;
    let mut out = String::new();
    if json {
        out.push('{');
        for (i, r) in reports.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(out, "\"{}\": {}", r.name.as_str(), fmt_f64(r.value)).unwrap();
        }
        out.push_str("}\n");
    } else {
        writeln!(
            out,
            "{:<8} {:<22} {:<12} est_abs_error",
            "name", "value", "method"
        )
        .unwrap();
        for r in reports {
            writeln!(
                out,
                "{:<8} {:<22} {:<12} {:e}",
                r.name.as_str(),
                fmt_f64(r.value),
                r.method.as_str(),
                r.est_abs_error
            )
            .unwrap();
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

pub fn kernel_command(alpha: f64, t: f64, dim: usize, n: usize, extent: f64) -> Result<String> {
    let grid = fracshe_core::grid::Grid::<Real>::make(dim, extent, n)?;
    let slice = green_kernel(&grid, alpha, t)?;
    let mut out = String::new();
    match dim {
        1 => {
            out.push_str("x,g\n");
            // emit in signed-coordinate order
            let half = n / 2;
            for i in (half..n).chain(0..half) {
                let x = grid.offset_coord(i)[0];
                writeln!(out, "{},{}", fmt_f64(x), fmt_f64(slice.values[i])).unwrap();
            }
        }
        _ => {
            out.push_str("x0,x1,g\n");
            for i in 0..grid.len() {
                let c = grid.offset_coord(i);
                writeln!(
                    out,
                    "{},{},{}",
                    fmt_f64(c[0]),
                    fmt_f64(c[1]),
                    fmt_f64(slice.values[i])
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// fbm
// ---------------------------------------------------------------------------

pub fn fbm_command(hurst: f64, n: usize, samples: u64, seed: u64, summary: bool) -> Result<String> {
    let sampler = CirculantSampler::new(n, 1.0 / n as f64, hurst, 1)?;
    let mut out = String::new();
    if summary {
        let vs: Vec<f64> = (0..samples)
            .map(|m| {
                let path = sampler.sample(Stream::member(seed, m), 0);
                let q = 1.0 / hurst;
                path.values
                    .windows(2)
                    .map(|w| (w[1] - w[0]).abs().powf(q))
                    .sum()
            })
            .collect();
        let endpoint: Vec<f64> = (0..samples)
            .map(|m| {
                *sampler
                    .sample(Stream::member(seed, m), 0)
                    .values
                    .last()
                    .unwrap()
            })
            .collect();
        writeln!(
            out,
            "{{\"hurst\": {}, \"n\": {n}, \"samples\": {samples}, \
             \"variation_mean\": {}, \"variation_stderr\": {}, \
             \"endpoint_variance\": {}}}",
            fmt_f64(hurst),
            fmt_f64(stats::mean(&vs)),
            fmt_f64(stats::stderr_of_mean(&vs)),
            fmt_f64(stats::variance(&endpoint)),
        )
        .unwrap();
    } else {
        out.push_str("sample,x,value\n");
        for m in 0..samples {
            let path = sampler.sample(Stream::member(seed, m), 0);
            for (p, v) in path.points.iter().zip(&path.values) {
                writeln!(out, "{m},{},{}", fmt_f64(p[0]), fmt_f64(*v)).unwrap();
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn field_csv(
    grid: &fracshe_core::grid::Grid<Real>,
    ensemble: &[Vec<fracshe_core::solver::FieldState<Real>>],
    record_index: usize,
) -> String {
    let mut out = String::new();
    match grid.dim() {
        1 => out.push_str("site,x,value,member\n"),
        _ => out.push_str("site,x0,x1,value,member\n"),
    }
    for (member, records) in ensemble.iter().enumerate() {
        let state = &records[record_index];
        for (site, &v) in state.values.iter().enumerate() {
            let c = grid.site_coord(site);
            match grid.dim() {
                1 => writeln!(out, "{site},{},{},{member}", fmt_f64(c[0]), fmt_f64(v)).unwrap(),
                _ => writeln!(
                    out,
                    "{site},{},{},{},{member}",
                    fmt_f64(c[0]),
                    fmt_f64(c[1]),
                    fmt_f64(v)
                )
                .unwrap(),
            }
        }
    }
    out
}

fn time_tag(t: f64) -> String {
    format!("{}", t).replace('.', "p").replace('-', "m")
}

pub struct CommandResult {
    pub run_id: String,
    pub pass: bool,
    pub summary: String,
}

pub fn simulate_command(
    cfg: &ExperimentConfig,
    output_dir: &Path,
    seed_override: Option<u64>,
) -> Result<CommandResult> {
    let mut cfg = cfg.clone();
    if let Some(s) = seed_override {
        cfg.ensemble.seed = s;
    }
    let resolved = cfg.resolved_json();
    let version = code_version();
    let id = run_id(&resolved, &version);
    let started = manifest::now_unix();

    let params = cfg.model.to_core()?;
    let grid = cfg.grid.to_core(params.dim)?;
    let solver_cfg = cfg.solver.to_core()?;
    let mut record = RunRecord {
        run_id: id.clone(),
        code_version: version,
        command: "simulate".into(),
        started_unix: started,
        finished_unix: 0,
        resolved_config: serde_json::from_str(&resolved).unwrap(),
        artifacts: Vec::new(),
        verdicts: Vec::new(),
    };
    let mut writer = RunWriter::create(output_dir, &id, &record)?;

    let ensemble = solver::run_ensemble(cfg.ensemble.members, |m| {
        solver::simulate(&params, &grid, &solver_cfg, cfg.ensemble.seed, m)
    })?;
    for (ri, &t) in solver_cfg.record_times.iter().enumerate() {
        let name = format!("t_{}.csv", time_tag(t));
        writer.write_artifact(&name, field_csv(&grid, &ensemble, ri).as_bytes())?;
    }
    writer.finish(&mut record)?;
    Ok(CommandResult {
        run_id: id.clone(),
        pass: true,
        summary: format!("run {id}: {} members recorded\n", cfg.ensemble.members),
    })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn table_csv(out: &ExperimentOutput) -> String {
    let mut s = String::new();
    s.push_str(&out.table.headers.join(","));
    s.push('\n');
    for row in &out.table.rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn verdict_json(out: &ExperimentOutput) -> String {
    let mut s = String::new();
    s.push_str("{\"experiment\": \"");
    s.push_str(&out.verdict.experiment);
    s.push_str("\", \"pass\": ");
    s.push_str(if out.verdict.pass { "true" } else { "false" });
    if let Some(label) = out.verdict.label {
        write!(s, ", \"label\": \"{label}\"").unwrap();
    }
    s.push_str(", \"metrics\": {");
    for (i, (k, v)) in out.verdict.metrics.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write!(s, "\"{k}\": {}", fmt_f64(*v)).unwrap();
    }
    s.push_str("}}\n");
    s
}

pub fn verify_command(
    kind: &str,
    cfg: &ExperimentConfig,
    output_dir: &Path,
    seed_override: Option<u64>,
) -> Result<CommandResult> {
    let mut cfg = cfg.clone();
    if let Some(s) = seed_override {
        cfg.ensemble.seed = s;
    }
    let resolved = cfg.resolved_json();
    let version = code_version();
    let id = run_id(&format!("{kind}\x00{resolved}"), &version);
    let started = manifest::now_unix();

    let mut record = RunRecord {
        run_id: id.clone(),
        code_version: version,
        command: format!("verify {kind}"),
        started_unix: started,
        finished_unix: 0,
        resolved_config: serde_json::from_str(&resolved).unwrap(),
        artifacts: Vec::new(),
        verdicts: Vec::new(),
    };
    let mut writer = RunWriter::create(output_dir, &id, &record)?;

    let out = run_experiment(kind, &cfg)?;
    writer.write_artifact(&format!("{kind}_levels.csv"), table_csv(&out).as_bytes())?;
    writer.write_artifact(
        &format!("{kind}_verdict.json"),
        verdict_json(&out).as_bytes(),
    )?;
    record.verdicts = vec![VerdictRecord {
        experiment: out.verdict.experiment.clone(),
        pass: out.verdict.pass,
        label: out.verdict.label.map(|s| s.to_string()),
        metrics: out.verdict.metrics.clone(),
    }];
    writer.finish(&mut record)?;
    Ok(CommandResult {
        run_id: id,
        pass: out.verdict.pass,
        summary: verdict_json(&out),
    })
}

pub fn run_experiment(kind: &str, cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = cfg.model.to_core()?;
    let grid = cfg.grid.to_core(params.dim)?;
    let solver_cfg = cfg.solver.to_core()?;
    let setup = RunSetup {
        params,
        grid,
        solver: solver_cfg,
        members: cfg.ensemble.members,
        seed: cfg.ensemble.seed,
    };
    let exp = &cfg.experiment;
    match kind {
        "clt" => {
            let est = cfg.estimator_required()?.to_core(setup.members as usize);
            let anchor =
                ((setup.grid.len() as f64 * exp.anchor_frac) as usize).min(setup.grid.len() - 1);
            experiments::clt_experiment(
                &setup,
                &experiments::CltOptions {
                    estimator: est,
                    ks_threshold: exp.ks_threshold,
                    shuffle_control: exp.shuffle_control,
                    anchor,
                },
            )
        }
        "lil" => {
            let ladder = if exp.lil_eps_cells.is_empty() {
                vec![4, 8, 16, 32, 64, 128]
            } else {
                exp.lil_eps_cells.clone()
            };
            experiments::lil_experiment(
                &setup,
                &experiments::LilOptions {
                    eps_cells: ladder,
                    dir: ProbeDir { axis: 0, sign: 1 },
                    anchors: exp.anchors,
                    band: exp.band,
                    min_fraction: exp.min_fraction,
                },
            )
        }
        "variation" => {
            let est = cfg.estimator_required()?.to_core(setup.members as usize);
            experiments::variation_experiment(
                &setup,
                &experiments::VariationOptions {
                    estimator: est,
                    phi: exp.phi.to_core(),
                    median_rel_err_threshold: exp.median_rel_err_threshold,
                },
            )
        }
        "localize" => {
            let loc = cfg.localization_required()?.to_core(&setup.grid);
            experiments::localize_experiment(
                &setup,
                &experiments::LocalizeOptions {
                    localization: loc,
                    slope_margin: exp.slope_margin,
                },
            )
        }
        "holder" => {
            let est = cfg.estimator_required()?;
            let tau = if exp.tau_steps.is_empty() {
                vec![8, 16, 32, 64, 128]
            } else {
                exp.tau_steps.clone()
            };
            experiments::holder_experiment(
                &setup,
                &experiments::HolderOptions {
                    eps_cells: est.eps_cells.clone(),
                    tau_steps: tau,
                    tolerance: exp.holder_tolerance,
                },
            )
        }
        other => Err(Error::Config(format!(
            "unknown experiment '{other}' (expected clt|lil|variation|localize|holder)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

pub fn replay_command(id: &str, output_dir: &Path) -> Result<CommandResult> {
    let record = load_manifest(output_dir, id)?;
    let version = code_version();
    if record.code_version != version {
        return Err(Error::Config(format!(
            "code version mismatch: manifest {} vs current {version}; refusing to replay",
            record.code_version
        )));
    }
    let cfg_text = serde_json::to_string_pretty(&record.resolved_config)
        .map_err(|e| Error::Config(format!("manifest config: {e}")))?;
    let cfg = ExperimentConfig::parse(&cfg_text)?;
    // recomputed id must match the stored one (config edits invalidate replay)
    let expect_id = match record.command.as_str() {
        "simulate" => run_id(&cfg.resolved_json(), &version),
        cmd => {
            let kind = cmd.strip_prefix("verify ").ok_or_else(|| {
                Error::Config(format!("manifest command '{cmd}' is not replayable"))
            })?;
            run_id(&format!("{kind}\x00{}", cfg.resolved_json()), &version)
        }
    };
    if expect_id != record.run_id {
        return Err(Error::Config(format!(
            "stored config hashes to {expect_id}, manifest claims {}; the config was edited",
            record.run_id
        )));
    }

    let replay_dir = output_dir.join(format!("{id}.replay"));
    if replay_dir.exists() {
        fs::remove_dir_all(&replay_dir)
            .map_err(|e| Error::Config(format!("cannot clear {}: {e}", replay_dir.display())))?;
    }
    fs::create_dir_all(&replay_dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", replay_dir.display())))?;

    let rerun = match record.command.as_str() {
        "simulate" => simulate_command(&cfg, &replay_dir, None)?,
        cmd => {
            let kind = cmd.strip_prefix("verify ").unwrap();
            verify_command(kind, &cfg, &replay_dir, None)?
        }
    };

    let mut mismatches = Vec::new();
    for art in &record.artifacts {
        let old = output_dir.join(id).join(&art.path);
        let new = replay_dir.join(&rerun.run_id).join(&art.path);
        let old_bytes = fs::read(&old).map_err(|e| {
            Error::Config(format!("missing original artifact {}: {e}", old.display()))
        })?;
        let new_bytes = fs::read(&new).map_err(|e| {
            Error::Config(format!("missing replay artifact {}: {e}", new.display()))
        })?;
        if old_bytes != new_bytes {
            mismatches.push(art.path.clone());
        }
    }
    let pass = mismatches.is_empty();
    if pass {
        fs::remove_dir_all(&replay_dir).ok();
    }
    Ok(CommandResult {
        run_id: id.to_string(),
        pass,
        summary: if pass {
            format!(
                "replay {id}: {} artifacts byte-identical\n",
                record.artifacts.len()
            )
        } else {
            format!(
                "replay {id}: MISMATCH in {mismatches:?} (kept under {})\n",
                replay_dir.display()
            )
        },
    })
}
