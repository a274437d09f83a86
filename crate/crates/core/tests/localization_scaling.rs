//! ε-scaling of the localized-gradient error at fixed β: the error divided
//! by ε^H must stay flat across a decade of ε (common random numbers across
//! the ladder remove the Monte Carlo variance of the comparison).

use fracshe_core::estimators::{localization_eps_scan, ProbeDir};
use fracshe_core::grid::Grid;
use fracshe_core::params::ModelParams;
use fracshe_core::solver::SolverConfig;

#[test]
fn error_over_eps_h_flat_across_decade() {
    let params = ModelParams::new(1.5, 0.5, 1);
    let grid = Grid::make(1, 32.0, 1024).unwrap();
    // long horizon so the largest ε's time box stays well inside the run
    let cfg = SolverConfig::new(1.0 / 256.0, 8.0);
    let ratios = localization_eps_scan(
        &params,
        &grid,
        &cfg,
        1.5,
        &[2, 3, 5, 8, 12, 20],
        ProbeDir { axis: 0, sign: 1 },
        512,
        4242,
        300,
    )
    .unwrap();
    let lo = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    println!("eps scan: {ratios:?}");
    assert!(
        hi / lo < 1.20,
        "error/ε^H spread {:.3} exceeds 20%: {ratios:?}",
        hi / lo
    );
}
