use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use proxmcmc::linalg::DiscreteGradient;
use proxmcmc::oracle::{brute_force_nuclear_prox, brute_force_prox_1d, brute_force_tv_prox};
use proxmcmc::prox::{
    prox_box_projection, prox_nuclear_svt, prox_power_1d, prox_quadratic, prox_quartic_1d,
    prox_soft_threshold, prox_tv,
};
use proxmcmc::rng::chain_rng;
use proxmcmc::{Grid, TvSolver};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Csv, OutputDir};

pub const OPERATORS: [&str; 7] = [
    "soft-threshold",
    "quadratic",
    "quartic",
    "power",
    "box",
    "nuclear",
    "tv",
];

#[derive(Clone, Debug, Serialize)]
pub struct OperatorCheck {
    pub operator: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Worst deviation of one operator from its brute-force oracle over `cases`
/// random instances drawn from stream `stream`.
pub fn check_operator(op: &str, cases: usize, seed: u64, stream: u64) -> CliResult<f64> {
    let mut rng = chain_rng(seed, stream);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let x: f64 = rng.random_range(-5.0..5.0);
        let lambda: f64 = rng.random_range(0.05..5.0);
        let a: f64 = rng.random_range(0.1..3.0);
        let dev = match op {
            "soft-threshold" => (prox_soft_threshold(&[x], lambda, a)?[0]
                - brute_force_prox_1d(|u| -a * u.abs(), x, lambda))
            .abs(),
            "quadratic" => (prox_quadratic(&[x], lambda, a)?[0]
                - brute_force_prox_1d(|u| -a * u * u, x, lambda))
            .abs(),
            "quartic" => {
                (prox_quartic_1d(x, lambda)? - brute_force_prox_1d(|u| -u.powi(4), x, lambda)).abs()
            }
            "power" => {
                let beta = 1.0 + a;
                (prox_power_1d(x, lambda, beta, 1.0)?
                    - brute_force_prox_1d(|u| -u.abs().powf(beta), x, lambda))
                .abs()
            }
            "box" => {
                let lo = -a;
                let hi = lo + rng.random_range(0.1..4.0);
                let g = |u: f64| {
                    if (lo..=hi).contains(&u) {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                };
                (prox_box_projection(&[x], &[lo], &[hi])?[0] - brute_force_prox_1d(g, x, lambda))
                    .abs()
            }
            "nuclear" => {
                let m = Grid::from_fn(3, 3, |_, _| rng.random_range(-2.0..2.0));
                let tau = rng.random_range(0.1..1.0);
                let got = prox_nuclear_svt(&m, tau)?;
                let want = brute_force_nuclear_prox(&[(1.0 / tau, &m)], 1.0);
                max_abs_diff(got.as_slice(), want.as_slice())
            }
            "tv" => {
                let img: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
                let theta = rng.random_range(0.05..1.0);
                let op = DiscreteGradient::new(2, 2)?;
                let solver = TvSolver {
                    max_iters: 100_000,
                    tolerance: 1e-12,
                    ..TvSolver::default()
                };
                let got = prox_tv(&img, &op, theta, 1.0, &solver, None)?.point;
                max_abs_diff(&got, &brute_force_tv_prox(&img, 2, 2, theta))
            }
            other => return Err(CliError::usage(format!("unknown operator '{other}'"))),
        };
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Compares each closed-form or iterative prox with a brute-force maximiser
/// and fails when any deviation exceeds its tolerance.
pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> CliResult<Vec<OperatorCheck>> {
    let ops: Vec<String> = cfg.get_list("operators")?;
    let cases: usize = cfg.get("cases")?;
    let seed: u64 = cfg.get("seed")?;
    let (tol, tol_nuc, tol_tv): (f64, f64, f64) = (
        cfg.get("tolerance")?,
        cfg.get("nuclear_tolerance")?,
        cfg.get("tv_tolerance")?,
    );
    for op in &ops {
        if !OPERATORS.contains(&op.as_str()) {
            return Err(CliError::usage(format!(
                "unknown operator '{op}'; expected one of {}",
                OPERATORS.join(", ")
            )));
        }
    }
    let results: Vec<CliResult<f64>> = ops
        .par_iter()
        .map(|op| {
            let stream = OPERATORS.iter().position(|o| o == op).unwrap_or(0) as u64;
            check_operator(op, cases, seed, stream)
        })
        .collect();

    let mut checks = Vec::new();
    let mut csv = Csv::new(&["operator", "cases", "max_deviation", "tolerance", "pass"]);
    for (op, res) in ops.iter().zip(results) {
        let dev = res?;
        let tolerance = match op.as_str() {
            "nuclear" => tol_nuc,
            "tv" => tol_tv,
            _ => tol,
        };
        let pass = dev < tolerance;
        csv.row(&[
            Cell::S(op),
            Cell::I(cases),
            Cell::F(dev),
            Cell::F(tolerance),
            Cell::B(pass),
        ]);
        checks.push(OperatorCheck {
            operator: op.clone(),
            cases,
            max_deviation: dev,
            tolerance,
            pass,
        });
    }
    out.text("prox_check.csv", &csv.finish())?;
    out.json("prox_check.json", &checks)?;
    if let Some(bad) = checks.iter().find(|c| !c.pass) {
        return Err(CliError::failure(format!(
            "{} deviates by {:e} (tolerance {:e})",
            bad.operator, bad.max_deviation, bad.tolerance
        )));
    }
    Ok(checks)
}
