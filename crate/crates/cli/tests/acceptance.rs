//! End-to-end acceptance checks. Each test prints one PASS/FAIL line to
//! stderr (uncaptured) and asserts its outcome. Tests share a lock so the
//! runtime limits measure one criterion at a time.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Mutex;
use std::time::Instant;

use proxmcmc::diagnostics::{autocorrelation, effective_sample_size, ScalarSummaryTrace};
use proxmcmc::rng::{chain_rng, standard_normal};
use proxmcmc::{
    benchmark_target, moreau_eval, run_chain, Adaptation, Benchmark1D, ChainConfig, SamplerKind,
    Target,
};
use proxmcmc_cli::commands::{benchmark1d, deconvolve, denoise_lowrank, prox_check};
use proxmcmc_cli::config::{Experiment, ExperimentConfig};
use proxmcmc_cli::output::OutputDir;

static SERIAL: Mutex<()> = Mutex::new(());

struct Verdict {
    checks: Vec<(String, bool)>,
}

impl Verdict {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn finish(mut self, n: usize, title: &str, started: Instant, limit_s: f64) {
        let elapsed = started.elapsed().as_secs_f64();
        self.check(
            format!("runtime {elapsed:.1}s < {limit_s}s"),
            elapsed < limit_s,
        );
        let ok = self.checks.iter().all(|c| c.1);
        let detail: Vec<String> = self
            .checks
            .iter()
            .map(|(s, p)| format!("{s} [{}]", if *p { "ok" } else { "FAIL" }))
            .collect();
        let line = format!(
            "criterion {n} {}: {title}: {}\n",
            if ok { "PASS" } else { "FAIL" },
            detail.join("; ")
        );
        let _ = std::io::stderr().write_all(line.as_bytes());
        assert!(ok, "{line}");
    }
}

fn config(exp: Experiment, pairs: &[(&str, String)]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(exp);
    for (k, v) in pairs {
        cfg.set(k, v).unwrap();
    }
    cfg
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_1_prox_oracle_suite() {
    let _g = lock();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = OutputDir::create(dir.path()).unwrap();
    let cfg = config(
        Experiment::ProxCheck,
        &[
            (
                "operators",
                "soft-threshold,quadratic,quartic,box,nuclear".into(),
            ),
            ("cases", "100".into()),
        ],
    );
    let mut v = Verdict::new();
    match prox_check::run(&cfg, &out) {
        Ok(checks) => {
            for c in checks {
                v.check(
                    format!(
                        "{} max dev {:.2e} < {:.0e}",
                        c.operator, c.max_deviation, c.tolerance
                    ),
                    c.pass,
                );
            }
        }
        Err(e) => v.check(format!("prox-check failed: {e}"), false),
    }
    v.finish(
        1,
        "closed-form proxes match brute-force maximisation",
        started,
        60.0,
    );
}

fn envelope(spec: Benchmark1D, x: f64, lambda: f64) -> f64 {
    moreau_eval(&benchmark_target(spec, 1).unwrap(), &[x], lambda)
        .unwrap()
        .log_density_unnorm
}

/// Exponent `b` of the least-squares fit `a·x^b + c`.
fn fit_power(xs: &[f64], ys: &[f64]) -> f64 {
    let sse = |b: f64| {
        let f: Vec<f64> = xs.iter().map(|x| x.powf(b)).collect();
        let n = xs.len() as f64;
        let (mf, my) = (f.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sff: f64 = f.iter().map(|v| (v - mf).powi(2)).sum();
        let sfy: f64 = f.iter().zip(ys).map(|(a, y)| (a - mf) * (y - my)).sum();
        let a = sfy / sff;
        f.iter()
            .zip(ys)
            .map(|(fi, y)| (y - my - a * (fi - mf)).powi(2))
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (0.5, 4.0);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (c, d) = (hi - r * (hi - lo), lo + r * (hi - lo));
        if sse(c) < sse(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_2_moreau_properties() {
    let _g = lock();
    let started = Instant::now();
    let fig1 = [
        Benchmark1D::LAPLACE,
        Benchmark1D::GAUSSIAN,
        Benchmark1D::QUARTIC,
        Benchmark1D::UNIFORM,
    ];
    let mut v = Verdict::new();

    let lambdas = [1.0, 0.1, 0.01, 0.001];
    let mut monotone = true;
    for spec in fig1 {
        for x in [-0.9, -0.5, 0.25, 0.75] {
            let errs: Vec<f64> = lambdas
                .iter()
                .map(|&l| (envelope(spec, x, l) - spec.log_density_1d(x)).abs())
                .collect();
            monotone &= errs.windows(2).all(|w| w[1] <= w[0]) && errs[3] < 1e-2;
        }
    }
    v.check("pointwise convergence monotone as lambda shrinks", monotone);

    let mut worst: f64 = 0.0;
    let mut rng = chain_rng(2, 0);
    for (spec, kinks) in [
        (Benchmark1D::LAPLACE, vec![-0.5, 0.5]),
        (Benchmark1D::GAUSSIAN, vec![]),
        (Benchmark1D::QUARTIC, vec![]),
        (Benchmark1D::UNIFORM, vec![-1.0, 1.0]),
    ] {
        let t = benchmark_target(spec, 1).unwrap();
        let mut checked = 0;
        while checked < 50 {
            let x = 3.0 * (2.0 * proxmcmc::rng::open_unit(&mut rng) - 1.0);
            if kinks.iter().any(|k: &f64| (x - k).abs() < 1e-2) {
                continue;
            }
            let h = 1e-5;
            let fd = (moreau_eval(&t, &[x + h], 0.5).unwrap().log_density_unnorm
                - moreau_eval(&t, &[x - h], 0.5).unwrap().log_density_unnorm)
                / (2.0 * h);
            let grad = moreau_eval(&t, &[x], 0.5).unwrap().log_gradient[0];
            worst = worst.max((fd - grad).abs() / grad.abs().max(1.0));
            checked += 1;
        }
    }
    v.check(
        format!("gradient identity rel err {worst:.1e} <= 1e-5"),
        worst <= 1e-5,
    );

    let zero = fig1.iter().all(|&spec| {
        let t = benchmark_target(spec, 1).unwrap();
        [0.01, 1.0, 10.0]
            .iter()
            .all(|&l| moreau_eval(&t, &[spec.mode()], l).unwrap().log_gradient[0].abs() < 1e-8)
    });
    v.check("zero gradient at maximisers", zero);

    let separable = fig1.iter().all(|&spec| {
        let t = benchmark_target(spec, 6).unwrap();
        let x: Vec<f64> = (0..6).map(|i| -4.0 + 1.37 * i as f64).collect();
        let joint = t.prox(&x, 0.3, None).unwrap().point;
        joint
            == x.iter()
                .map(|&u| spec.prox_1d(u, 0.3).unwrap())
                .collect::<Vec<_>>()
    });
    v.check("exact separability", separable);

    let xs: Vec<f64> = (0..40)
        .map(|i| 10f64 * 10f64.powf(i as f64 / 39.0))
        .collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| -envelope(Benchmark1D::QUARTIC, x, 1.0))
        .collect();
    let b = fit_power(&xs, &ys);
    v.check(
        format!("quartic tail exponent {b:.4} in 2 +- 0.05"),
        (b - 2.0).abs() <= 0.05,
    );
    v.finish(2, "Moreau envelope properties", started, 60.0);
}

fn read_trace(path: &Path) -> Vec<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .zip(l.split(','))
                .map(|(h, c)| (h.to_string(), c.parse().unwrap()))
                .collect()
        })
        .collect()
}

#[test]
fn criterion_3_quartic_stability() {
    let _g = lock();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut v = Verdict::new();

    let short = OutputDir::create(dir.path().join("short")).unwrap();
    let cfg = config(
        Experiment::Benchmark1d,
        &[
            ("samplers", "mala,ula,malta,smmala".into()),
            ("seed", "3".into()),
        ],
    );
    let summaries = benchmark1d::run(&cfg, &short).unwrap();
    let by_name = |n: &str| summaries.iter().find(|s| s.sampler == n).unwrap();
    let mala = by_name("mala");
    v.check(
        format!(
            "MALA acceptance {:?} over {} iterations",
            mala.acceptance_rate, mala.stored
        ),
        mala.acceptance_rate == Some(0.0) && mala.stored == 250,
    );
    let ula = by_name("ula");
    v.check(
        format!("ULA exceeds 1e6 at step {:?}", ula.diverged_at),
        ula.diverged_at.is_some_and(|t| t <= 10),
    );
    for n in ["malta", "smmala"] {
        let s = by_name(n);
        v.check(
            format!("{n} finite from 10"),
            s.all_finite && !s.diverged && s.failure.is_none(),
        );
    }

    let long = OutputDir::create(dir.path().join("long")).unwrap();
    let cfg = config(
        Experiment::Benchmark1d,
        &[
            ("samplers", "pmala".into()),
            ("seed", "3".into()),
            ("burn_in", "100".into()),
            ("n_samples", "10000".into()),
        ],
    );
    let pmala = benchmark1d::run(&cfg, &long).unwrap().remove(0);
    let acc = pmala.acceptance_rate.unwrap_or(f64::NAN);
    let trace = read_trace(&long.path("trace_pmala.csv"));
    let inside =
        trace.iter().filter(|r| r["state"].abs() < 2.0).count() as f64 / trace.len() as f64;
    v.check(
        format!("P-MALA finite over {} steps", trace.len()),
        pmala.all_finite && trace.len() == 10_000,
    );
    v.check(
        format!("P-MALA acceptance {acc:.3} in [0.3, 0.8]"),
        (0.3..=0.8).contains(&acc),
    );
    v.check(
        format!("P-MALA mass in |x| < 2 is {inside:.4} >= 0.95"),
        inside >= 0.95,
    );
    v.finish(3, "quartic target from x0 = 10, delta = 1", started, 60.0);
}

#[test]
fn criterion_4_exact_target_moments() {
    let _g = lock();
    let started = Instant::now();
    let mut v = Verdict::new();
    let target = benchmark_target(Benchmark1D::STANDARD_NORMAL, 1).unwrap();
    let mut cfg = ChainConfig::new(SamplerKind::Pmala, 1.0, 100_000);
    cfg.burn_in = 5_000;
    cfg.seed = 4;
    cfg.adaptation = Some(Adaptation {
        lo: 0.4,
        hi: 0.6,
        ..Adaptation::default()
    });
    cfg.record_transitions = true;
    let run = run_chain(&target, &cfg, &[0.0]).unwrap();
    let n = run.samples.len() as f64;
    let m = run.samples.iter().map(|s| s[0]).sum::<f64>() / n;
    let var = run.samples.iter().map(|s| (s[0] - m).powi(2)).sum::<f64>() / n;
    v.check(format!("|mean| {:.4} < 0.05", m.abs()), m.abs() < 0.05);
    v.check(
        format!("variance {var:.4} in [0.95, 1.05]"),
        (0.95..=1.05).contains(&var),
    );

    // prox^{δ/2} of −x²/2 is x/(1 + δ/2)
    let delta = run.delta_final;
    let prox = |u: f64| u / (1.0 + delta / 2.0);
    let agree = run
        .transitions
        .iter()
        .filter(|t| {
            let (x, y) = (t.from[0], t.proposal[0]);
            let log_r = (x * x - y * y) / 2.0
                + ((y - prox(x)).powi(2) - (x - prox(y)).powi(2)) / (2.0 * delta);
            (t.log_u < log_r) == t.accepted
        })
        .count();
    let total = run.transitions.len();
    v.check(
        format!("replayed {agree}/{total} MH decisions"),
        agree == total && total == 100_000,
    );
    v.finish(4, "P-MALA on the standard normal", started, 120.0);
}

#[test]
fn criterion_5_lowrank_denoising() {
    let _g = lock();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = OutputDir::create(dir.path()).unwrap();
    let cfg = config(
        Experiment::DenoiseLowrank,
        &[("seed", "1".into()), ("rwmh_budget", "wallclock".into())],
    );
    let (report, timing) = denoise_lowrank::run(&cfg, &out).unwrap();
    let mut v = Verdict::new();
    v.check(
        format!("MAP MSE {:.3e} <= 1.5e-3", report.map.mse_truth),
        report.map.mse_truth <= 1.5e-3,
    );
    let pm = &report.chains[0];
    let ess_n = pm.ess_per_sample.unwrap_or(0.0);
    v.check(
        format!(
            "P-MALA ESS/N {ess_n:.3} >= 0.2 at acceptance {:.3}",
            pm.acceptance_rate.unwrap_or(f64::NAN)
        ),
        ess_n >= 0.2 && pm.stored == 2_000,
    );
    let (tp, tr) = (&timing.chains[0], &timing.chains[1]);
    let ratio = tp.ess_per_second.unwrap_or(0.0) / tr.ess_per_second.unwrap_or(f64::INFINITY);
    v.check(
        format!(
            "ESS/s ratio {ratio:.1} >= 5 (P-MALA {:.0}s, RWMH {:.0}s)",
            tp.wall_time, tr.wall_time
        ),
        ratio >= 5.0,
    );
    let worst_replica = report
        .replicas
        .iter()
        .map(|r| r.w1_to_observation)
        .fold(0.0, f64::max);
    v.check(
        format!(
            "replica W1 {worst_replica:.3} < noise W1 {:.3}",
            report.w1_noise_to_observation
        ),
        !report.replicas.is_empty() && worst_replica < report.w1_noise_to_observation,
    );
    v.finish(
        5,
        "checkerboard denoising under a nuclear-norm prior",
        started,
        1200.0,
    );
}

#[test]
fn criterion_6_deconvolution() {
    let _g = lock();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = OutputDir::create(dir.path()).unwrap();
    let cfg = config(Experiment::Deconvolve, &[("seed", "1".into())]);
    let (report, _) = deconvolve::run(&cfg, &out).unwrap();
    let mut v = Verdict::new();
    v.check(
        format!(
            "MAP ascent monotone over {} iterations",
            report.map.iterations
        ),
        report.map.monotone,
    );
    let chain = |n: &str| report.chains.iter().find(|c| c.sampler == n).unwrap();
    let (p, m) = (chain("pmala"), chain("mala"));
    let (edge, flat) = (
        p.width_edge_mean.unwrap_or(0.0),
        p.width_flat_mean.unwrap_or(f64::INFINITY),
    );
    v.check(
        format!("edge width {edge:.2} > flat width {flat:.2}"),
        edge > flat,
    );
    let lag20 = |c: &deconvolve::ChainSummary| c.acf.as_ref().map_or(f64::NAN, |a| a[20]);
    let (ap, am) = (
        p.acceptance_rate.unwrap_or(0.0),
        m.acceptance_rate.unwrap_or(0.0),
    );
    v.check(
        format!(
            "ACF(20) P-MALA {:.3} < MALA {:.3} (acceptance {ap:.3} vs {am:.3})",
            lag20(p),
            lag20(m)
        ),
        lag20(p) < lag20(m) && (ap - am).abs() < 0.1,
    );
    v.finish(
        6,
        "64x64 TV deconvolution, 9x9 blur, BSNR 40 dB",
        started,
        1800.0,
    );
}

fn ar1(rho: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = chain_rng(seed, 0);
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            x = rho * x + standard_normal(&mut rng);
            x
        })
        .collect()
}

#[test]
fn criterion_7_diagnostics_calibration() {
    let _g = lock();
    let started = Instant::now();
    let mut v = Verdict::new();
    let n = 100_000;
    let iid =
        effective_sample_size(&ScalarSummaryTrace::new("iid", ar1(0.0, n, 71)).unwrap()).unwrap();
    v.check(
        format!("iid ESS/N {:.3}", iid / n as f64),
        (iid / n as f64 - 1.0).abs() <= 0.1,
    );
    let ar =
        effective_sample_size(&ScalarSummaryTrace::new("ar1", ar1(0.5, n, 72)).unwrap()).unwrap();
    let rel = ar / (n as f64 / 3.0);
    v.check(
        format!("AR(1) ESS / (N/3) {rel:.3}"),
        (rel - 1.0).abs() <= 0.15,
    );

    let x = ar1(0.7, 10_000, 73);
    let acf = autocorrelation(&ScalarSummaryTrace::new("x", x.clone()).unwrap(), 50).unwrap();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let c = |k: usize| {
        (0..x.len() - k)
            .map(|t| (x[t] - mean) * (x[t + k] - mean))
            .sum::<f64>()
            / x.len() as f64
    };
    let c0 = c(0);
    let worst = (0..=50)
        .map(|k| (acf[k] - c(k) / c0).abs())
        .fold(0.0, f64::max);
    v.check(
        format!("ACF vs double loop max dev {worst:.1e}"),
        worst <= 1e-12,
    );
    v.finish(7, "ESS and ACF calibration", started, 60.0);
}

fn run_cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_proxmcmc"))
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap_or(-1)
}

/// Every file except `timing.json`, by name.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "timing.json")
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn criterion_8_determinism() {
    let _g = lock();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let chain_csv = dir.path().join("chain.csv");
    let mut text = String::from("iteration,a,b\n");
    for (i, (a, b)) in ar1(0.3, 500, 81).iter().zip(ar1(0.0, 500, 82)).enumerate() {
        text.push_str(&format!("{i},{a},{b}\n"));
    }
    std::fs::write(&chain_csv, text).unwrap();
    let input = format!("input={}", chain_csv.display());
    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "benchmark1d",
            vec!["--set", "samplers=pmala,mala,malta,smmala,ula,pula,rwmh"],
        ),
        (
            "deconvolve",
            vec![
                "--set",
                "size=32",
                "--set",
                "burn_in=300",
                "--set",
                "n_samples=100",
                "--set",
                "thinning=2",
            ],
        ),
        (
            "denoise-lowrank",
            vec![
                "--set",
                "burn_in=100",
                "--set",
                "n_samples=120",
                "--set",
                "thinning=2",
                "--set",
                "replicas=50,119",
            ],
        ),
        ("prox-check", vec!["--set", "cases=10"]),
        ("diagnose", vec!["--set", &input]),
    ];
    let mut v = Verdict::new();
    for (cmd, extra) in &commands {
        let out = dir.path().join(cmd);
        let mut args = vec![*cmd, "--seed", "11", "--out", out.to_str().unwrap()];
        args.extend(extra.iter().copied());
        let runs: Vec<_> = (0..2)
            .map(|_| {
                let _ = std::fs::remove_dir_all(&out);
                (run_cli(&args), snapshot(&out))
            })
            .collect();
        let same =
            runs[0].0 == 0 && runs[1].0 == 0 && runs[0].1 == runs[1].1 && runs[0].1.len() > 1;
        v.check(format!("{cmd}: {} files identical", runs[0].1.len()), same);
    }
    v.finish(8, "byte-identical re-runs of every command", started, 600.0);
}
