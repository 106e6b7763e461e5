use proptest::prelude::*;

use proxmcmc::diagnostics::{
    autocorrelation, effective_sample_size, pixelwise_quantiles, ScalarSummaryTrace,
};
use proxmcmc::rng::{chain_rng, standard_normal};

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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ess_is_affine_invariant(seed in 0u64..1000, rho in -0.5f64..0.9, a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], b in -100.0f64..100.0) {
        let x = ar1(rho, 2_000, seed);
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let ex = effective_sample_size(&ScalarSummaryTrace::new("x", x).unwrap()).unwrap();
        let ey = effective_sample_size(&ScalarSummaryTrace::new("y", y).unwrap()).unwrap();
        prop_assert!((ex - ey).abs() <= 1e-6 * ex, "{} vs {}", ex, ey);
    }

    #[test]
    fn acf_is_bounded_by_one(seed in 0u64..1000, rho in -0.9f64..0.9) {
        let t = ScalarSummaryTrace::new("x", ar1(rho, 500, seed)).unwrap();
        let acf = autocorrelation(&t, 50).unwrap();
        prop_assert!(acf.iter().all(|r| r.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn quantiles_are_monotone_in_probability(seed in 0u64..1000, n in 20usize..200) {
        let flat = ar1(0.3, 3 * n, seed);
        let samples: Vec<Vec<f64>> = flat.chunks(3).map(|c| c.to_vec()).collect();
        let q = pixelwise_quantiles(&samples, &[0.05, 0.5, 0.95]).unwrap();
        for i in 0..3 {
            prop_assert!(q[0][i] <= q[1][i] && q[1][i] <= q[2][i]);
        }
    }
}
