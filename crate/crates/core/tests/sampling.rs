use std::collections::BTreeMap;

use proptest::prelude::*;

use qwswap::protocol::{run_protocol, sample_shots, BranchId, SwapConfig, Verdict};
use qwswap::statistics::{ClickPattern, Regime};

#[test]
fn click_frequencies_match_probabilities_within_four_sigma() {
    let shots = 40_000u64;
    for (a, regime) in [(0.8, Regime::Synchronized), (0.55, Regime::Asynchronous)] {
        let config = SwapConfig::from_a(a).unwrap().with_regime(regime).with_shots(shots).with_seed(21);
        let run = run_protocol(&config).unwrap();
        let report = sample_shots(&config).unwrap();

        let mut expected: BTreeMap<(BranchId, ClickPattern), f64> = BTreeMap::new();
        for r in &run.branches {
            let w = r.branch.coefficient * r.branch.coefficient;
            for (pattern, p) in &r.clicks {
                *expected.entry((r.branch.id, *pattern)).or_insert(0.0) += w * p;
            }
        }
        for key in report.counts.keys() {
            assert!(expected.get(key).copied().unwrap_or(0.0) > 0.0, "impossible outcome {key:?} sampled");
        }
        for (key, p) in &expected {
            let observed = report.counts.get(key).copied().unwrap_or(0) as f64 / shots as f64;
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            assert!((observed - p).abs() <= 4.0 * sigma, "{key:?}: {observed} vs {p} ± {sigma}");
        }
    }
}

#[test]
fn perfect_detectors_reach_two_a_squared_b_squared() {
    let config = SwapConfig::from_a(std::f64::consts::FRAC_1_SQRT_2).unwrap().with_shots(100_000).with_seed(4);
    let r = sample_shots(&config).unwrap();
    assert!((r.success_fraction - 0.5).abs() < 3.0 * r.success_sigma());
    assert_eq!(r.verdict_accuracy, Some(1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conclusive_verdicts_are_never_wrong(
        a in 0.0f64..=1.0,
        eta in 0.0f64..=1.0,
        seed in any::<u64>(),
        asynchronous in any::<bool>(),
    ) {
        let regime = if asynchronous { Regime::Asynchronous } else { Regime::Synchronized };
        let config = SwapConfig::from_a(a)
            .unwrap()
            .with_regime(regime)
            .with_detector_efficiency(eta)
            .with_shots(2_000)
            .with_seed(seed);
        let r = sample_shots(&config).unwrap();
        prop_assert_eq!(r.misclassifications, 0);
        for (id, pattern) in r.counts.keys() {
            let verdict = qwswap::protocol::classify(*pattern);
            if verdict != Verdict::Inconclusive {
                prop_assert_eq!(id.conclusive_verdict(), Some(verdict));
            }
        }
        prop_assert_eq!(r.verdict_counts.values().sum::<u64>(), 2_000);
    }
}
