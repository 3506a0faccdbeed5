//! Shot-by-shot sampling with lossy detectors, and wave-plate misalignment.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::{
    build_protocol_circuit, classify, clicks_of, run_protocol_with_circuit, BranchId, Landing,
    SwapConfig, Verdict,
};
use crate::error::{Error, Result};
use crate::statistics::ClickPattern;
use crate::walk::{Circuit, CoinKind, CoinOperator};

#[derive(Debug, Clone, PartialEq)]
pub struct ShotReport {
    pub shots: u64,
    /// Shots per `(branch, surviving click pattern)`.
    pub counts: BTreeMap<(BranchId, ClickPattern), u64>,
    pub verdict_counts: BTreeMap<Verdict, u64>,
    /// Shots with a Psi3 or Psi4 verdict.
    pub successes: u64,
    /// Conclusive verdicts naming the wrong branch.
    pub misclassifications: u64,
    pub success_fraction: f64,
    /// Fraction of conclusive verdicts that were correct; `None` without any.
    pub verdict_accuracy: Option<f64>,
    /// `2a²b²η²`.
    pub expected_success: f64,
}

impl ShotReport {
    /// Binomial standard deviation of `success_fraction` around the expectation.
    pub fn success_sigma(&self) -> f64 {
        let p = self.expected_success;
        (p * (1.0 - p) / self.shots as f64).sqrt()
    }
}

/// Samples `config.shots` runs of the protocol.
///
/// Per shot: draw a branch by weight, draw where the two photons land from
/// that branch's final state, keep each photon's click with probability
/// `η`, then classify the surviving clicks. Lost clicks can only turn a
/// coincidence into an inconclusive single click, so a conclusive verdict
/// is never wrong. With `hwp_angle_jitter_sigma > 0` one misaligned circuit
/// is drawn up front and used for every shot.
pub fn sample_shots(config: &SwapConfig) -> Result<ShotReport> {
    config.validate()?;
    if config.shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let circuit = apply_hwp_jitter(&build_protocol_circuit(), config.hwp_angle_jitter_sigma, &mut rng)?;
    let run = run_protocol_with_circuit(config, &circuit)?;

    let branch_weights: Vec<f64> = run
        .branches
        .iter()
        .map(|r| r.branch.coefficient * r.branch.coefficient)
        .collect();
    let branch_pick = WeightedIndex::new(&branch_weights)
        .map_err(|e| Error::InvalidConfig(format!("branch weights: {e}")))?;
    let mut landing_picks = Vec::with_capacity(run.branches.len());
    for r in &run.branches {
        let landings: Vec<(Landing, f64)> = r.landings.iter().map(|(l, p)| (*l, *p)).collect();
        let pick = WeightedIndex::new(landings.iter().map(|(_, p)| *p))
            .map_err(|e| Error::InvalidConfig(format!("landing weights: {e}")))?;
        landing_picks.push((landings, pick));
    }

    let eta = config.detector_efficiency;
    let mut counts = BTreeMap::new();
    let mut verdict_counts: BTreeMap<Verdict, u64> = Verdict::ALL.into_iter().map(|v| (v, 0)).collect();
    let mut misclassifications = 0;
    for _ in 0..config.shots {
        let b = branch_pick.sample(&mut rng);
        let (landings, pick) = &landing_picks[b];
        let mut landing = landings[pick.sample(&mut rng)].0;
        for slot in landing.iter_mut() {
            if slot.is_some() && rng.gen::<f64>() >= eta {
                *slot = None;
            }
        }
        let clicks = clicks_of(&landing);
        let verdict = classify(clicks);
        let id = run.branches[b].branch.id;
        *counts.entry((id, clicks)).or_insert(0) += 1;
        *verdict_counts.get_mut(&verdict).expect("all verdicts") += 1;
        if verdict != Verdict::Inconclusive && id.conclusive_verdict() != Some(verdict) {
            misclassifications += 1;
        }
    }

    let successes = verdict_counts[&Verdict::Psi3] + verdict_counts[&Verdict::Psi4];
    Ok(ShotReport {
        shots: config.shots,
        counts,
        verdict_counts,
        successes,
        misclassifications,
        success_fraction: successes as f64 / config.shots as f64,
        verdict_accuracy: (successes > 0)
            .then(|| (successes - misclassifications) as f64 / successes as f64),
        expected_success: super::success_probability(config.a, config.b) * eta * eta,
    })
}

/// Perturbs every wave-plate angle by an independent `Normal(0, sigma)`
/// error (radians). Identity and custom coins are left alone.
pub fn apply_hwp_jitter<R: Rng + ?Sized>(circuit: &Circuit, sigma: f64, rng: &mut R) -> Result<Circuit> {
    if sigma == 0.0 {
        return Ok(circuit.clone());
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidConfig(format!("jitter sigma {sigma}: {e}")))?;
    let mut out = circuit.clone();
    for step in &mut out.steps {
        for coin in [&mut step.coin_line2, &mut step.coin_line3] {
            if let CoinKind::HalfWavePlate { degrees } = coin.kind() {
                let error: f64 = normal.sample(rng);
                *coin = CoinOperator::half_wave_plate(degrees + error.to_degrees());
            }
        }
    }
    Ok(out)
}

/// Mean Psi3-heralded Bell fidelity over `trials` independently misaligned
/// circuits. Trial `i` draws its angles from a generator seeded with
/// `seed + i`.
pub fn mean_jitter_fidelity(config: &SwapConfig, sigma: f64, trials: u32, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let ideal = build_protocol_circuit();
    let mut total = 0.0;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(u64::from(i)));
        let circuit = apply_hwp_jitter(&ideal, sigma, &mut rng)?;
        let run = run_protocol_with_circuit(config, &circuit)?;
        let outcome = run
            .outcomes()
            .into_iter()
            .find(|o| o.verdict == Verdict::Psi3)
            .expect("every verdict is reported");
        total += outcome.bell_fidelity;
    }
    Ok(total / f64::from(trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn zero_shots_rejected() {
        let c = SwapConfig::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        assert_eq!(sample_shots(&c).unwrap_err(), Error::ZeroShots);
    }

    #[test]
    fn blind_detectors_never_succeed() {
        let c = SwapConfig::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)
            .unwrap()
            .with_shots(2000)
            .with_seed(3)
            .with_detector_efficiency(0.0);
        let r = sample_shots(&c).unwrap();
        assert_eq!(r.successes, 0);
        assert_eq!(r.misclassifications, 0);
        assert_eq!(r.verdict_accuracy, None);
        assert!(r.counts.keys().all(|(_, p)| p.is_empty()));
    }

    #[test]
    fn same_seed_same_report() {
        let c = SwapConfig::new(0.8, 0.6).unwrap().with_shots(5000).with_seed(11).with_detector_efficiency(0.9);
        assert_eq!(sample_shots(&c).unwrap(), sample_shots(&c).unwrap());
    }

    #[test]
    fn zero_jitter_is_identity() {
        let c = build_protocol_circuit();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(apply_hwp_jitter(&c, 0.0, &mut rng).unwrap(), c);
    }

    #[test]
    fn jittered_coins_stay_unitary_and_identity_is_untouched() {
        let c = build_protocol_circuit();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let j = apply_hwp_jitter(&c, 0.05, &mut rng).unwrap();
        assert_eq!(j.steps[0].coin_line2, CoinOperator::identity());
        for step in &j.steps {
            assert!(step.coin_line2.unitarity_deviation() < 1e-12);
            assert!(step.coin_line3.unitarity_deviation() < 1e-12);
        }
        assert!(j.distance(&c).unwrap() > 0.0);
    }

    #[test]
    fn small_jitter_costs_a_little_fidelity() {
        let c = SwapConfig::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        let f = mean_jitter_fidelity(&c, 0.01, 20, 5).unwrap();
        assert!(f < 1.0 && f > 0.99, "fidelity {f}");
        assert!((mean_jitter_fidelity(&c, 0.0, 3, 5).unwrap() - 1.0).abs() < 1e-12);
    }
}
