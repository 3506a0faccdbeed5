//! Entanglement swapping between two `a|HH⟩ + b|VV⟩` pairs.
//!
//! Pairs (1, 2) and (3, 4) start in `a|HH⟩ + b|VV⟩`. Regrouping the four
//! photons as (1, 4) ⊗ (2, 3) gives four branches, each a Bell state of the
//! remote photons 1 and 4 times a polarization state of the middle photons
//! 2 and 3:
//!
//! | branch | weight              | photons 1, 4 | photons 2, 3                  |
//! |--------|---------------------|--------------|-------------------------------|
//! | 1      | `√((a⁴ + b⁴)/2)`    | `ψ+`         | `(a²HH + b²VV)/√(a⁴ + b⁴)`    |
//! | 2      | `√((a⁴ + b⁴)/2)`    | `ψ−`         | `(a²HH − b²VV)/√(a⁴ + b⁴)`    |
//! | 3      | `ab`                | `φ+`         | `(HV + VH)/√2`                |
//! | 4      | `ab`                | `φ−`         | `(HV − VH)/√2`                |
//!
//! The middle photons walk through a three-step circuit whose detector
//! pattern identifies branches 3 and 4 with certainty and returns an
//! inconclusive single-line pattern for branches 1 and 2, which cannot be
//! told apart without knowing `a` and `b`.

mod entanglement;
mod sampling;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::Serialize;

pub use entanglement::{concurrence, BellState, TwoQubitDensity, TwoQubitState};
pub use sampling::{apply_hwp_jitter, mean_jitter_fidelity, sample_shots, ShotReport};

use crate::error::{Error, Result};
use crate::hilbert::{Amplitude, Ket, Line, PhotonBasisKet, Polarization, Representation, SparseState};
use crate::statistics::{evolve_regime, ClickPattern, DetectorId, Regime};
use crate::walk::{CoinOperator, Circuit, ExchangeRule, PhaseRetarder, StepDescriptor};

const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapConfig {
    pub a: f64,
    pub b: f64,
    pub regime: Regime,
    pub rng_seed: u64,
    pub shots: u64,
    pub detector_efficiency: f64,
    /// Standard deviation of wave-plate angle errors, in radians.
    pub hwp_angle_jitter_sigma: f64,
}

impl SwapConfig {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let config = SwapConfig {
            a,
            b,
            regime: Regime::Synchronized,
            rng_seed: 0,
            shots: 0,
            detector_efficiency: 1.0,
            hwp_angle_jitter_sigma: 0.0,
        };
        config.validate()?;
        Ok(config)
    }

    /// Takes `b = √(1 − a²)`.
    pub fn from_a(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidConfig(format!("a must lie in [0, 1], got {a}")));
        }
        Self::new(a, (1.0 - a * a).max(0.0).sqrt())
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_detector_efficiency(mut self, eta: f64) -> Self {
        self.detector_efficiency = eta;
        self
    }

    pub fn with_jitter(mut self, sigma: f64) -> Self {
        self.hwp_angle_jitter_sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_normalized(self.a, self.b)?;
        if !(0.0..=1.0).contains(&self.detector_efficiency) {
            return Err(Error::InvalidConfig(format!(
                "detector efficiency must lie in [0, 1], got {}",
                self.detector_efficiency
            )));
        }
        if !(self.hwp_angle_jitter_sigma >= 0.0 && self.hwp_angle_jitter_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "jitter sigma must be finite and non-negative, got {}",
                self.hwp_angle_jitter_sigma
            )));
        }
        Ok(())
    }
}

fn check_normalized(a: f64, b: f64) -> Result<()> {
    let total = a * a + b * b;
    if !(total - 1.0).abs().lt(&NORMALIZATION_TOL) {
        return Err(Error::UnnormalizedCoefficients(total));
    }
    Ok(())
}

/// One of the four terms of the regrouped four-photon state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BranchId {
    B1,
    B2,
    B3,
    B4,
}

impl BranchId {
    pub const ALL: [BranchId; 4] = [BranchId::B1, BranchId::B2, BranchId::B3, BranchId::B4];

    /// 1-based branch number.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn remote_bell(self) -> BellState {
        match self {
            BranchId::B1 => BellState::PsiPlus,
            BranchId::B2 => BellState::PsiMinus,
            BranchId::B3 => BellState::PhiPlus,
            BranchId::B4 => BellState::PhiMinus,
        }
    }

    /// The verdict that correctly identifies this branch, if any.
    pub fn conclusive_verdict(self) -> Option<Verdict> {
        match self {
            BranchId::B3 => Some(Verdict::Psi3),
            BranchId::B4 => Some(Verdict::Psi4),
            _ => None,
        }
    }
}

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: BranchId,
    pub remote_bell: BellState,
    /// Polarization state of photons 2 and 3.
    pub clare_polarization: TwoQubitState,
    /// The same state with both photons at site 0 of their own line.
    pub clare_state: SparseState,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecomposition {
    pub branches: Vec<Branch>,
}

impl BranchDecomposition {
    /// Four-photon amplitudes, indexed by the bits `(p1 p2 p3 p4)` with
    /// `H = 0`, rebuilt from the branches.
    pub fn reconstruct(&self) -> [Amplitude; 16] {
        let mut out = [Amplitude::new(0.0, 0.0); 16];
        for branch in &self.branches {
            let remote = branch.remote_bell.state();
            for p1 in Polarization::ALL {
                for p2 in Polarization::ALL {
                    for p3 in Polarization::ALL {
                        for p4 in Polarization::ALL {
                            let idx = 8 * p1.index() + 4 * p2.index() + 2 * p3.index() + p4.index();
                            out[idx] += branch.coefficient
                                * remote.amplitude(p1, p4)
                                * branch.clare_polarization.amplitude(p2, p3);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn weight(&self, id: BranchId) -> f64 {
        self.branches
            .iter()
            .find(|b| b.id == id)
            .map(|b| b.coefficient * b.coefficient)
            .unwrap_or(0.0)
    }
}

/// `(a|HH⟩ + b|VV⟩)⊗(a|HH⟩ + b|VV⟩)` directly, in the same indexing as
/// [`BranchDecomposition::reconstruct`].
pub fn product_input(a: f64, b: f64) -> [Amplitude; 16] {
    let pair = [a, 0.0, 0.0, b];
    let mut out = [Amplitude::new(0.0, 0.0); 16];
    for (i, x) in pair.iter().enumerate() {
        for (j, y) in pair.iter().enumerate() {
            // pair (1,2) bits are (p1 p2) = i, pair (3,4) bits are (p3 p4) = j
            out[4 * i + j] = Amplitude::new(x * y, 0.0);
        }
    }
    out
}

/// Polarization state of photons 2 and 3 for a branch.
pub fn clare_polarization(id: BranchId, a: f64, b: f64) -> TwoQubitState {
    let norm = (a.powi(4) + b.powi(4)).sqrt();
    let (a2, b2) = (a * a / norm, b * b / norm);
    let r = FRAC_1_SQRT_2;
    TwoQubitState::from_real(match id {
        BranchId::B1 => [a2, 0.0, 0.0, b2],
        BranchId::B2 => [a2, 0.0, 0.0, -b2],
        BranchId::B3 => [0.0, r, r, 0.0],
        BranchId::B4 => [0.0, r, -r, 0.0],
    })
}

/// Places a photon-2/photon-3 polarization state at site 0 of lines 2 and 3.
pub fn initial_walk_state(polarization: &TwoQubitState) -> SparseState {
    let mut terms = Vec::new();
    for p2 in Polarization::ALL {
        for p3 in Polarization::ALL {
            terms.push((
                Ket::Ordered([
                    PhotonBasisKet::new(p2, Line::Line2, 0),
                    PhotonBasisKet::new(p3, Line::Line3, 0),
                ]),
                polarization.amplitude(p2, p3),
            ));
        }
    }
    SparseState::from_terms(Representation::Ordered, terms).expect("ordered kets")
}

/// Splits the two-pair input into its four branches.
pub fn decompose_initial(a: f64, b: f64) -> Result<BranchDecomposition> {
    check_normalized(a, b)?;
    let heavy = ((a.powi(4) + b.powi(4)) / 2.0).sqrt();
    let branches = BranchId::ALL
        .into_iter()
        .map(|id| {
            let clare_polarization = clare_polarization(id, a, b);
            Branch {
                id,
                remote_bell: id.remote_bell(),
                clare_state: initial_walk_state(&clare_polarization),
                clare_polarization,
                coefficient: match id {
                    BranchId::B1 | BranchId::B2 => heavy,
                    BranchId::B3 | BranchId::B4 => a * b,
                },
            }
        })
        .collect();
    Ok(BranchDecomposition { branches })
}

/// The three-step discrimination circuit.
///
/// Step 1: identity on line 2, NOT on line 3, shift, then exchange the two
/// lines at site −1. Step 2: NOT on both lines and shift, preceded by
/// zero-phase retarders on the exchanged paths. Step 3: Hadamard on both
/// lines and shift.
pub fn build_protocol_circuit() -> Circuit {
    Circuit::new(vec![
        StepDescriptor {
            coin_line2: CoinOperator::identity(),
            coin_line3: CoinOperator::not(),
            retarders: Vec::new(),
            shift: true,
            exchange: Some(ExchangeRule { position: -1 }),
        },
        StepDescriptor {
            coin_line2: CoinOperator::not(),
            coin_line3: CoinOperator::not(),
            retarders: vec![
                PhaseRetarder { line: Line::Line2, position: -1, phase: 0.0 },
                PhaseRetarder { line: Line::Line3, position: -1, phase: 0.0 },
            ],
            shift: true,
            exchange: None,
        },
        StepDescriptor {
            coin_line2: CoinOperator::hadamard(),
            coin_line3: CoinOperator::hadamard(),
            retarders: Vec::new(),
            shift: true,
            exchange: None,
        },
    ])
}

/// What the detector pattern says about the branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    /// Coincidence D1+D3 or D2+D4: photons 1 and 4 are in `φ+`.
    Psi3,
    /// Coincidence D1+D4 or D2+D3: photons 1 and 4 are in `φ−`.
    Psi4,
    Inconclusive,
}

impl Verdict {
    pub const ALL: [Verdict; 3] = [Verdict::Psi3, Verdict::Psi4, Verdict::Inconclusive];

    /// The Bell state heralded by a conclusive verdict.
    pub fn heralded_bell(self) -> Option<BellState> {
        match self {
            Verdict::Psi3 => Some(BellState::PhiPlus),
            Verdict::Psi4 => Some(BellState::PhiMinus),
            Verdict::Inconclusive => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Psi3 => "psi3",
            Verdict::Psi4 => "psi4",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

pub fn classify(clicks: ClickPattern) -> Verdict {
    use DetectorId::*;
    let psi3 = [ClickPattern::from_detectors([D1, D3]), ClickPattern::from_detectors([D2, D4])];
    let psi4 = [ClickPattern::from_detectors([D1, D4]), ClickPattern::from_detectors([D2, D3])];
    if psi3.contains(&clicks) {
        Verdict::Psi3
    } else if psi4.contains(&clicks) {
        Verdict::Psi4
    } else {
        Verdict::Inconclusive
    }
}

/// Where each photon of a ket lands: a detector, or `None` when it leaves
/// the detector plane (only possible with misaligned optics). Sorted.
pub type Landing = [Option<DetectorId>; 2];

pub(crate) fn landing_of(ket: &Ket) -> Landing {
    let photons = ket.photons();
    let mut out = [None, None];
    for (slot, p) in photons.iter().take(2).enumerate() {
        out[slot] = DetectorId::from_mode(p.mode);
    }
    out.sort();
    out
}

pub fn clicks_of(landing: &Landing) -> ClickPattern {
    ClickPattern::from_detectors(landing.iter().flatten().copied())
}

/// Evolution record of one branch.
#[derive(Debug, Clone)]
pub struct BranchRun {
    pub branch: Branch,
    /// State after each step. All but the last are ordered; the last is in
    /// the representation the regime calls for.
    pub trajectory: Vec<SparseState>,
    pub landings: BTreeMap<Landing, f64>,
    pub clicks: BTreeMap<ClickPattern, f64>,
    pub verdicts: BTreeMap<Verdict, f64>,
}

impl BranchRun {
    pub fn final_state(&self) -> &SparseState {
        self.trajectory.last().expect("non-empty circuit")
    }

    pub fn verdict_probability(&self, verdict: Verdict) -> f64 {
        self.verdicts.get(&verdict).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub a: f64,
    pub b: f64,
    pub regime: Regime,
    pub branches: Vec<BranchRun>,
}

impl ProtocolRun {
    pub fn branch(&self, id: BranchId) -> &BranchRun {
        &self.branches[id as usize]
    }

    /// Probability of a conclusive verdict with ideal detectors.
    pub fn success_probability(&self) -> f64 {
        self.branches
            .iter()
            .map(|r| {
                let w = r.branch.coefficient * r.branch.coefficient;
                w * (r.verdict_probability(Verdict::Psi3) + r.verdict_probability(Verdict::Psi4))
            })
            .sum()
    }

    /// Heralded state of photons 1 and 4 for each verdict.
    ///
    /// Each detected ket `t` of photons 2 and 3 leaves photons 1 and 4 in
    /// `Σ_k c_k ⟨t|final_k⟩ |Bell_k⟩`; the kets with a given verdict are
    /// traced out into a density matrix.
    pub fn outcomes(&self) -> Vec<SwapOutcome> {
        let mut by_ket: BTreeMap<Ket, TwoQubitState> = BTreeMap::new();
        for run in &self.branches {
            let bell = run.branch.remote_bell.state();
            for (ket, amp) in run.final_state().iter() {
                let entry = by_ket
                    .entry(*ket)
                    .or_insert(TwoQubitState([Amplitude::new(0.0, 0.0); 4]));
                for i in 0..4 {
                    entry.0[i] += bell.0[i] * amp * run.branch.coefficient;
                }
            }
        }
        let mut rhos: BTreeMap<Verdict, TwoQubitDensity> =
            Verdict::ALL.into_iter().map(|v| (v, TwoQubitDensity::zero())).collect();
        for (ket, v) in &by_ket {
            let verdict = classify(clicks_of(&landing_of(ket)));
            rhos.get_mut(&verdict).expect("all verdicts").add_pure(v);
        }
        rhos.into_iter()
            .map(|(verdict, rho)| SwapOutcome::new(verdict, rho))
            .collect()
    }
}

/// Joint record of a verdict and the state it heralds on photons 1 and 4.
#[derive(Debug, Clone)]
pub struct SwapOutcome {
    pub verdict: Verdict,
    /// Probability of the verdict with ideal detectors.
    pub probability: f64,
    /// Normalized remote density matrix (zero if the verdict never occurs).
    pub remote_state: TwoQubitDensity,
    pub concurrence: f64,
    /// Fidelity with the heralded Bell state, or with the closest Bell state
    /// for an inconclusive verdict.
    pub bell_fidelity: f64,
}

impl SwapOutcome {
    fn new(verdict: Verdict, rho: TwoQubitDensity) -> Self {
        let probability = rho.trace();
        let remote_state = rho.normalized().unwrap_or_else(TwoQubitDensity::zero);
        let bell_fidelity = match verdict.heralded_bell() {
            Some(bell) => remote_state.fidelity(&bell.state()),
            None => BellState::ALL
                .iter()
                .map(|b| remote_state.fidelity(&b.state()))
                .fold(0.0, f64::max),
        };
        // Wootters' formula loses accuracy on rank-one input (square roots of
        // round-off eigenvalues), so pure states use 2|αδ − βγ| directly.
        let concurrence = remote_state
            .pure_state(1e-12)
            .and_then(|psi| concurrence(&psi).ok())
            .unwrap_or_else(|| remote_state.concurrence());
        SwapOutcome {
            verdict,
            probability,
            concurrence,
            remote_state,
            bell_fidelity,
        }
    }

    /// The remote pure state, when the heralded state is pure.
    pub fn remote_pure_state(&self) -> Option<TwoQubitState> {
        self.remote_state.pure_state(1e-9)
    }
}

/// Runs every branch through the ideal circuit.
pub fn run_protocol(config: &SwapConfig) -> Result<ProtocolRun> {
    run_protocol_with_circuit(config, &build_protocol_circuit())
}

/// Runs every branch through `circuit`. All steps but the last act on the
/// ordered state; the last step runs under `config.regime`.
pub fn run_protocol_with_circuit(config: &SwapConfig, circuit: &Circuit) -> Result<ProtocolRun> {
    config.validate()?;
    if circuit.is_empty() {
        return Err(Error::InvalidConfig("circuit has no steps".into()));
    }
    let decomposition = decompose_initial(config.a, config.b)?;
    let bound = circuit.lattice_bound();
    let (head, last) = circuit.steps.split_at(circuit.len() - 1);
    let mut branches = Vec::with_capacity(4);
    for branch in decomposition.branches {
        let mut trajectory = Circuit::new(head.to_vec()).trajectory(&branch.clare_state)?;
        let before_last = trajectory.last().unwrap_or(&branch.clare_state).clone();
        trajectory.push(evolve_regime(&before_last, last, config.regime, bound)?);

        let final_state = trajectory.last().expect("just pushed");
        let mut landings = BTreeMap::new();
        for (ket, amp) in final_state.iter() {
            *landings.entry(landing_of(ket)).or_insert(0.0) += amp.norm_sqr();
        }
        let mut clicks = BTreeMap::new();
        let mut verdicts = BTreeMap::new();
        for (landing, p) in &landings {
            let pattern = clicks_of(landing);
            *clicks.entry(pattern).or_insert(0.0) += p;
            *verdicts.entry(classify(pattern)).or_insert(0.0) += p;
        }
        branches.push(BranchRun { branch, trajectory, landings, clicks, verdicts });
    }
    Ok(ProtocolRun { a: config.a, b: config.b, regime: config.regime, branches })
}

/// `2a²b²`, the probability that the branch is 3 or 4.
pub fn success_probability(a: f64, b: f64) -> f64 {
    2.0 * a * a * b * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::PhaseMode;
    use crate::statistics::detector_distribution;

    const S: f64 = FRAC_1_SQRT_2;

    #[test]
    fn symmetric_pair_coefficients() {
        let d = decompose_initial(S, S).unwrap();
        for b in &d.branches {
            assert!((b.coefficient - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn product_pair_has_no_phi_branches() {
        let d = decompose_initial(1.0, 0.0).unwrap();
        let c: Vec<f64> = d.branches.iter().map(|b| b.coefficient).collect();
        assert!((c[0] - S).abs() < 1e-15 && (c[1] - S).abs() < 1e-15);
        assert_eq!((c[2], c[3]), (0.0, 0.0));
        let hh = TwoQubitState::from_real([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.branches[0].clare_polarization, hh);
        assert_eq!(d.branches[1].clare_polarization, hh);
    }

    #[test]
    fn skewed_pair_weights() {
        let d = decompose_initial(0.8, 0.6).unwrap();
        assert!((d.branches[2].coefficient - 0.48).abs() < 1e-15);
        let phi = d.weight(BranchId::B3) + d.weight(BranchId::B4);
        assert!((phi - 0.4608).abs() < 1e-12);
        assert!((success_probability(0.8, 0.6) - 0.4608).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_pair_rejected() {
        assert!(matches!(decompose_initial(0.8, 0.8), Err(Error::UnnormalizedCoefficients(_))));
        assert!(SwapConfig::new(0.5, 0.5).is_err());
    }

    #[test]
    fn reconstruction_matches_product() {
        for (a, b) in [(S, S), (0.8, 0.6), (1.0, 0.0), (0.3, 0.91f64.sqrt())] {
            let d = decompose_initial(a, b).unwrap();
            let lhs = d.reconstruct();
            let rhs = product_input(a, b);
            for (x, y) in lhs.iter().zip(rhs.iter()) {
                assert!((x - y).norm() < 1e-15, "a = {a}");
            }
            let total: f64 = d.branches.iter().map(|b| b.coefficient.powi(2)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circuit_shape() {
        let c = build_protocol_circuit();
        assert_eq!(c.len(), 3);
        assert_eq!(c.steps[0].exchange, Some(ExchangeRule { position: -1 }));
        let h = c.steps[2].coin_line2.image(Polarization::H);
        assert!((h[0].1.re - S).abs() < 1e-15 && (h[1].1.re - S).abs() < 1e-15);
    }

    #[test]
    fn classification_table() {
        use DetectorId::*;
        let p = |ds: &[DetectorId]| classify(ClickPattern::from_detectors(ds.iter().copied()));
        assert_eq!(p(&[D1, D3]), Verdict::Psi3);
        assert_eq!(p(&[D2, D4]), Verdict::Psi3);
        assert_eq!(p(&[D1, D4]), Verdict::Psi4);
        assert_eq!(p(&[D2, D3]), Verdict::Psi4);
        assert_eq!(p(&[D1]), Verdict::Inconclusive);
        assert_eq!(p(&[D1, D2]), Verdict::Inconclusive);
        assert_eq!(p(&[D3, D4]), Verdict::Inconclusive);
        assert_eq!(p(&[]), Verdict::Inconclusive);
    }

    #[test]
    fn branch_verdicts_are_certain() {
        for regime in [Regime::Synchronized, Regime::Asynchronous] {
            let run = run_protocol(&SwapConfig::new(0.8, 0.6).unwrap().with_regime(regime)).unwrap();
            assert!((run.branch(BranchId::B3).verdict_probability(Verdict::Psi3) - 1.0).abs() < 1e-12);
            assert!((run.branch(BranchId::B4).verdict_probability(Verdict::Psi4) - 1.0).abs() < 1e-12);
            for id in [BranchId::B1, BranchId::B2] {
                assert!((run.branch(id).verdict_probability(Verdict::Inconclusive) - 1.0).abs() < 1e-12);
            }
            assert!((run.success_probability() - 0.4608).abs() < 1e-12);
        }
    }

    #[test]
    fn branch_four_ends_antisymmetric() {
        let run = run_protocol(&SwapConfig::new(S, S).unwrap()).unwrap();
        let fin = run.branch(BranchId::B4).final_state();
        let h1 = PhotonBasisKet::new(Polarization::H, Line::Line2, 1);
        let v1 = PhotonBasisKet::new(Polarization::V, Line::Line3, -1);
        let expected = SparseState::from_terms(
            Representation::Symmetrized,
            [(crate::hilbert::symmetrized(h1, v1), Amplitude::new(-S, 0.0)),
             (crate::hilbert::symmetrized(
                 PhotonBasisKet::new(Polarization::V, Line::Line2, -1),
                 PhotonBasisKet::new(Polarization::H, Line::Line3, 1)),
              Amplitude::new(-S, 0.0))],
        )
        .unwrap();
        assert!(fin.states_equal(&expected, 1e-12, PhaseMode::Exact));
        let dist = detector_distribution(fin).unwrap();
        assert_eq!(dist.len(), 2);
    }

    #[test]
    fn heralded_remote_states() {
        let run = run_protocol(&SwapConfig::new(0.6, 0.8).unwrap()).unwrap();
        for outcome in run.outcomes() {
            match outcome.verdict {
                Verdict::Psi3 | Verdict::Psi4 => {
                    assert!((outcome.probability - 2.0 * 0.36 * 0.64 / 2.0).abs() < 1e-12);
                    assert!((outcome.bell_fidelity - 1.0).abs() < 1e-12);
                    assert!((outcome.concurrence - 1.0).abs() < 1e-9);
                    let pure = outcome.remote_pure_state().unwrap();
                    assert!((concurrence(&pure).unwrap() - 1.0).abs() < 1e-12);
                }
                Verdict::Inconclusive => {
                    assert!((outcome.probability - (1.0 - 2.0 * 0.36 * 0.64)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(SwapConfig::from_a(1.2).is_err());
        assert!(SwapConfig::from_a(0.5).unwrap().with_detector_efficiency(1.5).validate().is_err());
        assert!(SwapConfig::from_a(0.5).unwrap().with_jitter(-0.1).validate().is_err());
        let c = SwapConfig::from_a(0.6).unwrap();
        assert!((c.b - 0.8).abs() < 1e-15);
    }
}
