//! Self-check of a circuit against the closed-form reference states and the
//! protocol's detection and concentration properties.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::dsl::{builtin_protocol_source, print, parse};
use crate::hilbert::{single, Line, PhaseMode, Polarization, SparseState};
use crate::protocol::{
    build_protocol_circuit, decompose_initial, run_protocol_with_circuit, success_probability, BranchId, SwapConfig, Verdict,
};
use crate::reference;
use crate::statistics::{symmetrize, ClickPattern, DetectorId, Regime};
use crate::walk::{position_distribution, run_single_walker, run_step, Circuit, CoinOperator};

/// Amplitude tolerance for state comparisons.
pub const STATE_TOLERANCE: f64 = 1e-10;
/// Tolerance for probabilities, fidelities and concurrences.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// `(a, b)` pairs covering the symmetric and strongly skewed cases.
pub fn reference_pairs() -> [(f64, f64); 5] {
    [
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        (0.8, 0.6),
        (0.6, 0.8),
        (0.95, (1.0 - 0.95f64 * 0.95).sqrt()),
        (0.3, 0.91f64.sqrt()),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, max_error: f64, tolerance: f64) -> Self {
        Check { name: name.into(), max_error, tolerance }
    }

    fn failed(name: impl Into<String>, reason: impl fmt::Display) -> Self {
        Check { name: format!("{} ({reason})", name.into()), max_error: f64::INFINITY, tolerance: 0.0 }
    }

    pub fn passed(&self) -> bool {
        self.max_error < self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<64} max error {:.3e} (tol {:.0e})", self.name, self.max_error, self.tolerance)
    }
}

fn compare(name: String, actual: &SparseState, expected: &SparseState) -> Check {
    let actual = if expected.representation() != actual.representation() {
        match symmetrize(actual) {
            Ok(s) => s,
            Err(e) => return Check::failed(name, e),
        }
    } else {
        actual.clone()
    };
    match actual.max_amplitude_error(expected, PhaseMode::UpToGlobalPhase) {
        Ok(err) => Check::new(name, err, STATE_TOLERANCE),
        Err(e) => Check::failed(name, e),
    }
}

/// Expected click-pattern distribution of each branch for the ideal circuit
/// with synchronized photons.
pub fn expected_clicks(id: BranchId, a: f64, b: f64) -> Vec<(ClickPattern, f64)> {
    use DetectorId::*;
    let one = |d| ClickPattern::from_detectors([d]);
    let two = |d, e| ClickPattern::from_detectors([d, e]);
    match id {
        BranchId::B1 | BranchId::B2 => {
            let (a4, b4) = (a.powi(4), b.powi(4));
            let (pa, pb) = (a4 / (2.0 * (a4 + b4)), b4 / (2.0 * (a4 + b4)));
            vec![(one(D1), pa), (one(D2), pa), (one(D3), pb), (one(D4), pb)]
        }
        BranchId::B3 => vec![(two(D1, D3), 0.5), (two(D2, D4), 0.5)],
        BranchId::B4 => vec![(two(D1, D4), 0.5), (two(D2, D3), 0.5)],
    }
}

/// Runs every check against `circuit`.
pub fn run_checks(circuit: &Circuit) -> Vec<Check> {
    let mut checks = Vec::new();
    for (a, b) in reference_pairs() {
        checks.extend(state_checks(circuit, a, b));
        checks.extend(detection_checks(circuit, a, b));
    }
    checks.push(walker_check());
    checks
}

fn state_checks(circuit: &Circuit, a: f64, b: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    let tag = format!("a={a:.4}");
    let runs = [Regime::Synchronized, Regime::Asynchronous].map(|regime| {
        SwapConfig::new(a, b)
            .and_then(|c| run_protocol_with_circuit(&c.with_regime(regime), circuit))
    });
    let (sync, asyn) = match runs {
        [Ok(s), Ok(t)] => (s, t),
        [Err(e), _] | [_, Err(e)] => return vec![Check::failed(format!("evolution, {tag}"), e)],
    };
    if sync.branches[0].trajectory.len() != 3 {
        return vec![Check::failed(format!("evolution, {tag}"), "circuit does not have three steps")];
    }
    let mut first_step = circuit.steps[0].clone();
    first_step.exchange = None;

    for id in BranchId::ALL {
        let s = sync.branch(id);
        let name = |stage: &str| format!("branch {id}, {stage}, {tag}");
        let initial = &s.branch.clare_state;
        checks.push(compare(name("initial state"), initial, &reference::initial(id, a, b)));
        match run_step(initial, &first_step, circuit.lattice_bound()) {
            Ok(pre) => checks.push(compare(
                name("step 1 before exchange"),
                &pre,
                &reference::after_first_shift(id, a, b),
            )),
            Err(e) => checks.push(Check::failed(name("step 1 before exchange"), e)),
        }
        checks.push(compare(name("step 1"), &s.trajectory[0], &reference::after_step1(id, a, b)));
        checks.push(compare(name("step 2, symmetrized"), &s.trajectory[1], &reference::after_step2(id, a, b)));
        checks.push(compare(
            name("step 3, synchronized"),
            s.final_state(),
            &reference::final_synchronized(id, a, b),
        ));
        checks.push(compare(
            name("step 3, asynchronous"),
            asyn.branch(id).final_state(),
            &reference::final_asynchronous(id, a, b),
        ));

        let verdict_gap = Verdict::ALL
            .iter()
            .map(|v| (s.verdict_probability(*v) - asyn.branch(id).verdict_probability(*v)).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(name("verdicts agree across regimes"), verdict_gap, PROBABILITY_TOLERANCE));
    }
    checks
}

fn detection_checks(circuit: &Circuit, a: f64, b: f64) -> Vec<Check> {
    let tag = format!("a={a:.4}");
    let config = match SwapConfig::new(a, b) {
        Ok(c) => c,
        Err(e) => return vec![Check::failed(format!("detection, {tag}"), e)],
    };
    let run = match run_protocol_with_circuit(&config, circuit) {
        Ok(r) => r,
        Err(e) => return vec![Check::failed(format!("detection, {tag}"), e)],
    };
    let mut checks = Vec::new();
    for id in BranchId::ALL {
        let actual = &run.branch(id).clicks;
        let expected = expected_clicks(id, a, b);
        let mut gap: f64 = 0.0;
        for (pattern, p) in &expected {
            gap = gap.max((actual.get(pattern).copied().unwrap_or(0.0) - p).abs());
        }
        for (pattern, p) in actual {
            if !expected.iter().any(|(q, _)| q == pattern) {
                gap = gap.max(*p);
            }
        }
        checks.push(Check::new(format!("branch {id}, detector table, {tag}"), gap, PROBABILITY_TOLERANCE));
    }

    let closed_form = success_probability(a, b);
    let from_branches = decompose_initial(a, b)
        .map(|d| d.weight(BranchId::B3) + d.weight(BranchId::B4))
        .unwrap_or(f64::NAN);
    let gap = (closed_form - from_branches).abs().max((closed_form - run.success_probability()).abs());
    checks.push(Check::new(format!("success probability 2a^2b^2, {tag}"), gap, PROBABILITY_TOLERANCE));

    if a * b > 0.0 {
        for outcome in run.outcomes() {
            if outcome.verdict == Verdict::Inconclusive {
                continue;
            }
            let gap = (1.0 - outcome.bell_fidelity).abs().max((1.0 - outcome.concurrence).abs());
            checks.push(Check::new(
                format!("{} heralds a maximally entangled pair, {tag}", outcome.verdict),
                gap,
                PROBABILITY_TOLERANCE,
            ));
        }
    }
    checks
}

/// The embedded `.qwc` source compiles to the programmatic circuit, and
/// printing then reparsing it changes nothing.
pub fn builtin_source_check() -> Check {
    let name = "builtin .qwc source matches the programmatic circuit";
    let source = builtin_protocol_source();
    let compiled = match source.parse() {
        Ok(c) => c.circuit,
        Err(diags) => return Check::failed(name, format!("{} diagnostics", diags.len())),
    };
    let reparsed = match print(&compiled).map(|text| parse(&text)) {
        Ok(Ok(c)) => c.circuit,
        Ok(Err(diags)) => return Check::failed(name, format!("{} diagnostics on reparse", diags.len())),
        Err(e) => return Check::failed(name, e),
    };
    match (compiled.distance(&build_protocol_circuit()), reparsed.distance(&compiled)) {
        (Some(d), Some(r)) => Check::new(name, d.max(r), PROBABILITY_TOLERANCE),
        _ => Check::failed(name, "step structure differs"),
    }
}

fn walker_check() -> Check {
    let name = "three-step Hadamard walk from |H,0>";
    let start = SparseState::basis(single(Polarization::H, Line::Line2, 0));
    match run_single_walker(&start, &CoinOperator::hadamard(), 3) {
        Ok(out) => {
            let dist = position_distribution(&out);
            let expected = [(3, 0.125), (1, 0.625), (-1, 0.125), (-3, 0.125)];
            let mut gap: f64 = 0.0;
            for (x, p) in expected {
                gap = gap.max((dist.get(&x).copied().unwrap_or(0.0) - p).abs());
            }
            let total: f64 = dist.values().sum();
            Check::new(name, gap.max((total - 1.0).abs()), PROBABILITY_TOLERANCE)
        }
        Err(e) => Check::failed(name, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_circuit_passes_everything() {
        let checks = run_checks(&build_protocol_circuit());
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(checks.len() > 100);
        assert!(builtin_source_check().passed());
    }

    #[test]
    fn corrupted_final_coin_is_caught() {
        let mut circuit = build_protocol_circuit();
        circuit.steps[2].coin_line3 = CoinOperator::identity();
        let checks = run_checks(&circuit);
        let bad = checks
            .iter()
            .find(|c| c.name.starts_with("branch 3, step 3, synchronized"))
            .unwrap();
        assert!(!bad.passed());
    }
}
