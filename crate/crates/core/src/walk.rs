//! Coin flips, conditional shifts and path exchanges.
//!
//! One step of the walk applies, in this fixed order:
//!
//! 1. phase retarders on individual `(line, position)` modes,
//! 2. the coin of each line to every photon currently on that line,
//! 3. the conditional shift `S` (`H` moves `+1`, `V` moves `-1`),
//! 4. an optional exchange of the two lines' modes at one lattice site.
//!
//! Every operation is a single-particle unitary, so it acts on ordered and
//! symmetrized two-photon states alike (see [`apply_local`]).

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    Amplitude, Ket, Line, PhotonBasisKet, Polarization, Representation, SparseState,
    SymmetrizedKet,
};

const UNITARITY_TOL: f64 = 1e-12;

/// How a coin was specified, kept so circuits can be printed and perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CoinKind {
    Identity,
    /// Half-wave plate with its fast axis at `degrees`.
    HalfWavePlate { degrees: f64 },
    Custom,
}

/// A 2×2 unitary on the `{H, V}` polarization basis.
///
/// `matrix[row][col]`; column `j` is the image of basis polarization `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOperator {
    matrix: [[Amplitude; 2]; 2],
    kind: CoinKind,
}

impl CoinOperator {
    /// Wraps an arbitrary matrix, rejecting it unless `U†U = I` to 1e-12.
    pub fn new(matrix: [[Amplitude; 2]; 2]) -> Result<Self> {
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARITY_TOL || !deviation.is_finite() {
            return Err(Error::NonUnitaryCoin(deviation));
        }
        Ok(CoinOperator {
            matrix,
            kind: CoinKind::Custom,
        })
    }

    pub fn identity() -> Self {
        let one = Amplitude::new(1.0, 0.0);
        let zero = Amplitude::new(0.0, 0.0);
        CoinOperator {
            matrix: [[one, zero], [zero, one]],
            kind: CoinKind::Identity,
        }
    }

    /// `HWP(θ) = [[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`, θ in degrees.
    pub fn half_wave_plate(degrees: f64) -> Self {
        let two_theta = 2.0 * degrees.to_radians();
        let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
        let (s, c) = (snap(two_theta.sin()), snap(two_theta.cos()));
        CoinOperator {
            matrix: [
                [Amplitude::new(c, 0.0), Amplitude::new(s, 0.0)],
                [Amplitude::new(s, 0.0), Amplitude::new(-c, 0.0)],
            ],
            kind: CoinKind::HalfWavePlate { degrees },
        }
    }

    /// Polarization flip, realized as `HWP(45°)`.
    pub fn not() -> Self {
        Self::half_wave_plate(45.0)
    }

    /// Hadamard coin, realized as `HWP(22.5°)`.
    pub fn hadamard() -> Self {
        Self::half_wave_plate(22.5)
    }

    pub fn matrix(&self) -> &[[Amplitude; 2]; 2] {
        &self.matrix
    }

    pub fn kind(&self) -> CoinKind {
        self.kind
    }

    /// Image of a basis polarization: `Σ_out matrix[out][pol] |out⟩`.
    pub fn image(&self, pol: Polarization) -> [(Polarization, Amplitude); 2] {
        let col = pol.index();
        [
            (Polarization::H, self.matrix[0][col]),
            (Polarization::V, self.matrix[1][col]),
        ]
    }

    /// Largest entrywise difference between two coin matrices.
    pub fn distance(&self, other: &CoinOperator) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.matrix[r][c] - other.matrix[r][c]).norm());
            }
        }
        worst
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

fn unitarity_deviation(m: &[[Amplitude; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let acc: Amplitude = m.iter().map(|row| row[i].conj() * row[j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

/// The conditional shift: `H` moves one site up, `V` one site down.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ShiftRule;

impl ShiftRule {
    pub fn displacement(pol: Polarization) -> i32 {
        match pol {
            Polarization::H => 1,
            Polarization::V => -1,
        }
    }
}

/// Swaps the line-2 and line-3 modes at one lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExchangeRule {
    pub position: i32,
}

/// Multiplies amplitudes by `e^{iφ}` per photon found at `(line, position)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRetarder {
    pub line: Line,
    pub position: i32,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDescriptor {
    pub coin_line2: CoinOperator,
    pub coin_line3: CoinOperator,
    pub retarders: Vec<PhaseRetarder>,
    pub shift: bool,
    pub exchange: Option<ExchangeRule>,
}

impl StepDescriptor {
    /// Identity coins, no retarders, no shift, no exchange.
    pub fn identity() -> Self {
        StepDescriptor {
            coin_line2: CoinOperator::identity(),
            coin_line3: CoinOperator::identity(),
            retarders: Vec::new(),
            shift: false,
            exchange: None,
        }
    }

    pub fn coin(&self, line: Line) -> &CoinOperator {
        match line {
            Line::Line2 => &self.coin_line2,
            Line::Line3 => &self.coin_line3,
        }
    }

    pub fn coin_mut(&mut self, line: Line) -> &mut CoinOperator {
        match line {
            Line::Line2 => &mut self.coin_line2,
            Line::Line3 => &mut self.coin_line3,
        }
    }

    /// Largest operator difference, or `None` if the steps differ structurally.
    pub fn distance(&self, other: &StepDescriptor) -> Option<f64> {
        if self.shift != other.shift
            || self.exchange != other.exchange
            || self.retarders.len() != other.retarders.len()
        {
            return None;
        }
        let mut worst = self
            .coin_line2
            .distance(&other.coin_line2)
            .max(self.coin_line3.distance(&other.coin_line3));
        for (r, s) in self.retarders.iter().zip(&other.retarders) {
            if r.line != s.line || r.position != s.position {
                return None;
            }
            let diff = (Amplitude::from_polar(1.0, r.phase) - Amplitude::from_polar(1.0, s.phase))
                .norm();
            worst = worst.max(diff);
        }
        Some(worst)
    }
}

/// An ordered list of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub steps: Vec<StepDescriptor>,
}

impl Circuit {
    pub fn new(steps: Vec<StepDescriptor>) -> Self {
        Circuit { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Largest admissible `|position|`: twice the number of steps.
    pub fn lattice_bound(&self) -> i32 {
        2 * self.steps.len() as i32
    }

    /// Largest operator difference over all steps, or `None` if the circuits
    /// differ in structure.
    pub fn distance(&self, other: &Circuit) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        self.steps
            .iter()
            .zip(&other.steps)
            .try_fold(0.0f64, |acc, (s, t)| s.distance(t).map(|d| acc.max(d)))
    }

    /// Runs every step, returning the state after each one.
    pub fn trajectory(&self, initial: &SparseState) -> Result<Vec<SparseState>> {
        let bound = self.lattice_bound();
        let mut out = Vec::with_capacity(self.len());
        let mut state = initial.clone();
        for step in &self.steps {
            state = run_step(&state, step, bound)?;
            out.push(state.clone());
        }
        Ok(out)
    }
}

/// Applies a single-particle linear map to every photon of `state`.
///
/// For ordered states the map acts on each slot independently. For
/// symmetrized states each occupation ket is expanded into its symmetric
/// two-slot wavefunction (`{x,y} → (|xy⟩+|yx⟩)/√2`, `{x,x} → |xx⟩`), the map
/// is applied to both slots, and the result is projected back with
/// `(α_xy + α_yx)/√2` for `x ≠ y` and `α_xx` for doubly occupied labels.
pub fn apply_local<F>(state: &SparseState, op: F) -> Result<SparseState>
where
    F: Fn(PhotonBasisKet) -> Result<Vec<(PhotonBasisKet, Amplitude)>>,
{
    let repr = state.representation();
    let mut out = SparseState::zero(repr);
    match repr {
        Representation::Single => {
            for (ket, amp) in state.iter() {
                let Ket::Single(p) = ket else { unreachable!() };
                for (q, c) in op(*p)? {
                    out.accumulate(Ket::Single(q), amp * c)?;
                }
            }
        }
        Representation::Ordered => {
            for (ket, amp) in state.iter() {
                let Ket::Ordered([x, y]) = ket else { unreachable!() };
                let (xs, ys) = (op(*x)?, op(*y)?);
                for (x2, cx) in &xs {
                    for (y2, cy) in &ys {
                        out.accumulate(Ket::Ordered([*x2, *y2]), amp * cx * cy)?;
                    }
                }
            }
        }
        Representation::Symmetrized => {
            let mut slots = SparseState::zero(Representation::Ordered);
            for (ket, amp) in state.iter() {
                let Ket::Symmetrized(s) = ket else { unreachable!() };
                let [x, y] = s.labels();
                let expansions: Vec<([PhotonBasisKet; 2], Amplitude)> = if x == y {
                    vec![([x, x], *amp)]
                } else {
                    vec![([x, y], amp * FRAC_1_SQRT_2), ([y, x], amp * FRAC_1_SQRT_2)]
                };
                for ([u, v], a) in expansions {
                    let (us, vs) = (op(u)?, op(v)?);
                    for (u2, cu) in &us {
                        for (v2, cv) in &vs {
                            slots.accumulate(Ket::Ordered([*u2, *v2]), a * cu * cv)?;
                        }
                    }
                }
            }
            for (ket, amp) in slots.iter() {
                let Ket::Ordered([x, y]) = ket else { unreachable!() };
                let weight = if x == y { 1.0 } else { FRAC_1_SQRT_2 };
                out.accumulate(Ket::Symmetrized(SymmetrizedKet::new(*x, *y)), amp * weight)?;
            }
        }
    }
    Ok(out.pruned())
}

/// Applies `coin` to every photon currently on `line`.
pub fn apply_coin(state: &SparseState, line: Line, coin: &CoinOperator) -> Result<SparseState> {
    apply_local(state, |p| {
        if p.line() == line {
            Ok(coin
                .image(p.pol)
                .into_iter()
                .map(|(pol, c)| (PhotonBasisKet { pol, ..p }, c))
                .collect())
        } else {
            Ok(vec![(p, Amplitude::new(1.0, 0.0))])
        }
    })
}

/// Moves every photon `+1` if `H`, `-1` if `V`. Fails if any photon would
/// leave `[-bound, bound]`.
pub fn apply_shift(state: &SparseState, bound: i32) -> Result<SparseState> {
    apply_local(state, |p| {
        let position = p.position() + ShiftRule::displacement(p.pol);
        if position.abs() > bound {
            return Err(Error::LatticeBoundExceeded { position, bound });
        }
        let mut q = p;
        q.mode.position = position;
        Ok(vec![(q, Amplitude::new(1.0, 0.0))])
    })
}

/// Moves photons at `rule.position` onto the other line. An involution.
pub fn apply_exchange(state: &SparseState, rule: ExchangeRule) -> Result<SparseState> {
    apply_local(state, |p| {
        let mut q = p;
        if p.position() == rule.position {
            q.mode.line = p.line().other();
        }
        Ok(vec![(q, Amplitude::new(1.0, 0.0))])
    })
}

pub fn apply_retarder(state: &SparseState, retarder: &PhaseRetarder) -> Result<SparseState> {
    let phase = Amplitude::from_polar(1.0, retarder.phase);
    apply_local(state, |p| {
        let c = if p.line() == retarder.line && p.position() == retarder.position {
            phase
        } else {
            Amplitude::new(1.0, 0.0)
        };
        Ok(vec![(p, c)])
    })
}

/// Retarders, then per-line coins, then shift, then exchange.
pub fn run_step(state: &SparseState, step: &StepDescriptor, bound: i32) -> Result<SparseState> {
    let mut s = state.clone();
    for r in &step.retarders {
        s = apply_retarder(&s, r)?;
    }
    s = apply_coin(&s, Line::Line2, &step.coin_line2)?;
    s = apply_coin(&s, Line::Line3, &step.coin_line3)?;
    if step.shift {
        s = apply_shift(&s, bound)?;
    }
    if let Some(rule) = step.exchange {
        s = apply_exchange(&s, rule)?;
    }
    Ok(s)
}

/// `U^t |initial⟩` with `U = S (C ⊗ I)` for a single walker.
pub fn run_single_walker(initial: &SparseState, coin: &CoinOperator, t: i64) -> Result<SparseState> {
    if t < 0 {
        return Err(Error::NegativeSteps(t));
    }
    if initial.representation() != Representation::Single {
        return Err(Error::ArityMismatch);
    }
    let bound = i32::try_from(2 * t).unwrap_or(i32::MAX);
    let step = StepDescriptor {
        coin_line2: *coin,
        coin_line3: *coin,
        retarders: Vec::new(),
        shift: true,
        exchange: None,
    };
    let mut state = initial.clone();
    for _ in 0..t {
        state = run_step(&state, &step, bound)?;
    }
    Ok(state)
}

/// Probability per lattice position of a one-walker state.
pub fn position_distribution(state: &SparseState) -> std::collections::BTreeMap<i32, f64> {
    let mut out = std::collections::BTreeMap::new();
    for (ket, amp) in state.iter() {
        for p in ket.photons() {
            *out.entry(p.position()).or_insert(0.0) += amp.norm_sqr();
        }
    }
    out
}
