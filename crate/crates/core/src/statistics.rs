//! Photon statistics: labelled versus bosonic two-photon descriptions, and
//! what the detectors see.
//!
//! While the two photons travel on separate paths their labels (which line
//! they were injected on) are physical, so an ordered state is exact. Once
//! they share a spatial mode at the same time they are indistinguishable and
//! only the occupation of each mode is meaningful. [`symmetrize`] performs
//! that change of description: it replaces every ordered ket `|x⟩|y⟩` by the
//! bosonic creation operators `a†_x a†_y |0⟩`, which in the normalized
//! occupation basis gives
//!
//! - `{x, y}` with amplitude `α_xy + α_yx` for `x ≠ y`,
//! - `{x, x}` with amplitude `√2 · α_xx`.
//!
//! Linear optics acts on creation operators exactly as it acts on a single
//! photon, so evolving and then symmetrizing equals symmetrizing and then
//! evolving.
//!
//! In the asynchronous regime two photons sharing a line pass its last beam
//! displacer at different times, so they stay distinguishable and keep
//! their injection labels. Photons on different lines are still identical:
//! [`label_by_line`] merges `|x⟩|y⟩` and `|y⟩|x⟩` for them into one ket with
//! the line-2 photon first, which adds the amplitudes exactly as
//! symmetrizing would.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{Ket, Line, Mode, Representation, SparseState, SymmetrizedKet};
use crate::walk::{run_step, StepDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// The photons overlap in time and bunch as identical bosons.
    Synchronized,
    /// The photons arrive at different times and stay distinguishable.
    Asynchronous,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Synchronized => "synchronized",
            Regime::Asynchronous => "asynchronous",
        })
    }
}

/// Converts an ordered two-photon state to the bosonic occupation basis.
///
/// Symmetrized input is returned unchanged.
pub fn symmetrize(state: &SparseState) -> Result<SparseState> {
    match state.representation() {
        Representation::Symmetrized => return Ok(state.clone()),
        Representation::Single => return Err(Error::ArityMismatch),
        Representation::Ordered => {}
    }
    let mut out = SparseState::zero(Representation::Symmetrized);
    for (ket, amp) in state.iter() {
        let Ket::Ordered([x, y]) = ket else { unreachable!() };
        let weight = if x == y { SQRT_2 } else { 1.0 };
        out.accumulate(Ket::Symmetrized(SymmetrizedKet::new(*x, *y)), amp * weight)?;
    }
    Ok(out.pruned())
}

/// Relabels every ordered ket whose photons are on different lines so that
/// the line-2 photon comes first. Kets with both photons on one line are
/// left alone.
pub fn label_by_line(state: &SparseState) -> Result<SparseState> {
    if state.representation() != Representation::Ordered {
        return Err(Error::RepresentationMismatch {
            expected: Representation::Ordered,
            found: state.representation(),
        });
    }
    let mut out = SparseState::zero(Representation::Ordered);
    for (ket, amp) in state.iter() {
        let Ket::Ordered([x, y]) = ket else { unreachable!() };
        let ket = if x.mode.line == Line::Line3 && y.mode.line == Line::Line2 {
            Ket::Ordered([*y, *x])
        } else {
            *ket
        };
        out.accumulate(ket, *amp)?;
    }
    Ok(out.pruned())
}

/// Runs the remaining `steps` on a state in the description `regime` calls for.
///
/// Synchronized: the state is symmetrized first. Asynchronous: the state must
/// still be ordered and is passed through [`label_by_line`].
pub fn evolve_regime(
    state: &SparseState,
    steps: &[StepDescriptor],
    regime: Regime,
    bound: i32,
) -> Result<SparseState> {
    let mut s = match (regime, state.representation()) {
        (Regime::Synchronized, Representation::Ordered | Representation::Symmetrized) => {
            symmetrize(state)?
        }
        (Regime::Asynchronous, Representation::Ordered) => label_by_line(state)?,
        (regime, found) => return Err(Error::RegimeMismatch { regime, found }),
    };
    for step in steps {
        s = run_step(&s, step, bound)?;
    }
    Ok(s)
}

/// The four detectors behind the last beam displacers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DetectorId {
    D1,
    D2,
    D3,
    D4,
}

impl DetectorId {
    pub const ALL: [DetectorId; 4] = [DetectorId::D1, DetectorId::D2, DetectorId::D3, DetectorId::D4];

    /// `D1 = (line 2, +1)`, `D2 = (line 2, −1)`, `D3 = (line 3, +1)`,
    /// `D4 = (line 3, −1)`.
    pub fn mode(self) -> Mode {
        match self {
            DetectorId::D1 => Mode::new(Line::Line2, 1),
            DetectorId::D2 => Mode::new(Line::Line2, -1),
            DetectorId::D3 => Mode::new(Line::Line3, 1),
            DetectorId::D4 => Mode::new(Line::Line3, -1),
        }
    }

    pub fn from_mode(mode: Mode) -> Option<DetectorId> {
        DetectorId::ALL.into_iter().find(|d| d.mode() == mode)
    }

    pub fn line(self) -> Line {
        self.mode().line
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", *self as u8 + 1)
    }
}

/// The set of detectors that clicked. Detectors do not resolve photon
/// number, so two photons in one detector are a single click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ClickPattern(u8);

impl ClickPattern {
    pub fn empty() -> Self {
        ClickPattern(0)
    }

    pub fn from_detectors<I: IntoIterator<Item = DetectorId>>(detectors: I) -> Self {
        ClickPattern(detectors.into_iter().fold(0, |m, d| m | d.bit()))
    }

    pub fn contains(self, d: DetectorId) -> bool {
        self.0 & d.bit() != 0
    }

    pub fn detectors(self) -> Vec<DetectorId> {
        DetectorId::ALL.into_iter().filter(|d| self.contains(*d)).collect()
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for ClickPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<String> = self.detectors().iter().map(|d| d.to_string()).collect();
        f.write_str(&names.join("+"))
    }
}

impl Serialize for ClickPattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Which detector each of the two photons reaches, sorted.
pub type Arrival = [DetectorId; 2];

/// Probability of every detector arrival pair in a final two-photon state.
pub fn arrival_distribution(final_state: &SparseState) -> Result<BTreeMap<Arrival, f64>> {
    if final_state.representation() == Representation::Single {
        return Err(Error::ArityMismatch);
    }
    let mut out = BTreeMap::new();
    for (ket, amp) in final_state.iter() {
        let photons = ket.photons();
        let mut detectors = [DetectorId::D1; 2];
        for (slot, p) in photons.iter().enumerate() {
            detectors[slot] = DetectorId::from_mode(p.mode)
                .ok_or_else(|| Error::OutsideDetectorPlane(format!("{p} in {ket}")))?;
        }
        detectors.sort();
        *out.entry(detectors).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(out)
}

/// Probability of every click pattern, marginalized over polarization.
pub fn detector_distribution(final_state: &SparseState) -> Result<BTreeMap<ClickPattern, f64>> {
    let mut out = BTreeMap::new();
    for (arrival, p) in arrival_distribution(final_state)? {
        *out.entry(ClickPattern::from_detectors(arrival)).or_insert(0.0) += p;
    }
    Ok(out)
}

/// True when every stored term has its two photons on different lines.
pub fn photons_on_different_lines(state: &SparseState) -> bool {
    state.iter().all(|(ket, _)| {
        let ps = ket.photons();
        ps.len() == 2 && ps[0].line() != ps[1].line()
    })
}

/// True when every stored term has both photons on the same line.
pub fn photons_on_same_line(state: &SparseState) -> bool {
    state.iter().all(|(ket, _)| {
        let ps = ket.photons();
        ps.len() == 2 && ps[0].line() == ps[1].line()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{ordered, symmetrized, Amplitude, PhaseMode, PhotonBasisKet, Polarization};
    use Line::*;
    use Polarization::*;

    fn r(x: f64) -> Amplitude {
        Amplitude::new(x, 0.0)
    }

    #[test]
    fn identical_labels_become_double_occupation() {
        let x = PhotonBasisKet::new(H, Line2, 0);
        let s = symmetrize(&SparseState::basis(ordered(x, x))).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.amplitude(&symmetrized(x, x)) - r(SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn both_orderings_combine() {
        let x = PhotonBasisKet::new(H, Line2, 0);
        let y = PhotonBasisKet::new(V, Line2, 0);
        let s = SparseState::from_terms(
            Representation::Ordered,
            [(ordered(x, y), r(0.3)), (ordered(y, x), r(0.5))],
        )
        .unwrap();
        let b = symmetrize(&s).unwrap();
        assert!((b.amplitude(&symmetrized(x, y)) - r(0.8)).norm() < 1e-15);
    }

    #[test]
    fn symmetrizing_a_single_photon_fails() {
        let s = SparseState::basis(crate::hilbert::single(H, Line2, 0));
        assert_eq!(symmetrize(&s).unwrap_err(), Error::ArityMismatch);
    }

    #[test]
    fn hong_ou_mandel_on_a_wave_plate() {
        // H and V in one mode through HWP(22.5°): the HV terms cancel.
        let x = PhotonBasisKet::new(H, Line2, 0);
        let y = PhotonBasisKet::new(V, Line2, 0);
        let s = symmetrize(&SparseState::basis(ordered(x, y))).unwrap();
        let out = crate::walk::apply_coin(&s, Line2, &crate::walk::CoinOperator::hadamard()).unwrap();
        let expected = SparseState::from_terms(
            Representation::Symmetrized,
            [
                (symmetrized(x, x), r(std::f64::consts::FRAC_1_SQRT_2)),
                (symmetrized(y, y), r(-std::f64::consts::FRAC_1_SQRT_2)),
            ],
        )
        .unwrap();
        assert!(out.states_equal(&expected, 1e-12, PhaseMode::Exact));
    }

    #[test]
    fn asynchronous_regime_rejects_symmetrized_input() {
        let x = PhotonBasisKet::new(H, Line2, 0);
        let s = SparseState::basis(symmetrized(x, x));
        assert!(matches!(
            evolve_regime(&s, &[], Regime::Asynchronous, 6),
            Err(Error::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn detector_modes() {
        for d in DetectorId::ALL {
            assert_eq!(DetectorId::from_mode(d.mode()), Some(d));
        }
        assert_eq!(DetectorId::from_mode(Mode::new(Line2, 0)), None);
    }

    #[test]
    fn photons_off_the_detector_plane() {
        let s = SparseState::basis(ordered(
            PhotonBasisKet::new(H, Line2, 0),
            PhotonBasisKet::new(H, Line3, 1),
        ));
        let err = detector_distribution(&s).unwrap_err();
        assert!(err.to_string().starts_with("photon outside detector plane"));
    }

    #[test]
    fn bunched_photons_make_one_click() {
        let x = PhotonBasisKet::new(H, Line3, -1);
        let s = SparseState::basis(symmetrized(x, x));
        let dist = detector_distribution(&s).unwrap();
        assert_eq!(dist.len(), 1);
        let (pattern, p) = dist.into_iter().next().unwrap();
        assert_eq!(pattern, ClickPattern::from_detectors([DetectorId::D4]));
        assert_eq!(pattern.count(), 1);
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn click_pattern_display() {
        let p = ClickPattern::from_detectors([DetectorId::D3, DetectorId::D1]);
        assert_eq!(p.to_string(), "D1+D3");
        assert_eq!(ClickPattern::empty().to_string(), "none");
    }
}
