//! Sparse amplitude vectors over photon mode labels.
//!
//! A photon is described by its polarization (the walker's coin) and its
//! spatial mode: which line it travels on and its lattice position along
//! that line. Two-photon states come in two flavours:
//!
//! - **ordered**: slot 0 is the photon injected on line 2, slot 1 the photon
//!   injected on line 3. The labels stay attached to the photons even after
//!   they change lines, which is the right description for distinguishable
//!   photons.
//! - **symmetrized**: an unordered pair of occupied single-photon labels in
//!   the normalized occupation-number basis, which is the description for
//!   indistinguishable bosons.
//!
//! All states are immutable values; every operation returns a new state.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Default magnitude below which amplitudes are dropped.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];

    /// Row/column index in the `{H, V}` basis.
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            Polarization::H
        } else {
            Polarization::V
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Line {
    Line2,
    Line3,
}

impl Line {
    pub const ALL: [Line; 2] = [Line::Line2, Line::Line3];

    pub fn other(self) -> Line {
        match self {
            Line::Line2 => Line::Line3,
            Line::Line3 => Line::Line2,
        }
    }

    /// The numeric suffix used in mode labels (`2` or `3`).
    pub fn number(self) -> u8 {
        match self {
            Line::Line2 => 2,
            Line::Line3 => 3,
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line{}", self.number())
    }
}

/// A spatial mode: lattice site `position` on `line`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Mode {
    pub line: Line,
    pub position: i32,
}

impl Mode {
    pub const fn new(line: Line, position: i32) -> Self {
        Mode { line, position }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}_{}", self.position, self.line.number())
    }
}

/// One photon's full label. Ordering is `(line, position, pol)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PhotonBasisKet {
    pub mode: Mode,
    pub pol: Polarization,
}

impl PhotonBasisKet {
    pub const fn new(pol: Polarization, line: Line, position: i32) -> Self {
        PhotonBasisKet {
            mode: Mode::new(line, position),
            pol,
        }
    }

    pub fn line(&self) -> Line {
        self.mode.line
    }

    pub fn position(&self) -> i32 {
        self.mode.position
    }
}

impl fmt::Display for PhotonBasisKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.pol, self.mode)
    }
}

/// Unordered pair of occupied single-photon labels, stored sorted.
///
/// When both labels are equal the ket is the normalized doubly occupied
/// state `|2⟩` of that label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SymmetrizedKet {
    labels: [PhotonBasisKet; 2],
}

impl SymmetrizedKet {
    pub fn new(x: PhotonBasisKet, y: PhotonBasisKet) -> Self {
        let labels = if x <= y { [x, y] } else { [y, x] };
        SymmetrizedKet { labels }
    }

    pub fn labels(&self) -> [PhotonBasisKet; 2] {
        self.labels
    }

    pub fn is_doubly_occupied(&self) -> bool {
        self.labels[0] == self.labels[1]
    }
}

impl fmt::Display for SymmetrizedKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} ; {}}}", self.labels[0], self.labels[1])
    }
}

/// Which kind of basis a state is expanded over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Representation {
    /// One walker.
    Single,
    /// Two labelled (distinguishable) photons.
    Ordered,
    /// Two indistinguishable photons in the occupation basis.
    Symmetrized,
}

impl Representation {
    pub fn arity(self) -> usize {
        match self {
            Representation::Single => 1,
            Representation::Ordered | Representation::Symmetrized => 2,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Single => "single-photon",
            Representation::Ordered => "ordered two-photon",
            Representation::Symmetrized => "symmetrized two-photon",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Ket {
    Single(PhotonBasisKet),
    Ordered([PhotonBasisKet; 2]),
    Symmetrized(SymmetrizedKet),
}

impl Ket {
    pub fn representation(&self) -> Representation {
        match self {
            Ket::Single(_) => Representation::Single,
            Ket::Ordered(_) => Representation::Ordered,
            Ket::Symmetrized(_) => Representation::Symmetrized,
        }
    }

    /// The photon labels in this ket (one or two).
    pub fn photons(&self) -> Vec<PhotonBasisKet> {
        match self {
            Ket::Single(p) => vec![*p],
            Ket::Ordered(ps) => ps.to_vec(),
            Ket::Symmetrized(s) => s.labels().to_vec(),
        }
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ket::Single(p) => write!(f, "|{p}>"),
            Ket::Ordered([x, y]) => write!(f, "|{x}>|{y}>"),
            Ket::Symmetrized(s) => write!(f, "{s}"),
        }
    }
}

/// Whether [`SparseState::states_equal`] should factor out a global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    Exact,
    UpToGlobalPhase,
}

/// A sparse superposition over basis kets of a single representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    repr: Representation,
    terms: BTreeMap<Ket, Amplitude>,
    tolerance: f64,
}

impl SparseState {
    /// The zero vector of the given representation.
    pub fn zero(repr: Representation) -> Self {
        SparseState {
            repr,
            terms: BTreeMap::new(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn basis(ket: Ket) -> Self {
        let mut state = SparseState::zero(ket.representation());
        state.terms.insert(ket, Amplitude::new(1.0, 0.0));
        state
    }

    /// Builds a state from `(ket, amplitude)` pairs, summing repeated kets.
    ///
    /// All kets must share `repr`.
    pub fn from_terms<I>(repr: Representation, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Ket, Amplitude)>,
    {
        let mut state = SparseState::zero(repr);
        for (ket, amp) in terms {
            state.accumulate(ket, amp)?;
        }
        Ok(state.pruned())
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pruned()
    }

    /// Adds `amp` to the coefficient of `ket`. Does not prune.
    pub fn accumulate(&mut self, ket: Ket, amp: Amplitude) -> Result<()> {
        self.check_ket(&ket)?;
        *self.terms.entry(ket).or_insert(Amplitude::new(0.0, 0.0)) += amp;
        Ok(())
    }

    /// Drops every amplitude smaller in magnitude than the tolerance.
    pub fn pruned(mut self) -> Self {
        let tol_sq = self.tolerance * self.tolerance;
        self.terms.retain(|_, a| a.norm_sqr() >= tol_sq);
        self
    }

    fn check_ket(&self, ket: &Ket) -> Result<()> {
        let found = ket.representation();
        if found == self.repr {
            Ok(())
        } else if found.arity() != self.repr.arity() {
            Err(Error::ArityMismatch)
        } else {
            Err(Error::RepresentationMismatch {
                expected: self.repr,
                found,
            })
        }
    }

    fn check_compatible(&self, other: &SparseState) -> Result<()> {
        if self.repr == other.repr {
            Ok(())
        } else if self.repr.arity() != other.repr.arity() {
            Err(Error::ArityMismatch)
        } else {
            Err(Error::RepresentationMismatch {
                expected: self.repr,
                found: other.repr,
            })
        }
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical ket order.
    pub fn iter(&self) -> impl Iterator<Item = (&Ket, &Amplitude)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, ket: &Ket) -> Amplitude {
        self.terms
            .get(ket)
            .copied()
            .unwrap_or(Amplitude::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|a| a.is_finite())
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &SparseState) -> Result<Amplitude> {
        self.check_compatible(other)?;
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Amplitude::new(0.0, 0.0);
        for (ket, a) in &small.terms {
            if let Some(b) = large.terms.get(ket) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    pub fn scaled(&self, factor: Amplitude) -> SparseState {
        SparseState {
            repr: self.repr,
            terms: self.terms.iter().map(|(k, a)| (*k, a * factor)).collect(),
            tolerance: self.tolerance,
        }
        .pruned()
    }

    /// `self + other`.
    pub fn add(&self, other: &SparseState) -> Result<SparseState> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (ket, a) in &other.terms {
            *out.terms.entry(*ket).or_insert(Amplitude::new(0.0, 0.0)) += a;
        }
        Ok(out.pruned())
    }

    pub fn normalize(&self) -> Result<SparseState> {
        let norm = self.norm();
        if norm <= self.tolerance {
            return Err(Error::NullState);
        }
        Ok(self.scaled(Amplitude::new(1.0 / norm, 0.0)))
    }

    /// Largest per-ket amplitude difference between two states.
    ///
    /// With [`PhaseMode::UpToGlobalPhase`] `other` is first rotated by the
    /// phase that aligns it with `self` (the phase of `⟨other|self⟩`).
    pub fn max_amplitude_error(&self, other: &SparseState, phase: PhaseMode) -> Result<f64> {
        self.check_compatible(other)?;
        let rotation = match phase {
            PhaseMode::Exact => Amplitude::new(1.0, 0.0),
            PhaseMode::UpToGlobalPhase => {
                let overlap = other.inner_product(self)?;
                if overlap.norm() > self.tolerance {
                    overlap / overlap.norm()
                } else {
                    Amplitude::new(1.0, 0.0)
                }
            }
        };
        let mut worst: f64 = 0.0;
        for (ket, a) in &self.terms {
            worst = worst.max((a - other.amplitude(ket) * rotation).norm());
        }
        for (ket, b) in &other.terms {
            if !self.terms.contains_key(ket) {
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }

    /// True iff the states agree to within `atol` in every amplitude.
    ///
    /// States over different bases are never equal.
    pub fn states_equal(&self, other: &SparseState, atol: f64, phase: PhaseMode) -> bool {
        self.max_amplitude_error(other, phase)
            .map(|err| err < atol)
            .unwrap_or(false)
    }
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (ket, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if a.im.abs() < self.tolerance {
                write!(f, "({:.6}){}", a.re, ket)?;
            } else {
                write!(f, "({:.6}{:+.6}i){}", a.re, a.im, ket)?;
            }
        }
        Ok(())
    }
}

/// Shorthand for a one-walker basis ket.
pub fn single(pol: Polarization, line: Line, position: i32) -> Ket {
    Ket::Single(PhotonBasisKet::new(pol, line, position))
}

/// Shorthand for an ordered two-photon basis ket.
pub fn ordered(first: PhotonBasisKet, second: PhotonBasisKet) -> Ket {
    Ket::Ordered([first, second])
}

/// Shorthand for a symmetrized two-photon basis ket.
pub fn symmetrized(x: PhotonBasisKet, y: PhotonBasisKet) -> Ket {
    Ket::Symmetrized(SymmetrizedKet::new(x, y))
}
