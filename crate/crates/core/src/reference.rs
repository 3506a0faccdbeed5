//! Closed-form states of photons 2 and 3 along the ideal circuit.
//!
//! These are written out term by term, independent of the walk engine, and
//! serve as the golden values the simulation is checked against. Ordered
//! kets list photon 2 first. Symmetrized kets are in the normalized
//! occupation basis, so `{x ; x}` is two photons in mode `x`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::hilbert::{
    ordered, symmetrized, Amplitude, Ket, Line, PhotonBasisKet, Polarization, Representation,
    SparseState,
};
use crate::protocol::BranchId;

use Line::{Line2, Line3};
use Polarization::{H, V};

fn p(pol: Polarization, line: Line, position: i32) -> PhotonBasisKet {
    PhotonBasisKet::new(pol, line, position)
}

fn state(repr: Representation, terms: Vec<(Ket, f64)>) -> SparseState {
    SparseState::from_terms(repr, terms.into_iter().map(|(k, c)| (k, Amplitude::new(c, 0.0))))
        .expect("reference kets share one representation")
}

/// `(a²/N, b²/N)` with `N = √(a⁴ + b⁴)`.
fn weights(a: f64, b: f64) -> (f64, f64) {
    let n = (a.powi(4) + b.powi(4)).sqrt();
    (a * a / n, b * b / n)
}

/// `+1` for branches 1 and 3, `−1` for branches 2 and 4.
fn sign(id: BranchId) -> f64 {
    match id {
        BranchId::B1 | BranchId::B3 => 1.0,
        BranchId::B2 | BranchId::B4 => -1.0,
    }
}

/// Starting state: both photons at site 0 of their own line.
pub fn initial(id: BranchId, a: f64, b: f64) -> SparseState {
    let (wa, wb) = weights(a, b);
    let s = sign(id);
    let r = FRAC_1_SQRT_2;
    let terms = match id {
        BranchId::B1 | BranchId::B2 => vec![
            (ordered(p(H, Line2, 0), p(H, Line3, 0)), wa),
            (ordered(p(V, Line2, 0), p(V, Line3, 0)), s * wb),
        ],
        BranchId::B3 | BranchId::B4 => vec![
            (ordered(p(H, Line2, 0), p(V, Line3, 0)), r),
            (ordered(p(V, Line2, 0), p(H, Line3, 0)), s * r),
        ],
    };
    state(Representation::Ordered, terms)
}

/// After the first coin and shift, before the lines exchange paths.
pub fn after_first_shift(id: BranchId, a: f64, b: f64) -> SparseState {
    let (wa, wb) = weights(a, b);
    let s = sign(id);
    let r = FRAC_1_SQRT_2;
    let terms = match id {
        BranchId::B1 | BranchId::B2 => vec![
            (ordered(p(H, Line2, 1), p(V, Line3, -1)), wa),
            (ordered(p(V, Line2, -1), p(H, Line3, 1)), s * wb),
        ],
        BranchId::B3 | BranchId::B4 => vec![
            (ordered(p(H, Line2, 1), p(H, Line3, 1)), r),
            (ordered(p(V, Line2, -1), p(V, Line3, -1)), s * r),
        ],
    };
    state(Representation::Ordered, terms)
}

/// End of step 1: the site −1 paths have been exchanged.
pub fn after_step1(id: BranchId, a: f64, b: f64) -> SparseState {
    let (wa, wb) = weights(a, b);
    let s = sign(id);
    let r = FRAC_1_SQRT_2;
    let terms = match id {
        BranchId::B1 | BranchId::B2 => vec![
            (ordered(p(H, Line2, 1), p(V, Line2, -1)), wa),
            (ordered(p(V, Line3, -1), p(H, Line3, 1)), s * wb),
        ],
        BranchId::B3 | BranchId::B4 => vec![
            (ordered(p(H, Line2, 1), p(H, Line3, 1)), r),
            (ordered(p(V, Line3, -1), p(V, Line2, -1)), s * r),
        ],
    };
    state(Representation::Ordered, terms)
}

/// End of step 2, with the photons merged at site 0 (symmetrized).
///
/// Branches 1, 2: `(|H,V⟩ + |V,H⟩)/√2 ⊗ (a²|0₂,0₂⟩ ± b²|0₃,0₃⟩)/N`, i.e. one
/// `H` and one `V` photon sharing a line. Branches 3, 4:
/// `(|V,V⟩ ± |H,H⟩)/√2 ⊗ |0₂,0₃⟩`.
pub fn after_step2(id: BranchId, a: f64, b: f64) -> SparseState {
    let (wa, wb) = weights(a, b);
    let s = sign(id);
    let r = FRAC_1_SQRT_2;
    let terms = match id {
        BranchId::B1 | BranchId::B2 => vec![
            (symmetrized(p(H, Line2, 0), p(V, Line2, 0)), wa),
            (symmetrized(p(H, Line3, 0), p(V, Line3, 0)), s * wb),
        ],
        BranchId::B3 | BranchId::B4 => vec![
            (symmetrized(p(V, Line2, 0), p(V, Line3, 0)), r),
            (symmetrized(p(H, Line2, 0), p(H, Line3, 0)), s * r),
        ],
    };
    state(Representation::Symmetrized, terms)
}

/// Final state when the photons are indistinguishable.
///
/// Branches 1, 2 bunch: both photons leave through the same port,
/// `(|HH⟩ ⊗ (a²|1₂1₂⟩ ± b²|1₃1₃⟩) − |VV⟩ ⊗ (a²|−1₂−1₂⟩ ± b²|−1₃−1₃⟩)) / (√2 N)`.
/// Branch 3 ends in `(|HH⟩|1₂,1₃⟩ + |VV⟩|−1₂,−1₃⟩)/√2` and branch 4 in
/// `−(|HV⟩|1₂,−1₃⟩ + |VH⟩|−1₂,1₃⟩)/√2`.
pub fn final_synchronized(id: BranchId, a: f64, b: f64) -> SparseState {
    let (wa, wb) = weights(a, b);
    let s = sign(id);
    let r = FRAC_1_SQRT_2;
    let double = |pol, line, x| symmetrized(p(pol, line, x), p(pol, line, x));
    let terms = match id {
        BranchId::B1 | BranchId::B2 => vec![
            (double(H, Line2, 1), r * wa),
            (double(H, Line3, 1), r * s * wb),
            (double(V, Line2, -1), -r * wa),
            (double(V, Line3, -1), -r * s * wb),
        ],
        BranchId::B3 => vec![
            (symmetrized(p(H, Line2, 1), p(H, Line3, 1)), r),
            (symmetrized(p(V, Line2, -1), p(V, Line3, -1)), r),
        ],
        BranchId::B4 => vec![
            (symmetrized(p(H, Line2, 1), p(V, Line3, -1)), -r),
            (symmetrized(p(V, Line2, -1), p(H, Line3, 1)), -r),
        ],
    };
    state(Representation::Symmetrized, terms)
}

/// Final state when the photons reach the last beam displacers at different
/// times and stay distinguishable.
///
/// Branches 1 and 2 are returned as ordered states:
/// `[a²(|H1₂⟩|H1₂⟩ + |H1₂⟩|V−1₂⟩ − |V−1₂⟩|H1₂⟩ − |V−1₂⟩|V−1₂⟩)
///   ± b²(|H1₃⟩|H1₃⟩ − |H1₃⟩|V−1₃⟩ + |V−1₃⟩|H1₃⟩ − |V−1₃⟩|V−1₃⟩)] / (2N)`.
/// Branches 3 and 4 are unchanged from the synchronized case and are
/// returned in the symmetrized basis; compare after symmetrizing.
pub fn final_asynchronous(id: BranchId, a: f64, b: f64) -> SparseState {
    match id {
        BranchId::B3 | BranchId::B4 => final_synchronized(id, a, b),
        BranchId::B1 | BranchId::B2 => {
            let (wa, wb) = weights(a, b);
            let (ca, cb) = (wa / 2.0, sign(id) * wb / 2.0);
            let (h2, v2) = (p(H, Line2, 1), p(V, Line2, -1));
            let (h3, v3) = (p(H, Line3, 1), p(V, Line3, -1));
            state(
                Representation::Ordered,
                vec![
                    (ordered(h2, h2), ca),
                    (ordered(h2, v2), ca),
                    (ordered(v2, h2), -ca),
                    (ordered(v2, v2), -ca),
                    (ordered(h3, h3), cb),
                    (ordered(h3, v3), -cb),
                    (ordered(v3, h3), cb),
                    (ordered(v3, v3), -cb),
                ],
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_reference_state_is_normalized() {
        for (a, b) in [(FRAC_1_SQRT_2, FRAC_1_SQRT_2), (0.8, 0.6), (0.3, 0.91f64.sqrt()), (1.0, 0.0)] {
            for id in BranchId::ALL {
                for s in [
                    initial(id, a, b),
                    after_first_shift(id, a, b),
                    after_step1(id, a, b),
                    after_step2(id, a, b),
                    final_synchronized(id, a, b),
                    final_asynchronous(id, a, b),
                ] {
                    assert!((s.norm() - 1.0).abs() < 1e-12, "branch {id}, a = {a}: {s}");
                }
            }
        }
    }

    #[test]
    fn symmetric_inputs_are_orthogonal() {
        let s = FRAC_1_SQRT_2;
        let overlap = initial(BranchId::B1, s, s).inner_product(&initial(BranchId::B2, s, s)).unwrap();
        // (a⁴ − b⁴)/(a⁴ + b⁴) vanishes at a = b
        assert!(overlap.norm() < 1e-15);
        let skewed = initial(BranchId::B1, 0.8, 0.6).inner_product(&initial(BranchId::B2, 0.8, 0.6)).unwrap();
        let (a4, b4) = (0.8f64.powi(4), 0.6f64.powi(4));
        assert!((skewed.re - (a4 - b4) / (a4 + b4)).abs() < 1e-15);
    }
}
