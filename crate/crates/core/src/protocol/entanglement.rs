//! Two-qubit polarization states of the remote photons.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{Amplitude, Polarization};

/// Pure two-qubit state with amplitudes on `(HH, HV, VH, VV)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState(pub [Amplitude; 4]);

impl TwoQubitState {
    pub fn from_real(amps: [f64; 4]) -> Self {
        TwoQubitState(amps.map(|x| Amplitude::new(x, 0.0)))
    }

    pub fn index(first: Polarization, second: Polarization) -> usize {
        2 * first.index() + second.index()
    }

    pub fn amplitude(&self, first: Polarization, second: Polarization) -> Amplitude {
        self.0[Self::index(first, second)]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_sqr(&self, other: &TwoQubitState) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<Amplitude>()
            .norm_sqr()
    }

    pub fn density(&self) -> TwoQubitDensity {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = self.0[i] * self.0[j].conj();
            }
        }
        TwoQubitDensity(m)
    }
}

impl fmt::Display for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = ["HH", "HV", "VH", "VV"];
        let mut first = true;
        for (label, a) in labels.iter().zip(self.0.iter()) {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if a.im.abs() < 1e-12 {
                write!(f, "({:.6})|{label}>", a.re)?;
            } else {
                write!(f, "({:.6}{:+.6}i)|{label}>", a.re, a.im)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Pure-state concurrence `2|αδ − βγ|` of a normalized two-qubit state.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized(norm));
    }
    let [alpha, beta, gamma, delta] = state.0;
    Ok(2.0 * (alpha * delta - beta * gamma).norm())
}

/// The four Bell states of photons 1 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BellState {
    /// `(|HH⟩ + |VV⟩)/√2`
    PsiPlus,
    /// `(|HH⟩ − |VV⟩)/√2`
    PsiMinus,
    /// `(|HV⟩ + |VH⟩)/√2`
    PhiPlus,
    /// `(|HV⟩ − |VH⟩)/√2`
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn state(self) -> TwoQubitState {
        let r = FRAC_1_SQRT_2;
        TwoQubitState::from_real(match self {
            BellState::PsiPlus => [r, 0.0, 0.0, r],
            BellState::PsiMinus => [r, 0.0, 0.0, -r],
            BellState::PhiPlus => [0.0, r, r, 0.0],
            BellState::PhiMinus => [0.0, r, -r, 0.0],
        })
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
        })
    }
}

/// Unnormalized two-qubit density matrix in the `(HH, HV, VH, VV)` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity(pub Matrix4<Amplitude>);

impl TwoQubitDensity {
    pub fn zero() -> Self {
        TwoQubitDensity(Matrix4::zeros())
    }

    /// Adds the projector onto the (unnormalized) vector `v`.
    pub fn add_pure(&mut self, v: &TwoQubitState) {
        self.0 += v.density().0;
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn normalized(&self) -> Option<TwoQubitDensity> {
        let t = self.trace();
        (t > 1e-300).then(|| TwoQubitDensity(self.0.unscale(t)))
    }

    /// `⟨ψ|ρ|ψ⟩ / tr ρ`.
    pub fn fidelity(&self, target: &TwoQubitState) -> f64 {
        let t = self.trace();
        if t <= 0.0 {
            return 0.0;
        }
        let mut acc = Amplitude::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += target.0[i].conj() * self.0[(i, j)] * target.0[j];
            }
        }
        acc.re / t
    }

    pub fn purity(&self) -> f64 {
        match self.normalized() {
            Some(rho) => (rho.0 * rho.0).trace().re,
            None => 0.0,
        }
    }

    /// Largest-eigenvalue eigenvector, when the state is pure to `tol`.
    pub fn pure_state(&self, tol: f64) -> Option<TwoQubitState> {
        let rho = self.normalized()?;
        if (rho.purity() - 1.0).abs() > tol {
            return None;
        }
        let eig = SymmetricEigen::new(rho.0);
        let (k, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        let col = eig.eigenvectors.column(k);
        // Fix the global phase so the largest component is real and positive.
        let (_, pivot) = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
        let phase = pivot.conj() / pivot.norm();
        Some(TwoQubitState([col[0] * phase, col[1] * phase, col[2] * phase, col[3] * phase]))
    }

    /// Wootters concurrence `max(0, λ1 − λ2 − λ3 − λ4)`, where `λi` are the
    /// decreasing square roots of the eigenvalues of `√ρ ρ̃ √ρ` and
    /// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
    pub fn concurrence(&self) -> f64 {
        let Some(rho) = self.normalized() else {
            return 0.0;
        };
        let sqrt_rho = hermitian_sqrt(&rho.0);
        let mut flip = Matrix4::<Amplitude>::zeros();
        flip[(0, 3)] = Amplitude::new(-1.0, 0.0);
        flip[(1, 2)] = Amplitude::new(1.0, 0.0);
        flip[(2, 1)] = Amplitude::new(1.0, 0.0);
        flip[(3, 0)] = Amplitude::new(-1.0, 0.0);
        let tilde = flip * rho.0.map(|z| z.conj()) * flip;
        let m = sqrt_rho * tilde * sqrt_rho;
        let m = (m + m.adjoint()).unscale(2.0);
        let mut lambdas: Vec<f64> = clamped(&SymmetricEigen::new(m).eigenvalues)
            .iter()
            .map(|x| x.sqrt())
            .collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
    }
}

fn hermitian_sqrt(m: &Matrix4<Amplitude>) -> Matrix4<Amplitude> {
    let sym = (m + m.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(sym);
    let v = &eig.eigenvectors;
    let d = Matrix4::from_diagonal(&clamped(&eig.eigenvalues).map(|x| Amplitude::new(x.sqrt(), 0.0)));
    v * d * v.adjoint()
}

/// Eigenvalues of a positive semidefinite matrix with round-off noise below
/// `64 ε · max` set to zero, so their square roots do not leak `~1e-8`.
fn clamped(eigenvalues: &Vector4<f64>) -> Vector4<f64> {
    let floor = 64.0 * f64::EPSILON * eigenvalues.max().max(0.0);
    eigenvalues.map(|x| if x <= floor { 0.0 } else { x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_states_are_maximally_entangled() {
        for b in BellState::ALL {
            assert!((concurrence(&b.state()).unwrap() - 1.0).abs() < 1e-12);
            assert!((b.state().density().concurrence() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_has_no_concurrence() {
        let hh = TwoQubitState::from_real([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(concurrence(&hh).unwrap(), 0.0);
        assert!(hh.density().concurrence() < 1e-12);
    }

    #[test]
    fn partially_entangled_pair() {
        let s = TwoQubitState::from_real([0.8, 0.0, 0.0, 0.6]);
        assert!((concurrence(&s).unwrap() - 0.96).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_input_rejected() {
        let s = TwoQubitState::from_real([1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(concurrence(&s), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn werner_state_concurrence() {
        // p|phi+><phi+| + (1-p) I/4 has concurrence max(0, (3p-1)/2).
        for p in [0.2, 0.5, 0.8, 1.0] {
            let mut rho = TwoQubitDensity::zero();
            rho.0 += BellState::PhiPlus.state().density().0.scale(p);
            rho.0 += Matrix4::identity().scale((1.0 - p) / 4.0);
            let expected = ((3.0 * p - 1.0) / 2.0f64).max(0.0);
            assert!((rho.concurrence() - expected).abs() < 1e-10, "p = {p}");
            assert!((rho.fidelity(&BellState::PhiPlus.state()) - (3.0 * p + 1.0) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_state_recovered_from_density() {
        let s = BellState::PhiMinus.state();
        let rho = TwoQubitDensity(s.density().0.scale(0.3));
        let back = rho.pure_state(1e-9).unwrap();
        assert!((back.overlap_sqr(&s) - 1.0).abs() < 1e-12);
    }
}
