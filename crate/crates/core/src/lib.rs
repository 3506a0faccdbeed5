//! Entanglement swapping of unknown, non-maximally entangled photon pairs
//! with a three-step quantum-walk-like discrimination circuit.
//!
//! Two pairs `a|HH⟩ + b|VV⟩` are shared between Alice–Clare and Clare–Bob.
//! Instead of a Bell-state measurement, Clare sends her two photons through
//! a short walk built from half-wave plates, beam displacers and one path
//! exchange between the two lines. A coincidence between one detector on
//! each line heralds that Alice's and Bob's photons are in a maximally
//! entangled state, which happens with probability `2a²b²`.
//!
//! ```
//! use qwswap::protocol::{run_protocol, SwapConfig, Verdict};
//!
//! let config = SwapConfig::from_a(0.8).unwrap();
//! let run = run_protocol(&config).unwrap();
//! assert!((run.success_probability() - 2.0 * 0.64 * 0.36).abs() < 1e-12);
//!
//! for outcome in run.outcomes() {
//!     if outcome.verdict != Verdict::Inconclusive {
//!         assert!((outcome.concurrence - 1.0).abs() < 1e-12);
//!     }
//! }
//! ```
//!
//! Modules, bottom-up:
//!
//! - [`hilbert`]: sparse amplitude vectors over photon mode labels.
//! - [`walk`]: coins, shifts, path exchange and phase retarders.
//! - [`statistics`]: bosonic versus labelled photons, detector statistics.
//! - [`protocol`]: the swapping protocol, heralded states and sampling.
//! - [`dsl`]: the `.qwc` circuit description format.
//! - [`reference`] and [`verify`]: closed-form states and the self-check.

pub mod dsl;
pub mod error;
pub mod hilbert;
pub mod protocol;
pub mod reference;
pub mod statistics;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
