//! Event-tree simulation of interaction-free measurement (IFM) devices.
//!
//! A single photon (or a pair of particles) is propagated through a
//! [`circuits::Circuit`] of unitary optical elements and absorbing objects.
//! Absorption events split the run into classical branches that never
//! re-interfere, so every device reduces to a small tree of weighted pure
//! states. The [`protocols`] module wires the standard schemes (Mach-Zehnder
//! bomb tester, Zeno cavities, Fabry-Perot cavity, dud discrimination,
//! Hardy's two-particle setup, semitransparent imaging) and exposes them
//! through a name-keyed [`protocols::Registry`].

pub mod circuits;
pub mod elements;
pub mod error;
pub mod protocols;
pub mod qcore;
pub mod sampler;

pub use circuits::{run_exact, Circuit, Element, OutcomeDistribution};
pub use error::{IfmError, Result};
pub use qcore::{AbsorptionChannel, Amplitude, ModeLabel, ModeState, Unitary, TOLERANCE};
