//! Simulation library for state-dependent fluxon time delays in Josephson
//! transmission lines, built as three mutually cross-validating tiers:
//!
//! * [`pde`] — direct finite-difference integration of the perturbed
//!   sine-Gordon equation (ground truth);
//! * [`ode`] — soliton-perturbation ordinary differential equations for the
//!   kink's velocity and centroid (fast, quantitative);
//! * [`analytics`] — closed-form delay, pinning, transition-probability, and
//!   pulse-separation results (instant, asymptotic).
//!
//! [`params`] converts SI circuit constants into every derived quantity the
//! tiers share, [`kink`] provides the exact kink solutions they start from,
//! and [`kgtl`] evaluates the linearized line's impedance and the resulting
//! transmon decay rate, which quantifies how well the gapped line protects
//! the qubit.

pub mod analytics;
pub mod constants;
pub mod kgtl;
pub mod kink;
pub mod ode;
pub mod params;
pub mod pde;

pub use analytics::{DelayResult, PinningReport, SeparationReport, TransitionDirection};
pub use kgtl::{ComplexImpedance, DecaySpec};
pub use kink::{KinkSpec, Polarity};
pub use ode::{KinkState, PerturbationSpec};
pub use params::{derive, CircuitParams, DerivedParams};
pub use pde::{BiasProfile, BoundaryCondition, CouplingTerm, FieldState, Grid, Trajectory};
