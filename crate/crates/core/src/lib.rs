//! Cyclic adiabatic geometric phases of two spin-½ particles with a uniaxial
//! exchange coupling, driven by a slowly rotating magnetic field.
//!
//! * [`model`]: Hamiltonian, shifted eigenvalues, eigenstates, Schmidt form.
//! * [`phases`]: closed-form composite, subsystem and Schmidt-vector phases.
//! * [`oracles`]: Wilson loops, Schrödinger propagation, Schmidt tracking.
//! * [`sweep`]: parameter sweeps, CSV output and the verification grid.

pub mod error;
pub mod model;
pub mod oracles;
pub mod phases;
pub mod sweep;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
pub use model::{Branch, ModelParams};
pub use phases::{LoopPath, Method, Phase, PhaseResult};
