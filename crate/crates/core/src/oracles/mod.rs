//! Numerical ground truth that does not rely on the closed-form phases:
//! discrete Wilson loops over dense eigenvectors, Schrödinger propagation
//! around the loop, and Schmidt-vector tracking.

mod propagate;
mod schmidt_track;
mod wilson;

pub use propagate::{
    adiabatic_propagate, propagate_singlet, PropagationResult, SingletPropagation,
    ADIABATIC_DRIFT_TOL, DEFAULT_PERIOD, DEFAULT_STEPS, NORM_TOL,
};
pub use schmidt_track::{
    composite_from_schmidt, mixed_state_phase_numeric, schmidt_track, SchmidtTrack,
    NONTRANSITION_TOL,
};
pub use wilson::{wilson_loop_from_states, wilson_loop_phase, MIN_WILSON_POINTS, WILSON_GAP_TOL};
