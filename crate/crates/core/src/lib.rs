//! Quantum states whose phase is a closed-form free classical action.
//!
//! With ψ = A exp(iS/ħ) and S a solution of the free Hamilton–Jacobi
//! equation, the Schrödinger equation reduces to the free Hamilton–Jacobi
//! equation, a continuity equation, and the condition that the Bohm potential
//! −(ħ²/2m) A''/A cancels the external potential V. This crate builds those
//! states for a catalog of potentials and checks every one of those
//! conditions numerically.

pub mod actions;
pub mod amplitudes;
pub mod error;
pub mod grid;
pub mod potentials;
pub mod propagate;
pub mod special;
pub mod verify;

pub use actions::{eval_action, hj_residual, hj_residual_from, momentum_field, ActionKind, FreeAction};
pub use amplitudes::{
    assemble_state, build_profile, closed_form_amplitude, integrate_amplitude_ode, normalize_if_integrable,
    AmplitudeProfile, AmplitudeSource, Method, Normalization, ProfileOptions, Seeds, WaveState,
};
pub use error::{Error, Result};
pub use grid::{d1, d2, l2_norm, ComplexField, Grid1D, RealField, Units};
pub use potentials::{
    catalog, eval_potential, reduced_profile, Availability, CatalogEntry, Family, Potential, ReducedCoordinate, Section,
};
pub use propagate::{cn_step, density_transport_error, evolve, phase_agreement, EvolutionRun, EvolutionSpec, Snapshot};
pub use verify::{
    bohm_potential, cancellation_residual, continuity_residual, convergence_order, jump_condition_check,
    liouville_invariant, schrodinger_residual, FamilyReport, ResidualReport, VerifyCase, VerifyOptions,
};
