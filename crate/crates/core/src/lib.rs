//! Contextual measurement models in two representations.
//!
//! Given the outcome probabilities `μ(x_j, e, p)` of a measurement `e` on a
//! state `p`, this crate builds:
//!
//! - a real representation on the standard simplex ([`simplex`]), where a
//!   hidden variable drawn uniformly on the simplex decides the outcome and
//!   the probability of outcome `j` is the relative volume of a sub-simplex,
//!   recovered through determinants;
//! - a Monte Carlo realization of that hidden-variable dynamics
//!   ([`hidden`]);
//! - a complex representation ([`hilbert`]) with a diagonal spectral family
//!   and the Born rule, plus superposition and interference of two states.
//!
//! [`model`] holds the entity/state/measurement data model and its
//! validation.

pub mod hidden;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod simplex;

pub use hidden::{run_trial, simulate, FrequencyReport, SimulationConfig, SimulationError};
pub use hilbert::{
    born_probability, build_quantum_state, interference_closed_form, interference_direct,
    mixture_vs_superposition, superpose, verify_representation, Amplitude, HilbertError,
    InterferenceReport, MixtureComparison, QuantumState, SpectralFamily, Superposition,
    SuperpositionCoefficients, VerificationReport,
};
pub use model::{
    lookup_table, validate_model, EntityModel, HilbertSpec, MeasurementSpec, ModelError,
    ProbabilityTable, ProbabilityVector, StateSpec, Violation,
};
pub use simplex::{
    canonical_determinant, classify_point, membership_oracle, replaced_determinant,
    sample_simplex_uniform, segment_length_check, state_vector, volume_ratio, Classification,
    GeometryError, Membership, SimplexPoint,
};
