//! Even-order explicit symplectic integrators for the quaternion kinematical
//! equation dq/dt = ½ Ω(ω(t)) q.
//!
//! Each step is the Cayley transform of a scaled Ω, with the scale β chosen
//! from the order-ℓ diagonal Padé approximant of `exp`. The resulting step
//! is orthogonal, preserves a constant skew structure, and is accurate to
//! order 2ℓ.
//!
//! Field-only code is generic over [`Field`]; anything needing `sqrt` or
//! trigonometry asks for [`Real`]. Concrete aliases for `f64` and `f32` live
//! at the crate root.

pub mod analysis;
pub mod error;
pub mod kinematics;
pub mod linalg;
pub mod pade;
pub mod propagator;
pub mod scalar;
pub mod transition;

pub use error::{Error, Result};
pub use kinematics::{build_omega, omega_hat, symplectic_structure, AngularVelocity, OmegaMatrix, QuatState};
pub use linalg::Mat4;
pub use pade::{beta, eta, horner, BetaValue, OrderParam, PadeCoefficients};
pub use propagator::{
    propagate_lti, propagate_ltv, LtiTrajectory, LtvTrajectory, run_lti, run_ltv, PropagationConfig, PropagationSummary, RateSource,
    StepKernel, TrajectorySample,
};
pub use scalar::{Field, Real};
pub use transition::{
    analytic_transition, inverse_transition, literal_transition_matrix, transition_error_terms,
    transition_matrix, CayleyStepper, TransitionErrorTerms, TransitionKind, TransitionMatrix,
};

pub type Quat64 = QuatState<f64>;
pub type Quat32 = QuatState<f32>;
pub type AngularVelocity64 = AngularVelocity<f64>;
pub type AngularVelocity32 = AngularVelocity<f32>;
pub type Transition64 = TransitionMatrix<f64>;
pub type Transition32 = TransitionMatrix<f32>;
pub type Coefficients64 = PadeCoefficients<f64>;
pub type Coefficients32 = PadeCoefficients<f32>;
pub type Config64 = PropagationConfig<f64>;
pub type Config32 = PropagationConfig<f32>;
