//! Reference solutions, error metrics, convergence fitting and operation
//! counting.

pub mod convergence;
pub mod metrics;
pub mod oracle;
pub mod profiles;
pub mod tcvc;

pub use convergence::convergence_order;
pub use metrics::{abs_error, max_error, ErrorReport, ErrorTracker, RunEcho};
pub use oracle::{reference_oracle, OracleTrajectory, ReferenceOracle};
pub use profiles::{analytic_lti_solution, DampedLtvProfile, SpecialLtvProfile};
pub use tcvc::{tcvc_predict, Algorithm, Counted, OpCounts, TcvcModel};
