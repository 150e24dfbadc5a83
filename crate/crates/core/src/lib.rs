//! Current records of an iid sequence under the order `(i, x) ≺ (j, y)` iff
//! `i <= j` and `x <= y`, and the law of the number of records broken by
//! each new observation.
//!
//! The crate is split into
//!
//! - [`record`]: the streaming monotone record stack and trajectory helpers,
//! - [`exact`]: closed-form exact probabilities over [`ExactRational`],
//! - [`oracle`]: ground-truth laws by exhaustive enumeration of rank orders,
//! - [`montecarlo`]: seeded, worker-count independent simulation,
//! - [`gof`]: distances and chi-square statistics between pmfs,
//! - [`rational`]: `p/q` text form of exact values.

pub mod error;
pub mod exact;
pub mod gof;
pub mod montecarlo;
pub mod oracle;
pub mod rational;
pub mod record;

pub use error::{Error, Result};
pub use exact::{ExactRational, IndexTuple, Pmf};
pub use montecarlo::{EmpiricalPmf, SimConfig, SimOutput};
pub use oracle::{JointPmf, PermOracle};
pub use record::{RecordEntry, RecordStack, StepResult, TrajectoryStats};
