//! Numerical ranges of small complex matrices and the motion of a unitary
//! spectrum under diagonal phase perturbations `U -> U exp(i t diag(p))`.
//!
//! * [`linalg`]: eigendecompositions, Schatten norms, unitary log/exp.
//! * [`numrange`]: support functions, range polygons, origin membership.
//! * [`perturb`]: eigenvalue speeds, compressed generators, trajectories.
//! * [`steering`]: choosing `p` and the first time `0` enters the range.
//! * [`testkit`], [`verify`]: random instances, oracles, property checks.

pub mod error;
pub mod linalg;
pub mod numrange;
pub mod perturb;
pub mod steering;
pub mod testkit;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
