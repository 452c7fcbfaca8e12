//! Numerical tolerances shared across the crate.
//!
//! Anything that decides a verdict (degeneracy, membership, stationarity)
//! reads its threshold from here so tests and the CLI agree.

/// Default unitarity tolerance on `|U^H U - 1|_inf`.
pub const UNITARY: f64 = 1e-10;

/// Unitarity tolerance for matrices typed in at ~6 significant digits.
pub const UNITARY_LOW_PRECISION: f64 = 1e-4;

/// Relative Hermiticity tolerance on `|H - H^H|_inf`.
pub const HERMITIAN: f64 = 1e-12;

/// Two unit-circle eigenvalues closer than this belong to one cluster.
pub const CLUSTER: f64 = 1e-8;

/// Grouping threshold on eigenvalues of `(U + U^H)/2` before the
/// imaginary part is resolved. Looser than [`CLUSTER`] so that
/// nearly-conjugate pairs never get split by rounding.
pub const REAL_PART_GROUP: f64 = 1e-6;

/// Second-level grouping on eigenvalues of `(U - U^H)/2i`.
pub const IMAG_PART_GROUP: f64 = 1e-9;

/// Distance to -1 under which the principal logarithm is flagged.
pub const BRANCH_CUT: f64 = 1e-9;

/// `lambda_min(Q)` below this counts as zero speed.
pub const STATIONARY: f64 = 1e-12;

/// Largest-gap comparison against pi in the unitary membership test.
pub const GAP: f64 = 1e-10;

/// Membership tolerance for the support sweep, scaled by `|A|_inf`.
pub const SUPPORT_RELATIVE: f64 = 1e-9;

/// Default number of angles for display sweeps.
pub const DISPLAY_ANGLES: usize = 720;

/// Default number of angles for membership and distance decisions.
pub const DECISION_ANGLES: usize = 2048;

/// Smallest trajectory step before tracking gives up.
pub const MIN_STEP: f64 = 1e-12;
