use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not unitary: |U^H U - 1| = {residual:.3e} exceeds {tol:.1e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("matrix is not Hermitian: |H - H^H| = {residual:.3e} exceeds {tol:.1e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("Hermitian eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid Schatten exponent {0}; need finite p >= 1")]
    InvalidExponent(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("zero perturbation: generator has no non-scalar part")]
    ZeroPerturbation,

    #[error("nothing to steer: 0 already lies in the numerical range")]
    NothingToSteer,

    #[error("tracking collision near t = {t}: step {step:.3e} fell below {min_step:.1e}")]
    TrackingCollision { t: f64, step: f64, min_step: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
