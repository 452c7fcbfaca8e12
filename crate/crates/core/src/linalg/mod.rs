//! Dense complex linear algebra on small matrices: Hermitian and unitary
//! eigendecompositions, Schatten norms, and the logarithm/exponential
//! maps used to walk geodesics on the unitary group.

mod eigen;
mod functions;
mod matrix;
mod norms;

pub use eigen::{
    eigenvalues, herm_eig, principal_arg, unitary_eig, unitary_eig_with, EigenSystem, EigenspaceIsometry,
    HermitianEigen,
};
pub(crate) use eigen::unwrap_counterclockwise;
pub use functions::{
    exp_i_hermitian, geodesic_point, principal_log_unitary, reduce_to_generator, GeneratorReduction,
    GeodesicPoint, PrincipalLog,
};
pub use matrix::{unitarity_residual, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
pub use norms::{schatten_inf, schatten_norm};
