use num_complex::Complex64;

use super::eigen::{herm_eig, principal_arg, unitary_eig};
use super::matrix::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::perturb::{Direction, PerturbationGenerator};
use crate::tol;

/// Hermitian generator `H = -i Log(U)` with spectrum in (-pi, pi].
#[derive(Clone, Debug)]
pub struct PrincipalLog {
    pub hermitian: HermitianMatrix,
    /// Some eigenvalue sat within the branch tolerance of -1; its angle
    /// was taken as +pi.
    pub on_branch_cut: bool,
}

pub fn principal_log_unitary(u: &UnitaryMatrix) -> Result<PrincipalLog> {
    let eig = unitary_eig(u)?;
    let mut on_branch_cut = false;
    let angles: Vec<f64> = eig
        .eigenvalues()
        .iter()
        .map(|&lam| {
            let mut theta = principal_arg(lam);
            if (lam + 1.0).norm() < tol::BRANCH_CUT {
                on_branch_cut = true;
                if theta < 0.0 {
                    theta += 2.0 * std::f64::consts::PI;
                }
            }
            theta
        })
        .collect();
    let x = ComplexMatrix::from_inner_unchecked(eig.eigenvectors().clone());
    let h = &(&x * &ComplexMatrix::from_real_diagonal(&angles)) * &x.adjoint();
    Ok(PrincipalLog {
        hermitian: HermitianMatrix::new_unchecked(hermitize(h)),
        on_branch_cut,
    })
}

fn hermitize(m: ComplexMatrix) -> ComplexMatrix {
    let sym = m.add(&m.adjoint());
    sym.scale(Complex64::new(0.5, 0.0))
}

/// `exp(i t H)` through the spectral decomposition of `H`.
pub fn exp_i_hermitian(h: &HermitianMatrix, t: f64) -> Result<UnitaryMatrix> {
    let e = herm_eig(h)?;
    let phases: Vec<Complex64> = e.values.iter().map(|&l| Complex64::from_polar(1.0, t * l)).collect();
    let x: &ComplexMatrix = &e.vectors;
    let m = &(x * &ComplexMatrix::from_diagonal(&phases)) * &x.adjoint();
    Ok(UnitaryMatrix::new_unchecked(m))
}

#[derive(Clone, Debug)]
pub struct GeodesicPoint {
    pub point: UnitaryMatrix,
    pub on_branch_cut: bool,
}

/// `U exp(t Log(U^H V))` for `t` in [0, 1].
pub fn geodesic_point(u: &UnitaryMatrix, v: &UnitaryMatrix, t: f64) -> Result<GeodesicPoint> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("geodesic parameter {t} outside [0, 1]")));
    }
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let log = principal_log_unitary(&u.adjoint().compose(v))?;
    let step = exp_i_hermitian(&log.hermitian, t)?;
    Ok(GeodesicPoint {
        point: u.compose(&step),
        on_branch_cut: log.on_branch_cut,
    })
}

/// Result of rewriting a Hermitian generator as a rotated, shifted and
/// scaled probability vector:
/// `H = basis * (scale * diag(p) + shift * 1) * basis^H`.
#[derive(Clone, Debug)]
pub struct GeneratorReduction {
    pub generator: PerturbationGenerator,
    pub basis: UnitaryMatrix,
    pub shift: f64,
    pub scale: f64,
}

impl GeneratorReduction {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let diag: Vec<f64> = self
            .generator
            .probabilities()
            .iter()
            .map(|&p| self.scale * p + self.shift)
            .collect();
        let b: &ComplexMatrix = &self.basis;
        &(b * &ComplexMatrix::from_real_diagonal(&diag)) * &b.adjoint()
    }
}

/// Diagonalizes `H`, shifts a negative spectrum up to zero and
/// normalizes the trace. A diagonal `H` keeps the standard basis.
pub fn reduce_to_generator(h: &HermitianMatrix) -> Result<GeneratorReduction> {
    let d = h.dim();
    let scale_ref = h.max_abs();
    let (diag, basis) = if h.is_diagonal(tol::HERMITIAN * scale_ref.max(1.0)) {
        let diag: Vec<f64> = h.diagonal().iter().map(|z| z.re).collect();
        (diag, UnitaryMatrix::identity(d))
    } else {
        let e = herm_eig(h)?;
        (e.values, e.vectors)
    };
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = min.min(0.0);
    let shifted: Vec<f64> = diag.iter().map(|&x| (x - shift).max(0.0)).collect();
    let scale: f64 = shifted.iter().sum();
    if scale <= f64::EPSILON * d as f64 * scale_ref.max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroPerturbation);
    }
    let mut p: Vec<f64> = shifted.iter().map(|&x| x / scale).collect();
    let sum: f64 = p.iter().sum();
    if let Some(imax) = (0..d).max_by(|&a, &b| p[a].total_cmp(&p[b])) {
        p[imax] += 1.0 - sum;
    }
    Ok(GeneratorReduction {
        generator: PerturbationGenerator::new(p, Direction::Counterclockwise)?,
        basis,
        shift,
        scale,
    })
}
