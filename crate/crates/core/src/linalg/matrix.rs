use std::fmt;
use std::ops::{Deref, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::norms::schatten_inf;
use crate::error::{Error, Result};
use crate::tol;

/// Dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        for col in 0..cols {
            for row in 0..rows {
                let z = inner[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self(inner))
    }

    /// Builds a `dim x dim` matrix from entries listed row by row.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut flat = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_row_slice(dim, &flat)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = DMatrix::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        Self(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    pub(crate) fn from_inner_unchecked(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square());
        Self(inner)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Hermitian part `(e^{-i theta} A + e^{i theta} A^H) / 2`.
    pub fn rotated_hermitian_part(&self, theta: f64) -> HermitianMatrix {
        let phase = Complex64::from_polar(1.0, -theta);
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let a = phase * self.0[(i, j)];
                let b = (phase * self.0[(j, i)]).conj();
                m[(i, j)] = (a + b) * 0.5;
            }
        }
        HermitianMatrix(Self(m))
    }

    /// Largest entry modulus; cheap scale estimate.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.0[(i, j)].norm() <= tol))
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<Complex64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A matrix checked to be unitary at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, tol::UNITARY)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let residual = unitarity_residual(&m);
        if residual > tol {
            return Err(Error::NotUnitary { residual, tol });
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    /// Unitary polar factor `W V^H` of `m = W S V^H`: the unitary closest
    /// to `m` in every unitarily invariant norm. Fails on singular input.
    pub fn polar_factor(m: &ComplexMatrix) -> Result<Self> {
        let svd = m.inner().clone().svd(true, true);
        let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
        if smallest.is_nan() || smallest <= f64::EPSILON * largest.max(1.0) {
            return Err(Error::InvalidArgument("polar factor of a singular matrix".into()));
        }
        let (w, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        Self::new(ComplexMatrix::from_inner_unchecked(w * v_t))
    }

    /// `diag(e^{i phi_k})`.
    pub fn diagonal_phases(phases: &[f64]) -> Self {
        let diag: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        Self(ComplexMatrix::from_diagonal(&diag))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Product of two unitaries, unitary by construction.
    pub fn compose(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    /// Global phase multiple `e^{i phi} U`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        Self(self.0.scale(Complex64::from_polar(1.0, phi)))
    }

    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.0)
    }
}

impl Deref for UnitaryMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// `|U^H U - 1|_inf`.
pub fn unitarity_residual(m: &ComplexMatrix) -> f64 {
    let gram = &m.adjoint() * m;
    schatten_inf(&gram.sub(&ComplexMatrix::identity(m.dim())))
}

/// A matrix checked to be Hermitian at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let residual = schatten_inf(&m.sub(&m.adjoint()));
        let tol = tol::HERMITIAN * m.max_abs().max(1.0);
        if residual > tol {
            return Err(Error::NotHermitian { residual, tol });
        }
        Ok(Self(m))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(diag))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}
