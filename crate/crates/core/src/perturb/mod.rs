//! Diagonal phase perturbations `U -> U V(t)`, `V(t) = exp(i t D)` with
//! `D = diag(p)` for a probability vector `p`, and the motion of the
//! spectrum they induce.
//!
//! Every eigenvalue of `U V(t)` moves in the rotation sense of `V` (or
//! stays put) with angular speed `<x_j(t)|D|x_j(t)>`, and the speeds sum
//! to one. For small `t` a simple eigenvalue `lambda` with eigenvector
//! `x` moves like `lambda exp(i t <x|D|x>)`; a `k`-fold eigenvalue splits
//! with speeds given by the spectrum of the compression `I^H D I` onto
//! its eigenspace.

mod assignment;
mod generator;
mod tracking;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use assignment::min_cost_assignment;
pub use generator::{Direction, PerturbationGenerator};
pub use tracking::{track_trajectory, TrajectoryRecord};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, unitary_eig, ComplexMatrix, EigenSystem, EigenspaceIsometry, HermitianMatrix, UnitaryMatrix};
use crate::tol;

/// Probe times for the stationarity certificate.
pub const PROBE_TIMES: [f64; 3] = [0.1, 1.0, 10.0];

/// `U V(t)` (or `U V(t)^H` for clockwise generators).
pub fn perturbed_unitary(u: &UnitaryMatrix, g: &PerturbationGenerator, t: f64) -> Result<UnitaryMatrix> {
    check_dims(u, g)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("perturbation time {t} must be finite and >= 0")));
    }
    Ok(u.compose(&g.phase_matrix(t)))
}

fn check_dims(u: &UnitaryMatrix, g: &PerturbationGenerator) -> Result<()> {
    if u.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: g.dim(),
        });
    }
    Ok(())
}

/// `<x|D|x>`: the first-order angular speed of a simple eigenvalue.
pub fn simple_velocity(x: &[Complex64], g: &PerturbationGenerator) -> Result<f64> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: x.len(),
        });
    }
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("vector norm {norm} is not 1")));
    }
    Ok(g.expectation(x))
}

/// `lambda exp(+-i speed t)`.
pub fn first_order_eigenvalue(lambda: Complex64, speed: f64, t: f64, direction: Direction) -> Complex64 {
    lambda * Complex64::from_polar(1.0, direction.sign() * speed * t)
}

/// `i lambda <x|D|x>`, negated for clockwise rotation.
pub fn exact_velocity(lambda: Complex64, x: &[Complex64], g: &PerturbationGenerator) -> Complex64 {
    Complex64::new(0.0, g.direction().sign()) * lambda * g.expectation(x)
}

/// Compression `Q = I^H D I` of the generator onto an eigenspace.
#[derive(Clone, Debug)]
pub struct CompressedPerturbation {
    pub q: HermitianMatrix,
    /// Ascending; these are the split speeds.
    pub eigenvalues: Vec<f64>,
    /// `k x k`, columns are eigenvectors of `Q`.
    pub eigenvectors: DMatrix<Complex64>,
    /// `I v_j`: the limiting eigenvectors of the split branches.
    pub split_vectors: DMatrix<Complex64>,
}

impl CompressedPerturbation {
    pub fn multiplicity(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn split_vector(&self, j: usize) -> Vec<Complex64> {
        self.split_vectors.column(j).iter().copied().collect()
    }
}

pub fn compressed_q(iso: &EigenspaceIsometry, g: &PerturbationGenerator) -> Result<CompressedPerturbation> {
    if iso.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: iso.dim(),
            got: g.dim(),
        });
    }
    let k = iso.multiplicity();
    let p = g.probabilities();
    let mut q = DMatrix::<Complex64>::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &pi) in p.iter().enumerate() {
                acc += iso.columns[(i, a)].conj() * iso.columns[(i, b)] * pi;
            }
            q[(a, b)] = acc;
            q[(b, a)] = acc.conj();
        }
        q[(a, a)] = Complex64::new(q[(a, a)].re, 0.0);
    }
    let q = HermitianMatrix::new(ComplexMatrix::new(q)?)?;
    let e = herm_eig(&q)?;
    let vecs = e.vectors.inner().clone();
    Ok(CompressedPerturbation {
        split_vectors: &iso.columns * &vecs,
        eigenvalues: e.values,
        eigenvectors: vecs,
        q,
    })
}

/// Outcome of the zero-speed test on an eigenspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stationarity {
    /// Some unit vector in the eigenspace is annihilated by `D`, so the
    /// eigenvalue stays an eigenvalue of `U V(t)` for every `t`.
    Stationary {
        witness: Vec<Complex64>,
        min_speed: f64,
        /// `(t, |U V(t) w - lambda w|)` at each probe time.
        residuals: Vec<(f64, f64)>,
    },
    Moving {
        min_speed: f64,
    },
}

impl Stationarity {
    pub fn is_stationary(&self) -> bool {
        matches!(self, Stationarity::Stationary { .. })
    }

    pub fn max_residual(&self) -> f64 {
        match self {
            Stationarity::Stationary { residuals, .. } => residuals.iter().map(|r| r.1).fold(0.0, f64::max),
            Stationarity::Moving { .. } => 0.0,
        }
    }
}

pub fn stationarity_certificate(
    u: &UnitaryMatrix,
    iso: &EigenspaceIsometry,
    g: &PerturbationGenerator,
) -> Result<Stationarity> {
    check_dims(u, g)?;
    let cq = compressed_q(iso, g)?;
    let min_speed = cq.eigenvalues[0];
    if min_speed > tol::STATIONARY {
        return Ok(Stationarity::Moving { min_speed });
    }
    let witness = cq.split_vector(0);
    let residuals = PROBE_TIMES
        .iter()
        .map(|&t| {
            let m = perturbed_unitary(u, g, t)?;
            Ok((t, eigen_residual(&m, iso.eigenvalue, &witness)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Stationarity::Stationary {
        witness,
        min_speed,
        residuals,
    })
}

/// `|M x - lambda x|`.
pub fn eigen_residual(m: &ComplexMatrix, lambda: Complex64, x: &[Complex64]) -> f64 {
    let d = m.dim();
    (0..d)
        .map(|i| {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..d {
                row += m[(i, j)] * x[j];
            }
            (row - lambda * x[i]).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// Number of eigenvalues of `m` within `tol` of `lambda`.
pub fn multiplicity_at(m: &UnitaryMatrix, lambda: Complex64, tol: f64) -> Result<usize> {
    let e = unitary_eig(m)?;
    Ok(e.eigenvalues().iter().filter(|z| (**z - lambda).norm() < tol).count())
}

/// Eigendecomposition whose degenerate clusters use the split basis
/// `I v_j` of the compressed generator, ordered by split speed. Within
/// such a basis every vector has a well-defined first-order speed.
pub(crate) fn eigen_in_split_basis(
    u: &UnitaryMatrix,
    g: &PerturbationGenerator,
) -> Result<(EigenSystem, Vec<Complex64>, DMatrix<Complex64>)> {
    let e = unitary_eig(u)?;
    let mut values = e.eigenvalues().to_vec();
    let mut vectors = e.eigenvectors().clone();
    for (ci, members) in e.clusters().iter().enumerate() {
        if members.len() < 2 {
            continue;
        }
        let iso = e.isometry(ci);
        let cq = compressed_q(&iso, g)?;
        for (slot, &j) in members.iter().enumerate() {
            vectors.set_column(j, &cq.split_vectors.column(slot));
            values[j] = iso.eigenvalue;
        }
    }
    Ok((e, values, vectors))
}

/// First-order model of every eigenvalue of `U V(t)` near `t = 0`.
#[derive(Clone, Debug)]
pub struct FirstOrderModel {
    pub origins: Vec<Complex64>,
    pub speeds: Vec<f64>,
    /// Multiplicity of the cluster each eigenvalue starts in.
    pub multiplicities: Vec<usize>,
    pub direction: Direction,
}

impl FirstOrderModel {
    pub fn new(u: &UnitaryMatrix, g: &PerturbationGenerator) -> Result<Self> {
        check_dims(u, g)?;
        let (e, origins, vectors) = eigen_in_split_basis(u, g)?;
        let speeds = (0..e.dim())
            .map(|j| {
                let x: Vec<Complex64> = vectors.column(j).iter().copied().collect();
                g.expectation(&x)
            })
            .collect();
        let multiplicities = (0..e.dim()).map(|j| e.multiplicity(j)).collect();
        Ok(Self {
            origins,
            speeds,
            multiplicities,
            direction: g.direction(),
        })
    }

    pub fn predict(&self, t: f64) -> Vec<Complex64> {
        self.origins
            .iter()
            .zip(&self.speeds)
            .map(|(&l, &s)| first_order_eigenvalue(l, s, t, self.direction))
            .collect()
    }

    /// `|lambda_j(t) - prediction_j(t)|` with eigenvalues of `U V(t)`
    /// assigned to predictions by minimum total arc distance.
    pub fn errors(&self, u: &UnitaryMatrix, g: &PerturbationGenerator, t: f64) -> Result<Vec<f64>> {
        let exact = unitary_eig(&perturbed_unitary(u, g, t)?)?;
        let predicted = self.predict(t);
        let cost: Vec<Vec<f64>> = predicted
            .iter()
            .map(|p| exact.eigenvalues().iter().map(|z| arc_distance(*p, *z)).collect())
            .collect();
        let sigma = min_cost_assignment(&cost);
        Ok(predicted
            .iter()
            .enumerate()
            .map(|(j, p)| (exact.eigenvalue(sigma[j]) - p).norm())
            .collect())
    }

    /// Largest `t` on a doubling grid from `t0` up to `t_max` for which
    /// every first-order error stays below `threshold`.
    pub fn empirical_horizon(
        &self,
        u: &UnitaryMatrix,
        g: &PerturbationGenerator,
        threshold: f64,
        t0: f64,
        t_max: f64,
    ) -> Result<f64> {
        let mut best = 0.0;
        let mut t = t0;
        while t <= t_max {
            let worst = self.errors(u, g, t)?.into_iter().fold(0.0, f64::max);
            if worst >= threshold {
                break;
            }
            best = t;
            t *= 2.0;
        }
        Ok(best)
    }
}

/// Arc length between two points of the unit circle.
pub fn arc_distance(a: Complex64, b: Complex64) -> f64 {
    (a * b.conj()).arg().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::schatten_inf;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_time_is_identity_perturbation() {
        let u = UnitaryMatrix::diagonal_phases(&[0.1, 0.2]);
        let g = PerturbationGenerator::uniform(2, Direction::Counterclockwise).unwrap();
        assert_eq!(perturbed_unitary(&u, &g, 0.0).unwrap(), u);
        assert!(perturbed_unitary(&u, &g, -1.0).is_err());
    }

    #[test]
    fn identity_with_one_hot_at_pi() {
        let g = PerturbationGenerator::one_hot(3, 1, Direction::Counterclockwise).unwrap();
        let m = perturbed_unitary(&UnitaryMatrix::identity(3), &g, PI).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 1.0]);
        assert!(schatten_inf(&m.sub(&expected)) < 1e-15);
    }

    #[test]
    fn simple_velocity_cases() {
        let x = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let uniform = PerturbationGenerator::uniform(3, Direction::Counterclockwise).unwrap();
        assert!((simple_velocity(&x, &uniform).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let e1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let g = PerturbationGenerator::one_hot(3, 1, Direction::Counterclockwise).unwrap();
        assert_eq!(simple_velocity(&e1, &g).unwrap(), 0.0);
        assert!(simple_velocity(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], &g).is_err());
    }

    #[test]
    fn first_order_cases() {
        let l = Complex64::from_polar(1.0, 0.4);
        assert_eq!(first_order_eigenvalue(l, 0.0, 5.0, Direction::Clockwise), l);
        let z = first_order_eigenvalue(c(1.0, 0.0), 1.0, PI / 2.0, Direction::Counterclockwise);
        assert!((z - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_velocity_uniform() {
        let g = PerturbationGenerator::uniform(4, Direction::Counterclockwise).unwrap();
        let lam = Complex64::from_polar(1.0, 1.1);
        let x = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        assert!((exact_velocity(lam, &x, &g) - c(0.0, 1.0) * lam / 4.0).norm() < 1e-15);
        let cw = g.with_direction(Direction::Clockwise);
        assert!((exact_velocity(lam, &x, &cw) + c(0.0, 1.0) * lam / 4.0).norm() < 1e-15);
    }

    #[test]
    fn compressed_q_of_identity_is_diag_p() {
        let e = unitary_eig(&UnitaryMatrix::identity(3)).unwrap();
        let iso = e.isometry(0);
        let g = PerturbationGenerator::new(vec![0.5, 0.2, 0.3], Direction::Counterclockwise).unwrap();
        let cq = compressed_q(&iso, &g).unwrap();
        let expected = [0.2, 0.3, 0.5];
        for (a, b) in cq.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn compressed_q_simple_matches_simple_velocity() {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, 1.0]);
        let e = unitary_eig(&u).unwrap();
        let g = PerturbationGenerator::new(vec![0.3, 0.7], Direction::Counterclockwise).unwrap();
        for ci in 0..2 {
            let iso = e.isometry(ci);
            let cq = compressed_q(&iso, &g).unwrap();
            let x: Vec<Complex64> = iso.columns.column(0).iter().copied().collect();
            assert_eq!(cq.eigenvalues[0], simple_velocity(&x, &g).unwrap());
        }
    }

    #[test]
    fn stationary_when_support_misses_eigenvector() {
        let u = UnitaryMatrix::diagonal_phases(&[0.5, 1.5, 2.5]);
        let e = unitary_eig(&u).unwrap();
        let g = PerturbationGenerator::one_hot(3, 1, Direction::Counterclockwise).unwrap();
        // cluster 0 holds e^{0.5 i}, eigenvector e_1
        let cert = stationarity_certificate(&u, &e.isometry(0), &g).unwrap();
        match &cert {
            Stationarity::Stationary { witness, .. } => {
                assert!((witness[0] - c(1.0, 0.0)).norm() < 1e-15);
            }
            other => panic!("expected stationary, got {other:?}"),
        }
        assert!(cert.max_residual() < 1e-14);
    }

    #[test]
    fn uniform_generator_always_moves() {
        let u = UnitaryMatrix::diagonal_phases(&[0.5, 1.5, 2.5]);
        let e = unitary_eig(&u).unwrap();
        let g = PerturbationGenerator::uniform(3, Direction::Counterclockwise).unwrap();
        for ci in 0..3 {
            let cert = stationarity_certificate(&u, &e.isometry(ci), &g).unwrap();
            assert!(matches!(cert, Stationarity::Moving { min_speed } if (min_speed - 1.0 / 3.0).abs() < 1e-15));
        }
    }

    #[test]
    fn first_order_model_of_diagonal_is_exact() {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, 2.0]);
        let g = PerturbationGenerator::new(vec![0.25, 0.75], Direction::Clockwise).unwrap();
        let model = FirstOrderModel::new(&u, &g).unwrap();
        let errs = model.errors(&u, &g, 0.3).unwrap();
        assert!(errs.iter().all(|&e| e < 1e-14));
        let horizon = model.empirical_horizon(&u, &g, 1e-3, 0.01, 10.0).unwrap();
        assert!((horizon - 5.12).abs() < 1e-12);
    }
}
