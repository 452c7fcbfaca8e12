//! Random instances and independent oracles for property checks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{unitary_eig, ComplexMatrix, UnitaryMatrix};
use crate::numrange::{classify_min_support, Membership};
use crate::perturb::{track_trajectory, Direction, PerturbationGenerator};
use crate::tol;

/// Dense grid used by [`brute_membership`].
pub const DENSE_ANGLES: usize = 16384;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` pushed back into `Q`.
pub fn haar_unitary(d: usize, seed: u64) -> UnitaryMatrix {
    haar_unitary_from(d, &mut rng(seed))
}

pub fn haar_unitary_from<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(d >= 1, "dimension must be positive");
    let z = DMatrix::<Complex64>::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::with_tolerance(ComplexMatrix::new(q).expect("finite"), 1e-12)
        .expect("Householder QR yields a unitary factor")
}

/// Uniform draw from the probability simplex.
pub fn random_probability<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    normalize_exactly(&mut w);
    w
}

fn normalize_exactly(p: &mut [f64]) {
    let sum: f64 = p.iter().sum();
    if let Some(imax) = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])) {
        p[imax] += 1.0 - sum;
    }
}

/// Random phases on the unit circle, pairwise at least `min_sep` apart
/// and at least `min_sep` away from every phase in `avoid`.
fn separated_phases<R: Rng + ?Sized>(n: usize, avoid: &[f64], min_sep: f64, rng: &mut R) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(n);
    while out.len() < n {
        let cand = rng.random_range(-PI..PI);
        let far = avoid
            .iter()
            .chain(out.iter())
            .all(|&a| (Complex64::from_polar(1.0, cand) * Complex64::from_polar(1.0, -a)).arg().abs() >= min_sep);
        if far {
            out.push(cand);
        }
    }
    out
}

/// `X diag(lambda, ..., lambda, mu_1, ...) X^H` with a Haar eigenbasis
/// and `lambda` repeated `k` times. Returns the matrix and `lambda`.
pub fn degenerate_unitary<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> (UnitaryMatrix, Complex64) {
    assert!(1 <= k && k <= d);
    let basis = haar_unitary_from(d, rng);
    let lam_phase = rng.random_range(-PI..PI);
    let others = separated_phases(d - k, &[lam_phase], 0.05, rng);
    let mut phases = vec![lam_phase; k];
    phases.extend(others);
    let diag = UnitaryMatrix::diagonal_phases(&phases);
    let m = basis.compose(&diag).compose(&basis.adjoint());
    let u = UnitaryMatrix::with_tolerance(m.into_matrix(), 1e-12).expect("product of unitaries");
    (u, Complex64::from_polar(1.0, lam_phase))
}

/// A unitary with a known `k`-fold eigenvalue and a generator supported
/// on `l < k` coordinates.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub label: String,
    pub unitary: UnitaryMatrix,
    pub generator: PerturbationGenerator,
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    pub support_size: usize,
}

impl Fixture {
    /// Checks the advertised multiplicity and support against a fresh
    /// eigendecomposition.
    pub fn validate(&self) -> Result<()> {
        if self.unitary.residual() > 1e-10 {
            return Err(Error::InvalidArgument(format!("{}: matrix not unitary", self.label)));
        }
        let e = unitary_eig(&self.unitary)?;
        let count = e
            .eigenvalues()
            .iter()
            .filter(|z| (**z - self.eigenvalue).norm() < tol::CLUSTER)
            .count();
        if count != self.multiplicity {
            return Err(Error::InvalidArgument(format!(
                "{}: expected multiplicity {}, found {count}",
                self.label, self.multiplicity
            )));
        }
        if self.generator.support().len() != self.support_size {
            return Err(Error::InvalidArgument(format!("{}: support size mismatch", self.label)));
        }
        Ok(())
    }
}

pub fn degenerate_fixture(d: usize, k: usize, l: usize, seed: u64) -> Result<Fixture> {
    if !(1 <= l && l < k && k <= d) {
        return Err(Error::InvalidArgument(format!("need 1 <= l < k <= d, got d={d} k={k} l={l}")));
    }
    let mut rng = rng(seed);
    let (unitary, eigenvalue) = degenerate_unitary(d, k, &mut rng);
    let support = sample(&mut rng, d, l).into_vec();
    let weights = random_probability(l, &mut rng);
    let mut p = vec![0.0; d];
    for (&i, &w) in support.iter().zip(&weights) {
        // keep every supported entry strictly positive
        p[i] = 0.5 / l as f64 + 0.5 * w;
    }
    normalize_exactly(&mut p);
    let fixture = Fixture {
        label: format!("degenerate(d={d}, k={k}, l={l}, seed={seed})"),
        unitary,
        generator: PerturbationGenerator::new(p, Direction::Counterclockwise)?,
        eigenvalue,
        multiplicity: k,
        support_size: l,
    };
    fixture.validate()?;
    Ok(fixture)
}

/// Centered difference `(lambda_j(t + h) - lambda_j(t - h)) / 2h` of the
/// tracked paths.
pub fn fd_velocity(u: &UnitaryMatrix, g: &PerturbationGenerator, t: f64, h: f64) -> Result<Vec<Complex64>> {
    if h.is_nan() || h <= 0.0 || t - h < 0.0 {
        return Err(Error::InvalidArgument(format!("need h > 0 and t - h >= 0, got t={t} h={h}")));
    }
    let max_step = 0.05;
    let ahead = track_trajectory(u, g, t + h, max_step)?;
    let after = ahead.eigenvalues_at(ahead.steps() - 1);
    let before = if t - h > 0.0 {
        let behind = track_trajectory(u, g, t - h, max_step)?;
        behind.eigenvalues_at(behind.steps() - 1)
    } else {
        ahead.eigenvalues_at(0)
    };
    Ok(before
        .iter()
        .zip(&after)
        .map(|(a, b)| (b - a) / (2.0 * h))
        .collect())
}

/// Tracked exact velocities at `t`.
pub fn tracked_velocity(u: &UnitaryMatrix, g: &PerturbationGenerator, t: f64) -> Result<Vec<Complex64>> {
    let rec = track_trajectory(u, g, t, 0.05)?;
    let last = rec.steps() - 1;
    Ok(rec.velocities.iter().map(|v| v[last]).collect())
}

/// Largest eigenvalue of a Hermitian matrix through nalgebra's
/// tridiagonal QR solver, kept apart from the crate's Jacobi code.
fn lambda_max_independent(m: DMatrix<Complex64>) -> f64 {
    m.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Origin membership by a dense support sweep that only reads the raw
/// entries of `a`.
pub fn brute_membership(a: &ComplexMatrix, n_dense: usize) -> Membership {
    let raw = a.inner().clone();
    let min_h = (0..n_dense)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_dense as f64;
            let phase = Complex64::from_polar(1.0, -theta);
            let rotated = &raw * phase;
            let herm = (&rotated + rotated.adjoint()) * Complex64::new(0.5, 0.0);
            lambda_max_independent(herm)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let scale = raw.singular_values().iter().copied().fold(0.0, f64::max);
    classify_min_support(min_h, tol::SUPPORT_RELATIVE * scale.max(f64::MIN_POSITIVE))
}
