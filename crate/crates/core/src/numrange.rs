//! Numerical range `W(A) = { <x|A|x> : |x| = 1 }`.
//!
//! General matrices go through the support function
//! `h(theta) = lambda_max((e^{-i theta} A + e^{i theta} A^H) / 2)`, sampled
//! on a uniform angle grid. For unitary matrices `W(U)` is the convex hull
//! of the spectrum and the origin test reduces to the largest arc gap
//! between consecutive eigenvalues.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, schatten_inf, unwrap_counterclockwise, ComplexMatrix, EigenSystem};
use crate::tol;

/// Where the origin sits relative to a numerical range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    OnBoundary,
    Outside,
}

impl Membership {
    /// Closure semantics: a boundary touch counts as contained.
    pub fn contains(self) -> bool {
        !matches!(self, Membership::Outside)
    }
}

#[derive(Clone, Debug)]
pub struct SupportPoint {
    pub h: f64,
    /// Unit eigenvector for the largest eigenvalue.
    pub witness: Vec<Complex64>,
    /// `<witness|A|witness>`, a point of the boundary of `W(A)`.
    pub point: Complex64,
}

pub fn support_function(a: &ComplexMatrix, theta: f64) -> Result<SupportPoint> {
    let e = herm_eig(&a.rotated_hermitian_part(theta))?;
    let top = e.values.len() - 1;
    let witness = e.vector(top);
    let point = rayleigh(a, &witness);
    Ok(SupportPoint {
        h: e.values[top],
        witness,
        point,
    })
}

fn support_value(a: &ComplexMatrix, theta: f64) -> Result<f64> {
    let e = herm_eig(&a.rotated_hermitian_part(theta))?;
    Ok(*e.values.last().expect("non-empty"))
}

pub(crate) fn rayleigh(a: &ComplexMatrix, x: &[Complex64]) -> Complex64 {
    let d = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..d {
            row += a[(i, j)] * x[j];
        }
        acc += x[i].conj() * row;
    }
    acc
}

/// `theta_k = 2 pi k / n`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Support function sampled on a uniform grid, with boundary points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportProfile {
    pub angles: Vec<f64>,
    pub support_values: Vec<f64>,
    pub boundary_points: Vec<Complex64>,
}

impl SupportProfile {
    pub fn compute(a: &ComplexMatrix, n_angles: usize) -> Result<Self> {
        if n_angles == 0 {
            return Err(Error::InvalidArgument("need at least one angle".into()));
        }
        let angles = angle_grid(n_angles);
        let points = angles
            .par_iter()
            .map(|&theta| support_function(a, theta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            support_values: points.iter().map(|p| p.h).collect(),
            boundary_points: points.iter().map(|p| p.point).collect(),
            angles,
        })
    }

    pub fn min_support(&self) -> f64 {
        self.support_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `Re(e^{-i theta} z) - h(theta)` over all boundary points
    /// and sampled angles. Non-positive (up to rounding) for a convex set.
    pub fn convexity_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (&theta, &h) in self.angles.iter().zip(&self.support_values) {
            let dir = Complex64::from_polar(1.0, -theta);
            for z in &self.boundary_points {
                worst = worst.max((dir * z).re - h);
            }
        }
        worst
    }

    /// Boundary points with consecutive duplicates removed, as a polygon.
    pub fn polygon(&self) -> RangePolygon {
        let mut vertices: Vec<Complex64> = Vec::new();
        for &z in &self.boundary_points {
            if vertices.last().is_none_or(|last| (z - last).norm() > 1e-12) {
                vertices.push(z);
            }
        }
        while vertices.len() > 1 && (vertices[0] - vertices[vertices.len() - 1]).norm() <= 1e-12 {
            vertices.pop();
        }
        RangePolygon { vertices }
    }
}

/// Sampled support values only; the hot path for membership decisions.
pub fn support_values(a: &ComplexMatrix, n_angles: usize) -> Result<Vec<f64>> {
    angle_grid(n_angles)
        .par_iter()
        .map(|&theta| support_value(a, theta))
        .collect()
}

/// Convex polygon, vertices counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangePolygon {
    pub vertices: Vec<Complex64>,
}

impl RangePolygon {
    /// Smallest cross product of consecutive edges; `>= 0` means convex
    /// with counterclockwise orientation.
    pub fn min_turn(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                let c = self.vertices[(i + 2) % n];
                let e1 = b - a;
                let e2 = c - b;
                e1.re * e2.im - e1.im * e2.re
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_convex(&self) -> bool {
        self.min_turn() >= -1e-12
    }
}

/// Distinct eigenvalues of a unitary, counterclockwise.
pub fn unitary_range_polygon(e: &EigenSystem) -> RangePolygon {
    RangePolygon {
        vertices: e.representatives(),
    }
}

/// Arc between two counterclockwise-consecutive distinct eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcGap {
    /// Cluster at which the gap starts (going counterclockwise).
    pub from: usize,
    /// Cluster at which the gap ends.
    pub to: usize,
    pub width: f64,
}

/// All arc gaps between consecutive cluster representatives; a single
/// cluster has one gap of width `2 pi` from itself to itself.
pub fn arc_gaps(e: &EigenSystem) -> Vec<ArcGap> {
    let reps = e.representatives();
    let n = reps.len();
    if n == 1 {
        return vec![ArcGap {
            from: 0,
            to: 0,
            width: 2.0 * PI,
        }];
    }
    let args = unwrap_counterclockwise(&reps);
    let mut gaps: Vec<ArcGap> = (0..n - 1)
        .map(|i| ArcGap {
            from: i,
            to: i + 1,
            width: args[i + 1] - args[i],
        })
        .collect();
    gaps.push(ArcGap {
        from: n - 1,
        to: 0,
        width: 2.0 * PI - (args[n - 1] - args[0]),
    });
    gaps
}

/// Widest gap; the first one wins ties.
pub fn largest_gap(e: &EigenSystem) -> ArcGap {
    arc_gaps(e)
        .into_iter()
        .reduce(|best, g| if g.width > best.width { g } else { best })
        .expect("at least one gap")
}

/// Origin test for a unitary: `0` is in `conv(spectrum)` iff no arc gap
/// exceeds `pi`.
pub fn contains_zero_unitary(e: &EigenSystem) -> Membership {
    let widest = largest_gap(e).width;
    if (widest - PI).abs() <= tol::GAP {
        Membership::OnBoundary
    } else if widest > PI {
        Membership::Outside
    } else {
        Membership::Inside
    }
}

fn check_angles(n_angles: usize) -> Result<()> {
    if n_angles < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 angles, got {n_angles}")));
    }
    Ok(())
}

/// Membership tolerance for `contains_zero_general`.
pub fn support_tolerance(a: &ComplexMatrix) -> f64 {
    tol::SUPPORT_RELATIVE * schatten_inf(a).max(f64::MIN_POSITIVE)
}

/// Classifies a sampled minimum support value.
pub fn classify_min_support(min_h: f64, tolerance: f64) -> Membership {
    if min_h > tolerance {
        Membership::Inside
    } else if min_h < -tolerance {
        Membership::Outside
    } else {
        Membership::OnBoundary
    }
}

/// Local minima of the sampled support function refined by golden-section
/// search; at most this many of the lowest ones are refined.
const REFINED_MINIMA: usize = 8;

/// `min_theta h(theta)`: grid sweep followed by golden-section refinement
/// of the lowest grid minima. Positive means strictly inside.
///
/// The refinement matters for thin ranges, where `h < 0` only on an
/// angular window narrower than the grid spacing.
pub fn min_support(a: &ComplexMatrix, n_angles: usize) -> Result<f64> {
    check_angles(n_angles)?;
    let values = support_values(a, n_angles)?;
    let n = values.len();
    let mut minima: Vec<usize> = (0..n)
        .filter(|&k| values[k] <= values[(k + n - 1) % n] && values[k] <= values[(k + 1) % n])
        .collect();
    minima.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    minima.truncate(REFINED_MINIMA);
    let step = 2.0 * PI / n as f64;
    let refined = minima
        .par_iter()
        .map(|&k| golden_min(a, k as f64 * step - step, k as f64 * step + step))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().chain(refined).fold(f64::INFINITY, f64::min))
}

fn golden_min(a: &ComplexMatrix, mut lo: f64, mut hi: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = support_value(a, x1)?;
    let mut f2 = support_value(a, x2)?;
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = support_value(a, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = support_value(a, x2)?;
        }
    }
    Ok(f1.min(f2))
}

/// Origin test by support-function sweep, valid for any square matrix.
pub fn contains_zero_general(a: &ComplexMatrix, n_angles: usize) -> Result<Membership> {
    let min_h = min_support(a, n_angles)?;
    Ok(classify_min_support(min_h, support_tolerance(a)))
}

/// Distance from the origin to `W(A)`, zero when the origin is inside.
pub fn distance_to_zero(a: &ComplexMatrix, n_angles: usize) -> Result<f64> {
    Ok((-min_support(a, n_angles)?).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{unitary_eig, UnitaryMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn support_of_identity_is_cosine() {
        let a = ComplexMatrix::identity(3);
        for &theta in &[0.0, 0.7, PI, 4.0] {
            let s = support_function(&a, theta).unwrap();
            assert!((s.h - theta.cos()).abs() < 1e-15);
            assert!((s.point - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn support_of_real_segment() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let s = support_function(&a, 0.0).unwrap();
        assert!((s.h - 1.0).abs() < 1e-15);
        assert!((s.point - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_unitary_triangle() {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, PI / 2.0, PI]);
        let e = unitary_eig(&u).unwrap();
        let poly = unitary_range_polygon(&e);
        assert_eq!(poly.vertices.len(), 3);
        assert!((poly.vertices[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((poly.vertices[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((poly.vertices[2] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!(poly.is_convex());
        assert_eq!(contains_zero_unitary(&e), Membership::OnBoundary);
    }

    #[test]
    fn identity_polygon_is_a_point() {
        let e = unitary_eig(&UnitaryMatrix::identity(2)).unwrap();
        assert_eq!(unitary_range_polygon(&e).vertices, vec![c(1.0, 0.0)]);
        assert_eq!(contains_zero_unitary(&e), Membership::Outside);
        assert_eq!(largest_gap(&e).width, 2.0 * PI);
    }

    #[test]
    fn roots_of_unity_contain_zero() {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]);
        let e = unitary_eig(&u).unwrap();
        assert_eq!(contains_zero_unitary(&e), Membership::Inside);
    }

    #[test]
    fn general_membership_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(contains_zero_general(&id, 64).unwrap(), Membership::Outside);
        let seg = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert_eq!(contains_zero_general(&seg, 64).unwrap(), Membership::OnBoundary);
        assert!(contains_zero_general(&seg, 8).is_err());
    }

    #[test]
    fn distance_examples() {
        let id = ComplexMatrix::identity(2);
        assert!((distance_to_zero(&id, 2048).unwrap() - 1.0).abs() < 1e-12);
        let a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert!((distance_to_zero(&a, 2048).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let roots = ComplexMatrix::from_diagonal(&[
            c(1.0, 0.0),
            Complex64::from_polar(1.0, 2.0 * PI / 3.0),
            Complex64::from_polar(1.0, 4.0 * PI / 3.0),
        ]);
        assert_eq!(distance_to_zero(&roots, 2048).unwrap(), 0.0);
    }

    #[test]
    fn profile_is_convex_and_contains_spectrum() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.5)],
            vec![c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let prof = SupportProfile::compute(&a, 360).unwrap();
        assert!(prof.convexity_violation() <= 1e-9);
        // upper triangular: eigenvalues are the diagonal
        for lam in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)] {
            for (&theta, &h) in prof.angles.iter().zip(&prof.support_values) {
                assert!((Complex64::from_polar(1.0, -theta) * lam).re <= h + 1e-9);
            }
        }
        assert!(prof.polygon().is_convex());
    }
}
