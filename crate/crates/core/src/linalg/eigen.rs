use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::tol;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are eigenvectors, in the same order as `values`.
    pub vectors: UnitaryMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j).iter().copied().collect()
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn herm_eig(h: &HermitianMatrix) -> Result<HermitianEigen> {
    let (values, vectors) = jacobi(h.inner())?;
    Ok(HermitianEigen {
        values,
        vectors: UnitaryMatrix::new_unchecked(ComplexMatrix::from_inner_unchecked(vectors)),
    })
}

fn off_diagonal_norm(a: &DMatrix<Complex64>) -> f64 {
    let d = a.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(input: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let d = input.nrows();
    let mut a = input.clone();
    for i in 0..d {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..d {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = DMatrix::<Complex64>::identity(d, d);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + 1.0f64.hypot(tau))
                } else {
                    -1.0 / (-tau + 1.0f64.hypot(tau))
                };
                let c = 1.0 / 1.0f64.hypot(t);
                let s = t * c;
                // G = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane.
                let g_pq = phase * s;
                let g_qp = -phase.conj() * s;
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * c;
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * g_qp.conj();
                    a[(q, k)] = apk * g_pq.conj() + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * c;
                }
            }
        }
    }
    if !converged {
        let residual = off_diagonal_norm(&a);
        if residual > target {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                residual,
            });
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = DMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    fix_phases(&mut vectors);
    Ok((values, vectors))
}

/// Rotates each column so its largest-modulus entry (first one, up to
/// rounding) is real and positive.
fn fix_phases(vectors: &mut DMatrix<Complex64>) {
    for j in 0..vectors.ncols() {
        let max = vectors.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pivot = vectors
            .column(j)
            .iter()
            .position(|z| z.norm() >= max - 1e-9)
            .unwrap_or(0);
        let z = vectors[(pivot, j)];
        let rot = z.conj() / z.norm();
        for i in 0..vectors.nrows() {
            vectors[(i, j)] *= rot;
        }
        vectors[(pivot, j)] = Complex64::new(vectors[(pivot, j)].norm(), 0.0);
    }
}

/// Eigenvalues of an arbitrary square matrix from its complex Schur form,
/// sorted by principal argument, then modulus.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(a.inner().clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence {
        sweeps: 0,
        residual: f64::NAN,
    })?;
    let mut values: Vec<Complex64> = schur.unpack().1.diagonal().iter().copied().collect();
    values.sort_by(|x, y| principal_arg(*x).total_cmp(&principal_arg(*y)).then(x.norm().total_cmp(&y.norm())));
    Ok(values)
}

/// Principal argument in (-pi, pi].
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Spectral decomposition of a unitary matrix.
///
/// Eigenvalues run counterclockwise starting from the smallest principal
/// argument. Eigenvalues closer than the cluster tolerance are grouped;
/// each group occupies a contiguous index range.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    values: Vec<Complex64>,
    vectors: DMatrix<Complex64>,
    clusters: Vec<Vec<usize>>,
}

/// Orthonormal basis of one eigenspace, stacked as columns.
#[derive(Clone, Debug)]
pub struct EigenspaceIsometry {
    pub columns: DMatrix<Complex64>,
    pub eigenvalue: Complex64,
}

impl EigenspaceIsometry {
    pub fn new(columns: DMatrix<Complex64>, eigenvalue: Complex64) -> Self {
        Self { columns, eigenvalue }
    }

    pub fn multiplicity(&self) -> usize {
        self.columns.ncols()
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    /// `|I^H I - 1|_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.multiplicity();
        (self.columns.adjoint() * &self.columns - DMatrix::<Complex64>::identity(k, k)).norm()
    }

    /// `|U I - lambda I|_F`.
    pub fn eigen_residual(&self, u: &ComplexMatrix) -> f64 {
        (u.inner() * &self.columns - &self.columns * self.eigenvalue).norm()
    }
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.values
    }

    pub fn eigenvalue(&self, j: usize) -> Complex64 {
        self.values[j]
    }

    /// Column `j` is the eigenvector for `eigenvalue(j)`.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j).iter().copied().collect()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster_of(&self, j: usize) -> usize {
        self.clusters
            .iter()
            .position(|c| c.contains(&j))
            .expect("every index belongs to a cluster")
    }

    pub fn multiplicity(&self, j: usize) -> usize {
        self.clusters[self.cluster_of(j)].len()
    }

    /// One unit-modulus eigenvalue per cluster, counterclockwise.
    pub fn representatives(&self) -> Vec<Complex64> {
        self.clusters.iter().map(|c| self.cluster_value(c)).collect()
    }

    fn cluster_value(&self, members: &[usize]) -> Complex64 {
        let sum: Complex64 = members.iter().map(|&j| self.values[j]).sum();
        if sum.norm() == 0.0 {
            self.values[members[0]]
        } else {
            sum / sum.norm()
        }
    }

    pub fn isometry(&self, cluster: usize) -> EigenspaceIsometry {
        let members = &self.clusters[cluster];
        let mut cols = DMatrix::zeros(self.dim(), members.len());
        for (dst, &j) in members.iter().enumerate() {
            cols.set_column(dst, &self.vectors.column(j));
        }
        EigenspaceIsometry::new(cols, self.cluster_value(members))
    }

    /// Arguments unwrapped so that they are non-decreasing, starting from
    /// the principal argument of the first eigenvalue.
    pub fn unwrapped_args(&self) -> Vec<f64> {
        unwrap_counterclockwise(&self.values)
    }

    /// `sum_j lambda_j |x_j><x_j|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..d {
            let lam = self.values[j];
            for i in 0..d {
                scaled[(i, j)] *= lam;
            }
        }
        ComplexMatrix::from_inner_unchecked(scaled * self.vectors.adjoint())
    }
}

/// Unwraps a counterclockwise-sorted list of unit-circle points.
pub(crate) fn unwrap_counterclockwise(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let Some(first) = values.first() else {
        return out;
    };
    let mut acc = principal_arg(*first);
    out.push(acc);
    for w in values.windows(2) {
        let mut delta = (w[1] * w[0].conj()).arg();
        if delta < -tol::CLUSTER {
            delta += 2.0 * PI;
        }
        acc += delta;
        out.push(acc);
    }
    out
}

/// Eigendecomposition of a unitary with the default cluster tolerance.
pub fn unitary_eig(u: &UnitaryMatrix) -> Result<EigenSystem> {
    unitary_eig_with(u, tol::CLUSTER)
}

/// Diagonalizes `(U + U^H)/2`, then resolves each near-degenerate block
/// with the compression of `(U - U^H)/2i` (and, inside blocks that are
/// still degenerate, a second pass with the real part).
pub fn unitary_eig_with(u: &UnitaryMatrix, cluster_tol: f64) -> Result<EigenSystem> {
    let d = u.dim();
    let m = u.inner();
    let uh = m.adjoint();
    let re_part = (m + &uh) * Complex64::new(0.5, 0.0);
    let im_part = (m - &uh) * Complex64::new(0.0, -0.5);

    let (re_vals, re_vecs) = jacobi(&re_part)?;
    let mut vectors = DMatrix::<Complex64>::zeros(d, d);
    let mut filled = 0;
    for group in consecutive_groups(&re_vals, tol::REAL_PART_GROUP) {
        let basis = select_columns(&re_vecs, &group);
        if group.len() == 1 {
            vectors.set_column(filled, &basis.column(0));
            filled += 1;
            continue;
        }
        let (im_vals, refined) = diagonalize_compression(&basis, &im_part)?;
        for sub in consecutive_groups(&im_vals, tol::IMAG_PART_GROUP) {
            let sub_basis = select_columns(&refined, &sub);
            let resolved = if sub.len() == 1 {
                sub_basis
            } else {
                diagonalize_compression(&sub_basis, &re_part)?.1
            };
            for c in 0..resolved.ncols() {
                vectors.set_column(filled, &resolved.column(c));
                filled += 1;
            }
        }
    }
    debug_assert_eq!(filled, d);

    let values: Vec<Complex64> = (0..d)
        .map(|j| {
            let x = vectors.column(j);
            (x.adjoint() * m * x)[(0, 0)]
        })
        .collect();
    Ok(order_and_cluster(values, vectors, cluster_tol))
}

fn select_columns(m: &DMatrix<Complex64>, cols: &[usize]) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(m.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

/// Diagonalizes `S^H M S` and maps the eigenvectors back through `S`.
fn diagonalize_compression(
    basis: &DMatrix<Complex64>,
    herm: &DMatrix<Complex64>,
) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let compressed = basis.adjoint() * herm * basis;
    let (vals, vecs) = jacobi(&compressed)?;
    Ok((vals, basis * vecs))
}

/// Splits sorted values into runs whose consecutive gaps are below `tol`.
fn consecutive_groups(sorted: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - sorted[*g.last().unwrap()] < tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn order_and_cluster(
    values: Vec<Complex64>,
    mut vectors: DMatrix<Complex64>,
    cluster_tol: f64,
) -> EigenSystem {
    let d = values.len();
    fix_phases(&mut vectors);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| principal_arg(values[i]).total_cmp(&principal_arg(values[j])));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &j in &order {
        match clusters.last_mut() {
            Some(c) if (values[j] - values[*c.last().unwrap()]).norm() < cluster_tol => c.push(j),
            _ => clusters.push(vec![j]),
        }
    }
    // A cluster sitting on the negative real axis can straddle the cut.
    if clusters.len() > 1 {
        let first = clusters[0][0];
        let last = *clusters.last().unwrap().last().unwrap();
        if (values[first] - values[last]).norm() < cluster_tol {
            let head = clusters.remove(0);
            clusters.last_mut().unwrap().extend(head);
        }
    }

    let column = |j: usize| -> Vec<Complex64> { vectors.column(j).iter().copied().collect() };
    for c in clusters.iter_mut() {
        if c.len() > 1 {
            c.sort_by(|&i, &j| lexicographic(&column(i), &column(j)));
        }
    }

    let mut sorted_values = Vec::with_capacity(d);
    let mut sorted_vectors = DMatrix::zeros(d, d);
    let mut new_clusters = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let mut members = Vec::with_capacity(c.len());
        for &j in c {
            let dst = sorted_values.len();
            sorted_vectors.set_column(dst, &vectors.column(j));
            sorted_values.push(values[j]);
            members.push(dst);
        }
        new_clusters.push(members);
    }
    EigenSystem {
        values: sorted_values,
        vectors: sorted_vectors,
        clusters: new_clusters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::schatten_inf;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herm(rows: &[Vec<Complex64>]) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn reconstruct_herm(e: &HermitianEigen) -> ComplexMatrix {
        let lam = ComplexMatrix::from_real_diagonal(&e.values);
        &(e.vectors.matrix() * &lam) * e.vectors.adjoint().matrix()
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let e = herm_eig(&HermitianMatrix::from_real_diagonal(&[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert!(e.vectors.residual() < 1e-14);
    }

    #[test]
    fn diagonal_sorts_ascending_with_permutation_vectors() {
        let e = herm_eig(&HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vector(0), vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(e.vector(1), vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(e.vector(2), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn pauli_x() {
        let h = herm(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let e = herm_eig(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (1, -1)/sqrt2 up to the phase convention, which puts the first
        // of two equal-modulus entries on the positive real axis.
        let v0 = e.vector(0);
        assert!((v0[0] - c(r, 0.0)).norm() < 1e-14);
        assert!((v0[1] - c(-r, 0.0)).norm() < 1e-14);
        let v1 = e.vector(1);
        assert!((v1[0] - c(r, 0.0)).norm() < 1e-14);
        assert!((v1[1] - c(r, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let h = herm(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ]);
        let e = herm_eig(&h).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(schatten_inf(&reconstruct_herm(&e).sub(&h)) < 1e-13);
        assert!(e.vectors.residual() < 1e-13);
    }

    #[test]
    fn unitary_identity_is_one_cluster() {
        let e = unitary_eig(&UnitaryMatrix::identity(2)).unwrap();
        assert_eq!(e.clusters(), &[vec![0, 1]]);
        assert_eq!(e.representatives(), vec![c(1.0, 0.0)]);
        assert_eq!(e.multiplicity(0), 2);
    }

    #[test]
    fn diagonal_unitary_counterclockwise_order() {
        let u = UnitaryMatrix::diagonal_phases(&[PI, PI / 2.0, 0.0]);
        let e = unitary_eig(&u).unwrap();
        let vals = e.eigenvalues();
        assert!((vals[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((vals[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((vals[2] - c(-1.0, 0.0)).norm() < 1e-14);
        // eigenvector of 1 is e_3 in this arrangement
        assert!((e.eigenvector(0)[2] - c(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(e.clusters().len(), 3);
    }

    #[test]
    fn conjugate_pair_is_separated() {
        // cos(theta) coincides for e^{i theta} and e^{-i theta}.
        let u = UnitaryMatrix::diagonal_phases(&[0.7, -0.7, 0.7]);
        let e = unitary_eig(&u).unwrap();
        assert_eq!(e.clusters().len(), 2);
        assert!((e.eigenvalue(0) - Complex64::from_polar(1.0, -0.7)).norm() < 1e-14);
        assert_eq!(e.clusters()[1].len(), 2);
        assert!(schatten_inf(&e.reconstruct().sub(&u)) < 1e-13);
    }

    #[test]
    fn cluster_straddling_the_cut_is_merged() {
        let u = UnitaryMatrix::diagonal_phases(&[PI - 1e-12, -PI + 1e-12, 0.3]);
        let e = unitary_eig(&u).unwrap();
        assert_eq!(e.clusters().len(), 2);
        assert_eq!(e.clusters()[1].len(), 2);
        let args = e.unwrapped_args();
        assert!(args.windows(2).all(|w| w[1] >= w[0] - tol::CLUSTER));
    }

    #[test]
    fn schur_eigenvalues_of_triangular_matrix() {
        let a = ComplexMatrix::from_row_slice(2, &[c(2.0, 0.0), c(5.0, 1.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        let v = eigenvalues(&a).unwrap();
        assert!((v[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((v[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn unwrap_handles_large_gaps() {
        let pts = [Complex64::from_polar(1.0, -3.0), Complex64::from_polar(1.0, 3.0)];
        let args = unwrap_counterclockwise(&pts);
        assert!((args[1] - 3.0).abs() < 1e-12);
    }
}
