//! The 3x3 worked example: a unitary given to six decimals whose range
//! misses the origin, with its reference speed profile and steering time.

use numrange_core::linalg::UnitaryMatrix;
use numrange_core::Result;

use crate::matrix_file::MatrixFile;

pub const ENTRIES: [[f64; 2]; 9] = [
    [0.267868, 0.026891],
    [0.752935, -0.510663],
    [-0.314404, -0.0313982],
    [-0.83413, -0.0693252],
    [0.245915, -0.275811],
    [0.34174, -0.214685],
    [0.472125, 0.0635826],
    [0.0211772, -0.18793],
    [0.795835, -0.322391],
];

/// Squared eigenvector moduli, one row per eigenvector, in the reference
/// (unspecified) eigenvector order.
pub const SPEED_PROFILE: [[f64; 3]; 3] = [
    [0.426542, 0.543517, 0.0299407],
    [0.0480551, 0.105588, 0.846357],
    [0.525403, 0.350895, 0.123702],
];

pub const PROFILE_TOL: f64 = 1e-4;
pub const EXPECTED_P: [f64; 3] = [0.0, 1.0, 0.0];
pub const T_STAR_RANGE: (f64, f64) = (1.40, 1.50);
/// Time of the second figure.
pub const FIGURE_TIME: f64 = 1.5;

pub fn matrix_file() -> MatrixFile {
    MatrixFile {
        dim: 3,
        entries: ENTRIES.to_vec(),
        label: Some("worked example U (6 decimals)".into()),
        source: Some("embedded".into()),
    }
}

/// The example unitary, accepted at six-decimal precision, or its polar
/// factor when `polar_fix` is set.
pub fn unitary(polar_fix: bool) -> Result<UnitaryMatrix> {
    crate::commands::to_unitary(&matrix_file().matrix(), polar_fix)
}

/// Rows of `profile` matched one-to-one against the reference rows.
/// Returns the matching `reference row -> profile row` and the largest
/// entry deviation, or `None` when no matching fits within `PROFILE_TOL`.
pub fn match_profile(profile: &[Vec<f64>]) -> Option<(Vec<usize>, f64)> {
    let n = SPEED_PROFILE.len();
    if profile.len() != n || profile.iter().any(|r| r.len() != n) {
        return None;
    }
    let dev = |r: usize, j: usize| -> f64 {
        (0..n).map(|i| (profile[j][i] - SPEED_PROFILE[r][i]).abs()).fold(0.0, f64::max)
    };
    let mut best: Option<(Vec<usize>, f64)> = None;
    for perm in permutations(n) {
        let worst = (0..n).map(|r| dev(r, perm[r])).fold(0.0, f64::max);
        if worst <= PROFILE_TOL && best.as_ref().is_none_or(|(_, b)| worst < *b) {
            best = Some((perm, worst));
        }
    }
    best
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounded_matrix_is_nearly_unitary() {
        let u = unitary(false).unwrap();
        assert!(u.residual() < 1e-5);
        assert!(unitary(true).unwrap().residual() < 1e-13);
    }

    #[test]
    fn profile_matching_ignores_row_order() {
        let mut rows: Vec<Vec<f64>> = SPEED_PROFILE.iter().map(|r| r.to_vec()).collect();
        rows.swap(0, 2);
        let (perm, worst) = match_profile(&rows).unwrap();
        assert_eq!(perm, vec![2, 1, 0]);
        assert_eq!(worst, 0.0);
        rows[0][0] += 1e-3;
        assert!(match_profile(&rows).is_none());
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
    }
}
