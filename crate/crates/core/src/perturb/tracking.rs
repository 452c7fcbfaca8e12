use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{arc_distance, eigen_in_split_basis, exact_velocity, min_cost_assignment, perturbed_unitary};
use super::{Direction, PerturbationGenerator};
use crate::error::{Error, Result};
use crate::linalg::UnitaryMatrix;
use crate::tol;

/// Largest arc an eigenvalue may travel in one accepted step.
const MAX_ARC_STEP: f64 = PI / 8.0;

/// Eigenvalue paths of `U V(t)` over an adaptive time grid.
///
/// `paths[j][n]` is the eigenvalue on path `j` at `t_grid[n]`; index `j`
/// follows the counterclockwise labelling of the spectrum of `U`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub direction: Direction,
    pub t_grid: Vec<f64>,
    pub paths: Vec<Vec<Complex64>>,
    pub velocities: Vec<Vec<Complex64>>,
    pub unwrapped_args: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn steps(&self) -> usize {
        self.t_grid.len()
    }

    pub fn eigenvalues_at(&self, step: usize) -> Vec<Complex64> {
        self.paths.iter().map(|p| p[step]).collect()
    }

    /// `|sum_j |v_j| - 1|` at each recorded step.
    pub fn budget_errors(&self) -> Vec<f64> {
        (0..self.steps())
            .map(|n| (self.velocities.iter().map(|v| v[n].norm()).sum::<f64>() - 1.0).abs())
            .collect()
    }

    /// Largest step against the rotation sense over all paths. Zero or
    /// negative when every argument moves monotonically.
    pub fn monotonicity_violation(&self) -> f64 {
        let s = self.direction.sign();
        self.unwrapped_args
            .iter()
            .flat_map(|args| args.windows(2).map(move |w| -s * (w[1] - w[0])))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest deviation of `|lambda_j(t)|` from one.
    pub fn modulus_error(&self) -> f64 {
        self.paths
            .iter()
            .flatten()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

struct Snapshot {
    values: Vec<Complex64>,
    vectors: DMatrix<Complex64>,
}

fn snapshot(u: &UnitaryMatrix, g: &PerturbationGenerator, t: f64) -> Result<Snapshot> {
    let m = perturbed_unitary(u, g, t)?;
    let (_, values, vectors) = eigen_in_split_basis(&m, g)?;
    Ok(Snapshot { values, vectors })
}

impl Snapshot {
    fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j).iter().copied().collect()
    }
}

/// Follows every eigenvalue of `U V(t)` from `t = 0` to `t_end`.
///
/// Each step re-diagonalizes `U V(t)` and matches the new eigenvalues to
/// first-order predictions from the previous step by minimum total arc
/// distance. A step is halved when some match is not clearly closer than
/// every alternative (factor 2) or when an eigenvalue would travel more
/// than `pi / 8`.
pub fn track_trajectory(
    u: &UnitaryMatrix,
    g: &PerturbationGenerator,
    t_end: f64,
    max_step: f64,
) -> Result<TrajectoryRecord> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    if !(max_step > 0.0 && max_step.is_finite()) {
        return Err(Error::InvalidArgument(format!("max_step must be positive, got {max_step}")));
    }
    let start = snapshot(u, g, 0.0)?;
    let d = start.values.len();

    let mut record = TrajectoryRecord {
        direction: g.direction(),
        t_grid: vec![0.0],
        paths: start.values.iter().map(|&z| vec![z]).collect(),
        velocities: (0..d).map(|j| vec![exact_velocity(start.values[j], &start.vector(j), g)]).collect(),
        unwrapped_args: start.values.iter().map(|z| vec![z.arg()]).collect(),
    };

    let mut t = 0.0;
    let mut h = max_step;
    let end_slack = 1e-12 * t_end.max(1.0);
    while t_end - t > end_slack {
        let mut step = h.min(t_end - t);
        let mut t_next = t + step;
        if t_end - t_next <= end_slack {
            t_next = t_end;
            step = t_end - t;
        }
        let last = record.t_grid.len() - 1;
        let prev: Vec<Complex64> = record.paths.iter().map(|p| p[last]).collect();
        let predicted: Vec<Complex64> = (0..d)
            .map(|j| {
                let v = record.velocities[j][last];
                let lam = prev[j];
                let speed = (v / lam).im;
                lam * Complex64::from_polar(1.0, speed * step)
            })
            .collect();

        let next = snapshot(u, g, t_next)?;
        match match_step(&prev, &predicted, &next.values) {
            Some(sigma) => {
                for j in 0..d {
                    let k = sigma[j];
                    let z = next.values[k];
                    let delta = (z * prev[j].conj()).arg();
                    let unwrapped = record.unwrapped_args[j][last] + delta;
                    record.paths[j].push(z);
                    record.velocities[j].push(exact_velocity(z, &next.vector(k), g));
                    record.unwrapped_args[j].push(unwrapped);
                }
                record.t_grid.push(t_next);
                t = t_next;
                h = (2.0 * step).min(max_step).max(h);
            }
            None => {
                h = step / 2.0;
                if h < tol::MIN_STEP {
                    return Err(Error::TrackingCollision {
                        t,
                        step: h,
                        min_step: tol::MIN_STEP,
                    });
                }
            }
        }
    }
    Ok(record)
}

/// Returns the assignment `path j -> new eigenvalue sigma[j]`, or `None`
/// when the step must be refined.
fn match_step(prev: &[Complex64], predicted: &[Complex64], next: &[Complex64]) -> Option<Vec<usize>> {
    let d = prev.len();
    let cost: Vec<Vec<f64>> = predicted
        .iter()
        .map(|p| next.iter().map(|z| arc_distance(*p, *z)).collect())
        .collect();
    let sigma = min_cost_assignment(&cost);
    for j in 0..d {
        let k = sigma[j];
        if arc_distance(prev[j], next[k]) > MAX_ARC_STEP {
            return None;
        }
        let own = cost[j][k];
        for (b, z) in next.iter().enumerate() {
            // Coincident eigenvalues are interchangeable.
            if b == k || (*z - next[k]).norm() < tol::CLUSTER {
                continue;
            }
            let alt = cost[j][b];
            if alt < 2.0 * own || alt < tol::CLUSTER {
                return None;
            }
        }
    }
    Some(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_independent_phases() {
        let g = PerturbationGenerator::new(vec![0.1, 0.3, 0.6], Direction::Counterclockwise).unwrap();
        let rec = track_trajectory(&UnitaryMatrix::identity(3), &g, 2.0, 0.1).unwrap();
        let last = rec.steps() - 1;
        assert_eq!(rec.t_grid[last], 2.0);
        // identity is one cluster; split basis orders by speed
        for (j, &p) in [0.1, 0.3, 0.6].iter().enumerate() {
            for n in 0..rec.steps() {
                let t = rec.t_grid[n];
                let expected = Complex64::from_polar(1.0, p * t);
                assert!((rec.paths[j][n] - expected).norm() < 1e-13);
                let v = Complex64::new(0.0, p) * expected;
                assert!((rec.velocities[j][n] - v).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn uniform_generator_rotates_rigidly() {
        let u = UnitaryMatrix::diagonal_phases(&[0.2, 1.9, -2.5, 3.0]);
        let g = PerturbationGenerator::uniform(4, Direction::Clockwise).unwrap();
        let rec = track_trajectory(&u, &g, 3.0, 0.25).unwrap();
        for j in 0..4 {
            let start = rec.paths[j][0];
            for n in 0..rec.steps() {
                let expected = start * Complex64::from_polar(1.0, -rec.t_grid[n] / 4.0);
                assert!((rec.paths[j][n] - expected).norm() < 1e-13);
            }
        }
        assert!(rec.monotonicity_violation() <= 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = PerturbationGenerator::uniform(2, Direction::Clockwise).unwrap();
        let u = UnitaryMatrix::identity(2);
        assert!(track_trajectory(&u, &g, 0.0, 0.1).is_err());
        assert!(track_trajectory(&u, &g, 1.0, -0.1).is_err());
    }

    #[test]
    fn large_max_step_is_refined() {
        let g = PerturbationGenerator::one_hot(2, 0, Direction::Counterclockwise).unwrap();
        let rec = track_trajectory(&UnitaryMatrix::identity(2), &g, 3.0, 10.0).unwrap();
        assert!(rec.t_grid.windows(2).all(|w| w[1] - w[0] <= PI / 8.0 + 1e-12));
    }
}
