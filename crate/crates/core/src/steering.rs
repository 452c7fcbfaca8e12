//! Steering the origin into `W(U V(t))` with a single-coordinate phase.
//!
//! The spectrum of a unitary `U` with `0` outside `W(U)` leaves one arc
//! gap wider than `pi`. A one-hot generator `p = e_i` rotates eigenvalue
//! `j` with speed `|<i|x_j>|^2`, so the gap closes at the rate
//! `|S[j+][i] - S[j-][i]|` when the rotation sense is chosen to make the
//! faster endpoint run into the gap. The planner picks the coordinate
//! with the fastest closing rate, then scans and bisects for the first
//! time the origin touches the range.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitary_eig, EigenSystem, UnitaryMatrix};
use crate::numrange::{contains_zero_unitary, largest_gap, Membership};
use crate::perturb::{perturbed_unitary, Direction, PerturbationGenerator, TrajectoryRecord};

/// Coarse scan resolution before bisection.
pub const SCAN_POINTS: usize = 256;

/// `S[j][i] = |<i|x_j>|^2`, rows in counterclockwise eigenvalue order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub rows: Vec<Vec<f64>>,
}

impl SpeedProfile {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, eigen: usize, basis: usize) -> f64 {
        self.rows[eigen][basis]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rows.iter().map(|r| r[i]).sum()).collect()
    }
}

pub fn speed_profile(e: &EigenSystem) -> SpeedProfile {
    let x = e.eigenvectors();
    let d = e.dim();
    SpeedProfile {
        rows: (0..d).map(|j| (0..d).map(|i| x[(i, j)].norm_sqr()).collect()).collect(),
    }
}

/// Generator chosen to close the widest arc gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorChoice {
    pub generator: PerturbationGenerator,
    /// Eigenvalue indices `(j-, j+)`: the gap runs counterclockwise from
    /// `j-` to `j+`.
    pub target_gap: (usize, usize),
    pub gap_width: f64,
    /// `S[j+][i] - S[j-][i]` per basis index. Positive values close the
    /// gap under clockwise rotation, negative ones under counterclockwise.
    pub signed_rates: Vec<f64>,
    pub basis_index: usize,
    /// Column that would be picked if the rotation were fixed to
    /// counterclockwise (largest `S[j-][i] - S[j+][i]`).
    pub counterclockwise_only_index: usize,
}

impl GeneratorChoice {
    pub fn closing_rate(&self) -> f64 {
        self.signed_rates[self.basis_index].abs()
    }

    /// Whether the fixed-direction reading of the column rule agrees
    /// with the signed one.
    pub fn readings_agree(&self) -> bool {
        self.counterclockwise_only_index == self.basis_index
            && self.generator.direction() == Direction::Counterclockwise
    }
}

const TIE: f64 = 1e-12;

pub fn select_generator(e: &EigenSystem, s: &SpeedProfile) -> Result<GeneratorChoice> {
    if contains_zero_unitary(e).contains() {
        return Err(Error::NothingToSteer);
    }
    let gap = largest_gap(e);
    let clusters = e.clusters();
    let j_minus = *clusters[gap.from].last().expect("non-empty cluster");
    let j_plus = clusters[gap.to][0];
    let d = e.dim();
    let signed_rates: Vec<f64> = (0..d).map(|i| s.get(j_plus, i) - s.get(j_minus, i)).collect();

    let mut best = 0;
    let mut ccw_best = 0;
    for i in 1..d {
        if signed_rates[i].abs() > signed_rates[best].abs() + TIE {
            best = i;
        }
        if -signed_rates[i] > -signed_rates[ccw_best] + TIE {
            ccw_best = i;
        }
    }
    let direction = if signed_rates[best] > 0.0 {
        Direction::Clockwise
    } else {
        Direction::Counterclockwise
    };
    Ok(GeneratorChoice {
        generator: PerturbationGenerator::one_hot(d, best, direction)?,
        target_gap: (j_minus, j_plus),
        gap_width: gap.width,
        signed_rates,
        basis_index: best,
        counterclockwise_only_index: ccw_best,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteeringVerdict {
    ReachedInterior,
    ReachedBoundary,
    NotReachedWithinHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSearch {
    pub t_star: Option<f64>,
    pub verdict: SteeringVerdict,
    /// Width of the final bisection bracket.
    pub bracket: f64,
    pub evaluations: usize,
}

/// Membership of the origin in `W(U V(t))`, read off the arc gaps of its
/// spectrum.
pub fn membership_at(u: &UnitaryMatrix, g: &PerturbationGenerator, t: f64) -> Result<Membership> {
    Ok(contains_zero_unitary(&unitary_eig(&perturbed_unitary(u, g, t)?)?))
}

/// Smallest `t` (to within `tol_t`) at which the origin is no longer
/// outside `W(U V(t))`.
pub fn min_time_search(u: &UnitaryMatrix, g: &PerturbationGenerator, t_horizon: f64, tol_t: f64) -> Result<TimeSearch> {
    if !(t_horizon > 0.0 && t_horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {t_horizon}")));
    }
    if !(tol_t > 0.0 && tol_t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time tolerance must be positive, got {tol_t}")));
    }
    let mut evaluations = 1;
    let at_zero = membership_at(u, g, 0.0)?;
    if at_zero.contains() {
        return Ok(TimeSearch {
            t_star: Some(0.0),
            verdict: reached(at_zero),
            bracket: 0.0,
            evaluations,
        });
    }
    let dt = t_horizon / SCAN_POINTS as f64;
    let mut hit = None;
    for k in 1..=SCAN_POINTS {
        let t = if k == SCAN_POINTS { t_horizon } else { k as f64 * dt };
        evaluations += 1;
        let m = membership_at(u, g, t)?;
        if m.contains() {
            hit = Some((k, t, m));
            break;
        }
    }
    let Some((k, t_hit, mut verdict)) = hit else {
        return Ok(TimeSearch {
            t_star: None,
            verdict: SteeringVerdict::NotReachedWithinHorizon,
            bracket: dt,
            evaluations,
        });
    };
    let mut lo = (k - 1) as f64 * dt;
    let mut hi = t_hit;
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        evaluations += 1;
        let m = membership_at(u, g, mid)?;
        if m.contains() {
            hi = mid;
            verdict = m;
        } else {
            lo = mid;
        }
    }
    Ok(TimeSearch {
        t_star: Some(hi),
        verdict: reached(verdict),
        bracket: hi - lo,
        evaluations,
    })
}

fn reached(m: Membership) -> SteeringVerdict {
    match m {
        Membership::Inside => SteeringVerdict::ReachedInterior,
        Membership::OnBoundary => SteeringVerdict::ReachedBoundary,
        Membership::Outside => SteeringVerdict::NotReachedWithinHorizon,
    }
}

/// `|1 - V(t)|_inf = 2 max_i |sin(p_i t / 2)|`.
pub fn phase_perturbation_norm(g: &PerturbationGenerator, t: f64) -> f64 {
    g.probabilities()
        .iter()
        .map(|&p| 2.0 * (p * t / 2.0).sin().abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringPlan {
    pub p: Vec<f64>,
    pub direction: Direction,
    pub t_star: Option<f64>,
    pub perturbation_norm: Option<f64>,
    pub verdict: SteeringVerdict,
    pub target_gap: (usize, usize),
    pub gap_width: f64,
    pub closing_rate: f64,
    pub readings_agree: bool,
    pub speed_profile: SpeedProfile,
    pub search_evaluations: usize,
}

impl SteeringPlan {
    pub fn generator(&self) -> Result<PerturbationGenerator> {
        PerturbationGenerator::new(self.p.clone(), self.direction)
    }
}

/// Eigendecompose, pick a one-hot generator, and search for the first
/// time the origin enters the numerical range.
pub fn plan(u: &UnitaryMatrix, t_horizon: f64, tol_t: f64) -> Result<SteeringPlan> {
    let e = unitary_eig(u)?;
    let s = speed_profile(&e);
    let choice = select_generator(&e, &s)?;
    let search = min_time_search(u, &choice.generator, t_horizon, tol_t)?;
    Ok(SteeringPlan {
        p: choice.generator.probabilities().to_vec(),
        direction: choice.generator.direction(),
        t_star: search.t_star,
        perturbation_norm: search.t_star.map(|t| phase_perturbation_norm(&choice.generator, t)),
        verdict: search.verdict,
        target_gap: choice.target_gap,
        gap_width: choice.gap_width,
        closing_rate: choice.closing_rate(),
        readings_agree: choice.readings_agree(),
        speed_profile: s,
        search_evaluations: search.evaluations,
    })
}

/// Width of the arc running counterclockwise from path `from` to path
/// `to` at every recorded step.
pub fn gap_along(record: &TrajectoryRecord, from: usize, to: usize) -> Vec<f64> {
    let a0 = record.paths[from][0];
    let b0 = record.paths[to][0];
    let mut w0 = (b0 * a0.conj()).arg();
    if w0 <= 0.0 {
        w0 += 2.0 * PI;
    }
    let base_from = record.unwrapped_args[from][0];
    let base_to = record.unwrapped_args[to][0];
    (0..record.steps())
        .map(|n| {
            w0 + (record.unwrapped_args[to][n] - base_to) - (record.unwrapped_args[from][n] - base_from)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{schatten_inf, ComplexMatrix};

    #[test]
    fn diagonal_speed_profile_is_permutation() {
        let u = UnitaryMatrix::diagonal_phases(&[2.0, -1.0, 0.5]);
        let s = speed_profile(&unitary_eig(&u).unwrap());
        assert_eq!(s.rows, vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]);
    }

    #[test]
    fn narrow_pair_ties_to_lowest_index() {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, 0.1]);
        let e = unitary_eig(&u).unwrap();
        let choice = select_generator(&e, &speed_profile(&e)).unwrap();
        assert_eq!(choice.target_gap, (1, 0));
        assert_eq!(choice.generator.probabilities(), &[1.0, 0.0]);
        assert_eq!(choice.generator.direction(), Direction::Clockwise);
        assert!((choice.closing_rate() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn refuses_when_zero_is_contained() {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]);
        let e = unitary_eig(&u).unwrap();
        assert_eq!(select_generator(&e, &speed_profile(&e)), Err(Error::NothingToSteer));
        assert_eq!(plan(&u, 1.0, 1e-3).unwrap_err(), Error::NothingToSteer);
    }

    #[test]
    fn quarter_turn_reaches_at_half_pi() {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, PI / 2.0]);
        let g = PerturbationGenerator::one_hot(2, 1, Direction::Counterclockwise).unwrap();
        let search = min_time_search(&u, &g, 2.0 * PI, 1e-4).unwrap();
        let t = search.t_star.unwrap();
        assert!(t >= PI / 2.0 - 1e-12 && t - PI / 2.0 <= 1e-4, "t_star = {t}");
    }

    #[test]
    fn stationary_gap_endpoints_never_reach() {
        // p = e_3 moves only e^{0.25i}; the gap endpoints 1 and e^{0.5i}
        // are stationary and the mover needs t >= pi - 0.25 to matter.
        let u = UnitaryMatrix::diagonal_phases(&[0.0, 0.5, 0.25]);
        let g = PerturbationGenerator::one_hot(3, 2, Direction::Counterclockwise).unwrap();
        let search = min_time_search(&u, &g, 2.0, 1e-3).unwrap();
        assert_eq!(search.verdict, SteeringVerdict::NotReachedWithinHorizon);
        assert_eq!(search.t_star, None);
        let search = min_time_search(&u, &g, 4.0, 1e-4).unwrap();
        let t = search.t_star.unwrap();
        assert!(t >= PI - 0.25 - 1e-12 && t - (PI - 0.25) <= 1e-4, "t_star = {t}");
    }

    #[test]
    fn perturbation_norm_matches_operator_norm() {
        let g = PerturbationGenerator::new(vec![0.2, 0.5, 0.3], Direction::Clockwise).unwrap();
        for &t in &[0.0, 0.7, 3.0, 10.0] {
            let diff = ComplexMatrix::identity(3).sub(&g.phase_matrix(t));
            assert!((schatten_inf(&diff) - phase_perturbation_norm(&g, t)).abs() < 1e-12);
        }
    }
}
