//! Seeded property checks for the spectral-motion results, one group per
//! claim. Used by the CLI `verify` command and by the acceptance tests.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::UnitaryMatrix;
use crate::perturb::{
    multiplicity_at, stationarity_certificate, track_trajectory, Direction, FirstOrderModel, PerturbationGenerator,
    Stationarity, PROBE_TIMES,
};
use crate::testkit::{degenerate_fixture, degenerate_unitary, fd_velocity, haar_unitary_from, random_probability, rng};
use crate::tol;

pub const BUDGET_TOL: f64 = 1e-8;
pub const MONOTONE_TOL: f64 = 1e-9;
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-9;
pub const RATIO_RANGE: RangeInclusive<f64> = 3.5..=4.5;
/// Errors below this are treated as rounding noise in the ratio test.
pub const ERROR_FLOOR: f64 = 1e-10;
pub const FD_STEP: f64 = 1e-4;
pub const FD_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: RangeInclusive<usize>,
    /// Trajectory horizon for the monotonicity and budget checks.
    pub t_end: f64,
    pub max_step: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 100,
            dims: 2..=6,
            t_end: 2.0,
            max_step: 0.05,
        }
    }
}

impl VerifyConfig {
    pub fn degenerate_fixtures(&self) -> usize {
        self.trials / 2
    }

    pub fn simple_first_order(&self) -> usize {
        self.trials / 2
    }

    pub fn degenerate_first_order(&self) -> usize {
        self.trials / 5
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub postulate: String,
    pub description: String,
    pub cases: usize,
    pub failures: usize,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub threshold: String,
    pub first_failure: Option<String>,
}

impl CheckResult {
    fn new(postulate: &str, description: &str, threshold: String) -> Self {
        Self {
            postulate: postulate.into(),
            description: description.into(),
            cases: 0,
            failures: 0,
            worst: 0.0,
            threshold,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, value: f64, label: impl FnOnce() -> String) {
        self.cases += 1;
        if value.is_nan() || value > self.worst {
            self.worst = value;
        }
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(label());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, postulate: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.postulate == postulate)
    }
}

/// Stream of per-trial seeds, independent for each check group.
fn stream(seed: u64, salt: u64) -> impl Rng {
    rng(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn draw_dim<R: Rng>(rng: &mut R, dims: &RangeInclusive<usize>) -> usize {
    rng.random_range(dims.clone())
}

/// Motion checks on Haar trajectories: monotone arguments, unit speed
/// budget, and exact velocities against centered differences.
pub fn check_trajectories(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut monotone = CheckResult::new(
        "c",
        "unwrapped arguments move only in the rotation sense",
        format!("step against rotation <= {MONOTONE_TOL:e}"),
    );
    let mut budget = CheckResult::new(
        "f-budget",
        "sum of eigenvalue speeds equals one",
        format!("|sum |v_j| - 1| <= {BUDGET_TOL:e}"),
    );
    let mut fd = CheckResult::new(
        "f-velocity",
        "i lambda <x|D|x> matches centered differences of tracked paths",
        format!("|v - fd| <= {FD_TOL:e} at h = {FD_STEP:e}"),
    );
    let mut r = stream(cfg.seed, 1);
    for trial in 0..cfg.trials {
        let d = draw_dim(&mut r, &cfg.dims);
        let u = haar_unitary_from(d, &mut r);
        let g = PerturbationGenerator::new(random_probability(d, &mut r), Direction::Counterclockwise)?;
        let rec = track_trajectory(&u, &g, cfg.t_end, cfg.max_step)?;
        let label = || format!("trial {trial} (d={d})");

        let violation = rec.monotonicity_violation().max(0.0);
        monotone.record(violation <= MONOTONE_TOL, violation, label);
        let worst_budget = rec.budget_errors().into_iter().fold(0.0, f64::max);
        budget.record(worst_budget <= BUDGET_TOL, worst_budget, label);

        let t_probe = r.random_range(0.1..cfg.t_end - 0.1);
        let approx = fd_velocity(&u, &g, t_probe, FD_STEP)?;
        let probe_rec = track_trajectory(&u, &g, t_probe, cfg.max_step)?;
        let last = probe_rec.steps() - 1;
        let err = approx
            .iter()
            .enumerate()
            .map(|(j, v)| (v - probe_rec.velocities[j][last]).norm())
            .fold(0.0, f64::max);
        fd.record(err <= FD_TOL, err, || format!("trial {trial} (d={d}, t={t_probe:.4})"));
    }
    Ok(vec![monotone, budget, fd])
}

/// Stationary witnesses and residual multiplicity on degenerate
/// fixtures with `l < k` supported coordinates.
pub fn check_degenerate_fixtures(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut stationary = CheckResult::new(
        "a",
        "zero-speed witness stays an eigenvector at every probe time",
        format!("|U V(t) w - lambda w| <= {STATIONARY_RESIDUAL_TOL:e} at t in {PROBE_TIMES:?}"),
    );
    let mut multiplicity = CheckResult::new(
        "b",
        "lambda keeps multiplicity at least k - l",
        "count of eigenvalues within cluster tolerance >= k - l".into(),
    );
    let mut r = stream(cfg.seed, 2);
    let min_d = (*cfg.dims.start()).max(2);
    let max_d = (*cfg.dims.end()).max(min_d);
    for trial in 0..cfg.degenerate_fixtures() {
        let d = r.random_range(min_d..=max_d);
        let k = r.random_range(2..=d);
        let l = r.random_range(1..k);
        let fx = degenerate_fixture(d, k, l, r.random())?;
        let eig = crate::linalg::unitary_eig(&fx.unitary)?;
        let cluster = (0..eig.clusters().len())
            .find(|&c| (eig.representatives()[c] - fx.eigenvalue).norm() < tol::CLUSTER)
            .expect("validated fixture has its eigenvalue");
        let iso = eig.isometry(cluster);
        let cert = stationarity_certificate(&fx.unitary, &iso, &fx.generator)?;
        let label = || format!("trial {trial}: {}", fx.label);
        match cert {
            Stationarity::Stationary { .. } => {
                let res = cert.max_residual();
                stationary.record(res <= STATIONARY_RESIDUAL_TOL, res, label);
            }
            Stationarity::Moving { min_speed } => stationary.record(false, min_speed, label),
        }
        let mut fewest = usize::MAX;
        for &t in &PROBE_TIMES {
            let m = crate::perturb::perturbed_unitary(&fx.unitary, &fx.generator, t)?;
            fewest = fewest.min(multiplicity_at(&m, fx.eigenvalue, tol::CLUSTER)?);
        }
        let deficit = (k - l) as f64 - fewest as f64;
        multiplicity.record(fewest >= k - l, deficit.max(0.0), || {
            format!("trial {trial}: {} (found {fewest}, need {})", fx.label, k - l)
        });
    }
    Ok(vec![stationary, multiplicity])
}

/// Ratio `error(t) / error(t/2)` for one eigenvalue, where `t` is the
/// smallest dyadic time `2^-n <= 1/2` with `error(t) >= ERROR_FLOOR`.
/// `None` when the model is exact to the floor already at `t = 1/2`.
pub fn quadratic_ratio(
    model: &FirstOrderModel,
    u: &UnitaryMatrix,
    g: &PerturbationGenerator,
    index: usize,
) -> Result<Option<(f64, f64)>> {
    let mut chosen: Option<(f64, f64)> = None;
    let mut t = 0.5;
    for _ in 0..40 {
        let err = model.errors(u, g, t)?[index];
        if err < ERROR_FLOOR {
            break;
        }
        chosen = Some((t, err));
        t *= 0.5;
    }
    let Some((t, err_t)) = chosen else {
        return Ok(None);
    };
    let err_half = model.errors(u, g, t / 2.0)?[index];
    Ok(Some((t, err_t / err_half)))
}

/// Quadratic remainder of the first-order models, on simple spectra
/// and on split degenerate eigenvalues.
pub fn check_first_order(cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let thr = format!(
        "error(t)/error(t/2) in [{}, {}] at the smallest dyadic t with error >= {ERROR_FLOOR:e}",
        RATIO_RANGE.start(),
        RATIO_RANGE.end()
    );
    let mut simple = CheckResult::new("d", "simple eigenvalues follow lambda exp(i t <x|D|x>)", thr.clone());
    let mut split = CheckResult::new("e", "split eigenvalues follow lambda exp(i t lambda_j(Q))", thr);

    let ratio_value = |ratio: f64| (ratio - 4.0).abs();

    let mut r = stream(cfg.seed, 3);
    for trial in 0..cfg.simple_first_order() {
        let d = draw_dim(&mut r, &cfg.dims);
        let u = haar_unitary_from(d, &mut r);
        let g = PerturbationGenerator::new(random_probability(d, &mut r), Direction::Counterclockwise)?;
        let model = FirstOrderModel::new(&u, &g)?;
        for j in 0..d {
            let label = || format!("trial {trial} (d={d}) eigenvalue {j}");
            match quadratic_ratio(&model, &u, &g, j)? {
                Some((_, ratio)) => simple.record(RATIO_RANGE.contains(&ratio), ratio_value(ratio), label),
                None => simple.record(true, 0.0, label),
            }
        }
    }

    let mut r = stream(cfg.seed, 4);
    let min_d = (*cfg.dims.start()).max(2);
    let max_d = (*cfg.dims.end()).max(min_d);
    for trial in 0..cfg.degenerate_first_order() {
        let d = r.random_range(min_d..=max_d);
        let k = r.random_range(2..=d.min(3));
        let (u, lambda) = degenerate_unitary(d, k, &mut r);
        let g = PerturbationGenerator::new(random_probability(d, &mut r), Direction::Counterclockwise)?;
        let model = FirstOrderModel::new(&u, &g)?;
        let members: Vec<usize> = (0..d)
            .filter(|&j| (model.origins[j] - lambda).norm() < tol::CLUSTER)
            .collect();
        for &j in &members {
            let label = || format!("degenerate trial {trial} (d={d}, k={k}) branch {j}");
            match quadratic_ratio(&model, &u, &g, j)? {
                Some((_, ratio)) => split.record(RATIO_RANGE.contains(&ratio), ratio_value(ratio), label),
                None => split.record(true, 0.0, label),
            }
        }
        if members.len() != k {
            split.record(false, f64::NAN, || format!("degenerate trial {trial}: found {} of {k} branches", members.len()));
        }
    }
    Ok(vec![simple, split])
}

/// Runs every group; checks come back in postulate order.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    if cfg.trials > 0 {
        checks.extend(check_degenerate_fixtures(cfg)?);
        let traj = check_trajectories(cfg)?;
        let first = check_first_order(cfg)?;
        let mut traj = traj.into_iter();
        checks.push(traj.next().expect("monotone"));
        checks.extend(first);
        checks.extend(traj);
    }
    Ok(VerifyReport {
        config: cfg.clone(),
        checks,
    })
}

/// Speed of eigenvalue `j` read off a velocity: `Im(v / lambda)`.
pub fn signed_speed(lambda: Complex64, v: Complex64) -> f64 {
    (v / lambda).im
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_vacuous() {
        let cfg = VerifyConfig {
            trials: 0,
            ..VerifyConfig::default()
        };
        let report = run(&cfg).unwrap();
        assert!(report.checks.is_empty());
        assert!(report.passed());
    }

    #[test]
    fn small_run_passes() {
        let cfg = VerifyConfig {
            trials: 10,
            dims: 2..=4,
            ..VerifyConfig::default()
        };
        let report = run(&cfg).unwrap();
        for c in &report.checks {
            assert!(c.passed(), "{c:?}");
        }
        let names: Vec<&str> = report.checks.iter().map(|c| c.postulate.as_str()).collect();
        assert_eq!(names, ["a", "b", "c", "d", "e", "f-budget", "f-velocity"]);
    }
}
