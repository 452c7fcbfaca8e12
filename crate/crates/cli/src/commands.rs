//! Subcommand bodies. Each one writes its files into the output
//! directory, prints a short summary to stdout and returns its report.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use numrange_core::linalg::{eigenvalues, unitary_eig, ComplexMatrix, UnitaryMatrix};
use numrange_core::numrange::{contains_zero_general, contains_zero_unitary, Membership, SupportProfile};
use numrange_core::perturb::{perturbed_unitary, track_trajectory, Direction, PerturbationGenerator};
use numrange_core::steering::{phase_perturbation_norm, plan, speed_profile, SteeringPlan};
use numrange_core::verify::{self, VerifyConfig, VerifyReport};
use numrange_core::{tol, Complex64};
use serde::Serialize;
use serde_json::json;

use crate::example;
use crate::matrix_file::MatrixFile;
use crate::report::{InputSummary, RunReport};
use crate::svg::RangeFigure;

/// Some asserted quantity did not hold; names every failed check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub failed: Vec<String>,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check failed: {}", self.failed.join(", "))
    }
}

impl std::error::Error for CheckFailure {}

#[derive(Clone, Debug, Default)]
pub struct InputArgs {
    /// Matrix file; the embedded worked example when absent.
    pub path: Option<PathBuf>,
    pub polar_fix: bool,
}

impl InputArgs {
    pub fn load(&self) -> anyhow::Result<(MatrixFile, String)> {
        match &self.path {
            Some(p) => Ok((MatrixFile::read(p)?, p.display().to_string())),
            None => Ok((example::matrix_file(), "embedded".to_string())),
        }
    }
}

/// Accepts `m` as unitary at the precision of rounded data, or replaces it
/// by its polar factor.
pub fn to_unitary(m: &ComplexMatrix, polar_fix: bool) -> numrange_core::Result<UnitaryMatrix> {
    if polar_fix {
        UnitaryMatrix::polar_factor(m)
    } else {
        UnitaryMatrix::with_tolerance(m.clone(), tol::UNITARY_LOW_PRECISION)
    }
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_text(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let mut w = create(dir, name)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

/// Writes `<csv>` with columns `theta,h,re,im` and `<svg>`; returns a JSON
/// summary of the range.
fn write_range(dir: &Path, csv: &str, svg: &str, title: &str, a: &ComplexMatrix, angles: usize) -> anyhow::Result<serde_json::Value> {
    let profile = SupportProfile::compute(a, angles)?;
    let polygon = profile.polygon();
    let eig = eigenvalues(a)?;

    let mut w = create(dir, csv)?;
    writeln!(w, "theta,h,re,im")?;
    for ((theta, h), z) in profile.angles.iter().zip(&profile.support_values).zip(&profile.boundary_points) {
        writeln!(w, "{theta},{h},{},{}", z.re, z.im)?;
    }
    w.flush()?;
    let figure = RangeFigure {
        title,
        boundary: &polygon.vertices,
        eigenvalues: &eig,
    };
    write_text(dir, svg, &figure.render())?;

    let membership = contains_zero_general(a, tol::DECISION_ANGLES)?;
    let gap = to_unitary(a, false).ok().map(|u| unitary_eig(&u).map(|e| contains_zero_unitary(&e))).transpose()?;
    Ok(json!({
        "membership": membership,
        "gap_membership": gap,
        "min_support": profile.min_support(),
        "polygon_vertices": polygon.vertices.len(),
        "eigenvalues": pairs(&eig),
        "files": [csv, svg],
    }))
}

pub fn cmd_range(input: &InputArgs, out_dir: &Path, angles: usize) -> anyhow::Result<RunReport> {
    let (file, source) = input.load()?;
    let a = if input.polar_fix {
        to_unitary(&file.matrix(), true)?.into_matrix()
    } else {
        file.matrix()
    };
    let title = format!("W(A), {}", file.label.as_deref().unwrap_or(&source));
    let summary = write_range(out_dir, "boundary.csv", "range.svg", &title, &a, angles)?;
    println!("membership of 0: {}", summary["membership"]);
    println!("min support: {}", summary["min_support"]);
    let mut report = RunReport::new("range")
        .arg("angles", angles)
        .arg("polar_fix", input.polar_fix)
        .tolerance("support_relative", tol::SUPPORT_RELATIVE);
    report.input = Some(InputSummary::new(&file, &source));
    report.outputs = summary;
    report.write(&out_dir.join("report.json"))?;
    Ok(report)
}

fn print_plan(plan: &SteeringPlan) {
    println!("p = {:?}, direction = {}", plan.p, plan.direction.short_name());
    match plan.t_star {
        Some(t) => println!("t_star = {t:.6} ({:?})", plan.verdict),
        None => println!("not reached within horizon"),
    }
    if let Some(n) = plan.perturbation_norm {
        println!("||U - U V(t_star)|| = {n:.6}");
    }
}

pub fn cmd_steer(input: &InputArgs, out_dir: &Path, horizon: f64, tol_t: f64) -> anyhow::Result<RunReport> {
    let (file, source) = input.load()?;
    let u = to_unitary(&file.matrix(), input.polar_fix)?;
    let result = plan(&u, horizon, tol_t)?;
    print_plan(&result);
    let mut report = RunReport::new("steer")
        .arg("horizon", horizon)
        .arg("tol_t", tol_t)
        .arg("polar_fix", input.polar_fix)
        .tolerance("unitary", tol::UNITARY_LOW_PRECISION)
        .tolerance("gap", tol::GAP);
    report.input = Some(InputSummary::new(&file, &source));
    report.outputs = json!({ "plan": result });
    std::fs::create_dir_all(out_dir)?;
    report.write(&out_dir.join("report.json"))?;
    Ok(report)
}

pub struct TrajectoryArgs {
    pub p: Option<Vec<f64>>,
    pub direction: Direction,
    pub t_end: f64,
    pub max_step: f64,
}

pub fn cmd_trajectory(input: &InputArgs, out_dir: &Path, args: &TrajectoryArgs) -> anyhow::Result<RunReport> {
    let (file, source) = input.load()?;
    let u = to_unitary(&file.matrix(), input.polar_fix)?;
    let g = match &args.p {
        Some(p) => PerturbationGenerator::new(p.clone(), args.direction)?,
        None => PerturbationGenerator::uniform(u.dim(), args.direction)?,
    };
    let rec = track_trajectory(&u, &g, args.t_end, args.max_step)?;

    let mut w = create(out_dir, "trajectory.csv")?;
    writeln!(w, "t,j,re,im,speed")?;
    for (n, t) in rec.t_grid.iter().enumerate() {
        for j in 0..rec.dim() {
            let z = rec.paths[j][n];
            writeln!(w, "{t},{j},{},{},{}", z.re, z.im, rec.velocities[j][n].norm())?;
        }
    }
    w.flush()?;

    let budget = rec.budget_errors().into_iter().fold(0.0, f64::max);
    let monotone = rec.monotonicity_violation();
    println!("{} steps to t = {}", rec.steps(), args.t_end);
    println!("max speed-budget error {budget:e}, monotonicity violation {monotone:e}");
    let mut report = RunReport::new("trajectory")
        .arg("p", g.probabilities())
        .arg("direction", args.direction)
        .arg("t_end", args.t_end)
        .arg("max_step", args.max_step)
        .arg("polar_fix", input.polar_fix)
        .tolerance("cluster", tol::CLUSTER)
        .tolerance("min_step", tol::MIN_STEP);
    report.input = Some(InputSummary::new(&file, &source));
    report.outputs = json!({
        "steps": rec.steps(),
        "max_budget_error": budget,
        "monotonicity_violation": monotone,
        "final_eigenvalues": pairs(&rec.eigenvalues_at(rec.steps() - 1)),
        "files": ["trajectory.csv"],
    });
    report.write(&out_dir.join("report.json"))?;
    Ok(report)
}

pub fn cmd_verify(cfg: &VerifyConfig, out_dir: Option<&Path>) -> anyhow::Result<(VerifyReport, RunReport)> {
    if cfg.trials == 0 {
        eprintln!("warning: zero trials requested; every check passes vacuously");
    }
    let result = verify::run(cfg)?;
    for c in &result.checks {
        println!(
            "{} {:<10} cases={:<5} failures={:<3} worst={:e}  ({})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.postulate,
            c.cases,
            c.failures,
            c.worst,
            c.threshold
        );
    }
    let mut report = RunReport::new("verify")
        .arg("seed", cfg.seed)
        .arg("trials", cfg.trials)
        .arg("dims", [*cfg.dims.start(), *cfg.dims.end()])
        .tolerance("budget", verify::BUDGET_TOL)
        .tolerance("monotone", verify::MONOTONE_TOL)
        .tolerance("stationary_residual", verify::STATIONARY_RESIDUAL_TOL)
        .tolerance("error_floor", verify::ERROR_FLOOR);
    report.outputs = serde_json::to_value(&result.checks)?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        report.write(&dir.join("report.json"))?;
    }
    if !result.passed() {
        let failed = result.checks.iter().filter(|c| !c.passed()).map(|c| c.postulate.clone()).collect();
        return Err(CheckFailure { failed }.into());
    }
    Ok((result, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub quantity: String,
    pub expected: String,
    pub observed: serde_json::Value,
    pub ok: bool,
}

fn check(quantity: &str, expected: impl Into<String>, observed: impl Serialize, ok: bool) -> Check {
    Check {
        quantity: quantity.into(),
        expected: expected.into(),
        observed: serde_json::to_value(observed).expect("serializable"),
        ok,
    }
}

/// Steers the embedded example, writes both range figures and asserts
/// the reference values.
pub fn cmd_example(out_dir: &Path, angles: usize, polar_fix: bool) -> anyhow::Result<RunReport> {
    let file = example::matrix_file();
    let u = example::unitary(polar_fix)?;
    let eig = unitary_eig(&u)?;
    let profile = speed_profile(&eig);
    println!("speed profile (rows: eigenvectors, columns: basis):");
    for row in &profile.rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
        println!("  {}", cells.join("  "));
    }
    let steer = plan(&u, std::f64::consts::TAU, 1e-4)?;
    print_plan(&steer);

    let g = steer.generator()?;
    let steered = perturbed_unitary(&u, &g, example::FIGURE_TIME)?;
    let initial = write_range(out_dir, "boundary_initial.csv", "range_initial.svg", "W(U)", &u, angles)?;
    let after = write_range(
        out_dir,
        "boundary_steered.csv",
        "range_steered.svg",
        &format!("W(U V({})^H)", example::FIGURE_TIME),
        &steered,
        angles,
    )?;
    file.write(&out_dir.join("example_u.json"))?;

    let (lo, hi) = example::T_STAR_RANGE;
    let profile_fit = example::match_profile(&profile.rows);
    let mut checks = vec![
        check(
            "speed_profile",
            format!("rows match the reference within {} up to order", example::PROFILE_TOL),
            profile_fit.as_ref().map(|(_, worst)| *worst),
            profile_fit.is_some(),
        ),
        check(
            "initial_membership",
            "outside",
            &initial["membership"],
            initial["membership"] == json!(Membership::Outside),
        ),
        check("p", format!("{:?}", example::EXPECTED_P), &steer.p, steer.p == example::EXPECTED_P),
        check(
            "direction",
            "cw",
            steer.direction,
            steer.direction == Direction::Clockwise,
        ),
        check(
            "t_star",
            format!("in [{lo}, {hi}]"),
            steer.t_star,
            steer.t_star.is_some_and(|t| (lo..=hi).contains(&t)),
        ),
        check(
            "steered_membership",
            "inside",
            &after["membership"],
            after["membership"] == json!(Membership::Inside),
        ),
    ];
    let closed_form = steer.t_star.map(|t| 2.0 * (t / 2.0).sin().abs());
    let norm_ok = match (steer.perturbation_norm, closed_form, steer.t_star) {
        (Some(n), Some(c), Some(t)) => (n - c).abs() <= 1e-12 && (n - phase_perturbation_norm(&g, t)).abs() <= 1e-15,
        _ => false,
    };
    checks.push(check("perturbation_norm", "2 |sin(t_star / 2)|", steer.perturbation_norm, norm_ok));

    for c in &checks {
        println!("{} {}: {} (expected {})", if c.ok { "ok  " } else { "FAIL" }, c.quantity, c.observed, c.expected);
    }
    let mut report = RunReport::new("example")
        .arg("angles", angles)
        .arg("polar_fix", polar_fix)
        .arg("horizon", std::f64::consts::TAU)
        .arg("tol_t", 1e-4)
        .tolerance("unitary", tol::UNITARY_LOW_PRECISION)
        .tolerance("profile", example::PROFILE_TOL);
    report.input = Some(InputSummary::new(&file, "embedded"));
    report.outputs = json!({
        "speed_profile": profile,
        "plan": steer,
        "initial_range": initial,
        "steered_range": after,
        "figure_time": example::FIGURE_TIME,
        "checks": checks,
    });
    report.write(&out_dir.join("report.json"))?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.ok).map(|c| c.quantity.clone()).collect();
    if !failed.is_empty() {
        return Err(CheckFailure { failed }.into());
    }
    Ok(report)
}
