use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use numrange_cli::commands::{self, InputArgs, TrajectoryArgs};
use numrange_cli::exit;
use numrange_core::perturb::Direction;
use numrange_core::verify::VerifyConfig;

/// Numerical ranges of complex matrices and diagonal-phase steering of
/// unitary spectra.
#[derive(Parser)]
#[command(name = "numrange", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// JSON matrix file; defaults to the embedded worked example.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Replace the input by its unitary polar factor.
    #[arg(long)]
    polar_fix: bool,
}

impl From<Input> for InputArgs {
    fn from(i: Input) -> Self {
        InputArgs {
            path: i.input,
            polar_fix: i.polar_fix,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample the support function; write boundary.csv and range.svg.
    Range {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 720)]
        angles: usize,
    },
    /// Choose p and direction and find the first time 0 enters W(U V(t)).
    Steer {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol_t: f64,
    },
    /// Track every eigenvalue of U V(t); write trajectory.csv.
    Trajectory {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Probability vector as a comma list; uniform when absent.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// cw or ccw.
        #[arg(long, default_value = "ccw")]
        direction: Direction,
        /// End time.
        #[arg(long, default_value_t = 2.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.05)]
        max_step: f64,
    },
    /// Seeded property checks of the eigenvalue-motion results.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Dimension range such as 2..6 (inclusive) or a single value.
        #[arg(long, default_value = "2..6", value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the worked example end to end and check its reference values.
    Example {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 720)]
        angles: usize,
        #[arg(long)]
        polar_fix: bool,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad dimension {x:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => match s.split_once('-') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let d = parse(s)?;
                (d, d)
            }
        },
    };
    if lo < 1 || lo > hi {
        return Err(format!("need 1 <= low <= high, got {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn configure_threads() {
    let Ok(value) = std::env::var("NUMRANGE_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: NUMRANGE_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("warning: NUMRANGE_THREADS={value:?} is not a positive integer; ignored"),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Range { input, out_dir, angles } => {
            commands::cmd_range(&input.into(), &out_dir, angles)?;
        }
        Command::Steer {
            input,
            out_dir,
            horizon,
            tol_t,
        } => {
            commands::cmd_steer(&input.into(), &out_dir, horizon, tol_t)?;
        }
        Command::Trajectory {
            input,
            out_dir,
            p,
            direction,
            horizon,
            max_step,
        } => {
            let args = TrajectoryArgs {
                p,
                direction,
                t_end: horizon,
                max_step,
            };
            commands::cmd_trajectory(&input.into(), &out_dir, &args)?;
        }
        Command::Verify {
            seed,
            trials,
            dims,
            out_dir,
        } => {
            let cfg = VerifyConfig {
                seed,
                trials,
                dims: dims.0..=dims.1,
                ..VerifyConfig::default()
            };
            commands::cmd_verify(&cfg, out_dir.as_deref())?;
        }
        Command::Example {
            out_dir,
            angles,
            polar_fix,
        } => {
            commands::cmd_example(&out_dir, angles, polar_fix)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let start = Instant::now();
    let result = run(cli);
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_for(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_syntax() {
        assert_eq!(parse_dims("2..6"), Ok((2, 6)));
        assert_eq!(parse_dims("2..=6"), Ok((2, 6)));
        assert_eq!(parse_dims("3-5"), Ok((3, 5)));
        assert_eq!(parse_dims("4"), Ok((4, 4)));
        assert!(parse_dims("6..2").is_err());
        assert!(parse_dims("0").is_err());
        assert!(parse_dims("x").is_err());
    }
}
