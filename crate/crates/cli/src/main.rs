mod source;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use diaboli::adiabatic::{evolution_csv, evolve_logged, Schedule, SpeedProfile};
use diaboli::eigensolver::{sweep, sweep_csv, Segment};
use diaboli::format::sorted_json;
use diaboli::holonomy::{berry_phase_logged, transport_csv, DEFAULT_SAMPLES_PER_EDGE};
use diaboli::perturbation::prediction_error_on;
use diaboli::search::{solve, BerryOracle, BruteForceOracle, SolubilityOracle};
use diaboli::{acceptance, LoopPath, Variant};
use thiserror::Error;

use source::Source;

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl Failure {
    fn numerical(e: impl Into<diaboli::Error>) -> Self {
        Failure::Numerical(e.into().to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "diaboli", version, about = "Geometric-phase 3-SAT simulator on bordered Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// DIMACS file, `wc:n=<k>,sol=<i|none>` or `rand:n=<k>,m=<clauses>`
    instance: String,
    #[arg(long, default_value = "unscaled", value_parser = parse_variant)]
    variant: Variant,
    /// Write the main output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct LoopArgs {
    /// Loop is the rectangle |x| <= half_x, |z| <= half_z
    #[arg(long, default_value_t = 1.0)]
    half_x: f64,
    #[arg(long, default_value_t = 1.0)]
    half_z: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_EDGE)]
    samples_per_edge: usize,
}

impl LoopArgs {
    fn path(&self) -> Result<LoopPath, Failure> {
        LoopPath::rectangle_from_top(self.half_x, self.half_z, self.samples_per_edge).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    X,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Uniform,
    Adaptive,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Berry,
    Brute,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues along a line in (x, z), as CSV
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        sweep: Axis,
        /// Value of the coordinate held fixed
        #[arg(long, allow_hyphen_values = true)]
        fixed: f64,
        /// Swept interval as `a:b`
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Keep only the lowest levels
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Berry phase around the loop, as JSON
    Berry {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        path: LoopArgs,
        /// Write the per-point transport CSV here
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Second-order gap prediction next to the numeric minimum, as JSON
    PredictGap {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        z: f64,
        /// Numeric search over x in [0, x_max]
        #[arg(long, default_value_t = 1.0)]
        x_max: f64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
    /// Time evolution around the loop, as CSV
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        path: LoopArgs,
        #[arg(long)]
        time: f64,
        #[arg(long, value_enum, default_value = "adaptive")]
        profile: Profile,
        /// Integration steps (default max(1000, 20 T))
        #[arg(long)]
        steps: Option<usize>,
        /// Record every k-th step (default: about 1000 rows)
        #[arg(long)]
        stride: Option<usize>,
        /// Write the run summary JSON here
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Bisection search for a satisfying assignment, as JSON
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        path: LoopArgs,
        #[arg(long, value_enum, default_value = "berry")]
        oracle: OracleKind,
    },
    /// Run the acceptance checks
    Selftest {
        /// Run only these checks (1-8, N)
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: diaboli::hamiltonian::HamiltonianError| e.to_string())
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(format!("range must have distinct finite ends, got {s:?}"));
    }
    Ok((a, b))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Usage(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn write_file(p: &PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    sorted_json(v).map(|s| s + "\n").map_err(|e| Failure::Numerical(e.to_string()))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("DIABOLI_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("DIABOLI_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Spectrum { common, sweep: axis, fixed, range, samples, levels } => {
            let diag = Source::parse(&common.instance)?.load(common.seed)?;
            let seg = match axis {
                Axis::X => Segment::along_x(fixed, range.0, range.1),
                Axis::Z => Segment::along_z(fixed, range.0, range.1),
            };
            let rows = sweep(&diag, common.variant, &seg, samples).map_err(Failure::numerical)?;
            emit(&common.out, &sweep_csv(&rows, levels))
        }
        Command::Berry { common, path, log } => {
            let diag = Source::parse(&common.instance)?.load(common.seed)?;
            let (result, steps) = berry_phase_logged(&diag, common.variant, &path.path()?).map_err(Failure::numerical)?;
            if let Some(p) = &log {
                write_file(p, &transport_csv(&steps))?;
            }
            emit(&common.out, &json(&result)?)
        }
        Command::PredictGap { common, z, x_max, samples } => {
            let diag = Source::parse(&common.instance)?.load(common.seed)?;
            let report = prediction_error_on(&diag, z, common.variant, x_max, samples).map_err(Failure::numerical)?;
            emit(&common.out, &json(&report)?)
        }
        Command::Evolve { common, path, time, profile, steps, stride, summary } => {
            let diag = Source::parse(&common.instance)?.load(common.seed)?;
            let profile = match profile {
                Profile::Uniform => SpeedProfile::Uniform,
                Profile::Adaptive => SpeedProfile::GapAdaptive,
            };
            let mut schedule = Schedule::new(time, profile).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(s) = steps {
                schedule = schedule.with_steps(s).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let stride = stride.unwrap_or_else(|| schedule.steps.div_ceil(1000)).max(1);
            let (result, rows) =
                evolve_logged(&diag, common.variant, &path.path()?, &schedule, stride).map_err(Failure::numerical)?;
            if let Some(p) = &summary {
                write_file(p, &json(&result)?)?;
            }
            emit(&common.out, &evolution_csv(&rows))
        }
        Command::Solve { common, path, oracle } => {
            let diag = Source::parse(&common.instance)?.load(common.seed)?;
            let berry;
            let oracle: &dyn SolubilityOracle = match oracle {
                OracleKind::Berry => {
                    berry = BerryOracle { path: path.path()? };
                    &berry
                }
                OracleKind::Brute => &BruteForceOracle,
            };
            let trace = solve(&diag, common.variant, oracle).map_err(Failure::numerical)?;
            emit(&common.out, &json(&trace)?)
        }
        Command::Selftest { only } => {
            let ids: Vec<String> = if only.is_empty() {
                acceptance::IDS.iter().map(|s| s.to_string()).collect()
            } else {
                only
            };
            let mut failed = 0;
            for id in &ids {
                let report = acceptance::run(id).ok_or_else(|| Failure::Usage(format!("unknown check {id:?}")))?;
                println!("{report}");
                for line in &report.log {
                    println!("    {line}");
                }
                failed += usize::from(!report.passed);
            }
            println!("{} of {} checks passed", ids.len() - failed, ids.len());
            if failed > 0 {
                return Err(Failure::Numerical(format!("{failed} checks failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("diaboli: {f}");
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("-1:1").unwrap(), (-1.0, 1.0));
        assert_eq!(parse_range(" 0.5 : -0.5").unwrap(), (0.5, -0.5));
        assert!(parse_range("1").is_err());
        assert!(parse_range("1:1").is_err());
        assert!(parse_range("a:1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
