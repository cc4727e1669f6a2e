use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gowers_core::correlation::{
    max_correlation_exhaustive, max_correlation_spectral, sampled_correlation_profile, DEFAULT_POINT_SAMPLES,
};
use gowers_core::gowers::{gowers_norm_exact, gowers_norm_mc};
use gowers_core::harness::{
    run_experiment, write_atomic, Experiment, ExperimentParams, ExperimentReport, FunctionSpec, ReportRow,
};
use gowers_core::{MaterializeMode, PrimeField, Result};

#[derive(Parser)]
#[command(
    name = "gowers",
    version,
    about = "Gowers norms, correlations and the S_4 counterexample"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the timestamp and wall-clock fields.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exhaustive,
    Spectral,
    Sampled,
}

#[derive(Args)]
struct Space {
    #[arg(long = "p", default_value_t = 2)]
    p: u32,
    #[arg(long = "N")]
    dim: usize,
    /// sym:<n>, poly:<path> or table:<path>.
    #[arg(long)]
    function: FunctionSpec,
}

#[derive(Subcommand)]
enum Command {
    /// Gowers norm of one function.
    Gowers {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Largest correlation with polynomials of bounded degree.
    Correlate {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Method::Exhaustive)]
        method: Method,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Randomized checks of the exact identities.
    Identities {
        /// Instances per identity.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Fourier structure of quadratic forms.
    Dixon {
        #[arg(long)]
        trials: Option<u64>,
    },
    /// One of the named experiment pipelines.
    Experiment {
        /// icgn-gowers, icgn-correlation, general-n, digits, identities, dixon or rank-tail.
        name: Experiment,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
    },
}

fn gowers(space: &Space, order: usize, mode: Mode, samples: u64, seed: u64) -> Result<ExperimentReport> {
    let field = PrimeField::new(space.p)?;
    let f = space.function.load(field, space.dim, MaterializeMode::Auto)?;
    let e = match mode {
        Mode::Exact => gowers_norm_exact(&f, order)?,
        Mode::Mc => gowers_norm_mc(&f, order, samples, seed)?,
    };
    let mut report = ExperimentReport::new("gowers", seed);
    report.param("p", space.p);
    report.param("N", space.dim);
    report.param("function", space.function.to_string());
    report.param("order", order);
    if mode == Mode::Mc {
        report.param("samples", samples);
    }
    let mut raw = ReportRow::info(space.dim, format!("u{order}_raw"), e.raw_power);
    if let Some(x) = e.exact_raw {
        raw = raw.with_exact(x);
    }
    if e.samples.is_some() {
        raw = raw.with_err(e.std_error);
    }
    report.push(raw);
    report.push(ReportRow::info(space.dim, format!("u{order}_norm"), e.value));
    Ok(report)
}

fn correlate(space: &Space, degree: usize, method: Method, trials: u64, seed: u64) -> Result<ExperimentReport> {
    let field = PrimeField::new(space.p)?;
    let f = space.function.load(field, space.dim, MaterializeMode::Auto)?;
    let mut report = ExperimentReport::new("correlate", seed);
    report.param("p", space.p);
    report.param("N", space.dim);
    report.param("function", space.function.to_string());
    report.param("degree", degree);
    let n = space.dim;
    match method {
        Method::Exhaustive | Method::Spectral => {
            let r = match method {
                Method::Exhaustive => max_correlation_exhaustive(&f, degree)?,
                _ => max_correlation_spectral(&f)?,
            };
            let mut row = ReportRow::info(n, "max_corr", r.max_abs);
            if let Some((num, log2)) = r.exact {
                row = row.with_exact(format!("{}/2^{log2}", num.abs()));
            }
            report.push(row);
        }
        Method::Sampled => {
            report.param("trials", trials);
            let p = sampled_correlation_profile(&f, degree, trials, seed, DEFAULT_POINT_SAMPLES)?;
            report.push(ReportRow::info(n, "corr_q50", p.q50));
            report.push(ReportRow::info(n, "corr_q90", p.q90));
            report.push(ReportRow::info(n, "corr_q99", p.q99).with_err(p.q99_std_error));
            report.push(ReportRow::info(n, "corr_max", p.max));
        }
    }
    Ok(report)
}

fn run(cli: &Cli) -> Result<ExperimentReport> {
    let seed = cli.output.seed;
    match &cli.command {
        Command::Gowers {
            space,
            order,
            mode,
            samples,
        } => gowers(space, *order, *mode, *samples, seed),
        Command::Correlate {
            space,
            degree,
            method,
            trials,
        } => correlate(space, *degree, *method, *trials, seed),
        Command::Identities { trials } => run_experiment(
            Experiment::Identities,
            &ExperimentParams {
                seed,
                samples: None,
                trials: *trials,
            },
        ),
        Command::Dixon { trials } => run_experiment(
            Experiment::Dixon,
            &ExperimentParams {
                seed,
                samples: None,
                trials: *trials,
            },
        ),
        Command::Experiment { name, samples, trials } => run_experiment(
            *name,
            &ExperimentParams {
                seed,
                samples: *samples,
                trials: *trials,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.output.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let mut report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if !cli.output.no_timestamp {
        report.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        report.wall_clock_secs = Some(start.elapsed().as_secs_f64());
    }
    let text = match cli.output.format {
        Format::Json => match report.to_json() {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        Format::Csv => report.to_csv(),
    };
    match &cli.output.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, text.as_bytes()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    for row in report.failures() {
        eprintln!(
            "failed: N={} {} = {} (bound {:?})",
            row.n, row.metric, row.value, row.bound
        );
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
