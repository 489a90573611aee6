use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rembo::{KernelFamily, YBox};
use rembo_bench::{parse_kernels, run_benchmark, summarize_files, BenchError, BenchmarkConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUN_FAILURES: u8 = 2;

/// Compare kY, kX and kPsi on the embedded Hartmann6 function.
///
/// Flags override values read from --config.
#[derive(Parser, Debug)]
#[command(name = "rembo-bench", version, about, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Ambient dimension D
    #[arg(long = "dim-high", value_name = "D")]
    dim_high: Option<usize>,

    /// Embedding dimension d
    #[arg(long = "dim-low", value_name = "d")]
    dim_low: Option<usize>,

    /// Objective evaluations per run, initial design included
    #[arg(long, value_name = "N")]
    budget: Option<usize>,

    /// Replications per kernel
    #[arg(long, value_name = "R")]
    reps: Option<usize>,

    /// Comma-separated subset of kY,kX,kPsi
    #[arg(long)]
    kernels: Option<String>,

    /// Base seed; replication r uses embedding seed S + r
    #[arg(long, value_name = "S")]
    seed: Option<u64>,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, value_name = "P")]
    parallel: Option<usize>,

    /// Half-width of Y: sqrt_d, gamma, or a positive number
    #[arg(long)]
    ybox: Option<String>,

    /// Kernel family: matern52 or se
    #[arg(long)]
    family: Option<String>,

    /// JSON file mirroring the benchmark configuration
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarize one or more gaps.csv files
    Summarize {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write the summary here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn build_config(cli: &Cli) -> Result<BenchmarkConfig, BenchError> {
    let mut c = match &cli.config {
        Some(path) => BenchmarkConfig::from_json_file(path)?,
        None => BenchmarkConfig::default(),
    };
    if let Some(v) = cli.dim_high {
        c.dim_high = v;
    }
    if let Some(v) = cli.dim_low {
        c.dim_low = v;
    }
    if let Some(v) = cli.budget {
        c.budget = v;
    }
    if let Some(v) = cli.reps {
        c.reps = v;
    }
    if let Some(v) = &cli.kernels {
        c.kernels = parse_kernels(v)?;
    }
    if let Some(v) = cli.seed {
        c.base_seed = v;
    }
    if let Some(v) = &cli.out {
        c.out = v.clone();
    }
    if cli.parallel.is_some() {
        c.parallel = cli.parallel;
    }
    if let Some(v) = &cli.ybox {
        c.ybox = v.parse::<YBox<f64>>().map_err(|e| BenchError::Config(e.to_string()))?;
    }
    if let Some(v) = &cli.family {
        c.family = match v.to_ascii_lowercase().as_str() {
            "matern52" | "matern" => KernelFamily::Matern52,
            "se" | "squared_exponential" => KernelFamily::SquaredExponential,
            other => return Err(BenchError::Config(format!("unknown kernel family '{other}'"))),
        };
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };

    if let Some(Command::Summarize { files, out }) = &cli.command {
        let summary = match summarize_files(files) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        };
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        match out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
            }
            None => println!("{text}"),
        }
        return ExitCode::SUCCESS;
    }

    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match run_benchmark(&config) {
        Ok(r) => r,
        Err(BenchError::Config(msg)) => {
            eprintln!("error: invalid configuration: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(BenchError::NoGaps) => {
            eprintln!("error: every run failed");
            return ExitCode::from(EXIT_RUN_FAILURES);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    for k in &report.summary.kernels {
        println!(
            "{:<5} n={:<3} median={:.4} q1={:.4} q3={:.4} mean={:.4}",
            k.kernel, k.count, k.median, k.q1, k.q3, k.mean
        );
    }
    if report.excessive_failures() {
        eprintln!("error: {} of {} runs failed", report.failed, report.total);
        return ExitCode::from(EXIT_RUN_FAILURES);
    }
    ExitCode::SUCCESS
}
