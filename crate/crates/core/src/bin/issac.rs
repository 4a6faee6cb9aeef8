use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use issac::estimate::{estimate_angles, read_snapshots_csv, EstimateOptions, SnapshotDomain};
use issac::frontend::DiagonalLoading;
use issac::harness::{emit_csv, run_experiment, ExperimentKind, ExperimentSpec};
use issac::{ArrayConfig, Error};

#[derive(Parser)]
#[command(name = "issac", version, about = "Two-stage sensing-assisted channel estimation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write its table as CSV.
    Run {
        /// angle_mmse, nrmse_vs_pt, nrmse_vs_m, snr_cdf, snr_vs_m, snr_vs_pd,
        /// pilot_overhead or snr_gap.
        experiment: String,
        /// JSON experiment spec; its experiment field must match.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a spec field, e.g. `--set M=32` or `--set sweep=-20,-10`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Estimate angles from recorded snapshots (interleaved re/im columns).
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "M_RF")]
        m_rf: Option<usize>,
        #[arg(long = "L")]
        l: usize,
        #[arg(long, value_enum, default_value_t = Domain::Element)]
        domain: Domain,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long = "M_sub")]
        m_sub: Option<usize>,
        /// Relative diagonal loading for beamspace input.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Element,
    Beamspace,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { experiment, config, set, out, seed, trials, threads } => {
            let kind: ExperimentKind = experiment.parse()?;
            let mut spec = match config {
                Some(path) => ExperimentSpec::from_file(&path)?,
                None => ExperimentSpec::new(kind),
            };
            if spec.experiment != kind {
                return Err(Error::Config(format!(
                    "config describes '{}' but '{}' was requested",
                    spec.experiment, kind
                )));
            }
            for s in &set {
                spec.apply_set(s)?;
            }
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            if let Some(trials) = trials {
                spec.trials = trials;
            }
            if let Some(n) = threads {
                if n == 0 {
                    return Err(Error::Config("--threads must be at least 1".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            }
            let table = run_experiment(&spec)?;
            emit_csv(&table, &out)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
            Ok(())
        }
        Command::Estimate { input, m, m_rf, l, domain, grid_points, m_sub, delta } => {
            let array = ArrayConfig::new(m, m_rf.unwrap_or(m))?;
            let domain = match domain {
                Domain::Element => SnapshotDomain::Element,
                Domain::Beamspace => SnapshotDomain::Beamspace,
            };
            if !(delta >= 0.0) {
                return Err(Error::Domain(format!("delta must be non-negative, got {delta}")));
            }
            let opts = EstimateOptions { array, l, domain, grid_points, m_sub, loading: DiagonalLoading::Relative(delta) };
            let snapshots = read_snapshots_csv(&input)?;
            let result = estimate_angles(&snapshots, &opts)?;
            println!("path,angle_deg,angle_rad");
            for (i, a) in result.angles_hat.iter().enumerate() {
                println!("{},{:.6},{:.9}", i + 1, a.to_degrees(), a);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("issac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
