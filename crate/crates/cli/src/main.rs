use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use superres_cli::commands;
use superres_cli::config::ExperimentConfig;
use superres_cli::sweep::{SweepPlan, Variant};
use superres_cli::{CliError, CliResult, Method};

#[derive(Parser)]
#[command(name = "superres", version, about = "Sparse spectral reconstruction from short Green's-function signals")]
struct Cli {
    /// Suppress the summary printed on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON); defaults apply to omitted fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `signal.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Anm,
    Dft,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Anm => vec![Method::Anm],
            MethodArg::Dft => vec![Method::Dft],
            MethodArg::Both => Method::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the Green's-function signal.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reconstruct the spectrum of a simulated signal and score it.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Signal JSON written by `simulate`.
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Gate-error rescaling from the first N samples.
        #[arg(long)]
        mitigate: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reconstruction error over a range of t_max.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated t_max values; default 0.05 to 1.5 in steps of 0.05.
        #[arg(long, value_delimiter = ',')]
        t_max: Vec<f64>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Shots for the noisy variant.
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Restrict to these variants (exact, trotter2, trotter2+shots).
        #[arg(long, value_delimiter = ',')]
        variants: Vec<String>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the exact pole table.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        v: Option<f64>,
    },
}

fn load(common: &Common) -> CliResult<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.signal.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Simulate { common, out } => commands::cmd_simulate(&load(&common)?, &out),
        Command::Reconstruct { common, signal, method, mitigate, out } => {
            let mut cfg = load(&common)?;
            if mitigate.is_some() {
                cfg.mitigation.n_fit = mitigate;
            }
            cfg.validate()?;
            commands::cmd_reconstruct(&cfg, &signal, &method.methods(), &out)
        }
        Command::Sweep { common, t_max, seeds, method, shots, variants, workers, out } => {
            let cfg = load(&common)?;
            let mut all = Variant::standard(shots);
            if !variants.is_empty() {
                if let Some(bad) = variants.iter().find(|v| !all.iter().any(|a| &a.name == *v)) {
                    return Err(CliError::Usage(format!("unknown variant {bad:?}")));
                }
                all.retain(|a| variants.contains(&a.name));
            }
            let plan = SweepPlan {
                t_max: if t_max.is_empty() { SweepPlan::default_t_max() } else { t_max },
                seeds,
                methods: method.methods(),
                variants: all,
                workers: workers
                    .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
            };
            commands::cmd_sweep(&cfg, &plan, &out)
        }
        Command::Oracle { common, u, v } => {
            let mut cfg = load(&common)?;
            cfg.model.u = u.unwrap_or(cfg.model.u);
            cfg.model.v = v.unwrap_or(cfg.model.v);
            commands::cmd_oracle(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let quiet = cli.quiet;
    match run(cli) {
        Ok(summary) => {
            if !quiet {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
