use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cliffmps::experiments::{run, BoundaryMode, ExperimentConfig, ExperimentKind, MethodMode};
use cliffmps::oracles::run_oracle_suite;
use cliffmps::Error;

/// Thread count for trajectory-level parallelism.
const THREADS_ENV: &str = "CLIFFMPS_THREADS";

#[derive(Parser)]
#[command(name = "cliffmps", version, about = "Random MPS, Clifford-enhanced MPS and stabilizer-ensemble experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Magic deviation δ over (N, χ, n) with power-law fits.
    MagicScan(ExperimentArgs),
    /// Brickwork MPS evolution: δ and max entropy against circuit time.
    Brickwork(ExperimentArgs),
    /// Frame potentials and design distances.
    DesignAudit(ExperimentArgs),
    /// Entanglement cooling of T-doped Clifford states.
    Cooling(ExperimentArgs),
    /// Runs the oracle equivalence checks.
    OracleSuite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Prints the default configuration of an experiment as JSON.
    DefaultConfig { experiment: Experiment },
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    MagicScan,
    Brickwork,
    DesignAudit,
    Cooling,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::MagicScan => ExperimentKind::MagicScan,
            Experiment::Brickwork => ExperimentKind::Brickwork,
            Experiment::DesignAudit => ExperimentKind::DesignAudit,
            Experiment::Cooling => ExperimentKind::Cooling,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Obc,
    Pbc,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Mc,
}

/// Flags override fields of the `--config` document (or of the defaults).
#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    sites: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    chi: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    renyi: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    boundary: Option<BoundaryArg>,
    #[arg(long)]
    method: Option<MethodArg>,
    #[arg(long = "vt-over-n", value_delimiter = ',')]
    vt_over_n: Option<Vec<f64>>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(self, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let cfg = ExperimentConfig::from_json(&text)?;
                if cfg.experiment != kind {
                    return Err(Error::Config {
                        field: "experiment".into(),
                        message: format!("config is for {}, not {}", cfg.experiment.name(), kind.name()),
                    });
                }
                cfg
            }
            None => ExperimentConfig::default_for(kind),
        };
        if let Some(v) = self.sites {
            cfg.sites = v;
        }
        if let Some(v) = self.chi {
            cfg.chi = v;
        }
        if let Some(v) = self.renyi {
            cfg.renyi = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.steps {
            cfg.steps = Some(v);
        }
        if let Some(v) = self.boundary {
            cfg.boundary = match v {
                BoundaryArg::Obc => BoundaryMode::Obc,
                BoundaryArg::Pbc => BoundaryMode::Pbc,
            };
        }
        if let Some(v) = self.method {
            cfg.method = match v {
                MethodArg::Analytic => MethodMode::Analytic,
                MethodArg::Mc => MethodMode::Mc,
            };
        }
        if let Some(v) = self.vt_over_n {
            cfg.vt_over_n = v;
        }
        if let Some(v) = self.output {
            cfg.output = Some(v);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message }));
    ExitCode::from(2)
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(text) = std::env::var(THREADS_ENV) {
        let n: usize = text.trim().parse().map_err(|_| Error::Config {
            field: THREADS_ENV.into(),
            message: format!("{text:?} is not a thread count"),
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config { field: THREADS_ENV.into(), message: e.to_string() })?;
    }
    Ok(())
}

fn run_experiment(args: ExperimentArgs, kind: ExperimentKind) -> Result<(), Error> {
    let cfg = args.resolve(kind)?;
    let csv = run(&cfg)?.to_csv();
    match &cfg.output {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail("usage", e.to_string().trim()),
    };
    if let Err(e) = configure_threads() {
        return fail(e.kind(), &e.to_string());
    }
    let result = match cli.command {
        Command::MagicScan(a) => run_experiment(a, ExperimentKind::MagicScan),
        Command::Brickwork(a) => run_experiment(a, ExperimentKind::Brickwork),
        Command::DesignAudit(a) => run_experiment(a, ExperimentKind::DesignAudit),
        Command::Cooling(a) => run_experiment(a, ExperimentKind::Cooling),
        Command::DefaultConfig { experiment } => {
            println!("{}", ExperimentConfig::default_for(experiment.into()).to_json());
            Ok(())
        }
        Command::OracleSuite { seed } => {
            let checks = run_oracle_suite(seed);
            println!("check,passed,detail");
            for c in &checks {
                println!("{},{},\"{}\"", c.name, c.passed, c.detail.replace('"', "'"));
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Validation(format!("oracle checks failed: {}", failed.join(", "))))
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
