use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use bitretrieve::experiments::{
    run_diagnostics, run_experiment, theory_report, ExperimentConfig, ExperimentKind,
};
use bitretrieve::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Run whatever `experiment` the config names
    Experiment,
    Pointwise,
    Uniform,
    Noise,
    Diagnostics,
    Theory,
}

/// One-bit phase retrieval experiments.
///
/// Settings are read from defaults, then `--config`, then flags.
#[derive(Debug, Parser)]
#[command(name = "bitretrieve", version)]
struct Cli {
    command: Command,

    /// Config file of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed
    #[arg(long, visible_alias = "master-seed")]
    seed: Option<u64>,

    /// Output CSV path
    #[arg(long, visible_alias = "output-path")]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,

    #[arg(long)]
    field: Option<String>,

    #[arg(long)]
    n: Option<String>,

    /// Comma-separated, strictly increasing, or `auto`
    #[arg(long = "m-grid")]
    m_grid: Option<String>,

    #[arg(long)]
    trials: Option<String>,

    #[arg(long)]
    inputs: Option<String>,

    #[arg(long)]
    delta: Option<String>,

    #[arg(long = "bound-d", visible_alias = "bound-D")]
    bound_d: Option<String>,

    #[arg(long)]
    tau: Option<String>,

    #[arg(long = "flip-mode")]
    flip_mode: Option<String>,

    /// Extra `key=value` override, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

enum Failure {
    Config(Error),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            key: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        cfg.apply_text(&text)?;
    }
    let kind = match cli.command {
        Command::Experiment => None,
        Command::Pointwise => Some("pointwise"),
        Command::Uniform => Some("uniform"),
        Command::Noise => Some("noise"),
        Command::Diagnostics => Some("diagnostics"),
        Command::Theory => Some("theory"),
    };
    let flags: [(&str, Option<String>); 11] = [
        ("experiment", kind.map(str::to_string)),
        ("field", cli.field.clone()),
        ("n", cli.n.clone()),
        ("m_grid", cli.m_grid.clone()),
        ("trials", cli.trials.clone()),
        ("inputs", cli.inputs.clone()),
        ("delta", cli.delta.clone()),
        ("bound_D", cli.bound_d.clone()),
        ("tau", cli.tau.clone()),
        ("flip_mode", cli.flip_mode.clone()),
        ("master_seed", cli.seed.map(|s| s.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    if let Some(out) = &cli.out {
        cfg.output_path = out.clone();
    }
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
            key: kv.clone(),
            message: "expected KEY=VALUE".into(),
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: &ExperimentConfig) -> Result<(), Failure> {
    match cfg.experiment {
        ExperimentKind::Theory => {
            for (k, v) in theory_report(cfg.field, cfg.n, cfg.delta, cfg.bound_d, cfg.tau)? {
                println!("{k}={v}");
            }
            Ok(())
        }
        ExperimentKind::Diagnostics => {
            let report = run_diagnostics(cfg)?;
            print!("{report}");
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Runtime(format!(
                    "failing checks: {}",
                    report.failing().join(", ")
                )))
            }
        }
        _ => {
            let out = run_experiment(cfg)?;
            out.write(&cfg.output_path)?;
            eprintln!(
                "wrote {} records to {}",
                out.records.len(),
                cfg.output_path.display()
            );
            if out.violations.is_empty() {
                Ok(())
            } else {
                for v in &out.violations {
                    eprintln!("violation: {v}");
                }
                Err(Failure::Runtime(format!(
                    "{} certified bounds did not hold",
                    out.violations.len()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| execute(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
