use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use noma_isac::channel::ExperimentConfig;
use noma_isac::Error;

mod experiments;
mod output;

#[derive(Debug, Parser)]
#[command(name = "noma-isac", version, about = "NOMA-ISAC rate, outage and region experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML scenario file; the built-in reference scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides `run.trials`.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// SNR points in dB: `a,b,c` or `start:step:stop`.
    #[arg(long, global = true)]
    snr_grid: Option<String>,

    /// Number of Pareto weights in the downlink region.
    #[arg(long, global = true, default_value_t = 21)]
    rho_grid: usize,

    /// Number of time-sharing weights in the uplink region.
    #[arg(long, global = true, default_value_t = 21)]
    tau_grid: usize,

    /// Step of the FDSAC split grids.
    #[arg(long, global = true, default_value_t = 0.05)]
    grid_step: f64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Downlink sum and per-UT ECR and sensing rate against SNR.
    DlRates,
    /// Downlink outage probabilities against SNR.
    DlOutage,
    /// Downlink ISAC and FDSAC rate regions.
    DlRegion,
    /// Uplink ECR and sensing rate against SNR.
    UlRates,
    /// Uplink outage probabilities against SNR.
    UlOutage,
    /// Uplink ISAC and FDSAC rate regions.
    UlRegion,
    /// Closed forms against simulation; exits with 2 on any failed check.
    Validate,
}

#[derive(Debug)]
pub(crate) enum Failure {
    Config(String),
    Run(String),
    Validation(usize),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

pub(crate) struct Settings {
    pub experiment: ExperimentConfig,
    pub out: PathBuf,
    pub snr_grid: Option<Vec<f64>>,
    pub rho_grid: usize,
    pub tau_grid: usize,
    pub grid_step: f64,
}

fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let bad = |part: &str| format!("--snr-grid: cannot parse `{part}`");
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<f64> = text.split(':').map(|p| p.trim().parse().map_err(|_| bad(p))).collect::<Result<_, _>>()?;
        let [start, step, stop] = parts[..] else {
            return Err("--snr-grid: expected start:step:stop".into());
        };
        if !(step > 0.0) {
            return Err("--snr-grid: step must be positive".into());
        }
        let n = ((stop - start) / step + 1e-9).floor();
        if !(n >= 0.0) {
            return Err("--snr-grid: stop must not precede start".into());
        }
        (0..=n as usize).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',').map(|p| p.trim().parse().map_err(|_| bad(p))).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err("--snr-grid: needs finite values".into());
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err("--snr-grid: values must be strictly increasing".into());
    }
    Ok(grid)
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut experiment = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_toml_str(&text)?
        }
        None => ExperimentConfig::reference(),
    };
    if let Some(t) = cli.trials {
        experiment.trials = t;
    }
    if let Some(s) = cli.seed {
        experiment.seed = s;
    }
    experiment.validate()?;
    let snr_grid = cli.snr_grid.as_deref().map(parse_grid).transpose().map_err(Failure::Config)?;
    if cli.rho_grid < 2 || cli.tau_grid < 2 {
        return Err(Failure::Config("--rho-grid and --tau-grid need at least 2 points".into()));
    }
    if !(cli.grid_step > 0.0 && cli.grid_step <= 1.0) {
        return Err(Failure::Config(format!("--grid-step must lie in (0, 1], got {}", cli.grid_step)));
    }
    Ok(Settings {
        experiment,
        out: cli.out.clone(),
        snr_grid,
        rho_grid: cli.rho_grid,
        tau_grid: cli.tau_grid,
        grid_step: cli.grid_step,
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let s = settings(cli)?;
    std::fs::create_dir_all(&s.out).map_err(|e| Failure::Run(format!("cannot create {}: {e}", s.out.display())))?;
    match cli.command {
        Command::DlRates => experiments::dl_rates(&s),
        Command::DlOutage => experiments::dl_outage(&s),
        Command::DlRegion => experiments::dl_region(&s),
        Command::UlRates => experiments::ul_rates(&s),
        Command::UlOutage => experiments::ul_outage(&s),
        Command::UlRegion => experiments::ul_region(&s),
        Command::Validate => {
            let failures = experiments::validate(&s)?;
            if failures > 0 {
                return Err(Failure::Validation(failures));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation(n)) => {
            eprintln!("validation: {n} check(s) failed");
            ExitCode::from(2)
        }
    }
}
