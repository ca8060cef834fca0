use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gyrofree::sensors::{read_measurement_log, write_measurement_log};
use gyrofree::sim::{self, SimConfig, SimRun};

#[derive(Parser)]
#[command(
    name = "gyrofree",
    version,
    about = "Gyro-free equivariant attitude observer simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write trace.csv, trace.svg and measurements.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant quick-suite.
    Check {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run the observer on a recorded measurement log.
    Replay {
        #[arg(long)]
        log: PathBuf,
        /// Configuration the log was recorded with (defaults to the built-in one).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> gyrofree::Result<SimConfig> {
    let mut cfg = match path {
        Some(p) => SimConfig::load(p)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> gyrofree::Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| gyrofree::Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn summarize(run: &SimRun) {
    let last = run.trace.last().expect("trace is never empty");
    println!(
        "t={} att_err_rad={:e} omega_err={:e} lyapunov={:e} commutation_residual={:e}",
        last.t, last.att_err_rad, last.omega_err, last.lyapunov, last.commutation_residual
    );
}

fn simulate(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> gyrofree::Result<()> {
    let cfg = load_config(Some(config), seed)?;
    let out = out.unwrap_or_else(|| cfg.out_dir.clone());
    create_dir(&out)?;
    let run = sim::run(&cfg)?;
    sim::write_trace_csv(&run.trace, &out.join("trace.csv"))?;
    sim::write_plot_svg(&run.trace, &out.join("trace.svg"))?;
    write_measurement_log(&out.join("measurements.csv"), &run.frames)?;
    summarize(&run);
    println!("wrote {}", out.display());
    Ok(())
}

fn replay(log: &Path, config: Option<&Path>, seed: Option<u64>, out: Option<PathBuf>) -> gyrofree::Result<()> {
    let cfg = load_config(config, seed)?;
    let frames = read_measurement_log(log)?;
    let run = sim::replay(&cfg, &frames)?;
    if let Some(out) = out {
        create_dir(&out)?;
        sim::write_trace_csv(&run.trace, &out.join("replay_trace.csv"))?;
        sim::write_plot_svg(&run.trace, &out.join("replay_trace.svg"))?;
        println!("wrote {}", out.display());
    }
    summarize(&run);
    Ok(())
}

fn check(samples: usize, seed: u64) -> bool {
    let mut ok = true;
    for outcome in sim::quick_check(seed, samples) {
        let status = if outcome.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<34} max error {:.3e} (tolerance {:.0e}, {} samples)",
            outcome.name, outcome.max_error, outcome.tolerance, outcome.samples
        );
        ok &= outcome.passed();
    }
    ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, seed, out } => simulate(&config, seed, out),
        Command::Check { samples, seed } => {
            return if check(samples, seed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
        Command::Replay { log, config, seed, out } => replay(&log, config.as_deref(), seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
