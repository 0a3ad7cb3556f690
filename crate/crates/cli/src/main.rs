use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vhp_core::lab::{self, LabConfig, SCENARIOS};
use vhp_core::VhpError;

#[derive(Parser)]
#[command(name = "vhp", version, about = "Half-plane Navier-Stokes vorticity laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a config file, or list the scenarios.
    Run {
        #[arg(long, required_unless_present = "list")]
        config: Option<PathBuf>,
        /// output directory for the CSV series and the JSON report
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// overrides the seed in the config
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        list: bool,
    },
}

fn exit_code(e: &VhpError) -> u8 {
    match e {
        VhpError::UnknownScenario(_) => 2,
        VhpError::Config { .. }
        | VhpError::Cfl { .. }
        | VhpError::InvalidArgument(_)
        | VhpError::InvalidGrid(_)
        | VhpError::WallTrace(_) => 3,
        VhpError::Blowup { .. } | VhpError::NonFinite(_) => 4,
        VhpError::Quadrature { .. } | VhpError::Io(_) => 1,
    }
}

fn threads() {
    if let Some(n) = std::env::var("VHP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // only fails if a pool already exists, which cannot happen this early
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(config: PathBuf, out: PathBuf, seed: Option<u64>) -> Result<bool, VhpError> {
    let mut cfg = LabConfig::from_path(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if !SCENARIOS.contains(&cfg.scenario.as_str()) {
        return Err(VhpError::UnknownScenario(cfg.scenario));
    }
    let (report, rows) = lab::run(&cfg)?;
    let (csv, json) = lab::write_outputs(&cfg, &report, &rows, &out)?;
    for line in &report.summary {
        println!("{line}");
    }
    println!("{} in {:.1}s: {}", report.scenario, report.runtime_s, if report.pass { "pass" } else { "fail" });
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    threads();
    match cli.command {
        Command::Run { list: true, .. } => {
            for s in SCENARIOS {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed, .. } => {
            let config = config.expect("clap requires --config without --list");
            match run(config, out, seed) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("vhp: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
    }
}
