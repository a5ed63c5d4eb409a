use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use membrane_lab::{config, run, selftest, LabError, Verb};

#[derive(Parser)]
#[command(name = "membrane", version, about = "Two-phase membrane solver and free-boundary diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write the field, solve report and free boundary.
    Solve {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Solve, then run the configured diagnostics.
    Diagnose {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Solve, then run the boundary-perturbation sweep.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the built-in oracle checks.
    Selftest,
}

fn execute(verb: Verb, path: PathBuf, output_dir: Option<PathBuf>) -> Result<i32, LabError> {
    let mut cfg = config::load(&path)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    let summary = run(&cfg, verb)?;
    for d in &summary.diagnostics {
        let state = match (d.completed, d.violation) {
            (false, _) => "FAILED",
            (true, true) if d.fatal => "FATAL",
            (true, true) => "VIOLATION",
            (true, false) => "ok",
        };
        println!("{:>9}  {} #{}: {}", state, d.kind, d.index, d.message);
    }
    if let Some(s) = &summary.sweep {
        println!(
            "sweep: {} rows, comparison {}, hausdorff non-increasing {}",
            s.rows.len(),
            s.comparison_holds(),
            s.hausdorff_non_increasing()
        );
    }
    println!("artifacts in {}", cfg.output_dir.display());
    Ok(summary.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, path, dir) = match cli.command {
        Command::Selftest => {
            let checks = selftest::run();
            for c in &checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return ExitCode::from(if checks.iter().all(|c| c.pass) { 0 } else { 4 });
        }
        Command::Solve { config, output_dir } => (Verb::Solve, config, output_dir),
        Command::Diagnose { config, output_dir } => (Verb::Diagnose, config, output_dir),
        Command::Sweep { config, output_dir } => (Verb::Sweep, config, output_dir),
    };
    match execute(verb, path, dir) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
