use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relhel::{exit_code, run, Command, ExperimentConfig, Overrides, RunError, EXIT_USAGE};

/// Relativistic helicity laboratory.
///
/// Exit status: 0 pass, 1 verification failure, 2 usage or configuration
/// error. `RELHEL_THREADS` caps the worker threads.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Sweep differential identities on the configured grid.
    Verify(Common),
    /// Gauss linking, crossing oracle and twin-filament helicity per loop pair.
    Link(Common),
    /// Carry loops along the flow and record their circulation.
    Transport(Common),
    /// Helicity series on the co-moving mesh and on time slices.
    Helicity(Common),
    /// Drift-rate forms against the central-differenced helicity.
    Drift(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Transport step.
    #[arg(long)]
    ds: Option<f64>,
    /// Transport step count.
    #[arg(long)]
    steps: Option<usize>,
    /// Cells per axis of the helicity volume.
    #[arg(long)]
    cells: Option<usize>,
    /// Nodes per parametric loop.
    #[arg(long)]
    nodes: Option<usize>,
}

fn configure_threads() -> Result<(), RunError> {
    let Ok(v) = std::env::var("RELHEL_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| RunError::Config(format!("RELHEL_THREADS={v} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| RunError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let (cmd, args) = match cli.command {
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Link(a) => (Command::Link, a),
        Sub::Transport(a) => (Command::Transport, a),
        Sub::Helicity(a) => (Command::Helicity, a),
        Sub::Drift(a) => (Command::Drift, a),
    };
    let overrides =
        Overrides { output: args.output, ds: args.ds, steps: args.steps, cells: args.cells, nodes: args.nodes };
    let result = configure_threads().and_then(|_| {
        let mut config = ExperimentConfig::load(&args.config)?;
        config.apply(&overrides)?;
        run(cmd, &config)
    });
    match &result {
        Ok(s) => {
            for l in &s.lines {
                println!("{l}");
            }
            for f in &s.files {
                println!("wrote {}", f.display());
            }
            println!("{} {}", cmd.name(), if s.passed { "PASS" } else { "FAIL" });
        }
        Err(e) => eprintln!("relhel {}: {e}", cmd.name()),
    }
    ExitCode::from(exit_code(&result))
}
