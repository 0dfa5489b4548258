use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffem_cli::commands::{self, ScenarioSelector};
use ffem_cli::number::fmt9;
use ffem_cli::{CliError, RunConfig};

/// Fuzzy finite element heat transfer on a rectangular plate.
#[derive(Debug, Parser)]
#[command(name = "ffem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Crisp steady solve.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also write the mesh as `mesh.txt`.
        #[arg(long)]
        dump_mesh: bool,
    },
    /// Alpha-level sweep with fuzzy boundary parameters.
    FuzzySweep {
        #[command(flatten)]
        common: Common,
        /// Scenario to run; repeat to run and compare several.
        #[arg(long, value_enum)]
        scenario: Vec<ScenarioSelector>,
        /// Worker threads for the vertex solves.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Transient 1D convection-diffusion rod.
    Rod {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    Ok((cfg, out))
}

fn show(path: &Path) {
    println!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { common, dump_mesh } => {
            let (cfg, out) = load(&common)?;
            let r = commands::solve(&cfg, &out, dump_mesh)?;
            println!(
                "mesh: {} nodes, {} elements",
                r.mesh.node_count(),
                r.mesh.elements().len()
            );
            println!(
                "temperature: min = {}, max = {}, mean = {}",
                fmt9(r.field.min()),
                fmt9(r.field.max()),
                fmt9(r.field.mean())
            );
            r.files.iter().for_each(|p| show(p));
        }
        Command::FuzzySweep {
            common,
            scenario,
            workers,
        } => {
            let (cfg, out) = load(&common)?;
            let r = commands::fuzzy_sweep(&cfg, &out, &scenario, workers)?;
            for run in &r.runs {
                println!(
                    "{}: average width = {}, variance = {}",
                    run.report.label,
                    fmt9(run.report.average_width),
                    fmt9(run.report.variance_of_widths)
                );
                show(&run.dir.join("envelope.csv"));
                show(&run.dir.join("sensitivity.csv"));
            }
            for c in &r.comparisons {
                println!("{}", c.summary());
            }
        }
        Command::Rod { common } => {
            let (cfg, out) = load(&common)?;
            let r = commands::rod(&cfg, &out)?;
            let last = r.history.last().expect("initial state present");
            println!(
                "steps: {}, final time = {}, courant = {}, cell peclet = {}",
                r.history.len() - 1,
                fmt9(last.time),
                fmt9(r.courant),
                fmt9(r.cell_peclet)
            );
            if let Some((start, end)) = r.front {
                println!(
                    "front: {} -> {} (moved {})",
                    fmt9(start),
                    fmt9(end),
                    fmt9(end - start)
                );
            }
            show(&r.file);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report_line());
            ExitCode::from(e.category().exit_code() as u8)
        }
    }
}
