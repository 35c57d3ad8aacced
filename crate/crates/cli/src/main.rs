use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eqradar::{presets, run, svg, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "eqradar", version, about = "Electron quantum radar scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a built-in preset.
    Run {
        /// JSON scenario file (omit when using --preset).
        config: Option<PathBuf>,
        /// Built-in scenario: fig4, fig6, fig7, fig8, fig10, fig12, squeeze-min, emp-heat.
        #[arg(long)]
        preset: Option<String>,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write an SVG plot of all scenarios.
        #[arg(long)]
        plot: bool,
    },
    /// Print a preset as a JSON scenario file.
    Preset { name: String },
    /// Plot one or more result CSVs.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Column for the vertical axis.
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: PathBuf,
        /// Plot 1 − y.
        #[arg(long)]
        one_minus: bool,
        #[arg(long)]
        log_x: bool,
        #[arg(long, default_value = "")]
        title: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EQRADAR_LOG", "warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eqradar: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, preset, jobs, out, plot } => {
            let (cfg, base) = match (config, preset) {
                (Some(path), None) => {
                    let base = path.parent().map(PathBuf::from).unwrap_or_default();
                    (RunConfig::load(&path)?, base)
                }
                (None, Some(name)) => (presets::preset(&name)?, PathBuf::from(".")),
                _ => return Err(CliError::Schema("give either a config file or --preset, not both".into())),
            };
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = jobs {
                pool = pool.num_threads(n.max(1));
            }
            let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
            let outputs = pool.install(|| run::execute(&cfg, &base, &out, plot))?;
            for p in outputs.csv.iter().chain(&outputs.svg).chain([&outputs.manifest]) {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Preset { name } => {
            let cfg = presets::preset(&name)?;
            println!("{}", serde_json::to_string_pretty(&cfg).map_err(|e| CliError::Io(e.to_string()))?);
            Ok(())
        }
        Command::Plot { csv, y, out, one_minus, log_x, title } => {
            let series = csv
                .iter()
                .map(|p| {
                    let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    svg::read_series(p, &label, &y, one_minus)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let text = svg::render(&series, &title, "scan value", &y, log_x)?;
            std::fs::write(&out, text).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
        }
    }
}
