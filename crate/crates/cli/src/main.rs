use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use cgl_core::experiments::{
    io, preset_config, run, sweep, ExperimentConfig, Overrides, Preset, ReportFormat, RowStatus,
};
use cgl_core::integrators::Scheme;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cgl", version, about = "Exponential integrators for complex Ginzburg-Landau equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single integration with the first scheme and step count.
    Run(Common),
    /// Convergence study over all configured schemes and step counts.
    Sweep(Common),
    /// Preset catalogue.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Lists the preset ids.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Preset id (see `cgl preset list`).
    #[arg(long)]
    preset: Option<String>,
    /// JSON experiment file; other flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scheme name(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<Scheme>>,
    /// Step count(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    steps: Option<Vec<usize>>,
    /// Grid extent for every direction, or one per direction, comma separated.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for snapshots and reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full grids and step lists instead of the desk-scale defaults.
    #[arg(long)]
    full_scale: bool,
    /// Step indices at which snapshots are written.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Serial sweep with a warm-up run, for meaningful wall-clock columns.
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            grid: self.grid.clone(),
            t_final: self.tfinal,
            seed: self.seed,
            schemes: self.scheme.clone(),
            steps: self.steps.clone(),
            snapshots: self.snapshots.clone(),
            output_dir: self.out.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            }),
            timing: self.timing.then_some(true),
        }
    }

    fn config(&self) -> Result<ExperimentConfig> {
        let overrides = self.overrides();
        match (&self.preset, &self.config) {
            (Some(_), Some(_)) => bail!("--preset and --config are mutually exclusive"),
            (None, None) => bail!("one of --preset or --config is required"),
            (Some(id), None) => {
                let preset: Preset = id.parse()?;
                Ok(preset_config(preset, self.full_scale, &overrides)?)
            }
            (None, Some(path)) => {
                let mut cfg = ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
                overrides.apply(&mut cfg)?;
                Ok(cfg)
            }
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Preset {
            action: PresetAction::List,
        } => {
            for p in Preset::ALL {
                println!("{:<28}{}", p.id(), p.description());
            }
        }
        Command::Run(args) => {
            let cfg = args.config()?;
            let summary = run(&cfg).with_context(|| {
                format!(
                    "integrating {} with {}",
                    cfg.preset.as_deref().unwrap_or("config"),
                    cfg.schemes[0]
                )
            })?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let report = sweep(&cfg).context("convergence study")?;
            match cfg.format {
                ReportFormat::Csv => print!("{}", io::report_csv(&report)?),
                ReportFormat::Json => println!("{}", io::report_json(&report)?),
            }
            let diverged = report.rows.iter().filter(|r| r.status == RowStatus::Diverged).count();
            if diverged > 0 {
                eprintln!("{diverged} run(s) diverged");
            }
        }
    }
    Ok(())
}
