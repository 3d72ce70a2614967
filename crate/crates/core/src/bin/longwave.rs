use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use longwave::experiment::{convergence_study, growth_study, run_scenario};
use longwave::output::{write_convergence_outputs, write_growth_outputs, write_outputs};
use longwave::scenario::{GrowthBottom, ScenarioConfig, ScenarioKind};
use longwave::{Error, Result};

#[derive(Parser)]
#[command(name = "longwave", version, about = "Boussinesq and KdV long-wave experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimScenario {
    Validate,
    Step,
    Sinusoid,
}

#[derive(Clone, Copy, ValueEnum)]
enum GrowthScenario {
    Step,
    Sinusoid,
}

#[derive(Subcommand)]
enum Command {
    /// Run a comparison scenario and write CSV/JSON outputs.
    Simulate {
        #[arg(long, conflicts_with_all = ["scenario", "epsilon", "overtime"])]
        config: Option<PathBuf>,
        #[arg(long, requires = "epsilon")]
        scenario: Option<SimScenario>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Extend a step run to T = eps^(-3/2).
        #[arg(long)]
        overtime: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refinement study of the KdV and Boussinesq schemes.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growth of the first-order corrector with a right-going wave.
    Growth {
        #[arg(long)]
        scenario: GrowthScenario,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
}

fn load_config(path: &Path) -> Result<ScenarioConfig> {
    ScenarioConfig::from_json(&std::fs::read_to_string(path)?)
}

fn simulate(
    config: Option<PathBuf>,
    scenario: Option<SimScenario>,
    epsilon: Option<f64>,
    overtime: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let cfg = match (config, scenario, epsilon) {
        (Some(path), _, _) => load_config(&path)?,
        (None, Some(kind), Some(eps)) => {
            let kind = match kind {
                SimScenario::Validate => ScenarioKind::Validate,
                SimScenario::Step => ScenarioKind::Step,
                SimScenario::Sinusoid => ScenarioKind::Sinusoid,
            };
            let mut c = ScenarioConfig::new(kind, eps);
            c.overtime = overtime;
            c
        }
        _ => return Err(Error::Config("simulate needs --config or --scenario with --epsilon".into())),
    };
    let out = out.or_else(|| cfg.output_dir.clone());
    if out.is_none() {
        return Err(Error::Config("simulate needs --out or output_dir in the config".into()));
    }
    let report = run_scenario(&cfg)?;
    let files = write_outputs(&report, &cfg, out.as_deref())?;
    if let Some(last) = report.records.last() {
        println!(
            "t = {}: err_kdv = {:.4e}, err_kdv_topo = {:.4e}, refl_b = {:.4e}",
            last.t, last.err_kdv, last.err_kdv_topo, last.refl_b
        );
    }
    println!(
        "timings: kdv {:.3} s, boussinesq {:.3} s, topo reconstruction {:.3} s",
        report.timings.kdv_seconds, report.timings.boussinesq_seconds, report.timings.topo_reconstruction_seconds
    );
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn convergence(config: PathBuf, out: Option<PathBuf>) -> Result<()> {
    let cfg = load_config(&config)?;
    let report = convergence_study(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(dir) = out.or(cfg.output_dir) {
        let path = write_convergence_outputs(&report, &dir)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn growth(scenario: GrowthScenario, epsilon: f64, out: PathBuf, order: Option<usize>) -> Result<()> {
    let mut cfg = ScenarioConfig::new(ScenarioKind::Growth, epsilon);
    cfg.growth_bottom = Some(match scenario {
        GrowthScenario::Step => GrowthBottom::Step,
        GrowthScenario::Sinusoid => GrowthBottom::Sinusoid,
    });
    cfg.sobolev_order = order;
    let report = growth_study(&cfg)?;
    let fit = report.series.fit;
    println!(
        "H^{} growth: slope {:.4e}, intercept {:.4e}, r^2 {:.4}",
        report.series.order, fit.slope, fit.intercept, fit.r_squared
    );
    for f in write_growth_outputs(&report, &cfg, Some(&out))? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, scenario, epsilon, overtime, out } => {
            simulate(config, scenario, epsilon, overtime, out)
        }
        Command::Convergence { config, out } => convergence(config, out),
        Command::Growth { scenario, epsilon, out, order } => growth(scenario, epsilon, out, order),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
