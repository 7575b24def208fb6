//! Command-line front end: generate scenarios, run seeded simulations and
//! batches, emit CSV time series, and evaluate closed-form R0.
//!
//! Exit codes: 0 success, 2 usage, 3 scenario validation, 4 i/o.

mod csv;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use epica::engine::{self, ModelKind, SimulationConfig, Summary};
use epica::model::DiseaseParams;
use epica::reference;
use epica::rules::BaseRule;
use epica::scenario::{self, InfectionSite, Scenario, ScenarioError, VillagePreset};

const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "epica",
    version,
    about = "Cellular-automaton epidemic simulator on impact-degree neighborhoods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded simulation and write its time series as CSV
    Simulate(SimulateArgs),
    /// Run replicas and write mean curves plus per-replica summaries
    Batch(BatchArgs),
    /// Generate a village scenario file
    Village(VillageArgs),
    /// Validate a scenario file and report every violation
    Validate(ValidateArgs),
    /// Print the closed-form basic reproduction number
    R0(R0Args),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario JSON file
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Built-in village preset (impact rates of the two study scenarios)
    #[arg(long, value_name = "NAME")]
    preset: Option<VillagePreset>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Site {
    School,
    Office,
    Market,
    Hospital,
}

impl Site {
    fn label(self) -> &'static str {
        match self {
            Site::School => "school",
            Site::Office => "office",
            Site::Market => "market",
            Site::Hospital => "hospital",
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// Steps to simulate (the CSV gains a t=0 row for the initial state)
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
    days: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "sir-fatality")]
    model: ModelKind,
    /// Move patient zero to the lowest-index cell of this site
    #[arg(long)]
    initial_site: Option<Site>,
    /// Destination for the time-series CSV
    #[arg(long, value_name = "PATH")]
    output: PathBuf,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    run: SimulateArgs,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    replicas: u32,
    /// Destination for the per-replica summary CSV
    /// (default: the mean-curve path with extension `.replicas.csv`)
    #[arg(long, value_name = "PATH")]
    replica_output: Option<PathBuf>,
}

#[derive(Args)]
struct VillageArgs {
    #[arg(long, default_value = "village-a")]
    preset: VillagePreset,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    initial_site: Option<Site>,
    /// Destination for the scenario JSON
    #[arg(long, value_name = "PATH")]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_name = "PATH")]
    scenario: PathBuf,
}

#[derive(Args)]
struct R0Args {
    /// Model whose closed form to evaluate (si has none)
    #[arg(long)]
    model: ModelKind,
    /// Read parameters from a scenario file instead of flags
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    #[arg(long, required_unless_present = "scenario")]
    beta: Option<f64>,
    #[arg(long, required_unless_present = "scenario")]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

/// An error carrying its process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(err: ScenarioError) -> Self {
        match err {
            ScenarioError::Io(e) => CliError::io(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<engine::EngineError> for CliError {
    fn from(err: engine::EngineError) -> Self {
        match &err {
            engine::EngineError::InvalidConfig(_) => CliError::usage(err.to_string()),
            engine::EngineError::InvalidScenario(violations) => {
                let report = violations
                    .iter()
                    .map(|v| format!("  - {v}"))
                    .collect::<Vec<_>>()
                    .join("\n");
                CliError::validation(format!("scenario failed validation:\n{report}"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // keep help/version on stdout with success, everything else is
            // a usage error
            let code = if err.use_stderr() {
                EXIT_USAGE
            } else {
                0
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Batch(args) => cmd_batch(&args),
        Command::Village(args) => cmd_village(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::R0(args) => cmd_r0(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn load_source(source: &Source, seed: u64) -> Result<Scenario, CliError> {
    let scenario = match (&source.scenario, source.preset) {
        (Some(path), None) => Scenario::load(path)?,
        (None, Some(preset)) => scenario::build_village(&preset.spec(), seed)?,
        _ => unreachable!("clap enforces exactly one source"),
    };
    Ok(scenario)
}

fn place_site(scenario: Scenario, site: Option<Site>) -> Result<Scenario, CliError> {
    match site {
        None => Ok(scenario),
        Some(site) => Ok(scenario::place_initial_infection(
            &scenario,
            &InfectionSite::Label(site.label().to_string()),
        )?),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// R0 of the closed form matching the model's base rule; si has none.
fn r0_text(model: ModelKind, params: &DiseaseParams) -> String {
    let value = match model.base_rule() {
        BaseRule::Si => None,
        BaseRule::Sis => reference::r0_sis(params).ok(),
        BaseRule::Sir => reference::r0_sir(params).ok(),
    };
    match value {
        Some(r0) => format!("{r0:.4}"),
        None => "n/a".to_string(),
    }
}

fn format_extinction(summary: &Summary) -> String {
    summary
        .extinction_day
        .map(|d| d.to_string())
        .unwrap_or_else(|| "none".to_string())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let scenario = place_site(load_source(&args.source, args.seed)?, args.initial_site)?;
    let config = SimulationConfig::new(args.model, args.days, args.seed);
    let series = engine::simulate(&scenario, &config)?;
    write_file(&args.output, &csv::render_counts(&series))?;
    let summary = engine::summarize(&series);
    println!(
        "peak_infected={} peak_day={} extinction_day={} r0={}",
        summary.peak_infected as u64,
        summary.peak_day,
        format_extinction(&summary),
        r0_text(args.model, &scenario.params)
    );
    Ok(())
}

fn replica_output_path(args: &BatchArgs) -> PathBuf {
    args.replica_output
        .clone()
        .unwrap_or_else(|| args.run.output.with_extension("replicas.csv"))
}

fn cmd_batch(args: &BatchArgs) -> Result<(), CliError> {
    let scenario = place_site(
        load_source(&args.run.source, args.run.seed)?,
        args.run.initial_site,
    )?;
    let config = SimulationConfig::new(args.run.model, args.run.days, args.run.seed)
        .with_replicas(args.replicas);
    let batch = engine::batch_simulate(&scenario, &config)?;
    write_file(&args.run.output, &csv::render_means(&batch.means))?;
    write_file(
        &replica_output_path(args),
        &csv::render_replica_summaries(&batch.replica_summaries),
    )?;
    let summary = engine::summarize(&batch.means);
    println!(
        "peak_infected={:.6} peak_day={} extinction_day={} r0={}",
        summary.peak_infected,
        summary.peak_day,
        format_extinction(&summary),
        r0_text(args.run.model, &scenario.params)
    );
    Ok(())
}

fn cmd_village(args: &VillageArgs) -> Result<(), CliError> {
    let scenario = place_site(
        scenario::build_village(&args.preset.spec(), args.seed)?,
        args.initial_site,
    )?;
    write_file(&args.output, &scenario.to_json()?)?;
    println!(
        "wrote {} ({} cells, preset {})",
        args.output.display(),
        scenario.cell_count(),
        args.preset.name()
    );
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    let violations = scenario.validate();
    if violations.is_empty() {
        println!("ok: {} cells, max degree {}", scenario.cell_count(), scenario.degrees.max_degree());
        return Ok(());
    }
    let report = violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n");
    Err(CliError::validation(format!(
        "{} violation(s):\n{report}",
        violations.len()
    )))
}

fn cmd_r0(args: &R0Args) -> Result<(), CliError> {
    let params = match &args.scenario {
        Some(path) => Scenario::load(path)?.params,
        None => {
            let beta = args.beta.expect("clap requires beta without a scenario");
            let alpha = args.alpha.expect("clap requires alpha without a scenario");
            DiseaseParams::rates_only(beta, alpha, args.mu, args.theta)
                .map_err(|e| CliError::usage(e.to_string()))?
        }
    };
    let r0 = match args.model.base_rule() {
        BaseRule::Si => {
            return Err(CliError::usage(
                "the si model has no closed-form R0; use sis or sir",
            ));
        }
        BaseRule::Sis => reference::r0_sis(&params),
        BaseRule::Sir => reference::r0_sir(&params),
    }
    .map_err(|e| CliError::usage(e.to_string()))?;
    println!("{r0:.4}");
    Ok(())
}
