//! `handover`: generate scenarios, plan missions, validate plans and run
//! parameter sweeps.
//!
//! Exit status: 0 on success, 2 when no feasible plan exists (or a plan
//! fails validation), 3 on bad input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use handover_core::model::units::watts_to_dbm;
use handover_core::sweep::{plan_with, rows_to_csv, rows_to_svg};
use handover_core::trajectory::{sample_trajectory, samples_to_csv};
use handover_core::{
    coverage_radius, run_sweep, validate_plan, validate_scenario, Axis, GaConfig, GenSpec, Method, Mix, Plan,
    Scenario, SolveError, SolverConfig, SweepSpec,
};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "handover", version, about = "Handover-aware trajectory planning for cellular-connected UAVs")]
struct Cli {
    /// Scenario seed for `gen`; genetic-search seed elsewhere.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with `solver` and `genetic` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; `sweep` defaults to CSV, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random scenario.
    Gen(GenArgs),
    /// Plan a mission for a scenario.
    Plan(PlanArgs),
    /// Check a plan against a scenario.
    Validate(ValidateArgs),
    /// Sweep the time budget or SNR threshold.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Side of the square region (m).
    #[arg(long, default_value_t = 10_000.0)]
    region_m: f64,
    /// Station counts per class; any of these replaces the default mix.
    #[arg(long)]
    large: Option<usize>,
    #[arg(long)]
    medium: Option<usize>,
    #[arg(long)]
    small: Option<usize>,
    /// Mission-time budget (s).
    #[arg(long)]
    t_max: Option<f64>,
    /// Minimum SNR (dB).
    #[arg(long)]
    snr_db: Option<f64>,
}

#[derive(Args)]
struct PlanArgs {
    scenario: PathBuf,
    #[arg(long, default_value = "proposed")]
    method: Method,
    /// Override the scenario's mission-time budget (s).
    #[arg(long)]
    t_max: Option<f64>,
    /// Override the scenario's SNR threshold (dB).
    #[arg(long)]
    snr_db: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    scenario: PathBuf,
    plan: PathBuf,
    /// Sampling step for `--format csv` (ms).
    #[arg(long, default_value_t = 1000.0)]
    sample_ms: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep spec JSON (`axis`, `values`, `base_scenario`, `methods`).
    spec: Option<PathBuf>,
    /// Base scenario, when no spec file is given.
    #[arg(long, conflicts_with = "spec")]
    scenario: Option<PathBuf>,
    #[arg(long, requires = "scenario")]
    axis: Option<Axis>,
    #[arg(long, value_delimiter = ',', requires = "scenario")]
    values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "proposed,shortest_time,genetic")]
    methods: Vec<Method>,
    /// Chart output; defaults to `--out` with an `.svg` extension.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    solver: SolverConfig,
    genetic: GaConfig,
}

enum Failure {
    Infeasible(String),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        if e.is_infeasible() {
            Failure::Infeasible(e.to_string())
        } else {
            Failure::Input(e.into())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = read(path)?;
            let c: ConfigFile =
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
            c.solver.check().map_err(anyhow::Error::from)?;
            c.genetic.check().map_err(anyhow::Error::from)?;
            c
        }
        None => ConfigFile::default(),
    };
    if let (Some(seed), false) = (cli.seed, matches!(cli.command, Command::Gen(_))) {
        config.genetic.seed = seed;
    }
    match &cli.command {
        Command::Gen(args) => gen(cli, args),
        Command::Plan(args) => plan(cli, &config, args),
        Command::Validate(args) => validate(cli, args),
        Command::Sweep(args) => sweep(cli, &config, args),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    Scenario::load(path).with_context(|| format!("loading scenario {}", path.display()))
}

fn gen(cli: &Cli, args: &GenArgs) -> Result<(), Failure> {
    if cli.format == Some(Format::Csv) {
        return Err(anyhow!("scenarios are written as JSON only").into());
    }
    let mut spec = GenSpec {
        region_m: args.region_m,
        ..GenSpec::default()
    };
    if args.large.is_some() || args.medium.is_some() || args.small.is_some() {
        spec.mix = Mix::with_counts(
            args.large.unwrap_or(0),
            args.medium.unwrap_or(0),
            args.small.unwrap_or(0),
        );
    }
    if spec.mix.total() == 0 {
        return Err(anyhow!("the station mix is empty").into());
    }
    if let Some(t) = args.t_max {
        spec.t_max_s = t;
    }
    if let Some(db) = args.snr_db {
        spec.snr_threshold_db = db;
    }
    let seed = cli.seed.unwrap_or(0);
    let scenario = spec.generate(seed).map_err(anyhow::Error::from)?;
    emit(cli, &scenario.to_json())?;

    eprintln!("seed={seed}");
    eprintln!("M={}", scenario.gbs_list.len());
    eprintln!("region_m={}", spec.region_m);
    for class in &spec.mix.classes {
        let probe = scenario
            .gbs_list
            .iter()
            .find(|g| (watts_to_dbm(g.tx_power) - class.tx_power_dbm).abs() < 1e-9);
        let radius = probe.and_then(|g| coverage_radius(g, &scenario));
        eprintln!(
            "class={} count={} radius_m={}",
            class.name,
            class.count,
            radius.map_or("none".into(), |r| format!("{r:.1}"))
        );
    }
    for d in validate_scenario(&scenario) {
        eprintln!("warning: {d}");
    }
    Ok(())
}

fn plan(cli: &Cli, config: &ConfigFile, args: &PlanArgs) -> Result<(), Failure> {
    let mut scenario = load_scenario(&args.scenario)?;
    if let Some(t) = args.t_max {
        scenario = scenario.with_t_max(t);
    }
    if let Some(db) = args.snr_db {
        scenario = Axis::SnrThresholdDb.apply(&scenario, db);
    }
    for d in validate_scenario(&scenario) {
        eprintln!("warning: {d}");
    }
    let plan = plan_with(args.method, &scenario, &config.solver, &config.genetic)?;
    let trace = validate_plan(&scenario, &plan);

    match cli.format.unwrap_or(Format::Json) {
        Format::Json => emit(cli, &plan.to_json())?,
        Format::Csv => {
            let mut csv = String::from("t_s,x_m,y_m,serving_gbs\n");
            for w in &plan.waypoints {
                let _ = writeln!(csv, "{},{},{},{}", w.t_s, w.xy_m.x, w.xy_m.y, w.serving_gbs);
            }
            emit(cli, &csv)?;
        }
    }

    let ids: Vec<String> = plan.association.iter().map(u32::to_string).collect();
    eprintln!("method={}", plan.solver_meta.method);
    eprintln!("handovers={}", plan.handovers);
    eprintln!("time_s={:.3}", plan.mission_time_s);
    eprintln!("association={}", ids.join(","));
    if let Some(lambda) = plan.solver_meta.lambda_star {
        eprintln!("lambda={lambda:.6e}");
    }
    if let Some(v) = trace.violation {
        return Err(Failure::Infeasible(format!(
            "infeasible: {} violated: {}",
            v.constraint, v.detail
        )));
    }
    Ok(())
}

fn validate(cli: &Cli, args: &ValidateArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    let text = read(&args.plan)?;
    let plan = Plan::from_json(&text).with_context(|| format!("parsing plan {}", args.plan.display()))?;
    let ids = plan
        .association
        .iter()
        .chain(plan.waypoints.iter().map(|w| &w.serving_gbs));
    for id in ids {
        if scenario.gbs(*id).is_none() {
            return Err(anyhow!("plan refers to GBS {id}, which the scenario does not have").into());
        }
    }
    let trace = validate_plan(&scenario, &plan);
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => emit(cli, &trace.to_json())?,
        Format::Csv => {
            if !(args.sample_ms > 0.0) {
                return Err(anyhow!("--sample-ms must be positive").into());
            }
            let samples = sample_trajectory(&scenario, &plan.waypoints, args.sample_ms / 1000.0);
            emit(cli, &samples_to_csv(&samples))?;
        }
    }
    eprintln!("feasible={}", trace.feasible);
    eprintln!("handover_events={}", trace.handover_events.len());
    eprintln!("min_snr_db={:.3}", trace.min_snr_db());
    match trace.violation {
        Some(v) => Err(Failure::Infeasible(format!(
            "infeasible: {} violated{}: {}",
            v.constraint,
            v.waypoint.map(|k| format!(" at waypoint {k}")).unwrap_or_default(),
            v.detail
        ))),
        None => Ok(()),
    }
}

fn sweep(cli: &Cli, config: &ConfigFile, args: &SweepArgs) -> Result<(), Failure> {
    let spec = match (&args.spec, &args.scenario) {
        (Some(path), _) => {
            let text = read(path)?;
            let mut spec: SweepSpec =
                serde_json::from_str(&text).with_context(|| format!("parsing sweep spec {}", path.display()))?;
            if spec.base_scenario.is_relative() {
                if let Some(dir) = path.parent() {
                    spec.base_scenario = dir.join(&spec.base_scenario);
                }
            }
            spec
        }
        (None, Some(scenario)) => SweepSpec {
            axis: args.axis.ok_or_else(|| anyhow!("--axis is required with --scenario"))?,
            values: args.values.clone(),
            base_scenario: scenario.clone(),
            methods: args.methods.clone(),
        },
        (None, None) => bail_input("give a sweep spec file or --scenario/--axis/--values")?,
    };
    spec.check().map_err(anyhow::Error::from)?;
    let base = load_scenario(&spec.base_scenario)?;
    let rows = run_sweep(
        &base,
        spec.axis,
        &spec.values,
        &spec.methods,
        &config.solver,
        &config.genetic,
    )?;

    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(cli, &rows_to_csv(&rows))?,
        Format::Json => emit(
            cli,
            &serde_json::to_string_pretty(&rows).map_err(anyhow::Error::from)?,
        )?,
    }
    let svg_path = args
        .svg
        .clone()
        .or_else(|| cli.out.as_ref().map(|p| p.with_extension("svg")));
    if let Some(path) = svg_path {
        fs::write(&path, rows_to_svg(spec.axis, &rows)).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("chart={}", path.display());
    }
    let blank = rows.iter().filter(|r| r.handovers.is_none()).count();
    eprintln!("rows={} infeasible={blank}", rows.len());
    Ok(())
}

fn bail_input<T>(msg: &str) -> anyhow::Result<T> {
    bail!("{msg}")
}
