//! The `foilwise` command line.
//!
//! Every subcommand prints a human-readable rendering or, with
//! `--format json`, one JSON document on stdout. Failures go to stderr with a
//! machine-readable code. Exit codes: 0 success, 1 engine error or negative
//! verdict, 2 usage error, 3 resource limit.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foilwise_core::dialogue::ReplayReport;
use foilwise_core::foil::{closest_plan, foil_feasible, suboptimality_report, Provenance};
use foilwise_core::model_space::{contrastive_search, mce_search};
use foilwise_core::pddl::{read_foil, read_plan, write_plan};
use foilwise_core::planner::PlannerError;
use foilwise_core::subsets::{conflict_sets, plausible_sets, FoilSubset};
use foilwise_core::{
    load_manifest, parse_domain_problem, replay, DialogueConfig, DialogueError, EngineError, Foil, Model, PddlError,
    Planner, SearchLimits, SearchOutcome, Strategy, Transcript, Validation,
};
use foilwise_service::session::{ModelSource, SourcePolicy};
use foilwise_service::store::{FileStore, MemoryStore, SessionStore};
use foilwise_service::{AppState, ServiceConfig};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "foilwise", version, about = "Plan, check foils, explain and refine over STRIPS models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Generated-node budget per planner call.
    #[arg(long, global = true, value_name = "NODES")]
    pub node_budget: Option<u64>,
    /// Wall-clock budget per planner call.
    #[arg(long, global = true, value_name = "SECONDS")]
    pub time_budget: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Closest,
    Conflicts,
    Plausible,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON manifest pairing the planner's and the user's models.
    #[arg(long, conflicts_with_all = ["domain", "problem"])]
    pub manifest: Option<PathBuf>,
    /// PDDL domain of a single model.
    #[arg(long, requires = "problem")]
    pub domain: Option<PathBuf>,
    /// PDDL problem of a single model.
    #[arg(long, requires = "domain")]
    pub problem: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a cost-optimal plan for the planner's model.
    Plan {
        #[command(flatten)]
        models: ModelArgs,
    },
    /// Check a plan file against the planner's model.
    Validate {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long)]
        plan: PathBuf,
    },
    /// Classify a foil and optionally refine it.
    FoilCheck {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long)]
        foil: PathBuf,
        /// Refinement to run after the check.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
    },
    /// Minimal model edits refuting the given foils, or, without foils,
    /// explaining why the planner's plan is optimal.
    Explain {
        #[command(flatten)]
        models: ModelArgs,
        /// Foil file; repeat for several foils.
        #[arg(long)]
        foil: Vec<PathBuf>,
    },
    /// Valid plan using as many foil actions as possible.
    Closest {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long)]
        foil: PathBuf,
    },
    /// Minimal foil subsets without a valid completion.
    Conflicts {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long)]
        foil: PathBuf,
    },
    /// Maximal foil subsets with a valid completion.
    Plausible {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long)]
        foil: PathBuf,
    },
    /// Run the HTTP dialogue service.
    Serve {
        /// Manifest for sessions created without a source; also allows
        /// manifests from its directory.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Directory manifests may be loaded from by path.
        #[arg(long)]
        manifest_root: Option<PathBuf>,
        /// Write per-session snapshots here and restore them on start.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Feed a recorded transcript through a fresh session and diff the output.
    Replay {
        #[command(flatten)]
        models: ModelArgs,
        #[arg(long)]
        transcript: PathBuf,
    },
}

/// A failure with its machine-readable code and exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    fn new(code: &str, message: impl Into<String>, exit: u8) -> Self {
        CliError { code: code.into(), message: message.into(), exit }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", message, 2)
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new("io_error", format!("cannot read `{}`: {e}", path.display()), 1)
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "code": self.code, "message": self.message } })
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let exit = if e.code() == "resource_limit" { 3 } else { 1 };
        CliError::new(e.code(), e.to_string(), exit)
    }
}

impl From<PddlError> for CliError {
    fn from(e: PddlError) -> Self {
        CliError::new(e.code(), e.to_string(), 1)
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        EngineError::from(e).into()
    }
}

impl From<DialogueError> for CliError {
    fn from(e: DialogueError) -> Self {
        let exit = if e.code() == "resource_limit" { 3 } else { 1 };
        CliError::new(e.code(), e.to_string(), exit)
    }
}

/// What a successful run prints. `ok = false` marks a negative verdict
/// (invalid plan, diverging replay) that still exits nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, ok: true }
    }
}

struct Models {
    robot: Model,
    human: Option<Model>,
}

impl Models {
    fn human(&self) -> Result<&Model, CliError> {
        self.human.as_ref().ok_or_else(|| CliError::usage("this command needs --manifest for the user's model"))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load(args: &ModelArgs) -> Result<Models, CliError> {
    match (&args.manifest, &args.domain, &args.problem) {
        (Some(m), _, _) => {
            let (robot, human) = load_manifest(m)?;
            Ok(Models { robot, human: Some(human) })
        }
        (None, Some(d), Some(p)) => Ok(Models { robot: parse_domain_problem(&read(d)?, &read(p)?)?, human: None }),
        _ => Err(CliError::usage("give --manifest or both --domain and --problem")),
    }
}

fn load_foil(path: &Path) -> Result<Foil, CliError> {
    Ok(Foil::new(read_foil(&read(path)?)))
}

fn planner(cli: &Cli) -> Result<Planner, CliError> {
    let mut limits = SearchLimits::default();
    if let Some(n) = cli.node_budget {
        limits.max_generated = n;
    }
    if let Some(s) = cli.time_budget {
        limits.max_time =
            Duration::try_from_secs_f64(s).map_err(|e| CliError::usage(format!("invalid --time-budget: {e}")))?;
    }
    Ok(Planner::with_limits(limits))
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("engine types serialize")
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let planner = planner(cli)?;
    match &cli.command {
        Command::Plan { models } => plan(&planner, &load(models)?.robot),
        Command::Validate { models, plan } => validate(&load(models)?.robot, plan),
        Command::FoilCheck { models, foil, strategy } => foil_check(&planner, &load(models)?, &load_foil(foil)?, *strategy),
        Command::Explain { models, foil } => {
            let foils = foil.iter().map(|f| load_foil(f)).collect::<Result<Vec<_>, _>>()?;
            explain(&planner, &load(models)?, &foils)
        }
        Command::Closest { models, foil } => closest(&planner, &load(models)?.robot, &load_foil(foil)?),
        Command::Conflicts { models, foil } => {
            let sets = conflict_sets(&planner, &load(models)?.robot, &load_foil(foil)?)?;
            Ok(subsets("conflict", &sets))
        }
        Command::Plausible { models, foil } => {
            let sets = plausible_sets(&planner, &load(models)?.robot, &load_foil(foil)?)?;
            Ok(subsets("plausible", &sets))
        }
        Command::Serve { manifest, manifest_root, snapshot_dir, host, port } => {
            serve(manifest.as_deref(), manifest_root.clone(), snapshot_dir.as_deref(), host, *port)
        }
        Command::Replay { models, transcript } => {
            let models = load(models)?;
            let human = models.human()?.clone();
            let recorded: Transcript = serde_json::from_str(&read(transcript)?)
                .map_err(|e| CliError::new("malformed_transcript", e.to_string(), 1))?;
            let config = DialogueConfig { planner, ..DialogueConfig::default() };
            Ok(replay_output(&replay(models.robot, human, config, &recorded)))
        }
    }
}

fn plan(planner: &Planner, robot: &Model) -> Result<Output, CliError> {
    let result = planner.solve_optimal(robot);
    let stats = result.stats;
    match result.outcome {
        SearchOutcome::Plan { plan } => {
            let json = json!({ "plan": plan, "expanded": stats.expanded, "generated": stats.generated });
            Ok(Output::ok(json, write_plan(&plan)))
        }
        SearchOutcome::Unsolvable => Err(CliError::new("unsolvable", "the planner's model has no plan", 1)),
        SearchOutcome::ResourceLimit { kind } => {
            Err(PlannerError::ResourceLimit { kind, stats }.into())
        }
    }
}

fn validate(robot: &Model, path: &Path) -> Result<Output, CliError> {
    let (steps, _) = read_plan(&read(path)?)?;
    let verdict = robot.validate_goal(&steps).map_err(EngineError::from)?;
    let text = match &verdict {
        Validation::Valid { cost } => format!("valid, cost {cost}\n"),
        Validation::ExecutableNotGoal { cost } => format!("executable but misses the goal, cost {cost}\n"),
        Validation::Infeasible { step, action } => format!("infeasible: step {} ({action}) is not applicable\n", step + 1),
    };
    Ok(Output { json: to_json(&verdict), text, ok: verdict.is_valid() })
}

fn foil_check(planner: &Planner, models: &Models, foil: &Foil, strategy: Option<StrategyArg>) -> Result<Output, CliError> {
    foil.check_against(&models.robot)?;
    let in_robot = foil_feasible(planner, &models.robot, foil)?;
    let mut json = json!({ "feasible_for_planner": in_robot });
    let mut text = String::new();
    if let Some(human) = &models.human {
        let in_human = foil_feasible(planner, human, foil)?;
        json["feasible_for_user"] = in_human.into();
        text.push_str(&format!("user's model: {}\n", if in_human { "feasible" } else { "infeasible" }));
    }
    if in_robot {
        let report = suboptimality_report(planner, &models.robot, foil)?;
        let status = if report.delta.is_zero() { "feasible_optimal" } else { "feasible_suboptimal" };
        text.push_str(&format!(
            "planner's model: {} (best completion {}, optimum {}, difference {})\n",
            status.replace('_', " "),
            report.cost_of_best_completion,
            report.optimal_cost,
            report.delta
        ));
        json["status"] = status.into();
        json["report"] = to_json(&report);
    } else {
        text.push_str("planner's model: infeasible\n");
        json["status"] = "infeasible".into();
    }
    if let Some(strategy) = strategy {
        let refined = match strategy {
            StrategyArg::Closest => closest(planner, &models.robot, foil)?,
            StrategyArg::Conflicts => subsets("conflict", &conflict_sets(planner, &models.robot, foil)?),
            StrategyArg::Plausible => subsets("plausible", &plausible_sets(planner, &models.robot, foil)?),
        };
        let name = match strategy {
            StrategyArg::Closest => Strategy::Closest,
            StrategyArg::Conflicts => Strategy::Conflicts,
            StrategyArg::Plausible => Strategy::Plausible,
        };
        json["refinement"] = json!({ "strategy": name, "result": refined.json });
        text.push('\n');
        text.push_str(&refined.text);
    }
    Ok(Output::ok(json, text))
}

fn explain(planner: &Planner, models: &Models, foils: &[Foil]) -> Result<Output, CliError> {
    let human = models.human()?;
    let (kind, edits) = if foils.is_empty() {
        let pi_star = planner
            .solve_optimal(&models.robot)
            .into_result()?
            .ok_or_else(|| CliError::new("unsolvable", "the planner's model has no plan", 1))?;
        ("optimality", mce_search(planner, &models.robot, human, &pi_star)?)
    } else {
        ("contrastive", contrastive_search(planner, &models.robot, human, foils)?)
    };
    let mut text = edits.to_string();
    if edits.is_empty() {
        text.push_str("(no edits needed)");
    }
    text.push('\n');
    Ok(Output::ok(json!({ "explanation": kind, "edits": edits.render(), "detail": edits }), text))
}

fn closest(planner: &Planner, robot: &Model, foil: &Foil) -> Result<Output, CliError> {
    let closest = closest_plan(planner, robot, foil)?;
    let mut text = String::new();
    for step in &closest.steps {
        match (step.provenance, step.observation) {
            (Provenance::UsedFoil, Some(i)) => text.push_str(&format!("+ {}  [foil #{}]\n", step.action, i + 1)),
            _ => text.push_str(&format!("  {}\n", step.action)),
        }
    }
    text.push_str(&format!("; cost = {}\n", closest.plan.cost));
    for &i in &closest.discarded {
        text.push_str(&format!("; discarded foil #{}: {}\n", i + 1, foil.observations[i]));
    }
    Ok(Output::ok(to_json(&closest), text))
}

fn subsets(label: &str, sets: &[FoilSubset]) -> Output {
    let mut text = String::new();
    for (k, set) in sets.iter().enumerate() {
        let flag = if set.cannot_complete { "  (no valid completion)" } else { "" };
        text.push_str(&format!("{label} {}: ({}){flag}\n", k + 1, set.actions.join(", ")));
    }
    if sets.is_empty() {
        text.push_str(&format!("no {label} sets\n"));
    }
    Output::ok(json!({ "sets": sets }), text)
}

fn replay_output(report: &ReplayReport) -> Output {
    let mut text = if report.is_identical() {
        format!("replayed {} steps: identical\n", report.steps)
    } else {
        format!("replayed {} steps: {} differ\n", report.steps, report.mismatches.len())
    };
    for m in &report.mismatches {
        text.push_str(&format!("step {}\n- {}\n+ {}\n", m.step, m.expected, m.actual));
    }
    let json = json!({ "steps": report.steps, "identical": report.is_identical(), "mismatches": report.mismatches });
    Output { json, text, ok: report.is_identical() }
}

fn serve(
    manifest: Option<&Path>,
    manifest_root: Option<PathBuf>,
    snapshot_dir: Option<&Path>,
    host: &str,
    port: u16,
) -> Result<Output, CliError> {
    let mut policy = SourcePolicy { manifest_root, ..SourcePolicy::default() };
    match manifest {
        Some(path) => {
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let name = path.file_name().ok_or_else(|| CliError::usage("--manifest must name a file"))?;
            load_manifest(path)?;
            policy.default_source = Some(ModelSource::Manifest(name.into()));
            policy.manifest_root.get_or_insert(dir);
        }
        None => policy.default_source = Some(ModelSource::Fixture("firefight-mini".into())),
    }
    let store: Arc<dyn SessionStore> = match snapshot_dir {
        Some(dir) => {
            let store = FileStore::open(dir).map_err(|e| CliError::io(dir, e))?;
            let restored = store.restore_all(&policy).map_err(|e| CliError::io(dir, e))?;
            eprintln!("restored {} sessions", restored.ids.len());
            for (path, why) in restored.failed {
                eprintln!("skipped snapshot {}: {why}", path.display());
            }
            Arc::new(store)
        }
        None => Arc::new(MemoryStore::new()),
    };
    let state = AppState::new(ServiceConfig { policy, ..ServiceConfig::default() }, store);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::new("io_error", e.to_string(), 1))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::new("io_error", format!("cannot bind {host}:{port}: {e}"), 1))?;
        let addr = listener.local_addr().map_err(|e| CliError::new("io_error", e.to_string(), 1))?;
        eprintln!("listening on http://{addr}");
        foilwise_service::serve(listener, state).await.map_err(|e| CliError::new("io_error", e.to_string(), 1))
    })?;
    Ok(Output::ok(json!({ "stopped": true }), String::new()))
}

/// Runs the parsed command and prints its result.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", out.json),
                Format::Text => print!("{}", out.text),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match cli.format {
                Format::Json => eprintln!("{}", e.to_json()),
                Format::Text => eprintln!("error[{}]: {}", e.code, e.message),
            }
            ExitCode::from(e.exit)
        }
    }
}
