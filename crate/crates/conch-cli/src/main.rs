//! conch — explore and check finite-state models of concurrent objects.
//!
//! Verdicts map to exit codes: 0 when the property holds (or the
//! requested witness was found), 1 when it is disproved, 2 when a
//! resource budget was exhausted before a verdict, 3 on input errors.

mod presets;
mod report;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use conch::error::{Budget, Error};
use conch::history::{project_trace, History};
use conch::lincheck::is_linearizable;
use conch::model::{traces, LtsModel};
use conch::objects::seqspec::{AtomicSnapshotSpec, QueueSpec, RegisterSpec, SeqSpec, StackSpec};
use conch::refine::{refines_bounded, Refines};
use conch::sched::{check_hyperproperty, HyperTemplate, Strategy};
use conch::stronglin::witness_from_json;
use conch::{Gamma, StateId};

use presets::{fig1_product, object_lts, snapshot_pair_with_relation};
use report::Report;

#[derive(Parser)]
#[command(
    name = "conch",
    about = "Finite-state workbench for concurrent-object semantics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on explored states (overrides CONCH_BUDGET_STATES).
    #[arg(long, global = true)]
    budget_states: Option<usize>,
    /// Cap on enumerated traces.
    #[arg(long, global = true)]
    budget_traces: Option<usize>,
}

#[derive(Args, Clone)]
struct ObjectParams {
    /// Concurrently pending operations (array-based presets).
    #[arg(long, default_value_t = 2)]
    threads: u32,
    /// Array capacity (array-based presets).
    #[arg(long, default_value_t = 2)]
    capacity: usize,
    /// Finite value domain, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    values: Vec<i64>,
    /// Snapshot array size.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    updaters: u32,
    /// Updates per updater.
    #[arg(long, default_value_t = 1)]
    updates: u32,
    #[arg(long, default_value_t = 1)]
    scanners: u32,
    /// Scans per scanner.
    #[arg(long, default_value_t = 1)]
    scans: u32,
    /// Snapshots per scan in the concurrent specification.
    #[arg(long, default_value_t = 3)]
    snap_bound: u32,
    /// Operation bound for atomic and fixed-linearization-point presets.
    #[arg(long, default_value_t = 2)]
    max_ops: u32,
    /// Padding steps for linpoint presets.
    #[arg(long, default_value_t = 0)]
    padding: u32,
    /// Push budget (afek-stack; defaults to the capacity).
    #[arg(long)]
    pushes: Option<u32>,
    /// Pop budget (afek-stack; defaults to the thread count).
    #[arg(long)]
    pops: Option<u32>,
    /// Enqueue budget (hw-queue; defaults to the capacity).
    #[arg(long)]
    enqs: Option<u32>,
    /// Dequeue budget (hw-queue; defaults to the thread count).
    #[arg(long)]
    deqs: Option<u32>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum GammaArg {
    /// Calls and returns.
    Cr,
    /// Program actions.
    Program,
    /// Every action.
    All,
}

impl GammaArg {
    fn gamma(self) -> Gamma {
        match self {
            GammaArg::Cr => Gamma::CallReturn,
            GammaArg::Program => Gamma::Program,
            GammaArg::All => Gamma::All,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SpecArg {
    Stack,
    Queue,
    Register,
    Snapshot,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a preset (or re-export a model file) as JSON.
    ExportModel {
        #[arg(long)]
        object: String,
        #[command(flatten)]
        params: ObjectParams,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Enumerate all traces up to a depth.
    Traces {
        #[arg(long)]
        object: String,
        #[command(flatten)]
        params: ObjectParams,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = GammaArg::All)]
        gamma: GammaArg,
        /// Maximum number of traces to print.
        #[arg(long, default_value_t = 50)]
        limit: usize,
    },
    /// Check a history file against a sequential specification.
    CheckLin {
        #[arg(long, value_enum)]
        spec: SpecArg,
        #[command(flatten)]
        params: ObjectParams,
        #[arg(long)]
        history: String,
    },
    /// Check a strong-linearizability witness file.
    CheckStrongLin {
        #[arg(long)]
        object: String,
        #[arg(long, value_enum)]
        spec: SpecArg,
        #[command(flatten)]
        params: ObjectParams,
        #[arg(long)]
        witness: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Check a candidate forward-simulation relation.
    CheckFsim {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Relation JSON path, or `snapshot-builtin` for the bundled
        /// collect-provenance relation between the snapshot presets.
        #[arg(long)]
        relation: String,
        #[command(flatten)]
        params: ObjectParams,
    },
    /// Decide forward-simulation existence by greatest fixpoint.
    FsimExists {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        params: ObjectParams,
        /// Write the found relation here.
        #[arg(long)]
        dump: Option<String>,
    },
    /// Bounded refinement: trace inclusion at the observable alphabet.
    CheckRefinement {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        params: ObjectParams,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = GammaArg::Cr)]
        gamma: GammaArg,
    },
    /// Synthesize a deterministic adversary scheduler forcing a goal.
    FindAdversary {
        /// Only `fig1` is built in.
        #[arg(long, default_value = "fig1")]
        program: String,
        #[arg(long)]
        object: String,
        #[command(flatten)]
        params: ObjectParams,
        #[arg(long, value_enum)]
        goal: GoalArg,
        /// Literal scheduler reading: offers may suppress program actions.
        #[arg(long)]
        allow_program_suppression: bool,
    },
    /// Check a hyperproperty template over a program-object product.
    CheckHyper {
        #[arg(long, default_value = "fig1")]
        program: String,
        #[arg(long)]
        object: String,
        #[command(flatten)]
        params: ObjectParams,
        /// Only `noninterference` is built in.
        #[arg(long, default_value = "noninterference")]
        template: String,
        #[arg(long)]
        allow_program_suppression: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum GoalArg {
    Low1EqHigh,
    Low2EqHigh,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut budget = Budget::default();
    if let Ok(env) = std::env::var("CONCH_BUDGET_STATES") {
        match env.parse() {
            Ok(v) => budget.max_states = v,
            Err(_) => {
                eprintln!("CONCH_BUDGET_STATES must be an integer");
                return ExitCode::from(3);
            }
        }
    }
    if let Some(v) = cli.budget_states {
        budget.max_states = v;
    }
    if let Some(v) = cli.budget_traces {
        budget.max_traces = v;
    }
    match run(&cli, &budget) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 2 } else { 3 })
        }
    }
}

fn run(cli: &Cli, budget: &Budget) -> Result<u8, Error> {
    let start = Instant::now();
    match &cli.command {
        Command::ExportModel { object, params, out } => {
            let lts = object_lts(object, &params.into(), budget)?;
            let json = lts.to_json();
            match out {
                Some(path) => std::fs::write(path, &json)
                    .map_err(|e| Error::invalid(format!("cannot write `{path}`: {e}")))?,
                None => println!("{json}"),
            }
            let mut report = Report::new("export-model", start, lts.num_states());
            report.config("object", object);
            report.verdict("exported", true);
            report.emit(cli.json);
            Ok(0)
        }
        Command::Traces { object, params, depth, gamma, limit } => {
            let lts = object_lts(object, &params.into(), budget)?;
            let all = traces(&LtsModel(&lts), *depth, budget)?;
            let projected: BTreeSet<_> =
                all.iter().map(|t| project_trace(t, &gamma.gamma())).collect();
            let mut report = Report::new("traces", start, lts.num_states());
            report.config("object", object);
            report.config("depth", &depth.to_string());
            report.verdict(&format!("{} traces ({} projected)", all.len(), projected.len()), true);
            for t in projected.iter().take(*limit) {
                println!("  {t}");
            }
            if projected.len() > *limit {
                println!("  … {} more", projected.len() - limit);
            }
            report.emit(cli.json);
            Ok(0)
        }
        Command::CheckLin { spec, params, history } => {
            let text = std::fs::read_to_string(history)
                .map_err(|e| Error::invalid(format!("cannot read `{history}`: {e}")))?;
            let h = History::parse(&text)?;
            let params: conch_params(params);
            unreachable!()
        }
        _ => unreachable!(),
    }
}
