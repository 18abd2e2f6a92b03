//! Named model presets and their parameters.

use conch::error::{Budget, Error, Result};
use conch::lts::Lts;
use conch::model::{explore, LtsModel, Model, Product};
use conch::objects::afek_stack::AfekStack;
use conch::objects::atomic::AtomicModel;
use conch::objects::fig1::{Fig1Program, Fig1State};
use conch::objects::hw_queue::HwQueue;
use conch::objects::linpoint::LinPointObject;
use conch::objects::seqspec::{AtomicSnapshotSpec, QueueSpec, RegisterSpec, StackSpec};
use conch::objects::snapshot::{SnapshotCfg, SnapshotImpl, SnapshotSpec};

use crate::ObjectParams;

pub const OBJECT_PRESETS: &[&str] = &[
    "afek-stack",
    "hw-queue",
    "snapshot-impl",
    "snapshot-spec",
    "atomic-stack",
    "atomic-queue",
    "atomic-register",
    "atomic-snapshot",
    "linpoint-register",
    "linpoint-stack",
];

fn snapshot_cfg(p: &ObjectParams) -> SnapshotCfg {
    SnapshotCfg {
        n: p.n,
        values: p.values.clone(),
        updaters: p.updaters,
        updates_each: p.updates,
        scanners: p.scanners,
        scans_each: p.scans,
    }
}

fn afek(p: &ObjectParams) -> AfekStack {
    let mut stack = AfekStack::new(p.threads, p.capacity, p.values.clone());
    if let (Some(pushes), Some(pops)) = (p.pushes, p.pops) {
        stack = stack.with_ops(pushes, pops);
    }
    stack
}

fn hw(p: &ObjectParams) -> HwQueue {
    let mut queue = HwQueue::new(p.threads, p.capacity, p.values.clone());
    if let (Some(enqs), Some(deqs)) = (p.enqs, p.deqs) {
        queue = queue.with_ops(enqs, deqs);
    }
    queue
}

/// Dispatch a preset name (or a JSON model path) to a builder and run a
/// generic continuation on the model.
macro_rules! with_object_model {
    ($name:expr, $params:expr, $file_lts:expr, $f:expr) => {{
        let p = $params;
        match $name {
            "afek-stack" => $f(&afek(p)),
            "hw-queue" => $f(&hw(p)),
            "snapshot-impl" => $f(&SnapshotImpl::new(snapshot_cfg(p))),
            "snapshot-spec" => $f(&SnapshotSpec::new(snapshot_cfg(p), p.snap_bound)),
            "atomic-stack" => $f(&AtomicModel::new(StackSpec { values: p.values.clone() }, p.max_ops)),
            "atomic-queue" => $f(&AtomicModel::new(QueueSpec { values: p.values.clone() }, p.max_ops)),
            "atomic-register" => {
                $f(&AtomicModel::new(RegisterSpec::new(p.values.clone()), p.max_ops))
            }
            "atomic-snapshot" => $f(&AtomicModel::new(
                AtomicSnapshotSpec { n: p.n, values: p.values.clone() },
                p.max_ops,
            )),
            "linpoint-register" => $f(&LinPointObject::new(RegisterSpec::new(p.values.clone()), p.max_ops)
                .with_padding(p.padding)),
            "linpoint-stack" => $f(&LinPointObject::new(StackSpec { values: p.values.clone() }, p.max_ops)
                .with_padding(p.padding)),
            other => match $file_lts {
                Some(lts) => $f(&LtsModel(lts)),
                None => Err(Error::invalid(format!(
                    "unknown object `{other}` (presets: {}, or a .json model path)",
                    OBJECT_PRESETS.join(", ")
                ))),
            },
        }
    }};
}

fn load_file(name: &str) -> Result<Option<Lts>> {
    if name.ends_with(".json") || name.contains('/') {
        let text = std::fs::read_to_string(name)
            .map_err(|e| Error::invalid(format!("cannot read model `{name}`: {e}")))?;
        return Ok(Some(Lts::from_json(&text)?));
    }
    Ok(None)
}

/// Materialize an object preset (or JSON model file) into an LTS.
pub fn object_lts(name: &str, params: &ObjectParams, budget: &Budget) -> Result<Lts> {
    let file = load_file(name)?;
    with_object_model!(name, params, file.as_ref(), |model: &dyn ModelLts| model
        .materialize(budget))
}

/// Compose the three-thread leak client with an object and materialize
/// the product, keeping the program component for goal predicates.
pub fn fig1_product(
    name: &str,
    params: &ObjectParams,
    budget: &Budget,
) -> Result<(Lts, Vec<Fig1State>)> {
    let file = load_file(name)?;
    with_object_model!(name, params, file.as_ref(), |model: &dyn ModelFig1| model
        .fig1_product(budget))
}

/// Object-safe wrappers so the macro arms can share one continuation.
trait ModelLts {
    fn materialize(&self, budget: &Budget) -> Result<Lts>;
}

impl<M: Model> ModelLts for M {
    fn materialize(&self, budget: &Budget) -> Result<Lts> {
        Ok(explore(self, budget)?.lts)
    }
}

trait ModelFig1 {
    fn fig1_product(&self, budget: &Budget) -> Result<(Lts, Vec<Fig1State>)>;
}

impl<M: Model> ModelFig1 for M {
    fn fig1_product(&self, budget: &Budget) -> Result<(Lts, Vec<Fig1State>)> {
        let program = Fig1Program;
        let product = Product::program_object(&program, self)?;
        let exp = explore(&product, budget)?;
        let programs = exp.states.iter().map(|(p, _)| p.clone()).collect();
        Ok((exp.lts, programs))
    }
}

/// Typed snapshot pair for the built-in relation.
pub fn snapshot_pair_with_relation(
    params: &ObjectParams,
    budget: &Budget,
) -> Result<(Lts, Lts, conch::fsim::SimRelation)> {
    let cfg = snapshot_cfg(params);
    let imp = SnapshotImpl::new(cfg.clone());
    let spec = SnapshotSpec::new(cfg, params.snap_bound);
    let imp_exp = explore(&imp, budget)?;
    let spec_exp = explore(&spec, budget)?;
    let rel = conch::fsim::snapshot_relation(params.n, &imp_exp, &spec_exp);
    Ok((imp_exp.lts, spec_exp.lts, rel))
}
