//! Properties of the simulation engine: soundness against bounded
//! refinement, maximality of the fixpoint, locality over disjoint
//! compositions, and certified instantiation by relation composition.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use conch::error::Budget;
use conch::fsim::{check_fsim, compose_relations, fsim_exists, SimRelation, WeakSteps};
use conch::lts::{Lts, StateId};
use conch::model::{explore, product_lts, LtsModel, Model, Product, SyncPolicy};
use conch::objects::atomic::AtomicModel;
use conch::objects::linpoint::LinPointObject;
use conch::objects::seqspec::{CounterSpec, RegisterSpec};
use conch::refine::refines_bounded;
use conch::sampling::{random_lts, random_refining_pair};
use conch::stronglin::{fsim_from_witness, search_strong_lin_witness};
use conch::{Action, Gamma, OpId, Value};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn simulation_existence_implies_bounded_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let budget = Budget::default();
    let mut somes = 0;
    for i in 0..30 {
        let (concrete, abstraction) = random_refining_pair(&mut rng, 3, &format!("s{i}"));
        if let Some(rel) =
            fsim_exists(&concrete, &abstraction, &Gamma::CallReturn, &budget).unwrap()
        {
            somes += 1;
            assert!(check_fsim(&concrete, &abstraction, &rel).unwrap().is_ok());
            for depth in [4, 6, 8, 10, 12] {
                assert!(refines_bounded(
                    &LtsModel(&concrete),
                    &LtsModel(&abstraction),
                    &Gamma::CallReturn,
                    depth,
                    &budget
                )
                .unwrap()
                .holds());
            }
        }
    }
    assert!(somes > 10, "padding construction should admit simulations");
}

/// Restrict a relation to its own reachable core: pairs reachable from
/// the initial pair following the relation's matched weak steps.
fn reachable_core(a1: &Lts, a2: &Lts, rel: &SimRelation) -> BTreeSet<(StateId, StateId)> {
    let gamma = rel.gamma.clone();
    let mut weak = WeakSteps::new(a2, &gamma);
    let mut by_left: HashMap<StateId, BTreeSet<StateId>> = HashMap::new();
    for (s1, s2) in &rel.pairs {
        by_left.entry(*s1).or_default().insert(*s2);
    }
    let root = (a1.initial(), a2.initial());
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some((s1, s2)) = stack.pop() {
        for (aid, t1) in a1.transitions_from(s1) {
            let action = a1.action(*aid).clone();
            for t2 in weak.weak(s2, &action) {
                if by_left.get(t1).is_some_and(|rs| rs.contains(&t2))
                    && seen.insert((*t1, t2))
                {
                    stack.push((*t1, t2));
                }
            }
        }
    }
    seen
}

#[test]
fn every_simulation_embeds_into_the_fixpoint() {
    let budget = Budget::default();

    // Identity relations on objects simulate themselves.
    let object = LinPointObject::new(RegisterSpec::new(vec![0, 1]), 2);
    let exp = explore(&object, &budget).unwrap();
    let mut identity = SimRelation::new(Gamma::CallReturn);
    for s in exp.lts.state_ids() {
        identity.pairs.insert((s, s));
    }
    assert!(check_fsim(&exp.lts, &exp.lts, &identity).unwrap().is_ok());
    let fixpoint = fsim_exists(&exp.lts, &exp.lts, &Gamma::CallReturn, &budget)
        .unwrap()
        .unwrap();
    for pair in reachable_core(&exp.lts, &exp.lts, &identity) {
        assert!(fixpoint.pairs.contains(&pair), "identity pair {pair:?} missing");
    }

    // The hand-written snapshot relation embeds into its fixpoint.
    use conch::fsim::snapshot_relation;
    use conch::objects::snapshot::{SnapshotCfg, SnapshotImpl, SnapshotSpec};
    let cfg = SnapshotCfg {
        n: 2,
        values: vec![0, 1],
        updaters: 1,
        updates_each: 1,
        scanners: 1,
        scans_each: 1,
    };
    let imp = explore(&SnapshotImpl::new(cfg.clone()), &budget).unwrap();
    let spec = explore(&SnapshotSpec::new(cfg, 2), &budget).unwrap();
    let rel = snapshot_relation(2, &imp, &spec);
    assert!(check_fsim(&imp.lts, &spec.lts, &rel).unwrap().is_ok());
    let fixpoint = fsim_exists(&imp.lts, &spec.lts, &Gamma::CallReturn, &budget)
        .unwrap()
        .unwrap();
    for pair in reachable_core(&imp.lts, &spec.lts, &rel) {
        assert!(fixpoint.pairs.contains(&pair), "snapshot pair {pair:?} missing");
    }
}

#[test]
fn locality_over_disjoint_compositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let budget = Budget::default();
    let mut seen = BTreeMap::from([(false, 0u32), (true, 0u32)]);
    for i in 0..100 {
        // Left pair over one alphabet; right pair over a disjoint one.
        // Half the samples pad (likely simulation), half are independent.
        let (o1, o2) = if i % 2 == 0 {
            random_refining_pair(&mut rng, 3, &format!("la{i}"))
        } else {
            (
                random_lts(&mut rng, 3, &format!("la{i}"), 0.5),
                random_lts(&mut rng, 3, &format!("la{i}"), 0.5),
            )
        };
        let (o1p, o2p) = if i % 3 == 0 {
            random_refining_pair(&mut rng, 3, &format!("lb{i}"))
        } else {
            (
                random_lts(&mut rng, 3, &format!("lb{i}"), 0.5),
                random_lts(&mut rng, 3, &format!("lb{i}"), 0.5),
            )
        };
        let left = fsim_exists(&o1, &o2, &Gamma::CallReturn, &budget).unwrap().is_some();
        let right = fsim_exists(&o1p, &o2p, &Gamma::CallReturn, &budget).unwrap().is_some();
        let p1 = product_lts(&o1, &o1p, &budget).unwrap();
        let p2 = product_lts(&o2, &o2p, &budget).unwrap();
        let composed = fsim_exists(&p1, &p2, &Gamma::CallReturn, &budget).unwrap();
        assert_eq!(
            composed.is_some(),
            left && right,
            "locality failed on sample {i} (left={left}, right={right})"
        );
        *seen.entry(composed.is_some()).or_default() += 1;
    }
    assert!(seen[&true] > 5 && seen[&false] > 5, "both outcomes must occur: {seen:?}");
}

#[test]
fn composition_of_certified_simulations_is_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let budget = Budget::default();
    let mut count = 0;
    for i in 0..50 {
        let (a, b) = random_refining_pair(&mut rng, 3, &format!("c{i}"));
        // Pad b once more to get a third layer.
        let (_, c) = {
            let doc = b.to_doc();
            let mut doc2 = doc.clone();
            let pad = Action::internal(format!("c{i}.pad2"));
            for st in doc.states.iter().take(2) {
                doc2.transitions.push(conch::lts::TransitionDoc {
                    from: st.clone(),
                    action: conch::action::ActionDoc::from_action(&pad),
                    to: st.clone(),
                });
            }
            (b.clone(), Lts::from_doc(&doc2).unwrap())
        };
        let f1 = fsim_exists(&a, &b, &Gamma::CallReturn, &budget).unwrap();
        let f2 = fsim_exists(&b, &c, &Gamma::CallReturn, &budget).unwrap();
        if let (Some(f1), Some(f2)) = (f1, f2) {
            let f = compose_relations(&f1, &f2).unwrap();
            assert!(check_fsim(&a, &c, &f).unwrap().is_ok(), "sample {i}");
            count += 1;
        }
    }
    assert!(count > 20);
}

/// Instantiation: a counter context over an abstract register, the
/// register instantiated with a padded implementation, certified end to
/// end by lifting the base simulation and composing with the context's.
#[test]
fn instantiation_certified_by_composition() {
    let budget = Budget::default();
    let reg_spec = RegisterSpec::new(vec![0, 1]);

    // Base: a padded register implementation and its specification
    // object; the simulation comes from a strong-linearizability witness.
    let base_impl = LinPointObject::new(reg_spec.clone(), 2)
        .with_padding(1)
        .with_namespace("regimpl");
    let base_spec_model = AtomicModel::new(reg_spec.clone(), 2).with_namespace("regspec");
    let impl_exp = explore(&base_impl, &budget).unwrap();
    let spec_exp = explore(&base_spec_model, &budget).unwrap();
    let witness = search_strong_lin_witness(&impl_exp, &reg_spec, 12, &budget)
        .unwrap()
        .expect("fixed linearization points admit a witness");
    let f_base =
        fsim_from_witness(&impl_exp, &base_spec_model, &spec_exp, &witness, 12).unwrap();
    assert!(check_fsim(&impl_exp.lts, &spec_exp.lts, &f_base).unwrap().is_ok());

    // Context: a counter whose inc reads the register and writes the
    // increment; one counter client op at a time. The counter interface is
    // the observable alphabet; base-register calls and returns are
    // internal to the composition.
    let context = CounterContext;
    let gamma_counter = Gamma::Actions(counter_interface());
    let po_impl = {
        let p = Product::new(&context, &base_impl, SyncPolicy::SharedAlphabet).unwrap();
        explore(&p, &budget).unwrap()
    };
    let po_spec = {
        let p = Product::new(&context, &base_spec_model, SyncPolicy::SharedAlphabet).unwrap();
        explore(&p, &budget).unwrap()
    };

    // Lift the base simulation with the identity on the context.
    let impl_ids = impl_exp.id_map();
    let spec_ids = spec_exp.id_map();
    let mut lifted = SimRelation::new(Gamma::CallReturn);
    for (i, (c1, r1)) in po_impl.states.iter().enumerate() {
        for (j, (c2, r2)) in po_spec.states.iter().enumerate() {
            if c1 == c2 && f_base.contains(impl_ids[r1], spec_ids[r2]) {
                lifted.pairs.insert((StateId(i as u32), StateId(j as u32)));
            }
        }
    }
    assert!(check_fsim(&po_impl.lts, &po_spec.lts, &lifted).unwrap().is_ok());

    // A call/return simulation is in particular a simulation for the
    // smaller counter interface; re-tag the lifted relation for it.
    let lifted_counter = SimRelation { gamma: gamma_counter.clone(), pairs: lifted.pairs.clone() };
    assert!(check_fsim(&po_impl.lts, &po_spec.lts, &lifted_counter).unwrap().is_ok());

    // The context over the register specification strongly refines the
    // atomic counter at the counter interface.
    let counter = AtomicModel::new(CounterSpec { max: 2 }, CTX_MAX_OPS).with_namespace("counter");
    let counter_exp = explore(&counter, &budget).unwrap();
    let f_ctx = fsim_exists(&po_spec.lts, &counter_exp.lts, &gamma_counter, &budget)
        .unwrap()
        .expect("sequentialized counter context refines the atomic counter");

    // Composition certifies the instantiation.
    let f_inst = compose_relations(&lifted_counter, &f_ctx).unwrap();
    assert!(check_fsim(&po_impl.lts, &counter_exp.lts, &f_inst).unwrap().is_ok());
}

/// The counter's own calls and returns; base register actions excluded.
fn counter_interface() -> BTreeSet<Action> {
    let mut out = BTreeSet::new();
    for op in 1..=CTX_MAX_OPS {
        out.insert(Action::call("inc", Value::Unit, op));
        out.insert(Action::ret("inc", Value::ok(), op));
        out.insert(Action::call("get", Value::Unit, op));
        for v in 0..=2 {
            out.insert(Action::ret("get", Value::Int(v), op));
        }
    }
    out
}

/// Counter methods implemented over a base register: `inc` reads the
/// register and writes the incremented value; `get` reads it. One pending
/// counter operation at a time; counter identifiers live in their own
/// range so they never collide with base-register identifiers.
#[derive(Clone)]
struct CounterContext;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct CtxState {
    ops_done: u32,
    base_ops: u32,
    frame: Option<CtxFrame>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
enum CtxFrame {
    // inc: read the register, then write value+1, then return OK.
    IncReadCall { op: u32 },
    IncReadWait { op: u32, base: u32 },
    IncWriteCall { op: u32, seen: i64 },
    IncWriteWait { op: u32, base: u32, seen: i64 },
    IncDone { op: u32 },
    // get: read the register, return its value.
    GetReadCall { op: u32 },
    GetReadWait { op: u32, base: u32 },
    GetDone { op: u32, value: i64 },
}

const CTX_MAX_OPS: u32 = 1;
const CTX_OP_BASE: u32 = 0;

impl Model for CounterContext {
    type State = CtxState;

    fn initial_state(&self) -> CtxState {
        CtxState { ops_done: 0, base_ops: 0, frame: None }
    }

    fn successors(&self, s: &CtxState) -> Vec<(Action, CtxState)> {
        let mut out = Vec::new();
        match &s.frame {
            None => {
                if s.ops_done < CTX_MAX_OPS {
                    let op = CTX_OP_BASE + s.ops_done + 1;
                    for (frame, method) in [
                        (CtxFrame::IncReadCall { op }, "inc"),
                        (CtxFrame::GetReadCall { op }, "get"),
                    ] {
                        let mut next = s.clone();
                        next.frame = Some(frame);
                        out.push((Action::call(method, Value::Unit, op), next));
                    }
                }
            }
            Some(CtxFrame::IncReadCall { op }) => {
                let base = s.base_ops + 1;
                let mut next = s.clone();
                next.base_ops = base;
                next.frame = Some(CtxFrame::IncReadWait { op: *op, base });
                out.push((Action::call("read", Value::Unit, base), next));
            }
            Some(CtxFrame::IncReadWait { op, base }) => {
                for v in [0, 1] {
                    let mut next = s.clone();
                    next.frame = Some(CtxFrame::IncWriteCall { op: *op, seen: v });
                    out.push((Action::ret("read", Value::Int(v), *base), next));
                }
            }
            Some(CtxFrame::IncWriteCall { op, seen }) => {
                let base = s.base_ops + 1;
                let target = (*seen + 1).min(1); // register domain is {0, 1}
                let mut next = s.clone();
                next.base_ops = base;
                next.frame = Some(CtxFrame::IncWriteWait { op: *op, base, seen: target });
                out.push((Action::call("write", Value::Int(target), base), next));
            }
            Some(CtxFrame::IncWriteWait { op, base, .. }) => {
                let mut next = s.clone();
                next.frame = Some(CtxFrame::IncDone { op: *op });
                out.push((Action::ret("write", Value::ok(), *base), next));
            }
            Some(CtxFrame::IncDone { op }) => {
                let mut next = s.clone();
                next.frame = None;
                next.ops_done += 1;
                out.push((Action::ret("inc", Value::ok(), *op), next));
            }
            Some(CtxFrame::GetReadCall { op }) => {
                let base = s.base_ops + 1;
                let mut next = s.clone();
                next.base_ops = base;
                next.frame = Some(CtxFrame::GetReadWait { op: *op, base });
                out.push((Action::call("read", Value::Unit, base), next));
            }
            Some(CtxFrame::GetReadWait { op, base }) => {
                for v in [0, 1] {
                    let mut next = s.clone();
                    next.frame = Some(CtxFrame::GetDone { op: *op, value: v });
                    out.push((Action::ret("read", Value::Int(v), *base), next));
                }
            }
            Some(CtxFrame::GetDone { op, value }) => {
                let mut next = s.clone();
                next.frame = None;
                next.ops_done += 1;
                out.push((Action::ret("get", Value::Int(*value), *op), next));
            }
        }
        out
    }

    fn state_name(&self, s: &CtxState) -> String {
        format!("ctx {s:?}")
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        // Base-register interface (shared with the base object).
        for k in 1..=2 {
            out.insert(Action::call("read", Value::Unit, k));
            out.insert(Action::call("write", Value::Int(0), k));
            out.insert(Action::call("write", Value::Int(1), k));
            out.insert(Action::ret("write", Value::ok(), k));
            for v in [0, 1] {
                out.insert(Action::ret("read", Value::Int(v), k));
            }
        }
        // Counter interface (private at this level).
        for op in CTX_OP_BASE + 1..=CTX_OP_BASE + CTX_MAX_OPS {
            out.insert(Action::call("inc", Value::Unit, op));
            out.insert(Action::ret("inc", Value::ok(), op));
            out.insert(Action::call("get", Value::Unit, op));
            for v in 0..=2 {
                out.insert(Action::ret("get", Value::Int(v), op));
            }
        }
        out
    }
}
