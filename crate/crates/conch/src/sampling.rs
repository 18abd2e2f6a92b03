//! Random model and strategy generation for the property suites.
//!
//! Everything is driven by a caller-supplied RNG so suites can pin seeds
//! and stay reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::prelude::*;

use crate::action::{Action, OpId, Value};
use crate::error::{Budget, Result};
use crate::history::History;
use crate::lts::{Lts, StateId};
use crate::objects::client::ClientProgram;
use crate::objects::seqspec::SeqSpec;
use crate::sched::{Decision, StateStrategy};

/// A small random LTS over one method's call/return actions plus a few
/// namespaced internal labels. Deterministic per label by construction;
/// every state is reachable only if the draw happens to connect it, which
/// is fine for the property suites.
pub fn random_lts(rng: &mut impl Rng, states: usize, namespace: &str, density: f64) -> Lts {
    let names: Vec<String> = (0..states).map(|i| format!("{namespace}.s{i}")).collect();
    let mut actions = vec![
        Action::Call { method: format!("m_{namespace}"), value: Value::Unit, op: crate::action::OpId(1) },
        Action::Ret { method: format!("m_{namespace}"), value: Value::ok(), op: crate::action::OpId(1) },
    ];
    for l in 0..2 {
        actions.push(Action::internal(format!("{namespace}.i{l}")));
    }
    let mut transitions = Vec::new();
    for from in &names {
        for action in &actions {
            if rng.gen_bool(density) {
                let to = &names[rng.gen_range(0..states)];
                transitions.push((from.clone(), action.clone(), to.clone()));
            }
        }
    }
    let alphabet: BTreeSet<Action> = actions.into_iter().collect();
    Lts::from_parts(names.clone(), &names[0], transitions, alphabet).expect("states declared")
}

/// A pair (concrete, abstract) guaranteed to admit a forward simulation:
/// the abstract side is the concrete one with an extra internal stutter
/// label glued onto some states.
pub fn random_refining_pair(rng: &mut impl Rng, states: usize, namespace: &str) -> (Lts, Lts) {
    let concrete = random_lts(rng, states, namespace, 0.5);
    let doc = concrete.to_doc();
    let mut abs_doc = doc.clone();
    let pad = Action::internal(format!("{namespace}.pad"));
    for i in 0..abs_doc.states.len() {
        if rng.gen_bool(0.5) {
            let from = abs_doc.states[i].clone();
            abs_doc.transitions.push(crate::lts::TransitionDoc {
                from: from.clone(),
                action: crate::action::ActionDoc::from_action(&pad),
                to: from,
            });
        }
    }
    let abstraction = Lts::from_doc(&abs_doc).expect("valid document");
    (concrete, abstraction)
}

/// Random straight-line snapshot clients: one or two threads, each with
/// one or two update/scan calls, observing every return.
pub fn random_snapshot_client(rng: &mut impl Rng, n: usize, values: &[i64]) -> ClientProgram {
    let mut returns: BTreeMap<String, Vec<Value>> = BTreeMap::new();
    returns.insert("update".to_string(), vec![Value::ok()]);
    let mut arrays = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &arrays {
            for &v in values {
                let mut arr: Vec<i64> = prefix.clone();
                arr.push(v);
                next.push(arr);
            }
        }
        arrays = next;
    }
    returns.insert("scan".to_string(), arrays.iter().map(|a| Value::ints(a)).collect());

    let threads = rng.gen_range(1..=2);
    let mut ops_left = 3usize;
    let mut thread_ops = Vec::new();
    for _ in 0..threads {
        let count = rng.gen_range(1..=2.min(ops_left));
        ops_left -= count;
        let mut ops = Vec::new();
        for _ in 0..count {
            if rng.gen_bool(0.5) {
                let i = rng.gen_range(1..=n) as i64;
                let d = values[rng.gen_range(0..values.len())];
                ops.push(("update".to_string(), Value::pair(i, d)));
            } else {
                ops.push(("scan".to_string(), Value::Unit));
            }
        }
        thread_ops.push(ops);
    }
    ClientProgram { threads: thread_ops, returns, observe: true }
}

/// Every well-formed history over a specification's call and return
/// domains with at most `max_events` actions and at most `max_pending`
/// simultaneously pending operations. Operation identifiers are assigned
/// in call order, so each history shape appears exactly once. The empty
/// history is included.
pub fn enumerate_histories<S: SeqSpec>(
    spec: &S,
    max_events: usize,
    max_pending: usize,
    budget: &Budget,
) -> Result<Vec<History>> {
    let calls = spec.calls();
    let mut out = vec![History::empty()];
    // (events, pending ops as (op, method), ops started)
    let mut stack: Vec<(Vec<Action>, Vec<(OpId, String)>, u32)> = vec![(Vec::new(), Vec::new(), 0)];
    while let Some((events, pending, started)) = stack.pop() {
        if events.len() >= max_events {
            continue;
        }
        if pending.len() < max_pending {
            for (method, arg) in &calls {
                let k = OpId(started + 1);
                let mut ev = events.clone();
                ev.push(Action::Call { method: method.clone(), value: arg.clone(), op: k });
                let mut pend = pending.clone();
                pend.push((k, method.clone()));
                out.push(History::new(ev.clone()).expect("fresh call keeps well-formedness"));
                budget.charge_trace(out.len())?;
                stack.push((ev, pend, started + 1));
            }
        }
        for (i, (k, method)) in pending.iter().enumerate() {
            for value in spec.returns(method) {
                let mut ev = events.clone();
                ev.push(Action::Ret { method: method.clone(), value, op: *k });
                let mut pend = pending.clone();
                pend.remove(i);
                out.push(History::new(ev.clone()).expect("matched return keeps well-formedness"));
                budget.charge_trace(out.len())?;
                stack.push((ev, pend, started));
            }
        }
    }
    Ok(out)
}

/// A random admitted deterministic scheduler over a product: walk the
/// states reachable under the choices made so far, picking uniformly
/// among yielding (when a program action is enabled) and each enabled
/// object action.
pub fn random_strategy(lts: &Lts, rng: &mut impl Rng, budget: &Budget) -> Result<StateStrategy> {
    let mut strategy = StateStrategy::default();
    let mut queue = VecDeque::from([lts.initial()]);
    let mut seen: BTreeSet<StateId> = BTreeSet::from([lts.initial()]);
    while let Some(state) = queue.pop_front() {
        budget.charge_state(strategy.decisions.len() + 1)?;
        let transitions = lts.transitions_from(state);
        if transitions.is_empty() {
            continue;
        }
        let mut options: Vec<Decision> = Vec::new();
        let mut object_actions: Vec<Action> = Vec::new();
        let mut has_program = false;
        for (aid, _) in transitions {
            let a = lts.action(*aid);
            if a.is_program() {
                has_program = true;
            } else if !object_actions.contains(a) {
                object_actions.push(a.clone());
            }
        }
        if has_program {
            options.push(Decision::Yield);
        }
        options.extend(object_actions.into_iter().map(Decision::Pick));
        let decision = options[rng.gen_range(0..options.len())].clone();

        let followed: Vec<StateId> = transitions
            .iter()
            .filter(|(aid, _)| match &decision {
                Decision::Yield => lts.action(*aid).is_program(),
                Decision::Pick(b) => lts.action(*aid) == b,
                Decision::Offer(set) => set.contains(lts.action(*aid)),
            })
            .map(|(_, t)| *t)
            .collect();
        strategy.decisions.insert(state, decision);
        for t in followed {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    Ok(strategy)
}
