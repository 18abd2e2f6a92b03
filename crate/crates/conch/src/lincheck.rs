//! Linearizability of histories.
//!
//! A history `h1` linearizes to a sequential history `h2` when `h1` can be
//! completed — appending returns for unmatched calls, or deleting them —
//! into `h1'` such that `h2` is a permutation of `h1'` preserving every
//! return-before-call ordering. [`linearizes`] validates a candidate pair;
//! [`is_linearizable`] searches for a linearization against a sequential
//! specification by firing pending operations atomically, backtracking
//! over linearization orders and completion choices.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::{Action, OpId, Value};
use crate::error::{Error, Result};
use crate::history::History;
use crate::objects::seqspec::SeqSpec;

/// Evidence that a history linearizes: the completed and pruned history,
/// and the sequential witness itself (a permutation of the completion).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinWitness {
    pub completed: History,
    /// Operation identifiers of `witness` in order.
    pub order: Vec<OpId>,
    pub witness: History,
}

/// `(j, k)` pairs where operation j returned before operation k was
/// called: the real-time orders a linearization must preserve.
fn precedence(h: &History) -> Vec<(OpId, OpId)> {
    let ops = h.ops();
    let mut out = Vec::new();
    for (k, info) in &ops {
        for (j, other) in &ops {
            if let Some((_, ret_idx)) = &other.ret {
                if *ret_idx < info.call_idx {
                    out.push((*j, *k));
                }
            }
        }
    }
    out
}

/// Check `h1 ⊑ h2` for a given sequential `h2`: operations are matched by
/// identifier, unmatched calls of `h1` are completed when they appear in
/// `h2` and deleted otherwise, and every return-before-call order of `h1`
/// must be preserved by the operation order of `h2`.
pub fn linearizes(h1: &History, h2: &History) -> Result<Option<LinWitness>> {
    if !h2.is_sequential() {
        return Err(Error::invalid("linearization witness must be sequential"));
    }
    let ops1 = h1.ops();
    let ops2 = h2.ops();

    // h2 must consist of exactly the matched operations of h1 plus any
    // subset of its unmatched calls, with identical methods, arguments
    // and (for matched operations) return values.
    for (k, info1) in &ops1 {
        match ops2.get(k) {
            Some(info2) => {
                if info1.method != info2.method || info1.arg != info2.arg {
                    return Ok(None);
                }
                match (&info1.ret, &info2.ret) {
                    (Some((v1, _)), Some((v2, _))) if v1 == v2 => {}
                    (None, Some(_)) => {} // completion
                    _ => return Ok(None),
                }
            }
            None => {
                if info1.ret.is_some() {
                    return Ok(None); // matched operations cannot be deleted
                }
            }
        }
    }
    if ops2.keys().any(|k| !ops1.contains_key(k)) {
        return Ok(None);
    }

    // Order of operations in h2, by position.
    let mut order: Vec<OpId> = Vec::new();
    for a in h2.actions() {
        if a.is_call() {
            order.push(a.op_id().expect("calls carry identifiers"));
        }
    }
    let pos: BTreeMap<OpId, usize> = order.iter().enumerate().map(|(i, k)| (*k, i)).collect();

    // Return-before-call orders of h1 restricted to surviving operations.
    for (j, k) in precedence(h1) {
        if let (Some(pj), Some(pk)) = (pos.get(&j), pos.get(&k)) {
            if pj >= pk {
                return Ok(None);
            }
        }
    }

    // Build the completion: h1 without deleted calls, plus appended
    // returns (in identifier order) for completed calls.
    let mut completed: Vec<Action> = Vec::new();
    for a in h1.actions() {
        let k = a.op_id().expect("history actions carry identifiers");
        if ops2.contains_key(&k) {
            completed.push(a.clone());
        }
    }
    for (k, info1) in &ops1 {
        if info1.ret.is_none() {
            if let Some(info2) = ops2.get(k) {
                let (v, _) = info2.ret.clone().expect("h2 is sequential and complete");
                completed.push(Action::Ret { method: info1.method.clone(), value: v, op: *k });
            }
        }
    }
    Ok(Some(LinWitness {
        completed: History::new(completed)?,
        order,
        witness: h2.clone(),
    }))
}

/// Search for a sequential history of `spec` that `h` linearizes to.
///
/// The search walks `h` event by event, maintaining the specification
/// state along the linearization built so far. A call registers a pending
/// operation; a return requires its operation to have been linearized
/// with the matching value, and otherwise branches over linearizing
/// pending operations (in identifier order, so the first witness found is
/// canonical). At the end, still-pending calls are either linearized
/// (completion) or dropped (deletion), trying completion first.
pub fn is_linearizable<S: SeqSpec>(h: &History, spec: &S) -> Result<Option<LinWitness>> {
    let events: Vec<&Action> = h.actions().iter().collect();
    let mut pending: BTreeMap<OpId, (String, Value)> = BTreeMap::new();
    let mut lin: Vec<(OpId, String, Value, Value)> = Vec::new();
    let found = search(spec, &events, 0, &spec.initial(), &mut pending, &mut lin)?;
    match found {
        None => Ok(None),
        Some(order) => {
            let mut witness_actions = Vec::new();
            for (k, m, arg, ret) in &order {
                witness_actions.push(Action::Call { method: m.clone(), value: arg.clone(), op: *k });
                witness_actions.push(Action::Ret { method: m.clone(), value: ret.clone(), op: *k });
            }
            let witness = History::new(witness_actions)?;
            linearizes(h, &witness)
        }
    }
}

type LinOrder = Vec<(OpId, String, Value, Value)>;

fn search<S: SeqSpec>(
    spec: &S,
    events: &[&Action],
    idx: usize,
    state: &S::State,
    pending: &mut BTreeMap<OpId, (String, Value)>,
    lin: &mut LinOrder,
) -> Result<Option<LinOrder>> {
    if idx == events.len() {
        // Completion phase: linearize any subset of the pending calls, in
        // any order; deletion is the fallback. Trying "linearize" before
        // "stop" prefers completion over deletion.
        return Ok(Some(complete(spec, state, pending, lin)));
    }
    match events[idx] {
        Action::Call { method, value, op } => {
            pending.insert(*op, (method.clone(), value.clone()));
            let r = search(spec, events, idx + 1, state, pending, lin)?;
            pending.remove(op);
            Ok(r)
        }
        Action::Ret { value, op, .. } => {
            if let Some((_, _, _, committed)) = lin.iter().find(|(k, ..)| k == op) {
                // Already linearized: the committed value must agree.
                if committed == value {
                    return search(spec, events, idx + 1, state, pending, lin);
                }
                return Ok(None);
            }
            // Not linearized yet: some pending operations linearize now,
            // ending with this one. Branch in identifier order.
            let candidates: Vec<OpId> = pending.keys().copied().collect();
            for k in candidates {
                let (m, arg) = pending.get(&k).expect("candidate is pending").clone();
                let (next_state, ret) = spec.apply(state, &m, &arg);
                if k == *op && &ret != value {
                    continue;
                }
                pending.remove(&k);
                lin.push((k, m.clone(), arg.clone(), ret));
                let r = if k == *op {
                    search(spec, events, idx + 1, &next_state, pending, lin)?
                } else {
                    search(spec, events, idx, &next_state, pending, lin)?
                };
                lin.pop();
                pending.insert(k, (m, arg));
                if r.is_some() {
                    return Ok(r);
                }
            }
            Ok(None)
        }
        other => Err(Error::IllFormedHistory(format!("unexpected action {other}"))),
    }
}

/// Extend the linearization with every still-pending operation, in
/// identifier order. Any subset would do; taking all of them (completion
/// before deletion) is the canonical choice and always succeeds because
/// appended returns are unconstrained.
fn complete<S: SeqSpec>(
    spec: &S,
    state: &S::State,
    pending: &BTreeMap<OpId, (String, Value)>,
    lin: &LinOrder,
) -> LinOrder {
    let mut order = lin.clone();
    let mut st = state.clone();
    for (k, (m, arg)) in pending {
        let (next, ret) = spec.apply(&st, m, arg);
        order.push((*k, m.clone(), arg.clone(), ret));
        st = next;
    }
    order
}

/// Brute-force reference: enumerate completions (per unmatched call:
/// delete it, or append a return with each value in the method's declared
/// domain) and all permutations, filter those preserving
/// return-before-call order, and validate against the specification by
/// replay. Exists to cross-check the backtracking search; exponential.
pub fn brute_force_linearizable<S: SeqSpec>(h: &History, spec: &S) -> Result<bool> {
    let ops = h.ops();
    let unmatched: Vec<OpId> = ops.iter().filter(|(_, o)| o.ret.is_none()).map(|(k, _)| *k).collect();

    // Enumerate completion choices: 0 = delete, i > 0 = i-th return value.
    let choice_domains: Vec<Vec<Option<Value>>> = unmatched
        .iter()
        .map(|k| {
            let method = &ops[k].method;
            let mut choices = vec![None];
            for v in spec.returns(method) {
                choices.push(Some(v));
            }
            choices
        })
        .collect();

    let mut choice = vec![0usize; unmatched.len()];
    loop {
        // Operations surviving this completion, with their return values.
        let mut survivors: Vec<(OpId, String, Value, Value)> = Vec::new();
        for (k, info) in &ops {
            match &info.ret {
                Some((v, _)) => survivors.push((*k, info.method.clone(), info.arg.clone(), v.clone())),
                None => {
                    let pos = unmatched.iter().position(|u| u == k).expect("unmatched");
                    match &choice_domains[pos][choice[pos]] {
                        None => {}
                        Some(v) => {
                            survivors.push((*k, info.method.clone(), info.arg.clone(), v.clone()))
                        }
                    }
                }
            }
        }
        if permutation_exists(spec, h, &survivors)? {
            return Ok(true);
        }
        // Next completion choice.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(false);
            }
            choice[i] += 1;
            if choice[i] < choice_domains[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn permutation_exists<S: SeqSpec>(
    spec: &S,
    h: &History,
    survivors: &[(OpId, String, Value, Value)],
) -> Result<bool> {
    let surviving: BTreeSet<OpId> = survivors.iter().map(|(k, ..)| *k).collect();
    let prec: Vec<(OpId, OpId)> = precedence(h)
        .into_iter()
        .filter(|(j, k)| surviving.contains(j) && surviving.contains(k))
        .collect();
    let mut used = vec![false; survivors.len()];
    let mut order = Vec::new();
    Ok(permute(spec, &spec.initial(), survivors, &prec, &mut used, &mut order))
}

fn permute<S: SeqSpec>(
    spec: &S,
    state: &S::State,
    survivors: &[(OpId, String, Value, Value)],
    prec: &[(OpId, OpId)],
    used: &mut Vec<bool>,
    order: &mut Vec<OpId>,
) -> bool {
    if order.len() == survivors.len() {
        return true;
    }
    for i in 0..survivors.len() {
        if used[i] {
            continue;
        }
        let (k, m, arg, ret) = &survivors[i];
        // Order preservation: everything that must precede k is placed.
        if prec.iter().any(|(j, kk)| kk == k && !order.contains(j)) {
            continue;
        }
        let (next, actual) = spec.apply(state, m, arg);
        if &actual != ret {
            continue;
        }
        used[i] = true;
        order.push(*k);
        if permute(spec, &next, survivors, prec, used, order) {
            return true;
        }
        order.pop();
        used[i] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::seqspec::StackSpec;

    fn stack() -> StackSpec {
        StackSpec { values: vec![1, 2] }
    }

    fn hist(actions: Vec<Action>) -> History {
        History::new(actions).unwrap()
    }

    #[test]
    fn complete_sequential_history_linearizes_to_itself() {
        let h = hist(vec![
            Action::call("push", Value::Int(1), 1),
            Action::ret("push", Value::ok(), 1),
            Action::call("pop", Value::Unit, 2),
            Action::ret("pop", Value::Int(1), 2),
        ]);
        let w = linearizes(&h, &h).unwrap().unwrap();
        assert_eq!(w.order, vec![OpId(1), OpId(2)]);
        assert_eq!(w.completed, h);
    }

    #[test]
    fn overlapping_ops_may_be_ordered_push_first() {
        let h1 = hist(vec![
            Action::call("push", Value::Int(2), 3),
            Action::call("pop", Value::Unit, 4),
            Action::ret("push", Value::ok(), 3),
            Action::ret("pop", Value::Int(2), 4),
        ]);
        let h2 = hist(vec![
            Action::call("push", Value::Int(2), 3),
            Action::ret("push", Value::ok(), 3),
            Action::call("pop", Value::Unit, 4),
            Action::ret("pop", Value::Int(2), 4),
        ]);
        assert!(linearizes(&h1, &h2).unwrap().is_some());
    }

    #[test]
    fn completed_pop_empty_after_push_does_not_linearize() {
        let h = hist(vec![
            Action::call("push", Value::Int(1), 1),
            Action::ret("push", Value::ok(), 1),
            Action::call("pop", Value::Unit, 2),
            Action::ret("pop", Value::empty(), 2),
        ]);
        assert!(is_linearizable(&h, &stack()).unwrap().is_none());
        assert!(!brute_force_linearizable(&h, &stack()).unwrap());
    }

    #[test]
    fn empty_history_is_linearizable() {
        let w = is_linearizable(&History::empty(), &stack()).unwrap().unwrap();
        assert!(w.witness.is_empty());
    }

    #[test]
    fn register_read_misses_completed_write() {
        use crate::objects::seqspec::RegisterSpec;
        let reg = RegisterSpec::new(vec![0, 1]);
        let h = hist(vec![
            Action::call("write", Value::Int(1), 1),
            Action::ret("write", Value::ok(), 1),
            Action::call("read", Value::Unit, 2),
            Action::ret("read", Value::Int(0), 2),
        ]);
        assert!(is_linearizable(&h, &reg).unwrap().is_none());
        assert!(!brute_force_linearizable(&h, &reg).unwrap());
    }

    #[test]
    fn pending_call_may_be_completed() {
        // push(1) pending, pop returns 1: the push must linearize.
        let h = hist(vec![
            Action::call("push", Value::Int(1), 1),
            Action::call("pop", Value::Unit, 2),
            Action::ret("pop", Value::Int(1), 2),
        ]);
        let w = is_linearizable(&h, &stack()).unwrap().unwrap();
        assert_eq!(w.order, vec![OpId(1), OpId(2)]);
        assert!(brute_force_linearizable(&h, &stack()).unwrap());
    }

    #[test]
    fn pending_call_may_be_deleted() {
        // push(1) pending and never observed: deletion also works, but the
        // canonical witness completes it after the pop.
        let h = hist(vec![
            Action::call("push", Value::Int(1), 1),
            Action::call("pop", Value::Unit, 2),
            Action::ret("pop", Value::empty(), 2),
        ]);
        let w = is_linearizable(&h, &stack()).unwrap().unwrap();
        assert_eq!(w.order, vec![OpId(2), OpId(1)]);
        assert!(brute_force_linearizable(&h, &stack()).unwrap());
    }
}
