//! Strong-linearizability witnesses and their conversion to and from
//! forward simulations into the atomic object.
//!
//! A witness assigns to every node of an object's trace tree a legal
//! sequential history that linearizes the node's history, such that the
//! assignment is prefix-preserving along the tree. Such a witness exists
//! exactly when a call/return-forward simulation into the atomic object
//! exists; [`fsim_from_witness`] and [`witness_from_fsim`] realize the
//! two directions constructively.

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::action::{Action, Gamma};
use crate::error::{Budget, Error, Result};
use crate::fsim::{check_fsim, SimRelation, WeakSteps};
use crate::history::History;
use crate::lincheck::linearizes;
use crate::lts::StateId;
use crate::model::Exploration;
use crate::objects::atomic::{AtomicModel, AtomicState};
use crate::objects::seqspec::SeqSpec;

/// Prefix-preserving assignment of sequential histories to the nodes of a
/// bounded trace tree, keyed by the actions along each path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongLinWitness {
    pub root: WitnessNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessNode {
    pub linearization: History,
    pub children: BTreeMap<Action, WitnessNode>,
}

impl WitnessNode {
    pub fn leaf(linearization: History) -> WitnessNode {
        WitnessNode { linearization, children: BTreeMap::new() }
    }
}

impl StrongLinWitness {
    /// Look up the assignment of a trace, if covered.
    pub fn assignment(&self, trace: &[Action]) -> Option<&History> {
        let mut node = &self.root;
        for a in trace {
            node = node.children.get(a)?;
        }
        Some(&node.linearization)
    }

    pub fn node_count(&self) -> usize {
        fn count(n: &WitnessNode) -> usize {
            1 + n.children.values().map(count).sum::<usize>()
        }
        count(&self.root)
    }
}

/// Is a history a legal sequential history of the specification?
fn legal_sequential<S: SeqSpec>(spec: &S, h: &History) -> bool {
    if !h.is_sequential() {
        return false;
    }
    let mut st = spec.initial();
    let mut actions = h.actions().iter();
    while let Some(call) = actions.next() {
        let ret = actions.next().expect("sequential histories pair actions");
        match (call, ret) {
            (Action::Call { method, value, .. }, Action::Ret { value: rv, .. }) => {
                let (next, actual) = spec.apply(&st, method, value);
                if &actual != rv {
                    return false;
                }
                st = next;
            }
            _ => return false,
        }
    }
    true
}

/// Check both witness clauses at every node of the trace tree of the
/// explored object, up to `depth`: each assignment is a legal sequential
/// history that linearizes the node's history, and assignments extend
/// their parent's. A node the witness does not cover is an error, not a
/// `false`.
pub fn check_strong_lin_witness<S: SeqSpec, OS: Clone + Eq + std::hash::Hash + Ord>(
    object: &Exploration<OS>,
    spec: &S,
    witness: &StrongLinWitness,
    depth: usize,
) -> Result<bool> {
    struct Frame<'w> {
        state: StateId,
        node: &'w WitnessNode,
        hist: History,
        left: usize,
    }
    let mut stack = vec![Frame {
        state: object.lts.initial(),
        node: &witness.root,
        hist: History::empty(),
        left: depth,
    }];
    while let Some(Frame { state, node, hist, left }) = stack.pop() {
        if !legal_sequential(spec, &node.linearization) {
            return Ok(false);
        }
        if linearizes(&hist, &node.linearization)?.is_none() {
            return Ok(false);
        }
        if left == 0 {
            continue;
        }
        for (aid, target) in object.lts.transitions_from(state) {
            let action = object.lts.action(*aid).clone();
            let child = node.children.get(&action).ok_or_else(|| {
                Error::invalid(format!("witness does not cover action {action}"))
            })?;
            // Prefix preservation along the edge.
            let parent = node.linearization.actions();
            let extended = child.linearization.actions();
            if extended.len() < parent.len() || &extended[..parent.len()] != parent {
                return Ok(false);
            }
            let mut h = hist.clone();
            if action.is_interface() {
                h.push(action.clone())?;
            }
            stack.push(Frame { state: *target, node: child, hist: h, left: left - 1 });
        }
    }
    Ok(true)
}

/// Turn a checked witness into the forward simulation relating each
/// reached object state to the atomic state pairing the node's history
/// with its assigned linearization.
pub fn fsim_from_witness<S: SeqSpec, OS: Clone + Eq + std::hash::Hash + Ord>(
    object: &Exploration<OS>,
    atomic: &AtomicModel<S>,
    atomic_exp: &Exploration<AtomicState>,
    witness: &StrongLinWitness,
    depth: usize,
) -> Result<SimRelation> {
    if !check_strong_lin_witness(object, atomic.spec(), witness, depth)? {
        return Err(Error::invalid("assignment is not a strong-linearizability witness"));
    }
    let mut rel = SimRelation::new(Gamma::CallReturn);
    struct Frame<'w> {
        state: StateId,
        node: &'w WitnessNode,
        hist: History,
        left: usize,
    }
    let mut stack = vec![Frame {
        state: object.lts.initial(),
        node: &witness.root,
        hist: History::empty(),
        left: depth,
    }];
    while let Some(Frame { state, node, hist, left }) = stack.pop() {
        let atomic_state = AtomicState {
            h: hist.actions().to_vec(),
            hs: node.linearization.actions().to_vec(),
        };
        let name = atomic.name_of(&atomic_state);
        let sid = atomic_exp
            .lts
            .state(&name)
            .ok_or_else(|| Error::UnknownState(name))?;
        rel.pairs.insert((state, sid));
        if left == 0 {
            continue;
        }
        for (aid, target) in object.lts.transitions_from(state) {
            let action = object.lts.action(*aid).clone();
            let child = node.children.get(&action).expect("witness checked above");
            let mut h = hist.clone();
            if action.is_interface() {
                h.push(action.clone())?;
            }
            stack.push(Frame { state: *target, node: child, hist: h, left: left - 1 });
        }
    }
    Ok(rel)
}

/// Extract a witness from a forward simulation into the atomic object:
/// each node is assigned the linearization component of a related atomic
/// state, chosen consistently along the tree (following weak steps inside
/// the relation, least target first). Prefix preservation is automatic
/// because atomic transitions only extend the linearization.
pub fn witness_from_fsim<S: SeqSpec, OS: Clone + Eq + std::hash::Hash + Ord>(
    object: &Exploration<OS>,
    atomic: &AtomicModel<S>,
    atomic_exp: &Exploration<AtomicState>,
    rel: &SimRelation,
    depth: usize,
) -> Result<StrongLinWitness> {
    let _ = atomic;
    if check_fsim(&object.lts, &atomic_exp.lts, rel)?.is_err() {
        return Err(Error::invalid("relation is not a forward simulation"));
    }
    let gamma = rel.gamma.clone();
    let mut weak = WeakSteps::new(&atomic_exp.lts, &gamma);
    let mut by_left: HashMap<StateId, Vec<StateId>> = HashMap::new();
    for (s1, s2) in &rel.pairs {
        by_left.entry(*s1).or_default().push(*s2);
    }

    fn build<OS: Clone + Eq + std::hash::Hash + Ord>(
        object: &Exploration<OS>,
        atomic_exp: &Exploration<AtomicState>,
        weak: &mut WeakSteps<'_>,
        by_left: &HashMap<StateId, Vec<StateId>>,
        state: StateId,
        abstract_state: StateId,
        left: usize,
    ) -> Result<WitnessNode> {
        let hs = atomic_exp.state(abstract_state).hs.clone();
        let mut node = WitnessNode::leaf(History::new(hs)?);
        if left == 0 {
            return Ok(node);
        }
        for (aid, target) in object.lts.transitions_from(state) {
            let action = object.lts.action(*aid).clone();
            let related = by_left.get(target).cloned().unwrap_or_default();
            let landed = weak.weak(abstract_state, &action);
            // Least landing target related to the successor; existence is
            // guaranteed by the simulation property.
            let next_abstract = landed
                .iter()
                .find(|q| related.contains(q))
                .copied()
                .ok_or_else(|| {
                    Error::invalid(format!("no related weak match for action {action}"))
                })?;
            let child = build(object, atomic_exp, weak, by_left, *target, next_abstract, left - 1)?;
            node.children.insert(action, child);
        }
        Ok(node)
    }

    let root = build(
        object,
        atomic_exp,
        &mut weak,
        &by_left,
        object.lts.initial(),
        atomic_exp.lts.initial(),
        depth,
    )?;
    Ok(StrongLinWitness { root })
}

/// Exhaustive search for a strong-linearizability witness over the trace
/// tree up to `depth`, independent of the simulation machinery: at each
/// edge the parent's linearization is extended by a (possibly empty)
/// sequence of pending operations, trying shorter extensions and smaller
/// identifiers first. Exponential; intended for small bounded objects.
pub fn search_strong_lin_witness<S: SeqSpec, OS: Clone + Eq + std::hash::Hash + Ord>(
    object: &Exploration<OS>,
    spec: &S,
    depth: usize,
    budget: &Budget,
) -> Result<Option<StrongLinWitness>> {
    let mut visited = 0usize;
    let root = grow(
        object,
        spec,
        object.lts.initial(),
        &History::empty(),
        &History::empty(),
        depth,
        budget,
        &mut visited,
    )?;
    Ok(root.map(|root| StrongLinWitness { root }))
}

/// Sequences of pending operations (with spec-dictated return values)
/// that can extend `hs`, shortest first, identifiers ascending.
fn extensions<S: SeqSpec>(spec: &S, hist: &History, hs: &History) -> Vec<History> {
    let linearized: Vec<_> = hs.ops().keys().copied().collect();
    let pending: Vec<_> = hist
        .ops()
        .iter()
        .filter(|(k, _)| !linearized.contains(k))
        .map(|(k, info)| (*k, info.method.clone(), info.arg.clone()))
        .collect();

    let mut out = Vec::new();
    let mut frontier = vec![hs.clone()];
    out.push(hs.clone());
    while !frontier.is_empty() {
        let mut next_frontier = Vec::new();
        for base in &frontier {
            let done: Vec<_> = base.ops().keys().copied().collect();
            for (k, method, arg) in &pending {
                if done.contains(k) {
                    continue;
                }
                // Replay to find the return value for this extension.
                let mut st = spec.initial();
                for a in base.actions() {
                    if let Action::Call { method, value, .. } = a {
                        st = spec.apply(&st, method, value).0;
                    }
                }
                let (_, ret) = spec.apply(&st, method, arg);
                let ext = base
                    .concat(&[
                        Action::Call { method: method.clone(), value: arg.clone(), op: *k },
                        Action::Ret { method: method.clone(), value: ret, op: *k },
                    ])
                    .expect("fresh operation extends a well-formed history");
                out.push(ext.clone());
                next_frontier.push(ext);
            }
        }
        frontier = next_frontier;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn grow<S: SeqSpec, OS: Clone + Eq + std::hash::Hash + Ord>(
    object: &Exploration<OS>,
    spec: &S,
    state: StateId,
    hist: &History,
    hs: &History,
    left: usize,
    budget: &Budget,
    visited: &mut usize,
) -> Result<Option<WitnessNode>> {
    *visited += 1;
    budget.charge_state(*visited)?;
    if linearizes(hist, hs)?.is_none() {
        return Ok(None);
    }
    let mut node = WitnessNode::leaf(hs.clone());
    if left == 0 {
        return Ok(Some(node));
    }
    for (aid, target) in object.lts.transitions_from(state) {
        let action = object.lts.action(*aid).clone();
        let mut h = hist.clone();
        if action.is_interface() {
            h.push(action.clone())?;
        }
        let mut found = None;
        for candidate in extensions(spec, &h, hs) {
            if let Some(child) =
                grow(object, spec, *target, &h, &candidate, left - 1, budget, visited)?
            {
                found = Some(child);
                break;
            }
        }
        match found {
            Some(child) => {
                node.children.insert(action, child);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(node))
}

/// Constant-empty witness, valid for objects that never complete an
/// operation within the depth.
pub fn empty_witness<OS: Clone + Eq + std::hash::Hash + Ord>(
    object: &Exploration<OS>,
    depth: usize,
) -> StrongLinWitness {
    fn build<OS: Clone + Eq + std::hash::Hash + Ord>(
        object: &Exploration<OS>,
        state: StateId,
        left: usize,
    ) -> WitnessNode {
        let mut node = WitnessNode::leaf(History::empty());
        if left == 0 {
            return node;
        }
        for (aid, target) in object.lts.transitions_from(state) {
            let action = object.lts.action(*aid).clone();
            node.children.insert(action, build(object, *target, left - 1));
        }
        node
    }
    StrongLinWitness { root: build(object, object.lts.initial(), depth) }
}

/// JSON form of a witness tree (nested nodes keyed by rendered actions).
pub fn witness_to_json(w: &StrongLinWitness) -> String {
    fn node_to_json(n: &WitnessNode) -> serde_json::Value {
        let children: serde_json::Map<String, serde_json::Value> = n
            .children
            .iter()
            .map(|(a, c)| {
                (
                    serde_json::to_string(&crate::action::ActionDoc::from_action(a))
                        .expect("serializable"),
                    node_to_json(c),
                )
            })
            .collect();
        serde_json::json!({
            "linearization": n.linearization.render(),
            "children": children,
        })
    }
    serde_json::to_string_pretty(&node_to_json(&w.root)).expect("serializable")
}

pub fn witness_from_json(text: &str) -> Result<StrongLinWitness> {
    fn node_from_json(v: &serde_json::Value) -> Result<WitnessNode> {
        let lin = v
            .get("linearization")
            .and_then(|l| l.as_str())
            .ok_or_else(|| Error::invalid("witness node needs a `linearization` string"))?;
        let mut node = WitnessNode::leaf(History::parse(lin)?);
        if let Some(children) = v.get("children").and_then(|c| c.as_object()) {
            for (key, child) in children {
                let doc: crate::action::ActionDoc = serde_json::from_str(key)
                    .map_err(|e| Error::invalid(format!("witness action key: {e}")))?;
                let action = doc.to_action().map_err(Error::Invalid)?;
                node.children.insert(action, node_from_json(child)?);
            }
        }
        Ok(node)
    }
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("witness JSON: {e}")))?;
    Ok(StrongLinWitness { root: node_from_json(&v)? })
}

/// The linearization the atomic object itself carries in its state is a
/// witness for it; useful as a fixture.
pub fn atomic_self_witness(
    atomic_exp: &Exploration<AtomicState>,
    depth: usize,
) -> StrongLinWitness {
    fn build(exp: &Exploration<AtomicState>, state: StateId, left: usize) -> WitnessNode {
        let hs = exp.state(state).hs.clone();
        let mut node = WitnessNode::leaf(History::new(hs).expect("atomic states are well-formed"));
        if left == 0 {
            return node;
        }
        for (aid, target) in exp.lts.transitions_from(state) {
            let action = exp.lts.action(*aid).clone();
            node.children.insert(action, build(exp, *target, left - 1));
        }
        node
    }
    StrongLinWitness { root: build(atomic_exp, atomic_exp.lts.initial(), depth) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::explore;
    use crate::objects::seqspec::RegisterSpec;

    fn register_atomic(
        max_ops: u32,
    ) -> (AtomicModel<RegisterSpec>, Exploration<AtomicState>) {
        let atomic = AtomicModel::new(RegisterSpec::new(vec![0, 1]), max_ops);
        let exp = explore(&atomic, &Budget::default()).unwrap();
        (atomic, exp)
    }

    #[test]
    fn atomic_object_carries_its_own_witness() {
        let (atomic, exp) = register_atomic(1);
        let w = atomic_self_witness(&exp, 6);
        assert!(check_strong_lin_witness(&exp, atomic.spec(), &w, 6).unwrap());
    }

    #[test]
    fn self_witness_round_trips_through_the_simulation() {
        let (atomic, exp) = register_atomic(1);
        let w = atomic_self_witness(&exp, 6);
        let rel = fsim_from_witness(&exp, &atomic, &exp, &w, 6).unwrap();
        assert!(check_fsim(&exp.lts, &exp.lts, &rel).unwrap().is_ok());
        let w2 = witness_from_fsim(&exp, &atomic, &exp, &rel, 6).unwrap();
        assert!(check_strong_lin_witness(&exp, atomic.spec(), &w2, 6).unwrap());
        assert_eq!(w, w2);
    }

    #[test]
    fn search_finds_witness_for_the_atomic_object() {
        let (atomic, exp) = register_atomic(1);
        let w = search_strong_lin_witness(&exp, atomic.spec(), 6, &Budget::default())
            .unwrap()
            .expect("atomic objects are strongly linearizable");
        assert!(check_strong_lin_witness(&exp, atomic.spec(), &w, 6).unwrap());
    }

    #[test]
    fn witness_json_round_trip() {
        let (_atomic, exp) = register_atomic(1);
        let w = atomic_self_witness(&exp, 4);
        let text = witness_to_json(&w);
        let back = witness_from_json(&text).unwrap();
        assert_eq!(w, back);
    }
}
