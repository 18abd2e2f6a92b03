//! Γ-forward simulations: weak steps, relation checking, existence by
//! greatest fixpoint, and relation composition.
//!
//! A relation F between the states of A1 and A2 is a Γ-forward simulation
//! when it relates the initial states and every transition `s1 -a-> s1'`
//! from an F-related pair `(s1, s2)` is matched by a sequence of A2 steps
//! from `s2` whose Γ-projection equals that of `a`, landing in a state
//! F-related to `s1'`. The matching sequence may be empty (stuttering).
//!
//! Existence is decided on the pair graph reachable from the initial
//! pair: starting from all reachable pairs, pairs with an unmatched
//! outgoing transition are removed until stable (a worklist propagating
//! removals to predecessors). The surviving set restricted to pairs
//! reachable inside it is the canonical greatest relation; it contains
//! every relation that passes [`check_fsim`], restricted the same way.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::action::{Action, Gamma};
use crate::error::{Budget, Error, Result};
use crate::lts::{ActionId, Lts, StateId};

pub use crate::objects::snapshot::{scan_locals_related, snapshot_relation, snapshot_states_related};

/// A set of state pairs between two LTSs, tagged with the observable
/// alphabet it is a candidate simulation for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimRelation {
    pub gamma: Gamma,
    pub pairs: BTreeSet<(StateId, StateId)>,
}

impl SimRelation {
    pub fn new(gamma: Gamma) -> SimRelation {
        SimRelation { gamma, pairs: BTreeSet::new() }
    }

    pub fn contains(&self, s1: StateId, s2: StateId) -> bool {
        self.pairs.contains(&(s1, s2))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Render as JSON: an array of `[name1, name2]` pairs.
    pub fn to_json(&self, a1: &Lts, a2: &Lts) -> String {
        let pairs: Vec<[&str; 2]> = self
            .pairs
            .iter()
            .map(|(s1, s2)| [a1.name(*s1), a2.name(*s2)])
            .collect();
        serde_json::to_string_pretty(&pairs).expect("serializable")
    }

    pub fn from_json(text: &str, gamma: Gamma, a1: &Lts, a2: &Lts) -> Result<SimRelation> {
        let pairs: Vec<[String; 2]> =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("relation JSON: {e}")))?;
        let mut rel = SimRelation::new(gamma);
        for [n1, n2] in pairs {
            let s1 = a1.state(&n1).ok_or(Error::UnknownState(n1))?;
            let s2 = a2.state(&n2).ok_or(Error::UnknownState(n2))?;
            rel.pairs.insert((s1, s2));
        }
        Ok(rel)
    }
}

/// Failure evidence for a candidate relation: a related pair and a
/// transition with no weak match landing in the relation.
#[derive(Clone, Debug)]
pub struct FsimFailure {
    pub s1: StateId,
    pub s2: StateId,
    pub action: Action,
    pub s1_next: StateId,
}

/// Weak steps of one LTS with respect to Γ: the non-Γ reflexive-transitive
/// closure, and `closure · a · closure` per Γ-action. Computed lazily and
/// cached; internal cycles are handled exactly by the closure.
pub struct WeakSteps<'a> {
    lts: &'a Lts,
    gamma: &'a Gamma,
    silent: Vec<Vec<StateId>>,
    closure_cache: HashMap<StateId, Vec<StateId>>,
    step_cache: HashMap<(StateId, ActionId), Vec<StateId>>,
}

impl<'a> WeakSteps<'a> {
    pub fn new(lts: &'a Lts, gamma: &'a Gamma) -> WeakSteps<'a> {
        let mut silent = vec![Vec::new(); lts.num_states()];
        for s in lts.state_ids() {
            for (a, t) in lts.transitions_from(s) {
                if !gamma.admits(lts.action(*a)) {
                    silent[s.0 as usize].push(*t);
                }
            }
        }
        WeakSteps { lts, gamma, silent, closure_cache: HashMap::new(), step_cache: HashMap::new() }
    }

    /// States reachable from `s` by non-Γ steps, including `s`.
    pub fn closure(&mut self, s: StateId) -> &[StateId] {
        if !self.closure_cache.contains_key(&s) {
            let mut seen: HashSet<StateId> = HashSet::new();
            seen.insert(s);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &t in &self.silent[x.0 as usize] {
                    if seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
            let mut v: Vec<StateId> = seen.into_iter().collect();
            v.sort_unstable();
            self.closure_cache.insert(s, v);
        }
        self.closure_cache.get(&s).expect("just inserted")
    }

    /// States reachable from `s` by a sequence whose Γ-projection equals
    /// that of `a`.
    pub fn weak(&mut self, s: StateId, a: &Action) -> Vec<StateId> {
        if !self.gamma.admits(a) {
            return self.closure(s).to_vec();
        }
        let aid = match self.lts.action_id(a) {
            Some(id) => id,
            None => return Vec::new(),
        };
        if let Some(v) = self.step_cache.get(&(s, aid)) {
            return v.clone();
        }
        let mut landed: HashSet<StateId> = HashSet::new();
        let pre = self.closure(s).to_vec();
        for x in pre {
            for (b, t) in self.lts.transitions_from(x) {
                if *b == aid {
                    for &u in self.closure(*t).to_vec().iter() {
                        landed.insert(u);
                    }
                }
            }
        }
        let mut v: Vec<StateId> = landed.into_iter().collect();
        v.sort_unstable();
        self.step_cache.insert((s, aid), v.clone());
        v
    }

    /// A canonical (shortest, then lexicographically least) witness
    /// sequence for a weak step from `s` to some state in `targets`,
    /// used by scheduler construction.
    pub fn witness_sequence(
        &mut self,
        s: StateId,
        a: &Action,
        targets: &BTreeSet<StateId>,
    ) -> Option<(Vec<Action>, StateId)> {
        // Breadth-first search over (state, fired) where `fired` records
        // whether the visible action has been taken (always true for
        // non-Γ actions).
        let visible = self.gamma.admits(a);
        let mut queue: VecDeque<(StateId, bool, Vec<Action>)> = VecDeque::new();
        let mut seen: HashSet<(StateId, bool)> = HashSet::new();
        queue.push_back((s, !visible, Vec::new()));
        seen.insert((s, !visible));
        while let Some((x, fired, path)) = queue.pop_front() {
            if fired && targets.contains(&x) {
                return Some((path, x));
            }
            // Expand in canonical transition order.
            for (b, t) in self.lts.transitions_from(x) {
                let action = self.lts.action(*b).clone();
                let fired2 = if !self.gamma.admits(&action) {
                    fired
                } else if visible && !fired && &action == a {
                    true
                } else {
                    continue;
                };
                if seen.insert((*t, fired2)) {
                    let mut p = path.clone();
                    p.push(action);
                    queue.push_back((*t, fired2, p));
                }
            }
        }
        None
    }
}

/// Check a candidate relation: the initial pair must be present and every
/// transition from a related pair must have a weak match landing in the
/// relation.
pub fn check_fsim(
    a1: &Lts,
    a2: &Lts,
    rel: &SimRelation,
) -> Result<std::result::Result<(), FsimFailure>> {
    if !rel.contains(a1.initial(), a2.initial()) {
        return Ok(Err(FsimFailure {
            s1: a1.initial(),
            s2: a2.initial(),
            action: Action::internal("(initial pair missing)"),
            s1_next: a1.initial(),
        }));
    }
    let gamma = rel.gamma.clone();
    let mut weak = WeakSteps::new(a2, &gamma);
    // Group pairs by left state for the membership tests.
    let mut by_left: HashMap<StateId, BTreeSet<StateId>> = HashMap::new();
    for (s1, s2) in &rel.pairs {
        by_left.entry(*s1).or_default().insert(*s2);
    }
    for (s1, s2) in &rel.pairs {
        for (aid, t1) in a1.transitions_from(*s1) {
            let action = a1.action(*aid).clone();
            let landed = weak.weak(*s2, &action);
            let ok = match by_left.get(t1) {
                Some(rights) => landed.iter().any(|u| rights.contains(u)),
                None => false,
            };
            if !ok {
                return Ok(Err(FsimFailure { s1: *s1, s2: *s2, action, s1_next: *t1 }));
            }
        }
    }
    Ok(Ok(()))
}

/// Decide whether a Γ-forward simulation from `a1` to `a2` exists, and
/// return the canonical one: the greatest fixpoint restricted to pairs
/// reachable from the initial pair.
pub fn fsim_exists(
    a1: &Lts,
    a2: &Lts,
    gamma: &Gamma,
    budget: &Budget,
) -> Result<Option<SimRelation>> {
    let mut weak = WeakSteps::new(a2, gamma);

    // Build the reachable pair graph. Each node carries, per outgoing
    // transition of its left state, the list of candidate match nodes.
    let mut nodes: Vec<(StateId, StateId)> = Vec::new();
    let mut index: HashMap<(StateId, StateId), u32> = HashMap::new();
    let mut groups: Vec<Vec<Vec<u32>>> = Vec::new(); // node -> transition -> matches
    let mut preds: Vec<Vec<(u32, u32)>> = Vec::new(); // node -> (pred node, pred transition)

    let root = (a1.initial(), a2.initial());
    index.insert(root, 0);
    nodes.push(root);
    groups.push(Vec::new());
    preds.push(Vec::new());

    let mut queue: VecDeque<u32> = VecDeque::new();
    queue.push_back(0);
    let mut built: HashSet<u32> = HashSet::new();

    while let Some(n) = queue.pop_front() {
        if !built.insert(n) {
            continue;
        }
        let (s1, s2) = nodes[n as usize];
        let mut node_groups: Vec<Vec<u32>> = Vec::new();
        for (aid, t1) in a1.transitions_from(s1) {
            let action = a1.action(*aid).clone();
            let mut matches = Vec::new();
            for t2 in weak.weak(s2, &action) {
                let key = (*t1, t2);
                let m = match index.get(&key) {
                    Some(&m) => m,
                    None => {
                        budget.charge_state(nodes.len() + 1)?;
                        let m = nodes.len() as u32;
                        index.insert(key, m);
                        nodes.push(key);
                        groups.push(Vec::new());
                        preds.push(Vec::new());
                        queue.push_back(m);
                        m
                    }
                };
                matches.push(m);
            }
            node_groups.push(matches);
        }
        for (g, matches) in node_groups.iter().enumerate() {
            for &m in matches {
                preds[m as usize].push((n, g as u32));
            }
        }
        groups[n as usize] = node_groups;
    }

    // Greatest fixpoint: kill nodes with an unmatchable transition and
    // propagate through the predecessor index.
    let mut alive = vec![true; nodes.len()];
    let mut counts: Vec<Vec<usize>> = groups
        .iter()
        .map(|gs| gs.iter().map(Vec::len).collect())
        .collect();
    let mut worklist: VecDeque<u32> = VecDeque::new();
    for (n, cs) in counts.iter().enumerate() {
        if cs.iter().any(|&c| c == 0) {
            alive[n] = false;
            worklist.push_back(n as u32);
        }
    }
    while let Some(dead) = worklist.pop_front() {
        for &(p, g) in &preds[dead as usize] {
            if !alive[p as usize] {
                continue;
            }
            // The dead node may appear several times in a match list only
            // if duplicated; lists are deduped by construction of weak().
            let c = &mut counts[p as usize][g as usize];
            *c -= 1;
            if *c == 0 {
                alive[p as usize] = false;
                worklist.push_back(p);
            }
        }
    }

    if !alive[0] {
        return Ok(None);
    }

    // Restrict to pairs reachable inside the fixpoint, following every
    // surviving match.
    let mut rel = SimRelation::new(gamma.clone());
    let mut stack = vec![0u32];
    let mut seen = vec![false; nodes.len()];
    seen[0] = true;
    while let Some(n) = stack.pop() {
        rel.pairs.insert(nodes[n as usize]);
        for matches in &groups[n as usize] {
            for &m in matches {
                if alive[m as usize] && !seen[m as usize] {
                    seen[m as usize] = true;
                    stack.push(m);
                }
            }
        }
    }
    Ok(Some(rel))
}

/// Relational composition of two simulations over a shared middle LTS.
/// If both inputs pass [`check_fsim`] then so does the output.
pub fn compose_relations(f1: &SimRelation, f2: &SimRelation) -> Result<SimRelation> {
    if f1.gamma != f2.gamma {
        return Err(Error::invalid("composed relations must share the observable alphabet"));
    }
    let mut by_mid: HashMap<StateId, Vec<StateId>> = HashMap::new();
    for (s2, s3) in &f2.pairs {
        by_mid.entry(*s2).or_default().push(*s3);
    }
    let mut out = SimRelation::new(f1.gamma.clone());
    for (s1, s2) in &f1.pairs {
        if let Some(s3s) = by_mid.get(s2) {
            for s3 in s3s {
                out.pairs.insert((*s1, *s3));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Value;
    use crate::lts::Lts;

    fn lts(states: &[&str], initial: &str, trans: &[(&str, Action, &str)]) -> Lts {
        Lts::from_parts(
            states.iter().map(|s| s.to_string()).collect(),
            initial,
            trans
                .iter()
                .map(|(f, a, t)| (f.to_string(), a.clone(), t.to_string()))
                .collect(),
            Default::default(),
        )
        .unwrap()
    }

    fn identity_rel(a: &Lts) -> SimRelation {
        let mut rel = SimRelation::new(Gamma::CallReturn);
        for s in a.state_ids() {
            rel.pairs.insert((s, s));
        }
        rel
    }

    #[test]
    fn identity_is_a_simulation() {
        let a = lts(
            &["0", "1"],
            "0",
            &[
                ("0", Action::call("m", Value::Unit, 1), "1"),
                ("1", Action::ret("m", Value::ok(), 1), "0"),
            ],
        );
        assert!(check_fsim(&a, &a, &identity_rel(&a)).unwrap().is_ok());
    }

    #[test]
    fn weak_step_skips_internal_chain() {
        let a = lts(
            &["0", "1", "2"],
            "0",
            &[
                ("0", Action::internal("x"), "1"),
                ("1", Action::call("m", Value::Unit, 1), "2"),
            ],
        );
        let gamma = Gamma::CallReturn;
        let mut weak = WeakSteps::new(&a, &gamma);
        let landed = weak.weak(a.state("0").unwrap(), &Action::call("m", Value::Unit, 1));
        assert_eq!(landed, vec![a.state("2").unwrap()]);
    }

    #[test]
    fn internal_cycle_is_closed_exactly() {
        let a = lts(
            &["0", "1", "2"],
            "0",
            &[
                ("0", Action::internal("x"), "1"),
                ("1", Action::internal("y"), "0"),
                ("1", Action::call("m", Value::Unit, 1), "2"),
            ],
        );
        let gamma = Gamma::CallReturn;
        let mut weak = WeakSteps::new(&a, &gamma);
        for s in ["0", "1"] {
            let landed = weak.weak(a.state(s).unwrap(), &Action::call("m", Value::Unit, 1));
            assert_eq!(landed, vec![a.state("2").unwrap()], "from {s}");
        }
    }

    #[test]
    fn mismatched_labels_fail_with_a_triple() {
        let a = lts(&["0", "1"], "0", &[("0", Action::call("m", Value::Int(1), 1), "1")]);
        let b = lts(&["x"], "x", &[]);
        let mut rel = SimRelation::new(Gamma::CallReturn);
        for s in a.state_ids() {
            rel.pairs.insert((s, b.initial()));
        }
        match check_fsim(&a, &b, &rel).unwrap() {
            Err(f) => {
                assert_eq!(f.s1, a.state("0").unwrap());
                assert_eq!(f.action, Action::call("m", Value::Int(1), 1));
            }
            Ok(()) => panic!("expected failure"),
        }
    }

    #[test]
    fn fsim_exists_is_reflexive_and_contains_identity() {
        let a = lts(
            &["0", "1"],
            "0",
            &[
                ("0", Action::call("m", Value::Unit, 1), "1"),
                ("1", Action::internal("x"), "0"),
            ],
        );
        let rel = fsim_exists(&a, &a, &Gamma::CallReturn, &Budget::default()).unwrap().unwrap();
        for s in a.state_ids() {
            // Reachable states are related to themselves.
            assert!(rel.contains(s, s));
        }
        assert!(check_fsim(&a, &a, &rel).unwrap().is_ok());
    }

    #[test]
    fn fsim_exists_none_when_abstract_side_lacks_a_label() {
        let a = lts(&["0", "1"], "0", &[("0", Action::call("m", Value::Int(1), 1), "1")]);
        let b = lts(&["x", "y"], "x", &[("x", Action::call("m", Value::Int(2), 1), "y")]);
        assert!(fsim_exists(&a, &b, &Gamma::CallReturn, &Budget::default()).unwrap().is_none());
    }

    #[test]
    fn composition_of_simulations_is_a_simulation() {
        let a = lts(&["0", "1"], "0", &[("0", Action::call("m", Value::Unit, 1), "1")]);
        let b = lts(
            &["x", "i", "y"],
            "x",
            &[
                ("x", Action::internal("b.pad"), "i"),
                ("i", Action::call("m", Value::Unit, 1), "y"),
            ],
        );
        let c = lts(
            &["p", "q"],
            "p",
            &[("p", Action::call("m", Value::Unit, 1), "q")],
        );
        let f1 = fsim_exists(&a, &b, &Gamma::CallReturn, &Budget::default()).unwrap().unwrap();
        let f2 = fsim_exists(&b, &c, &Gamma::CallReturn, &Budget::default()).unwrap().unwrap();
        let f = compose_relations(&f1, &f2).unwrap();
        assert!(check_fsim(&a, &c, &f).unwrap().is_ok());
    }
}
