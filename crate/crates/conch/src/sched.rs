//! Deterministic schedulers and hyperproperty verdicts.
//!
//! A deterministic scheduler over a program-object product either yields
//! to the program, offering all enabled program actions, or picks exactly
//! one enabled object action (call, return or internal step). Strategies
//! come in two shapes: a decision map over product states, and a trace
//! tree (used by constructed schedulers, where the same product state may
//! need different continuations on different paths).
//!
//! Adversary synthesis solves the induced AND–OR game over the product
//! graph: yielding branches over every enabled program action (all must
//! stay winning), picking commits to one object action. Goals are
//! predicates over terminal states; a trace is maximal when the
//! strategy's prescribed set has no enabled action.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::action::{Action, Gamma};
use crate::error::{Budget, Error, Result};
use crate::fsim::{SimRelation, WeakSteps};
use crate::history::{project_trace, Trace};
use crate::lts::{Lts, StateId};
use crate::model::Exploration;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// Offer every enabled program action.
    Yield,
    /// Fire exactly this object action.
    Pick(Action),
    /// Offer only this subset of the program actions. Only meaningful
    /// under the literal scheduler reading, where a scheduler may
    /// suppress some program outcomes; the strong-adversary reading never
    /// produces it.
    Offer(BTreeSet<Action>),
}

/// A scheduler as a decision map over product states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateStrategy {
    pub decisions: BTreeMap<StateId, Decision>,
}

/// A scheduler as a decision tree over traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeStrategy {
    pub root: StrategyNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyNode {
    pub decision: Decision,
    pub children: BTreeMap<Action, StrategyNode>,
}

impl StrategyNode {
    pub fn leaf(decision: Decision) -> StrategyNode {
        StrategyNode { decision, children: BTreeMap::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    ByState(StateStrategy),
    Tree(TreeStrategy),
}

impl Strategy {
    pub fn by_state(&self) -> Option<&StateStrategy> {
        match self {
            Strategy::ByState(s) => Some(s),
            Strategy::Tree(_) => None,
        }
    }
}

/// Actions a strategy prescribes at a state, intersected with what is
/// enabled there.
fn prescribed(lts: &Lts, state: StateId, decision: &Decision) -> Vec<(Action, StateId)> {
    let mut out = Vec::new();
    for (aid, target) in lts.transitions_from(state) {
        let action = lts.action(*aid);
        let keep = match decision {
            Decision::Yield => action.is_program(),
            Decision::Pick(b) => action == b,
            Decision::Offer(set) => action.is_program() && set.contains(action),
        };
        if keep {
            out.push((action.clone(), *target));
        }
    }
    out
}

/// Exactly the traces consistent with the strategy, up to `depth` when
/// given (otherwise until maximal; the consistent fragment must then be
/// acyclic). The result is prefix-closed and includes the empty trace.
pub fn consistent_traces(
    lts: &Lts,
    strategy: &Strategy,
    depth: Option<usize>,
    budget: &Budget,
) -> Result<BTreeSet<Trace>> {
    let mut out = BTreeSet::new();
    out.insert(Trace::empty());

    enum Cursor<'a> {
        ByState(&'a StateStrategy),
        Tree(&'a StrategyNode),
    }

    fn walk(
        lts: &Lts,
        state: StateId,
        cursor: Cursor<'_>,
        prefix: &mut Vec<Action>,
        path: &mut Vec<StateId>,
        left: Option<usize>,
        out: &mut BTreeSet<Trace>,
        budget: &Budget,
    ) -> Result<()> {
        if left == Some(0) {
            return Ok(());
        }
        let decision = match &cursor {
            Cursor::ByState(s) => match s.decisions.get(&state) {
                Some(d) => d.clone(),
                None => {
                    if lts.transitions_from(state).is_empty() {
                        return Ok(()); // terminal, nothing to prescribe
                    }
                    return Err(Error::StrategyUndefined(lts.name(state).to_string()));
                }
            },
            Cursor::Tree(node) => node.decision.clone(),
        };
        if left.is_none() && path.contains(&state) {
            return Err(Error::CyclicGame(lts.name(state).to_string()));
        }
        path.push(state);
        for (action, target) in prescribed(lts, state, &decision) {
            let next_cursor = match &cursor {
                Cursor::ByState(s) => Cursor::ByState(s),
                Cursor::Tree(node) => match node.children.get(&action) {
                    Some(child) => Cursor::Tree(child),
                    None => {
                        return Err(Error::StrategyUndefined(format!(
                            "{} after {}",
                            lts.name(state),
                            action
                        )))
                    }
                },
            };
            prefix.push(action);
            if out.insert(Trace(prefix.clone())) {
                budget.charge_trace(out.len())?;
            }
            walk(lts, target, next_cursor, prefix, path, left.map(|d| d - 1), out, budget)?;
            prefix.pop();
        }
        path.pop();
        Ok(())
    }

    let cursor = match strategy {
        Strategy::ByState(s) => Cursor::ByState(s),
        Strategy::Tree(t) => Cursor::Tree(&t.root),
    };
    let mut prefix = Vec::new();
    let mut path = Vec::new();
    walk(lts, lts.initial(), cursor, &mut prefix, &mut path, depth, &mut out, budget)?;
    Ok(out)
}

/// The maximal consistent traces: those whose prescribed continuation set
/// is empty.
pub fn maximal_traces(
    lts: &Lts,
    strategy: &Strategy,
    budget: &Budget,
) -> Result<Vec<(Trace, StateId)>> {
    let all = consistent_traces(lts, strategy, None, budget)?;
    let mut out = Vec::new();
    for t in &all {
        let mut state = lts.initial();
        for a in t.actions() {
            state = lts.step(state, a).ok_or_else(|| {
                Error::invalid(format!("trace replay stuck at {a} from {}", lts.name(state)))
            })?;
        }
        let decision = match strategy {
            Strategy::ByState(s) => s.decisions.get(&state).cloned(),
            Strategy::Tree(tree) => {
                let mut node = &tree.root;
                for a in t.actions() {
                    node = node.children.get(a).ok_or_else(|| {
                        Error::StrategyUndefined(format!("tree lacks child for {a}"))
                    })?;
                }
                Some(node.decision.clone())
            }
        };
        let open = match decision {
            None => !lts.transitions_from(state).is_empty(),
            Some(d) => !prescribed(lts, state, &d).is_empty(),
        };
        if !open {
            out.push((t.clone(), state));
        }
    }
    Ok(out)
}

/// Does the strategy satisfy the admission condition at every node it can
/// reach: whenever any action is enabled, the prescribed set is non-empty
/// and entirely enabled?
pub fn verify_admission(lts: &Lts, strategy: &StateStrategy) -> Result<bool> {
    let mut seen: BTreeSet<StateId> = BTreeSet::new();
    let mut queue = VecDeque::from([lts.initial()]);
    seen.insert(lts.initial());
    while let Some(state) = queue.pop_front() {
        let enabled = lts.transitions_from(state);
        if enabled.is_empty() {
            continue;
        }
        let decision = match strategy.decisions.get(&state) {
            Some(d) => d,
            None => return Ok(false),
        };
        match decision {
            Decision::Yield => {
                if !enabled.iter().any(|(a, _)| lts.action(*a).is_program()) {
                    return Ok(false);
                }
            }
            Decision::Pick(b) => {
                if !enabled.iter().any(|(a, _)| lts.action(*a) == b) {
                    return Ok(false);
                }
            }
            Decision::Offer(set) => {
                if set.is_empty() {
                    return Ok(false);
                }
                for a in set {
                    if !enabled.iter().any(|(b, _)| lts.action(*b) == a) {
                        return Ok(false);
                    }
                }
            }
        }
        for (action, target) in prescribed(lts, state, decision) {
            let _ = action;
            if seen.insert(target) {
                queue.push_back(target);
            }
        }
    }
    Ok(true)
}

/// Solve the adversary game: find a deterministic strategy under which
/// every maximal consistent trace ends in a state satisfying `goal`, or
/// prove there is none. Object actions are tried in canonical order
/// before yielding, so the synthesized schedule is reproducible. The
/// product must be deterministic per label and acyclic.
///
/// Under the strong-adversary reading, yielding offers every enabled
/// program action; the adversary controls interleaving but not inputs.
pub fn synthesize_adversary(
    lts: &Lts,
    goal: &dyn Fn(StateId) -> bool,
    budget: &Budget,
) -> Result<Option<StateStrategy>> {
    synthesize_adversary_with(lts, goal, false, budget)
}

/// Like [`synthesize_adversary`], but when `allow_suppression` is set the
/// scheduler may also offer any non-empty proper subset of the enabled
/// program actions, per the literal reading of scheduler determinism.
pub fn synthesize_adversary_with(
    lts: &Lts,
    goal: &dyn Fn(StateId) -> bool,
    allow_suppression: bool,
    budget: &Budget,
) -> Result<Option<StateStrategy>> {
    lts.check_label_deterministic()?;

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        InProgress,
        Won,
        Lost,
    }
    let mut marks: HashMap<StateId, Mark> = HashMap::new();
    let mut choice: HashMap<StateId, Decision> = HashMap::new();

    #[allow(clippy::too_many_arguments)]
    fn solve(
        lts: &Lts,
        goal: &dyn Fn(StateId) -> bool,
        state: StateId,
        marks: &mut HashMap<StateId, Mark>,
        choice: &mut HashMap<StateId, Decision>,
        allow_suppression: bool,
        budget: &Budget,
    ) -> Result<bool> {
        match marks.get(&state) {
            Some(Mark::Won) => return Ok(true),
            Some(Mark::Lost) => return Ok(false),
            Some(Mark::InProgress) => {
                return Err(Error::CyclicGame(lts.name(state).to_string()))
            }
            None => {}
        }
        budget.charge_state(marks.len() + 1)?;
        marks.insert(state, Mark::InProgress);

        let transitions: Vec<(Action, StateId)> = lts
            .transitions_from(state)
            .iter()
            .map(|(a, t)| (lts.action(*a).clone(), *t))
            .collect();

        let result = if transitions.is_empty() {
            goal(state)
        } else {
            let mut won = false;
            // Object picks first, in canonical action order.
            for (action, target) in &transitions {
                if action.is_program() {
                    continue;
                }
                if solve(lts, goal, *target, marks, choice, allow_suppression, budget)? {
                    choice.insert(state, Decision::Pick(action.clone()));
                    won = true;
                    break;
                }
            }
            if !won {
                let program: Vec<&(Action, StateId)> =
                    transitions.iter().filter(|(a, _)| a.is_program()).collect();
                if !program.is_empty() {
                    let mut winning: Vec<Action> = Vec::new();
                    let mut all = true;
                    for (action, target) in &program {
                        if solve(lts, goal, *target, marks, choice, allow_suppression, budget)? {
                            winning.push(action.clone());
                        } else {
                            all = false;
                        }
                    }
                    if all {
                        choice.insert(state, Decision::Yield);
                        won = true;
                    } else if allow_suppression && !winning.is_empty() {
                        // Literal reading: suppress the losing outcomes.
                        choice.insert(state, Decision::Offer(winning.into_iter().collect()));
                        won = true;
                    }
                }
            }
            won
        };
        marks.insert(state, if result { Mark::Won } else { Mark::Lost });
        Ok(result)
    }

    if !solve(lts, goal, lts.initial(), &mut marks, &mut choice, allow_suppression, budget)? {
        return Ok(None);
    }

    // Restrict the decision map to states reachable under the strategy.
    let mut strategy = StateStrategy::default();
    let mut queue = VecDeque::from([lts.initial()]);
    let mut seen: BTreeSet<StateId> = BTreeSet::from([lts.initial()]);
    while let Some(state) = queue.pop_front() {
        let decision = match choice.get(&state) {
            Some(d) => d.clone(),
            None => continue, // terminal
        };
        strategy.decisions.insert(state, decision.clone());
        for (_, target) in prescribed(lts, state, &decision) {
            if seen.insert(target) {
                queue.push_back(target);
            }
        }
    }
    Ok(Some(strategy))
}

/// Transfer a scheduler along a forward simulation: program decisions are
/// copied, each picked object action is replaced by a canonical matching
/// weak sequence of the abstract object, issued one step at a time. The
/// result is a tree strategy over the program-with-abstract-object
/// product whose program-action trace set equals the original's.
#[allow(clippy::too_many_arguments)]
pub fn scheduler_from_fsim<PS, O1S>(
    po1: &Exploration<(PS, O1S)>,
    s1: &StateStrategy,
    o1: &Exploration<O1S>,
    o2: &Lts,
    rel: &SimRelation,
    budget: &Budget,
) -> Result<TreeStrategy>
where
    PS: Clone + Eq + std::hash::Hash + Ord,
    O1S: Clone + Eq + std::hash::Hash + Ord,
{
    let gamma = rel.gamma.clone();
    let mut weak = WeakSteps::new(o2, &gamma);
    let o1_ids = o1.id_map();
    let mut related: HashMap<StateId, BTreeSet<StateId>> = HashMap::new();
    for (a, b) in &rel.pairs {
        related.entry(*a).or_default().insert(*b);
    }

    let mut calls = 0usize;

    #[allow(clippy::too_many_arguments)]
    fn build<PS, O1S>(
        po1: &Exploration<(PS, O1S)>,
        s1: &StateStrategy,
        o1_ids: &HashMap<&O1S, StateId>,
        related: &HashMap<StateId, BTreeSet<StateId>>,
        weak: &mut WeakSteps<'_>,
        q1: StateId,
        s2: StateId,
        calls: &mut usize,
        budget: &Budget,
    ) -> Result<StrategyNode>
    where
        PS: Clone + Eq + std::hash::Hash + Ord,
        O1S: Clone + Eq + std::hash::Hash + Ord,
    {
        *calls += 1;
        budget.charge_state(*calls)?;
        let decision = match s1.decisions.get(&q1) {
            Some(d) => d.clone(),
            None => {
                if po1.lts.transitions_from(q1).is_empty() {
                    return Ok(StrategyNode::leaf(Decision::Yield));
                }
                return Err(Error::StrategyUndefined(po1.lts.name(q1).to_string()));
            }
        };
        match decision {
            // Program decisions are copied as-is, offers included.
            d @ (Decision::Yield | Decision::Offer(_)) => {
                let mut node = StrategyNode::leaf(d.clone());
                for (action, target) in prescribed(&po1.lts, q1, &d) {
                    let child =
                        build(po1, s1, o1_ids, related, weak, target, s2, calls, budget)?;
                    node.children.insert(action, child);
                }
                Ok(node)
            }
            Decision::Pick(action) => {
                let target = po1
                    .lts
                    .step(q1, &action)
                    .ok_or_else(|| Error::invalid(format!("picked action {action} not enabled")))?;
                let o1_next = &po1.state(target).1;
                let o1_next_id = *o1_ids
                    .get(o1_next)
                    .ok_or_else(|| Error::invalid("product object state missing"))?;
                let targets = related.get(&o1_next_id).cloned().unwrap_or_default();
                let (sequence, s2_end) =
                    weak.witness_sequence(s2, &action, &targets).ok_or_else(|| {
                        Error::invalid(format!("relation offers no weak match for {action}"))
                    })?;
                let mut node =
                    build(po1, s1, o1_ids, related, weak, target, s2_end, calls, budget)?;
                for step in sequence.into_iter().rev() {
                    let mut outer = StrategyNode::leaf(Decision::Pick(step.clone()));
                    outer.children.insert(step, node);
                    node = outer;
                }
                Ok(node)
            }
        }
    }

    let root = build(
        po1,
        s1,
        &o1_ids,
        &mut related.clone(),
        &mut weak,
        po1.lts.initial(),
        o2.initial(),
        &mut calls,
        budget,
    )?;
    Ok(TreeStrategy { root })
}

/// Outcome of a hyperproperty check.
#[derive(Debug)]
pub struct Verdict {
    pub satisfied: bool,
    /// A violating adversary, when one exists and was found.
    pub witness: Option<Strategy>,
    /// The program-action projection of the witness's consistent traces.
    pub witness_traces: Option<BTreeSet<Trace>>,
}

/// Built-in hyperproperty templates.
pub enum HyperTemplate<'a> {
    /// Noninterference shape: violated when some adversary forces the
    /// first goal at every maximal trace, or some adversary forces the
    /// second. `allow_suppression` switches to the literal scheduler
    /// reading where program outcomes may be suppressed.
    Noninterference {
        low1_eq_high: &'a dyn Fn(StateId) -> bool,
        low2_eq_high: &'a dyn Fn(StateId) -> bool,
        allow_suppression: bool,
    },
    /// Every program-action projection of every consistent trace (of any
    /// admitted scheduler) satisfies the predicate — a lifted trace
    /// property, checked over all bounded traces.
    AllTraces { depth: usize, pred: &'a dyn Fn(&Trace) -> bool },
    /// Every admitted deterministic scheduler produces exactly this
    /// program-action trace set. The consistent fragments must be
    /// acyclic.
    SetEquals(&'a BTreeSet<Trace>),
}

/// Check a hyperproperty of a program-object product: satisfied iff the
/// program-action trace set of every admitted deterministic scheduler
/// belongs to the template.
pub fn check_hyperproperty(
    lts: &Lts,
    template: &HyperTemplate<'_>,
    budget: &Budget,
) -> Result<Verdict> {
    match template {
        HyperTemplate::Noninterference { low1_eq_high, low2_eq_high, allow_suppression } => {
            for goal in [low1_eq_high, low2_eq_high] {
                if let Some(strategy) =
                    synthesize_adversary_with(lts, *goal, *allow_suppression, budget)?
                {
                    let traces = consistent_traces(lts, &Strategy::ByState(strategy.clone()), None, budget)?;
                    let projected =
                        traces.iter().map(|t| project_trace(t, &Gamma::Program)).collect();
                    return Ok(Verdict {
                        satisfied: false,
                        witness: Some(Strategy::ByState(strategy)),
                        witness_traces: Some(projected),
                    });
                }
            }
            Ok(Verdict { satisfied: true, witness: None, witness_traces: None })
        }
        HyperTemplate::AllTraces { depth, pred } => {
            let all = crate::model::traces(&crate::model::LtsModel(lts), *depth, budget)?;
            for t in &all {
                let projected = project_trace(t, &Gamma::Program);
                if !pred(&projected) {
                    return Ok(Verdict {
                        satisfied: false,
                        witness: strategy_following(lts, t).map(Strategy::ByState),
                        witness_traces: Some(BTreeSet::from([projected])),
                    });
                }
            }
            Ok(Verdict { satisfied: true, witness: None, witness_traces: None })
        }
        HyperTemplate::SetEquals(reference) => {
            let sets = achievable_sets(lts, budget)?;
            for (set, strategy) in sets {
                if &set != *reference {
                    return Ok(Verdict {
                        satisfied: false,
                        witness: Some(Strategy::Tree(TreeStrategy { root: strategy })),
                        witness_traces: Some(set),
                    });
                }
            }
            Ok(Verdict { satisfied: true, witness: None, witness_traces: None })
        }
    }
}

/// A deterministic scheduler whose consistent traces include the given
/// trace: follow the trace, defaulting to least-object-action elsewhere.
/// Conflicting revisits make this impossible; then `None`.
pub fn strategy_following(lts: &Lts, trace: &Trace) -> Option<StateStrategy> {
    let mut strategy = StateStrategy::default();
    let mut state = lts.initial();
    for action in trace.actions() {
        let wanted = if action.is_program() {
            Decision::Yield
        } else {
            Decision::Pick(action.clone())
        };
        match strategy.decisions.get(&state) {
            None => {
                strategy.decisions.insert(state, wanted.clone());
            }
            Some(existing) if *existing == wanted => {}
            Some(_) => return None,
        }
        state = lts.step(state, action)?;
    }
    // Total out the rest with a default rule.
    let mut queue: VecDeque<StateId> = strategy.decisions.keys().copied().collect();
    queue.push_back(state);
    let mut seen: BTreeSet<StateId> = queue.iter().copied().collect();
    while let Some(s) = queue.pop_front() {
        let decision = strategy.decisions.entry(s).or_insert_with(|| {
            let object = lts
                .transitions_from(s)
                .iter()
                .map(|(a, _)| lts.action(*a))
                .find(|a| !a.is_program());
            match object {
                Some(a) => Decision::Pick(a.clone()),
                None => Decision::Yield,
            }
        });
        for (_, target) in prescribed(lts, s, &decision.clone()) {
            if seen.insert(target) {
                queue.push_back(target);
            }
        }
    }
    Some(strategy)
}

/// Enumerate the program-action trace sets achievable by admitted
/// deterministic schedulers, each with one witnessing tree strategy.
/// Schedulers are trace-indexed here, so a state revisited on another
/// path may be scheduled differently. The consistent fragments must be
/// acyclic; exponential, for small products.
fn achievable_sets(
    lts: &Lts,
    budget: &Budget,
) -> Result<Vec<(BTreeSet<Trace>, StrategyNode)>> {
    type Partial = (BTreeSet<Trace>, StrategyNode);

    fn go(lts: &Lts, state: StateId, path: &mut Vec<StateId>, budget: &Budget) -> Result<Vec<Partial>> {
        if path.contains(&state) {
            return Err(Error::CyclicGame(lts.name(state).to_string()));
        }
        path.push(state);
        let transitions: Vec<(Action, StateId)> = lts
            .transitions_from(state)
            .iter()
            .map(|(a, t)| (lts.action(*a).clone(), *t))
            .collect();
        let mut results: Vec<Partial> = Vec::new();
        let empty_set = || BTreeSet::from([Trace::empty()]);

        if transitions.is_empty() {
            path.pop();
            return Ok(vec![(empty_set(), StrategyNode::leaf(Decision::Yield))]);
        }
        // Object picks: the projected set is the child's (object actions
        // project away).
        for (action, target) in &transitions {
            if action.is_program() {
                continue;
            }
            for (sub, child) in go(lts, *target, path, budget)? {
                let mut node = StrategyNode::leaf(Decision::Pick(action.clone()));
                node.children.insert(action.clone(), child);
                results.push((sub, node));
                budget.charge_trace(results.len())?;
            }
        }
        // Yield: cartesian combination over program children.
        let program: Vec<&(Action, StateId)> =
            transitions.iter().filter(|(a, _)| a.is_program()).collect();
        if !program.is_empty() {
            let mut combos: Vec<Partial> =
                vec![(empty_set(), StrategyNode::leaf(Decision::Yield))];
            for (action, target) in &program {
                let subs = go(lts, *target, path, budget)?;
                let mut next: Vec<Partial> = Vec::new();
                for (set, node) in &combos {
                    for (sub, child) in &subs {
                        let mut merged = set.clone();
                        for t in sub {
                            let mut v = vec![(*action).clone()];
                            v.extend(t.0.clone());
                            merged.insert(Trace(v));
                        }
                        let mut n = node.clone();
                        n.children.insert((*action).clone(), child.clone());
                        next.push((merged, n));
                        budget.charge_trace(results.len() + next.len())?;
                    }
                }
                combos = next;
            }
            results.extend(combos);
        }
        path.pop();
        Ok(results)
    }

    let mut path = Vec::new();
    Ok(go(lts, lts.initial(), &mut path, budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    

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

    #[test]
    fn fixed_self_loop_pick_generates_powers_of_one_action() {
        let a = lts(&["0"], "0", &[("0", Action::internal("x"), "0")]);
        let mut s = StateStrategy::default();
        s.decisions.insert(a.initial(), Decision::Pick(Action::internal("x")));
        let ts = consistent_traces(&a, &Strategy::ByState(s), Some(3), &Budget::default()).unwrap();
        assert_eq!(ts.len(), 4); // ε, x, xx, xxx
    }

    #[test]
    fn yield_on_program_only_lts_gives_all_traces() {
        let a = lts(
            &["0", "1", "2"],
            "0",
            &[
                ("0", Action::program("p"), "1"),
                ("0", Action::program("q"), "2"),
            ],
        );
        let mut s = StateStrategy::default();
        for sid in a.state_ids() {
            s.decisions.insert(sid, Decision::Yield);
        }
        let ts = consistent_traces(&a, &Strategy::ByState(s.clone()), None, &Budget::default()).unwrap();
        let all = crate::model::traces(&crate::model::LtsModel(&a), 5, &Budget::default()).unwrap();
        assert_eq!(ts, all);
        assert!(verify_admission(&a, &s).unwrap());
    }

    #[test]
    fn adversary_with_trivial_goal_exists() {
        let a = lts(
            &["0", "1"],
            "0",
            &[("0", Action::internal("x"), "1")],
        );
        let s = synthesize_adversary(&a, &|_| true, &Budget::default()).unwrap().unwrap();
        assert!(verify_admission(&a, &s).unwrap());
    }

    #[test]
    fn adversary_picks_the_winning_branch() {
        // Internal choice between two terminals; only one satisfies the goal.
        let a = lts(
            &["0", "good", "bad"],
            "0",
            &[
                ("0", Action::internal("to_bad"), "bad"),
                ("0", Action::internal("to_good"), "good"),
            ],
        );
        let good = a.state("good").unwrap();
        let s = synthesize_adversary(&a, &|sid| sid == good, &Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(
            s.decisions.get(&a.initial()),
            Some(&Decision::Pick(Action::internal("to_good")))
        );
        // Replay: every maximal trace ends in the goal state.
        for (_, end) in maximal_traces(&a, &Strategy::ByState(s), &Budget::default()).unwrap() {
            assert_eq!(end, good);
        }
    }

    #[test]
    fn adversary_cannot_control_program_branching() {
        // The program branches to good or bad; yielding offers both, and
        // there is no object action to avoid it.
        let a = lts(
            &["0", "good", "bad"],
            "0",
            &[
                ("0", Action::program("to_good"), "good"),
                ("0", Action::program("to_bad"), "bad"),
            ],
        );
        let good = a.state("good").unwrap();
        assert!(synthesize_adversary(&a, &|sid| sid == good, &Budget::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn trivial_hyperproperty_is_always_satisfied() {
        let a = lts(&["0", "1"], "0", &[("0", Action::program("p"), "1")]);
        let verdict = check_hyperproperty(
            &a,
            &HyperTemplate::AllTraces { depth: 4, pred: &|_| true },
            &Budget::default(),
        )
        .unwrap();
        assert!(verdict.satisfied);
    }

    #[test]
    fn cyclic_game_is_a_budget_style_error() {
        let a = lts(&["0"], "0", &[("0", Action::internal("x"), "0")]);
        match synthesize_adversary(&a, &|_| true, &Budget::default()) {
            Err(Error::CyclicGame(_)) => {}
            other => panic!("expected cycle error, got {other:?}"),
        }
    }
}
