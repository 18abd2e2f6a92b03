//! Lazy state-space models and explicit-state exploration.
//!
//! Builders describe objects and programs as [`Model`]s: a state type, a
//! successor function and a declared alphabet. [`explore`] materializes the
//! reachable part into an [`Lts`] together with a side table of model
//! states, so analyses that need structured state (goal predicates,
//! simulation relations over model state) can look past the canonical
//! names. Products are models too, which keeps large components (atomic
//! objects in particular) from ever being materialized on their own.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use crate::action::{Action, Gamma, Kind};
use crate::error::{Budget, Error, Result};
use crate::history::Trace;
use crate::lts::{Lts, LtsBuilder, StateId};

pub trait Model {
    type State: Clone + Eq + Hash + Ord;

    fn initial_state(&self) -> Self::State;

    /// Enabled transitions. Order does not matter; exploration sorts.
    fn successors(&self, s: &Self::State) -> Vec<(Action, Self::State)>;

    /// Canonical serialization of the model-level state. Injective.
    fn state_name(&self, s: &Self::State) -> String;

    /// The complete declared alphabet, a superset of every label that can
    /// occur. Decides synchronization in shared-alphabet products.
    fn alphabet(&self) -> BTreeSet<Action>;
}

/// A materialized reachable state space: the LTS plus, for each state id,
/// the model state it came from.
pub struct Exploration<S> {
    pub lts: Lts,
    pub states: Vec<S>,
}

impl<S: Clone + Eq + Hash + Ord> Exploration<S> {
    pub fn state(&self, id: StateId) -> &S {
        &self.states[id.0 as usize]
    }

    pub fn id_of(&self, s: &S) -> Option<StateId> {
        // Linear scan is fine for the rare callers; hot paths build a map.
        self.states
            .iter()
            .position(|x| x == s)
            .map(|i| StateId(i as u32))
    }

    pub fn id_map(&self) -> HashMap<&S, StateId> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| (s, StateId(i as u32)))
            .collect()
    }
}

/// Breadth-first materialization of the reachable state space.
pub fn explore<M: Model>(model: &M, budget: &Budget) -> Result<Exploration<M::State>> {
    explore_inner(model, None, budget)
}

/// Materialize only states reachable within `depth` steps. Transitions out
/// of frontier states are dropped, so the result is only faithful for
/// analyses bounded by the same depth.
pub fn explore_to_depth<M: Model>(
    model: &M,
    depth: usize,
    budget: &Budget,
) -> Result<Exploration<M::State>> {
    explore_inner(model, Some(depth), budget)
}

fn explore_inner<M: Model>(
    model: &M,
    depth: Option<usize>,
    budget: &Budget,
) -> Result<Exploration<M::State>> {
    let mut builder = LtsBuilder::new();
    let mut states: Vec<M::State> = Vec::new();
    let mut index: HashMap<M::State, StateId> = HashMap::new();
    let mut queue: VecDeque<(StateId, usize)> = VecDeque::new();

    let init = model.initial_state();
    let init_id = builder.add_state(model.state_name(&init));
    index.insert(init.clone(), init_id);
    states.push(init);
    queue.push_back((init_id, 0));

    while let Some((sid, d)) = queue.pop_front() {
        if let Some(limit) = depth {
            if d >= limit {
                continue;
            }
        }
        let mut succs = model.successors(&states[sid.0 as usize]);
        succs.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| {
            model.state_name(&a.1).cmp(&model.state_name(&b.1))
        }));
        for (action, next) in succs {
            let tid = match index.get(&next) {
                Some(&id) => id,
                None => {
                    budget.charge_state(states.len() + 1)?;
                    let name = model.state_name(&next);
                    let id = builder.add_state(name);
                    debug_assert_eq!(id.0 as usize, states.len(), "state names must be injective");
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back((id, d + 1));
                    id
                }
            };
            builder.add_transition(sid, action, tid);
        }
    }

    let lts = builder.finish(init_id, model.alphabet());
    Ok(Exploration { lts, states })
}

/// An explicit LTS viewed as a model.
#[derive(Clone, Copy)]
pub struct LtsModel<'a>(pub &'a Lts);

impl Model for LtsModel<'_> {
    type State = StateId;

    fn initial_state(&self) -> StateId {
        self.0.initial()
    }

    fn successors(&self, s: &StateId) -> Vec<(Action, StateId)> {
        self.0
            .transitions_from(*s)
            .iter()
            .map(|(a, t)| (self.0.action(*a).clone(), *t))
            .collect()
    }

    fn state_name(&self, s: &StateId) -> String {
        self.0.name(*s).to_string()
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        self.0.alphabet().clone()
    }
}

/// How a product decides which actions synchronize.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SyncPolicy {
    /// Synchronize on the intersection of the declared alphabets,
    /// interleave everything else. Shared internal or program actions are
    /// rejected.
    SharedAlphabet,
    /// Program-with-object rule: every call and return synchronizes, while
    /// internal actions belong to the right (object) side and program
    /// actions to the left (program) side.
    CallReturn,
}

/// Synchronous product of two models.
pub struct Product<'a, A: Model, B: Model> {
    left: &'a A,
    right: &'a B,
    policy: SyncPolicy,
    shared: BTreeSet<Action>,
    alphabet: BTreeSet<Action>,
}

impl<'a, A: Model, B: Model> Product<'a, A, B> {
    pub fn new(left: &'a A, right: &'a B, policy: SyncPolicy) -> Result<Product<'a, A, B>> {
        let la = left.alphabet();
        let ra = right.alphabet();
        let shared: BTreeSet<Action> = la.intersection(&ra).cloned().collect();
        for a in &shared {
            match a.kind() {
                Kind::Call | Kind::Ret => {}
                Kind::Internal | Kind::Program => {
                    return Err(Error::AlphabetCollision(a.clone()));
                }
            }
        }
        if policy == SyncPolicy::CallReturn {
            // The program side must not carry internal actions, nor the
            // object side program actions, or ownership of interleaved
            // actions would be ambiguous.
            if la.iter().any(|a| a.kind() == Kind::Internal) {
                return Err(Error::invalid(
                    "left side of a program-object product must not have internal actions",
                ));
            }
            if ra.iter().any(|a| a.kind() == Kind::Program) {
                return Err(Error::invalid(
                    "right side of a program-object product must not have program actions",
                ));
            }
        }
        let alphabet = la.union(&ra).cloned().collect();
        Ok(Product { left, right, policy, shared, alphabet })
    }

    pub fn program_object(program: &'a A, object: &'a B) -> Result<Product<'a, A, B>> {
        Product::new(program, object, SyncPolicy::CallReturn)
    }

    fn is_shared(&self, a: &Action) -> bool {
        match self.policy {
            SyncPolicy::SharedAlphabet => self.shared.contains(a),
            SyncPolicy::CallReturn => a.is_interface(),
        }
    }
}

impl<A: Model, B: Model> Model for Product<'_, A, B> {
    type State = (A::State, B::State);

    fn initial_state(&self) -> Self::State {
        (self.left.initial_state(), self.right.initial_state())
    }

    fn successors(&self, s: &Self::State) -> Vec<(Action, Self::State)> {
        let (ls, rs) = s;
        let mut out = Vec::new();
        let rsucc = self.right.successors(rs);
        for (a, lt) in self.left.successors(ls) {
            if self.is_shared(&a) {
                for (b, rt) in &rsucc {
                    if *b == a {
                        out.push((a.clone(), (lt.clone(), rt.clone())));
                    }
                }
            } else {
                out.push((a, (lt, rs.clone())));
            }
        }
        for (b, rt) in rsucc {
            if !self.is_shared(&b) {
                out.push((b, (ls.clone(), rt)));
            }
        }
        out
    }

    fn state_name(&self, s: &Self::State) -> String {
        format!("{} ⊗ {}", self.left.state_name(&s.0), self.right.state_name(&s.1))
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        self.alphabet.clone()
    }
}

/// Explicit product of two materialized LTSs under the shared-alphabet
/// rule; the reachable part is materialized.
pub fn product_lts(a: &Lts, b: &Lts, budget: &Budget) -> Result<Lts> {
    let la = LtsModel(a);
    let lb = LtsModel(b);
    let p = Product::new(&la, &lb, SyncPolicy::SharedAlphabet)?;
    Ok(explore(&p, budget)?.lts)
}

/// All traces of length at most `depth`, exactly, canonically ordered.
/// Includes the empty trace; the result is prefix-closed.
pub fn traces<M: Model>(model: &M, depth: usize, budget: &Budget) -> Result<BTreeSet<Trace>> {
    let mut out = BTreeSet::new();
    out.insert(Trace::empty());
    let mut stack: Vec<(M::State, Vec<Action>)> = vec![(model.initial_state(), Vec::new())];
    while let Some((s, prefix)) = stack.pop() {
        if prefix.len() >= depth {
            continue;
        }
        for (a, t) in model.successors(&s) {
            let mut trace = prefix.clone();
            trace.push(a);
            if out.insert(Trace(trace.clone())) {
                budget.charge_trace(out.len())?;
            }
            stack.push((t, trace));
        }
    }
    Ok(out)
}

/// Does the model admit a trace of length at most `depth` whose
/// call/return projection is exactly `target`?
pub fn admits_history<M: Model>(
    model: &M,
    target: &[Action],
    depth: usize,
    budget: &Budget,
) -> Result<bool> {
    // Memoize the best remaining depth per (state, consumed prefix length).
    let mut best: HashMap<(M::State, usize), usize> = HashMap::new();
    let mut stack: Vec<(M::State, usize, usize)> = vec![(model.initial_state(), 0, depth)];
    while let Some((s, idx, left)) = stack.pop() {
        if idx == target.len() {
            return Ok(true);
        }
        match best.get(&(s.clone(), idx)) {
            Some(&seen) if seen >= left => continue,
            _ => {
                budget.charge_state(best.len() + 1)?;
                best.insert((s.clone(), idx), left);
            }
        }
        if left == 0 {
            continue;
        }
        for (a, t) in model.successors(&s) {
            if a.is_interface() {
                if a == target[idx] {
                    stack.push((t, idx + 1, left - 1));
                }
            } else {
                stack.push((t, idx, left - 1));
            }
        }
    }
    Ok(false)
}

/// Project every trace and dedupe.
pub fn project_traces(ts: &BTreeSet<Trace>, gamma: &Gamma) -> BTreeSet<Trace> {
    ts.iter()
        .map(|t| crate::history::project_trace(t, gamma))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Value;

    fn register_like() -> Lts {
        Lts::from_parts(
            vec!["idle".into(), "w".into()],
            "idle",
            vec![
                ("idle".into(), Action::call("write", Value::Int(1), 1), "w".into()),
                ("w".into(), Action::ret("write", Value::ok(), 1), "idle".into()),
            ],
            BTreeSet::new(),
        )
        .unwrap()
    }

    #[test]
    fn traces_depth_zero_is_epsilon() {
        let lts = register_like();
        let ts = traces(&LtsModel(&lts), 0, &Budget::default()).unwrap();
        assert_eq!(ts.len(), 1);
        assert!(ts.contains(&Trace::empty()));
    }

    #[test]
    fn traces_are_monotone_in_depth() {
        let lts = register_like();
        let m = LtsModel(&lts);
        let mut prev = 0;
        for d in 0..6 {
            let n = traces(&m, d, &Budget::default()).unwrap().len();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn unit_product_is_identity() {
        let lts = register_like();
        let unit = Lts::from_parts(vec!["u".into()], "u", vec![], BTreeSet::new()).unwrap();
        let p = product_lts(&lts, &unit, &Budget::default()).unwrap();
        let m1 = traces(&LtsModel(&lts), 4, &Budget::default()).unwrap();
        let m2 = traces(&LtsModel(&p), 4, &Budget::default()).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn shared_internal_labels_are_rejected() {
        let a = Lts::from_parts(
            vec!["x".into()],
            "x",
            vec![("x".into(), Action::internal("dup"), "x".into())],
            BTreeSet::new(),
        )
        .unwrap();
        let b = a.clone();
        assert!(matches!(
            product_lts(&a, &b, &Budget::default()),
            Err(Error::AlphabetCollision(_))
        ));
    }

    #[test]
    fn trace_budget_is_distinct() {
        let lts = register_like();
        let tight = Budget { max_states: 1000, max_traces: 2 };
        match traces(&LtsModel(&lts), 5, &tight) {
            Err(Error::TraceBudget { .. }) => {}
            other => panic!("expected trace budget error, got {other:?}"),
        }
    }
}
