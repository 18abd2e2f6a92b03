//! Bounded refinement and Γ-determinism via on-the-fly determinization.
//!
//! `refines_bounded(A1, A2, Γ, d)` decides `traces(A1, d)|Γ ⊆ T(A2)|Γ` by
//! walking A1 to depth `d` while tracking the macro-state of A2's
//! Γ-projection: the set of A2 states reachable by any sequence with the
//! same Γ-projection. A2 needs no depth bound of its own.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;
use std::rc::Rc;

use crate::action::{Action, Gamma};
use crate::error::{Budget, Result};
use crate::history::Trace;
use crate::model::Model;

/// Outcome of a bounded refinement check.
#[derive(Clone, Debug)]
pub enum Refines {
    Holds,
    /// A trace of the concrete system whose Γ-projection the abstract
    /// system does not admit.
    Fails(Trace),
}

impl Refines {
    pub fn holds(&self) -> bool {
        matches!(self, Refines::Holds)
    }
}

/// Interns abstract states to dense indices so macro-states are cheap.
struct Interner<S> {
    map: HashMap<S, u32>,
    vec: Vec<S>,
}

impl<S: Clone + Eq + Hash> Interner<S> {
    fn new() -> Self {
        Interner { map: HashMap::new(), vec: Vec::new() }
    }

    fn intern(&mut self, s: S, budget: &Budget) -> Result<u32> {
        if let Some(&i) = self.map.get(&s) {
            return Ok(i);
        }
        budget.charge_state(self.vec.len() + 1)?;
        let i = self.vec.len() as u32;
        self.map.insert(s.clone(), i);
        self.vec.push(s);
        Ok(i)
    }

    fn get(&self, i: u32) -> &S {
        &self.vec[i as usize]
    }
}

/// Closure and Γ-steps of the abstract side, computed lazily.
struct MacroStepper<'a, M: Model> {
    model: &'a M,
    gamma: &'a Gamma,
    states: Interner<M::State>,
    // Successors partitioned into silent (non-Γ) and visible steps.
    succ: HashMap<u32, (Vec<u32>, Vec<(Action, u32)>)>,
}

impl<'a, M: Model> MacroStepper<'a, M> {
    fn new(model: &'a M, gamma: &'a Gamma) -> Self {
        MacroStepper { model, gamma, states: Interner::new(), succ: HashMap::new() }
    }

    fn succ_of(&mut self, s: u32, budget: &Budget) -> Result<&(Vec<u32>, Vec<(Action, u32)>)> {
        if !self.succ.contains_key(&s) {
            let state = self.states.get(s).clone();
            let mut silent = Vec::new();
            let mut visible = Vec::new();
            for (a, t) in self.model.successors(&state) {
                let ti = self.states.intern(t, budget)?;
                if self.gamma.admits(&a) {
                    visible.push((a, ti));
                } else {
                    silent.push(ti);
                }
            }
            silent.sort_unstable();
            silent.dedup();
            self.succ.insert(s, (silent, visible));
        }
        Ok(self.succ.get(&s).expect("just inserted"))
    }

    /// Non-Γ reflexive-transitive closure of a set of states.
    fn closure(&mut self, seed: &[u32], budget: &Budget) -> Result<Vec<u32>> {
        let mut seen: HashSet<u32> = seed.iter().copied().collect();
        let mut stack: Vec<u32> = seed.to_vec();
        while let Some(s) = stack.pop() {
            let (silent, _) = self.succ_of(s, budget)?;
            for &t in silent.clone().iter() {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        let mut v: Vec<u32> = seen.into_iter().collect();
        v.sort_unstable();
        Ok(v)
    }

    /// One visible step from a closed macro-state, followed by closure.
    fn step(&mut self, macro_state: &[u32], a: &Action, budget: &Budget) -> Result<Vec<u32>> {
        let mut landed = Vec::new();
        for &s in macro_state {
            let (_, visible) = self.succ_of(s, budget)?;
            for (b, t) in visible.clone() {
                if &b == a {
                    landed.push(t);
                }
            }
        }
        landed.sort_unstable();
        landed.dedup();
        self.closure(&landed, budget)
    }
}

/// Decide `traces(m1, depth)|Γ ⊆ T(m2)|Γ`.
pub fn refines_bounded<M1: Model, M2: Model>(
    m1: &M1,
    m2: &M2,
    gamma: &Gamma,
    depth: usize,
    budget: &Budget,
) -> Result<Refines> {
    let mut stepper = MacroStepper::new(m2, gamma);
    let init2 = m2.initial_state();
    let i2 = stepper.states.intern(init2, budget)?;
    let init_macro = Rc::new(stepper.closure(&[i2], budget)?);

    let mut concrete = Interner::new();
    let c0 = concrete.intern(m1.initial_state(), budget)?;

    // Prune on (concrete state, macro-state) with the best remaining depth.
    let mut best: HashMap<(u32, Rc<Vec<u32>>), usize> = HashMap::new();
    let mut macros: HashMap<Vec<u32>, Rc<Vec<u32>>> = HashMap::new();
    macros.insert((*init_macro).clone(), init_macro.clone());

    let mut stack: Vec<(u32, Rc<Vec<u32>>, usize, Vec<Action>)> =
        vec![(c0, init_macro, depth, Vec::new())];

    while let Some((s1, mac, left, prefix)) = stack.pop() {
        match best.get(&(s1, mac.clone())) {
            Some(&seen) if seen >= left => continue,
            _ => {
                budget.charge_state(best.len() + 1)?;
                best.insert((s1, mac.clone()), left);
            }
        }
        if left == 0 {
            continue;
        }
        let state1 = concrete.get(s1).clone();
        for (a, t) in m1.successors(&state1) {
            let t1 = concrete.intern(t, budget)?;
            let mut prefix2 = prefix.clone();
            prefix2.push(a.clone());
            if gamma.admits(&a) {
                let next = stepper.step(&mac, &a, budget)?;
                if next.is_empty() {
                    return Ok(Refines::Fails(Trace(prefix2)));
                }
                let shared = macros
                    .entry(next.clone())
                    .or_insert_with(|| Rc::new(next))
                    .clone();
                stack.push((t1, shared, left - 1, prefix2));
            } else {
                stack.push((t1, mac.clone(), left - 1, prefix2));
            }
        }
    }
    Ok(Refines::Holds)
}

/// Is the Γ-projection of the model deterministic? Runs the subset
/// construction from the initial state and checks that every reachable
/// macro-state (including the initial closure) is a singleton.
pub fn is_gamma_deterministic<M: Model>(m: &M, gamma: &Gamma, budget: &Budget) -> Result<bool> {
    let mut stepper = MacroStepper::new(m, gamma);
    let i = stepper.states.intern(m.initial_state(), budget)?;
    let init = stepper.closure(&[i], budget)?;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut stack = vec![init];
    while let Some(mac) = stack.pop() {
        if mac.len() > 1 {
            return Ok(false);
        }
        if !seen.insert(mac.clone()) {
            continue;
        }
        budget.charge_state(seen.len())?;
        // Collect the visible actions enabled anywhere in the macro-state.
        let mut actions: Vec<Action> = Vec::new();
        for &s in &mac {
            let (_, visible) = stepper.succ_of(s, budget)?;
            for (a, _) in visible.clone() {
                if !actions.contains(&a) {
                    actions.push(a);
                }
            }
        }
        for a in actions {
            let next = stepper.step(&mac, &a, budget)?;
            if !next.is_empty() && !seen.contains(&next) {
                stack.push(next);
            }
        }
    }
    Ok(true)
}
