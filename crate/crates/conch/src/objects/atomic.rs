//! The atomic object induced by a sequential specification.
//!
//! States pair the history observed so far with one of its
//! linearizations. Calls extend the history, a linearization-point action
//! `lin(k)` commits a pending operation to the linearization (its return
//! value dictated by the specification applied along the linearization),
//! and a return is enabled only once its operation has been committed.
//! Truncated to `max_ops` operations so the state space stays finite.

use std::collections::BTreeSet;

use crate::action::{Action, OpId, Value};
use crate::model::Model;
use crate::objects::seqspec::SeqSpec;

#[derive(Clone)]
pub struct AtomicModel<S: SeqSpec> {
    spec: S,
    max_ops: u32,
    ns: String,
}

/// A history of calls and returns paired with a sequential history that
/// linearizes it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AtomicState {
    pub h: Vec<Action>,
    pub hs: Vec<Action>,
}

impl<S: SeqSpec> AtomicModel<S> {
    pub fn new(spec: S, max_ops: u32) -> AtomicModel<S> {
        let ns = format!("{}", spec.name());
        AtomicModel { spec, max_ops, ns }
    }

    pub fn with_namespace(mut self, ns: &str) -> AtomicModel<S> {
        self.ns = ns.to_string();
        self
    }

    pub fn spec(&self) -> &S {
        &self.spec
    }

    pub fn max_ops(&self) -> u32 {
        self.max_ops
    }

    pub fn lin_label(&self, k: OpId) -> String {
        format!("{}.lin({})", self.ns, k)
    }

    /// Canonical state name for a (history, linearization) pair; used to
    /// address atomic states from witness conversions.
    pub fn name_of(&self, s: &AtomicState) -> String {
        let fmt = |v: &[Action]| {
            v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
        };
        format!("h=[{}] hs=[{}]", fmt(&s.h), fmt(&s.hs))
    }

    fn calls_made(s: &AtomicState) -> u32 {
        s.h.iter().filter(|a| a.is_call()).count() as u32
    }

    /// Replay the linearization through the specification.
    fn replay(&self, hs: &[Action]) -> S::State {
        let mut st = self.spec.initial();
        for a in hs {
            if let Action::Call { method, value, .. } = a {
                let (next, _) = self.spec.apply(&st, method, value);
                st = next;
            }
        }
        st
    }
}

impl<S: SeqSpec> Model for AtomicModel<S> {
    type State = AtomicState;

    fn initial_state(&self) -> AtomicState {
        AtomicState { h: Vec::new(), hs: Vec::new() }
    }

    fn successors(&self, s: &AtomicState) -> Vec<(Action, AtomicState)> {
        let mut out = Vec::new();
        let calls_made = Self::calls_made(s);

        // Fresh calls, identifiers assigned in call order.
        if calls_made < self.max_ops {
            let k = OpId(calls_made + 1);
            for (method, arg) in self.spec.calls() {
                let action = Action::Call { method, value: arg, op: k };
                let mut h = s.h.clone();
                h.push(action.clone());
                out.push((action, AtomicState { h, hs: s.hs.clone() }));
            }
        }

        let called: Vec<(OpId, String, Value)> = s
            .h
            .iter()
            .filter_map(|a| match a {
                Action::Call { method, value, op } => Some((*op, method.clone(), value.clone())),
                _ => None,
            })
            .collect();
        let returned: BTreeSet<OpId> =
            s.h.iter().filter_map(|a| a.is_ret().then(|| a.op_id().unwrap())).collect();
        let linearized: BTreeSet<OpId> =
            s.hs.iter().filter_map(|a| a.is_call().then(|| a.op_id().unwrap())).collect();

        for (k, method, arg) in &called {
            if !linearized.contains(k) {
                // Linearization point: commit the pending operation.
                let state = self.replay(&s.hs);
                let (_, ret) = self.spec.apply(&state, method, arg);
                let mut hs = s.hs.clone();
                hs.push(Action::Call { method: method.clone(), value: arg.clone(), op: *k });
                hs.push(Action::Ret { method: method.clone(), value: ret, op: *k });
                out.push((
                    Action::internal(self.lin_label(*k)),
                    AtomicState { h: s.h.clone(), hs },
                ));
            } else if !returned.contains(k) {
                // Return with the committed value.
                let ret = s
                    .hs
                    .iter()
                    .find(|a| a.is_ret() && a.op_id() == Some(*k))
                    .expect("linearized operations are complete in hs")
                    .clone();
                let mut h = s.h.clone();
                h.push(ret.clone());
                out.push((ret, AtomicState { h, hs: s.hs.clone() }));
            }
        }
        out
    }

    fn state_name(&self, s: &AtomicState) -> String {
        self.name_of(s)
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        for k in 1..=self.max_ops {
            for (method, arg) in self.spec.calls() {
                for rv in self.spec.returns(&method) {
                    out.insert(Action::Ret { method: method.clone(), value: rv, op: OpId(k) });
                }
                out.insert(Action::Call { method, value: arg, op: OpId(k) });
            }
            out.insert(Action::internal(self.lin_label(OpId(k))));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Gamma;
    use crate::error::Budget;
    use crate::history::Trace;
    use crate::model::traces;
    use crate::objects::seqspec::RegisterSpec;
    use crate::refine::is_gamma_deterministic;

    fn register() -> AtomicModel<RegisterSpec> {
        AtomicModel::new(RegisterSpec::new(vec![0, 1]), 1)
    }

    #[test]
    fn single_write_unfolds_call_lin_ret() {
        let m = register();
        let ts = traces(&m, 3, &Budget::default()).unwrap();
        let expected = Trace(vec![
            Action::call("write", Value::Int(1), 1),
            Action::internal("register.lin(1)"),
            Action::ret("write", Value::ok(), 1),
        ]);
        assert!(ts.contains(&expected));
    }

    #[test]
    fn no_return_before_linearization() {
        let m = register();
        for t in traces(&m, 4, &Budget::default()).unwrap() {
            let mut linearized = BTreeSet::new();
            for a in t.actions() {
                match a {
                    Action::Internal { label } => {
                        let k: u32 = label
                            .trim_start_matches("register.lin(")
                            .trim_end_matches(')')
                            .parse()
                            .unwrap();
                        linearized.insert(OpId(k));
                    }
                    Action::Ret { op, .. } => assert!(linearized.contains(op)),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn atomic_register_is_not_interface_deterministic() {
        // After a call, the linearization point may or may not have fired:
        // the non-observable closure holds two states.
        let m = register();
        assert!(!is_gamma_deterministic(&m, &Gamma::CallReturn, &Budget::default()).unwrap());
    }
}
