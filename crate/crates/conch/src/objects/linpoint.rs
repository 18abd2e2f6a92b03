//! Objects with fixed linearization points: every method body is a run of
//! padding steps followed by one internal step that applies the
//! sequential specification atomically and captures the return value.
//! Such objects are strongly linearizable by construction, which makes
//! them useful fixtures on the positive side of witness and simulation
//! suites.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::{Action, OpId, Value};
use crate::model::Model;
use crate::objects::seqspec::SeqSpec;

#[derive(Clone, Debug)]
pub struct LinPointObject<S: SeqSpec> {
    pub spec: S,
    pub max_ops: u32,
    /// Internal padding steps before the committing step.
    pub pre_steps: u32,
    pub ns: String,
}

impl<S: SeqSpec> LinPointObject<S> {
    pub fn new(spec: S, max_ops: u32) -> LinPointObject<S> {
        let ns = format!("{}lp", spec.name());
        LinPointObject { spec, max_ops, pre_steps: 0, ns }
    }

    pub fn with_padding(mut self, pre_steps: u32) -> LinPointObject<S> {
        self.pre_steps = pre_steps;
        self
    }

    pub fn with_namespace(mut self, ns: &str) -> LinPointObject<S> {
        self.ns = ns.to_string();
        self
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinPointFrame {
    pub method: String,
    pub arg: Value,
    /// Padding steps taken; the commit fires at `pre_steps`.
    pub pc: u32,
    pub ret: Option<Value>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinPointState<T> {
    pub value: T,
    pub next_op: u32,
    pub frames: BTreeMap<OpId, LinPointFrame>,
}

impl<S: SeqSpec> Model for LinPointObject<S> {
    type State = LinPointState<S::State>;

    fn initial_state(&self) -> Self::State {
        LinPointState { value: self.spec.initial(), next_op: 0, frames: BTreeMap::new() }
    }

    fn successors(&self, s: &Self::State) -> Vec<(Action, Self::State)> {
        let mut out = Vec::new();
        if s.next_op < self.max_ops {
            let k = OpId(s.next_op + 1);
            for (method, arg) in self.spec.calls() {
                let mut next = s.clone();
                next.next_op += 1;
                next.frames.insert(
                    k,
                    LinPointFrame { method: method.clone(), arg: arg.clone(), pc: 0, ret: None },
                );
                out.push((Action::Call { method, value: arg, op: k }, next));
            }
        }
        for (&k, frame) in &s.frames {
            match &frame.ret {
                None if frame.pc < self.pre_steps => {
                    let mut next = s.clone();
                    next.frames.get_mut(&k).expect("present").pc += 1;
                    out.push((
                        Action::internal(format!("{}.pre#{}@{}", self.ns, k, frame.pc)),
                        next,
                    ));
                }
                None => {
                    let (value, ret) = self.spec.apply(&s.value, &frame.method, &frame.arg);
                    let mut next = s.clone();
                    next.value = value;
                    next.frames.get_mut(&k).expect("present").ret = Some(ret);
                    out.push((Action::internal(format!("{}.commit#{}", self.ns, k)), next));
                }
                Some(ret) => {
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((
                        Action::Ret { method: frame.method.clone(), value: ret.clone(), op: k },
                        next,
                    ));
                }
            }
        }
        out
    }

    fn state_name(&self, s: &Self::State) -> String {
        let frames = s
            .frames
            .iter()
            .map(|(k, f)| format!("{}:{:?}", k, f))
            .collect::<Vec<_>>()
            .join(" ");
        format!("{}=[{:?}] op={} {{{frames}}}", self.ns, s.value, s.next_op)
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        for k in 1..=self.max_ops {
            let kid = OpId(k);
            for (method, arg) in self.spec.calls() {
                for rv in self.spec.returns(&method) {
                    out.insert(Action::Ret { method: method.clone(), value: rv, op: kid });
                }
                out.insert(Action::Call { method, value: arg, op: kid });
            }
            out.insert(Action::internal(format!("{}.commit#{}", self.ns, k)));
            for pc in 0..self.pre_steps {
                out.insert(Action::internal(format!("{}.pre#{}@{}", self.ns, k, pc)));
            }
        }
        out
    }
}
