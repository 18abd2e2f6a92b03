//! The three-thread leak client over a stack.
//!
//! Thread 1 pushes 0 then pops into `low1`; thread 2 pushes 1 then pops
//! into `low2`; thread 3 blocks until both pushes returned, pushes 2, and
//! then reads a high-clearance Boolean input. When every thread is done
//! the program emits a single observation marker carrying
//! `(low1, low2, high)`, so projections onto program actions determine
//! the final values.

use std::collections::BTreeSet;

use crate::action::{Action, OpId, Value};
use crate::model::Model;

#[derive(Clone, Debug, Default)]
pub struct Fig1Program;

const STACK_VALUES: [i64; 3] = [0, 1, 2];

/// Keep the first transition per action, in generation order.
pub(crate) fn dedupe_by_action<S>(steps: &mut Vec<(Action, S)>) {
    let mut seen: BTreeSet<Action> = BTreeSet::new();
    steps.retain(|(a, _)| seen.insert(a.clone()));
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PopThreadPc {
    PrePush,
    PushPending(OpId),
    PrePop,
    PopPending(OpId),
    Done,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HighThreadPc {
    Waiting,
    PushPending(OpId),
    PreHigh,
    Done,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fig1State {
    pub t1: PopThreadPc,
    pub t2: PopThreadPc,
    pub t3: HighThreadPc,
    pub low1: Option<Value>,
    pub low2: Option<Value>,
    pub high: Option<i64>,
    pub next_op: u32,
    pub observed: bool,
}

impl Fig1State {
    pub fn all_done(&self) -> bool {
        self.t1 == PopThreadPc::Done && self.t2 == PopThreadPc::Done && self.t3 == HighThreadPc::Done
    }

    /// Does the final observation satisfy `low1 == high`?
    pub fn low1_equals_high(&self) -> bool {
        match (&self.low1, self.high) {
            (Some(Value::Int(v)), Some(h)) => *v == h,
            _ => false,
        }
    }

    pub fn low2_equals_high(&self) -> bool {
        match (&self.low2, self.high) {
            (Some(Value::Int(v)), Some(h)) => *v == h,
            _ => false,
        }
    }
}

fn pop_returns() -> Vec<Value> {
    let mut out: Vec<Value> = STACK_VALUES.iter().map(|&v| Value::Int(v)).collect();
    out.push(Value::empty());
    out
}

fn pop_thread_steps(
    pc: &PopThreadPc,
    push_value: i64,
    next_op: u32,
    out: &mut Vec<(Action, PopThreadPc, Option<Value>, u32)>,
) {
    match pc {
        PopThreadPc::PrePush => {
            let k = OpId(next_op + 1);
            out.push((
                Action::Call { method: "push".into(), value: Value::Int(push_value), op: k },
                PopThreadPc::PushPending(k),
                None,
                next_op + 1,
            ));
        }
        PopThreadPc::PushPending(k) => {
            out.push((
                Action::Ret { method: "push".into(), value: Value::ok(), op: *k },
                PopThreadPc::PrePop,
                None,
                next_op,
            ));
        }
        PopThreadPc::PrePop => {
            let k = OpId(next_op + 1);
            out.push((
                Action::Call { method: "pop".into(), value: Value::Unit, op: k },
                PopThreadPc::PopPending(k),
                None,
                next_op + 1,
            ));
        }
        PopThreadPc::PopPending(k) => {
            for v in pop_returns() {
                out.push((
                    Action::Ret { method: "pop".into(), value: v.clone(), op: *k },
                    PopThreadPc::Done,
                    Some(v),
                    next_op,
                ));
            }
        }
        PopThreadPc::Done => {}
    }
}

impl Model for Fig1Program {
    type State = Fig1State;

    fn initial_state(&self) -> Fig1State {
        Fig1State {
            t1: PopThreadPc::PrePush,
            t2: PopThreadPc::PrePush,
            t3: HighThreadPc::Waiting,
            low1: None,
            low2: None,
            high: None,
            next_op: 0,
            observed: false,
        }
    }

    fn successors(&self, s: &Fig1State) -> Vec<(Action, Fig1State)> {
        let mut out = Vec::new();

        let mut t1_steps = Vec::new();
        pop_thread_steps(&s.t1, 0, s.next_op, &mut t1_steps);
        for (a, pc, low, next_op) in t1_steps {
            let mut next = s.clone();
            next.t1 = pc;
            next.next_op = next_op;
            if low.is_some() {
                next.low1 = low;
            }
            out.push((a, next));
        }

        let mut t2_steps = Vec::new();
        pop_thread_steps(&s.t2, 1, s.next_op, &mut t2_steps);
        for (a, pc, low, next_op) in t2_steps {
            let mut next = s.clone();
            next.t2 = pc;
            next.next_op = next_op;
            if low.is_some() {
                next.low2 = low;
            }
            out.push((a, next));
        }

        match &s.t3 {
            HighThreadPc::Waiting => {
                // assume a == b == OK: both pushes must have returned.
                let t1_pushed = !matches!(s.t1, PopThreadPc::PrePush | PopThreadPc::PushPending(_));
                let t2_pushed = !matches!(s.t2, PopThreadPc::PrePush | PopThreadPc::PushPending(_));
                if t1_pushed && t2_pushed {
                    let k = OpId(s.next_op + 1);
                    let mut next = s.clone();
                    next.t3 = HighThreadPc::PushPending(k);
                    next.next_op += 1;
                    out.push((
                        Action::Call { method: "push".into(), value: Value::Int(2), op: k },
                        next,
                    ));
                }
            }
            HighThreadPc::PushPending(k) => {
                let mut next = s.clone();
                next.t3 = HighThreadPc::PreHigh;
                out.push((Action::Ret { method: "push".into(), value: Value::ok(), op: *k }, next));
            }
            HighThreadPc::PreHigh => {
                for b in [0, 1] {
                    let mut next = s.clone();
                    next.t3 = HighThreadPc::Done;
                    next.high = Some(b);
                    out.push((Action::program(format!("high={b}")), next));
                }
            }
            HighThreadPc::Done => {}
        }

        if s.all_done() && !s.observed {
            let l1 = s.low1.clone().expect("pop returned");
            let l2 = s.low2.clone().expect("pop returned");
            let h = s.high.expect("high input read");
            let mut next = s.clone();
            next.observed = true;
            out.push((Action::program(format!("obs({l1},{l2},{h})")), next));
        }

        // Identical call actions from two ready threads (both pops with the
        // same fresh identifier) are resolved in thread order, keeping the
        // program deterministic per label. The threads stay free to overlap
        // in every other way.
        dedupe_by_action(&mut out);
        out
    }

    fn state_name(&self, s: &Fig1State) -> String {
        let opt = |v: &Option<Value>| v.as_ref().map_or("?".to_string(), |v| v.to_string());
        format!(
            "t1={:?} t2={:?} t3={:?} low1={} low2={} high={} op={} obs={}",
            s.t1,
            s.t2,
            s.t3,
            opt(&s.low1),
            opt(&s.low2),
            s.high.map_or("?".to_string(), |h| h.to_string()),
            s.next_op,
            s.observed,
        )
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        // Five operations; identifiers depend on the call order.
        for k in 1..=5 {
            let k = OpId(k);
            for &v in &STACK_VALUES {
                out.insert(Action::Call { method: "push".into(), value: Value::Int(v), op: k });
            }
            out.insert(Action::Ret { method: "push".into(), value: Value::ok(), op: k });
            out.insert(Action::Call { method: "pop".into(), value: Value::Unit, op: k });
            for v in pop_returns() {
                out.insert(Action::Ret { method: "pop".into(), value: v, op: k });
            }
        }
        for b in [0, 1] {
            out.insert(Action::program(format!("high={b}")));
        }
        for l1 in pop_returns() {
            for l2 in pop_returns() {
                for h in [0, 1] {
                    out.insert(Action::program(format!("obs({l1},{l2},{h})")));
                }
            }
        }
        out
    }
}
