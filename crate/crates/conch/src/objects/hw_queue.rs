//! The Herlihy & Wing queue.
//!
//! Enqueue reserves a slot with an atomic fetch-and-increment of `back`
//! and then writes its value. Dequeue reads `back` into a local, sweeps
//! slots `0..back` with an atomic swap-null, returns the first value it
//! extracts, and retries the whole sweep when it finds nothing. A dequeue
//! on an empty queue therefore spins instead of returning.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::{Action, OpId, Value};
use crate::model::Model;

#[derive(Clone, Debug)]
pub struct HwQueue {
    pub threads: u32,
    pub capacity: usize,
    pub values: Vec<i64>,
    pub max_enqs: u32,
    pub max_deqs: u32,
    pub ns: String,
}

impl HwQueue {
    pub fn new(threads: u32, capacity: usize, values: Vec<i64>) -> HwQueue {
        HwQueue {
            threads,
            capacity,
            values,
            max_enqs: capacity as u32,
            max_deqs: threads,
            ns: "hw".to_string(),
        }
    }

    pub fn with_ops(mut self, enqs: u32, deqs: u32) -> HwQueue {
        assert!(enqs as usize <= self.capacity, "enqueues must fit the array");
        self.max_enqs = enqs;
        self.max_deqs = deqs;
        self
    }

    pub fn with_namespace(mut self, ns: &str) -> HwQueue {
        self.ns = ns.to_string();
        self
    }

    fn total_ops(&self) -> u32 {
        self.max_enqs + self.max_deqs
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HwFrame {
    Enq { v: i64, slot: Option<usize>, wrote: bool },
    DeqRead,
    /// Sweeping forward: `r` is the back value read, `i` the next slot.
    DeqScan { r: usize, i: usize },
    DeqDone { v: i64 },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HwState {
    pub items: Vec<Option<i64>>,
    pub back: usize,
    pub next_op: u32,
    pub enqs: u32,
    pub deqs: u32,
    pub frames: BTreeMap<OpId, HwFrame>,
}

impl Model for HwQueue {
    type State = HwState;

    fn initial_state(&self) -> HwState {
        HwState {
            items: vec![None; self.capacity],
            back: 0,
            next_op: 0,
            enqs: 0,
            deqs: 0,
            frames: BTreeMap::new(),
        }
    }

    fn successors(&self, s: &HwState) -> Vec<(Action, HwState)> {
        let mut out = Vec::new();

        if (s.frames.len() as u32) < self.threads {
            let k = OpId(s.next_op + 1);
            if s.enqs < self.max_enqs {
                for &v in &self.values {
                    let mut next = s.clone();
                    next.next_op += 1;
                    next.enqs += 1;
                    next.frames.insert(k, HwFrame::Enq { v, slot: None, wrote: false });
                    out.push((Action::Call { method: "enq".into(), value: Value::Int(v), op: k }, next));
                }
            }
            if s.deqs < self.max_deqs {
                let mut next = s.clone();
                next.next_op += 1;
                next.deqs += 1;
                next.frames.insert(k, HwFrame::DeqRead);
                out.push((Action::Call { method: "deq".into(), value: Value::Unit, op: k }, next));
            }
        }

        for (&k, frame) in &s.frames {
            match frame {
                HwFrame::Enq { v, slot: None, .. } => {
                    let mut next = s.clone();
                    next.frames.insert(k, HwFrame::Enq { v: *v, slot: Some(s.back), wrote: false });
                    next.back += 1;
                    out.push((Action::internal(format!("{}.res#{}", self.ns, k)), next));
                }
                HwFrame::Enq { v, slot: Some(i), wrote: false } => {
                    let mut next = s.clone();
                    next.items[*i] = Some(*v);
                    next.frames.insert(k, HwFrame::Enq { v: *v, slot: Some(*i), wrote: true });
                    out.push((Action::internal(format!("{}.w#{}", self.ns, k)), next));
                }
                HwFrame::Enq { wrote: true, .. } => {
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((Action::Ret { method: "enq".into(), value: Value::ok(), op: k }, next));
                }
                HwFrame::DeqRead => {
                    let mut next = s.clone();
                    next.frames.insert(k, HwFrame::DeqScan { r: s.back, i: 0 });
                    out.push((Action::internal(format!("{}.rb#{}", self.ns, k)), next));
                }
                HwFrame::DeqScan { r, i } if i < r => {
                    let mut next = s.clone();
                    match s.items[*i] {
                        Some(v) => {
                            next.items[*i] = None;
                            next.frames.insert(k, HwFrame::DeqDone { v });
                        }
                        None => {
                            next.frames.insert(k, HwFrame::DeqScan { r: *r, i: *i + 1 });
                        }
                    }
                    out.push((Action::internal(format!("{}.sw#{}@{}", self.ns, k, i)), next));
                }
                HwFrame::DeqScan { .. } => {
                    // Full miss: retry from a fresh read of back.
                    let mut next = s.clone();
                    next.frames.insert(k, HwFrame::DeqRead);
                    out.push((Action::internal(format!("{}.rt#{}", self.ns, k)), next));
                }
                HwFrame::DeqDone { v } => {
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((
                        Action::Ret { method: "deq".into(), value: Value::Int(*v), op: k },
                        next,
                    ));
                }
            }
        }
        out
    }

    fn state_name(&self, s: &HwState) -> String {
        let items = s
            .items
            .iter()
            .map(|c| match c {
                Some(v) => v.to_string(),
                None => "_".to_string(),
            })
            .collect::<Vec<_>>()
            .join(",");
        let frames = s
            .frames
            .iter()
            .map(|(k, f)| format!("{}:{:?}", k, f))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "items=[{items}] bk={} op={} en={} de={} {{{frames}}}",
            s.back, s.next_op, s.enqs, s.deqs
        )
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        for k in 1..=self.total_ops() {
            let k = OpId(k);
            for &v in &self.values {
                out.insert(Action::Call { method: "enq".into(), value: Value::Int(v), op: k });
                out.insert(Action::Ret { method: "deq".into(), value: Value::Int(v), op: k });
            }
            out.insert(Action::Ret { method: "enq".into(), value: Value::ok(), op: k });
            out.insert(Action::Call { method: "deq".into(), value: Value::Unit, op: k });
            out.insert(Action::internal(format!("{}.res#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.w#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.rb#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.rt#{}", self.ns, k)));
            for idx in 0..self.capacity {
                out.insert(Action::internal(format!("{}.sw#{}@{}", self.ns, k, idx)));
            }
        }
        out
    }
}
