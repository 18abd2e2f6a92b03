//! Array-based lock-free stack in the style of Afek, Gafni and Morrison.
//!
//! Shared state: an array `items` (initially all null) and a counter
//! `range` holding the index of the first unused slot. A push reserves a
//! slot with an atomic fetch-and-increment, then writes its value. A pop
//! reads `range` into a local, then probes indices `r-1` down to `0`,
//! atomically swapping each cell with null; it returns the first non-null
//! value, or `EMPTY` once index 0 has been probed.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::{Action, OpId, Value};
use crate::model::Model;

#[derive(Clone, Debug)]
pub struct AfekStack {
    pub threads: u32,
    pub capacity: usize,
    pub values: Vec<i64>,
    pub max_pushes: u32,
    pub max_pops: u32,
    pub ns: String,
}

impl AfekStack {
    /// Pushes are bounded by the capacity, pops by the thread count.
    pub fn new(threads: u32, capacity: usize, values: Vec<i64>) -> AfekStack {
        AfekStack {
            threads,
            capacity,
            values,
            max_pushes: capacity as u32,
            max_pops: threads,
            ns: "afek".to_string(),
        }
    }

    pub fn with_ops(mut self, pushes: u32, pops: u32) -> AfekStack {
        assert!(pushes as usize <= self.capacity, "pushes must fit the array");
        self.max_pushes = pushes;
        self.max_pops = pops;
        self
    }

    pub fn with_namespace(mut self, ns: &str) -> AfekStack {
        self.ns = ns.to_string();
        self
    }

    fn total_ops(&self) -> u32 {
        self.max_pushes + self.max_pops
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AfekFrame {
    /// slot None: reserve pending; slot set, not written: write pending;
    /// written: return pending.
    Push { v: i64, slot: Option<usize>, wrote: bool },
    /// `next` is the number of indices still to probe; probing happens at
    /// `next - 1`. A read of `range` sets `next = r`.
    PopRead,
    PopScan { next: usize },
    PopDone { v: Option<i64> },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AfekState {
    pub items: Vec<Option<i64>>,
    pub range: usize,
    pub next_op: u32,
    pub pushes: u32,
    pub pops: u32,
    pub frames: BTreeMap<OpId, AfekFrame>,
}

impl Model for AfekStack {
    type State = AfekState;

    fn initial_state(&self) -> AfekState {
        AfekState {
            items: vec![None; self.capacity],
            range: 0,
            next_op: 0,
            pushes: 0,
            pops: 0,
            frames: BTreeMap::new(),
        }
    }

    fn successors(&self, s: &AfekState) -> Vec<(Action, AfekState)> {
        let mut out = Vec::new();

        if (s.frames.len() as u32) < self.threads {
            let k = OpId(s.next_op + 1);
            if s.pushes < self.max_pushes {
                for &v in &self.values {
                    let mut next = s.clone();
                    next.next_op += 1;
                    next.pushes += 1;
                    next.frames.insert(k, AfekFrame::Push { v, slot: None, wrote: false });
                    out.push((Action::Call { method: "push".into(), value: Value::Int(v), op: k }, next));
                }
            }
            if s.pops < self.max_pops {
                let mut next = s.clone();
                next.next_op += 1;
                next.pops += 1;
                next.frames.insert(k, AfekFrame::PopRead);
                out.push((Action::Call { method: "pop".into(), value: Value::Unit, op: k }, next));
            }
        }

        for (&k, frame) in &s.frames {
            match frame {
                AfekFrame::Push { v, slot: None, wrote: _ } => {
                    // reserve: i <- range; range <- range + 1 (atomic)
                    let mut next = s.clone();
                    next.frames.insert(k, AfekFrame::Push { v: *v, slot: Some(s.range), wrote: false });
                    next.range += 1;
                    out.push((Action::internal(format!("{}.res#{}", self.ns, k)), next));
                }
                AfekFrame::Push { v, slot: Some(i), wrote: false } => {
                    let mut next = s.clone();
                    next.items[*i] = Some(*v);
                    next.frames.insert(k, AfekFrame::Push { v: *v, slot: Some(*i), wrote: true });
                    out.push((Action::internal(format!("{}.w#{}", self.ns, k)), next));
                }
                AfekFrame::Push { v, slot: Some(_), wrote: true } => {
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((Action::Ret { method: "push".into(), value: Value::ok(), op: k }, next));
                    let _ = v;
                }
                AfekFrame::PopRead => {
                    let mut next = s.clone();
                    next.frames.insert(k, AfekFrame::PopScan { next: s.range });
                    out.push((Action::internal(format!("{}.rd#{}", self.ns, k)), next));
                }
                AfekFrame::PopScan { next: 0 } => {
                    // Probed past index 0 without finding a value.
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((Action::Ret { method: "pop".into(), value: Value::empty(), op: k }, next));
                }
                AfekFrame::PopScan { next: j } => {
                    let idx = *j - 1;
                    let mut next = s.clone();
                    match s.items[idx] {
                        Some(v) => {
                            next.items[idx] = None;
                            next.frames.insert(k, AfekFrame::PopDone { v: Some(v) });
                        }
                        None => {
                            next.frames.insert(k, AfekFrame::PopScan { next: idx });
                        }
                    }
                    out.push((Action::internal(format!("{}.pr#{}@{}", self.ns, k, idx)), next));
                }
                AfekFrame::PopDone { v } => {
                    let value = match v {
                        Some(v) => Value::Int(*v),
                        None => Value::empty(),
                    };
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((Action::Ret { method: "pop".into(), value, op: k }, next));
                }
            }
        }
        out
    }

    fn state_name(&self, s: &AfekState) -> String {
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
            "items=[{items}] rng={} op={} pu={} po={} {{{frames}}}",
            s.range, s.next_op, s.pushes, s.pops
        )
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        for k in 1..=self.total_ops() {
            let k = OpId(k);
            for &v in &self.values {
                out.insert(Action::Call { method: "push".into(), value: Value::Int(v), op: k });
                out.insert(Action::Ret { method: "pop".into(), value: Value::Int(v), op: k });
            }
            out.insert(Action::Ret { method: "push".into(), value: Value::ok(), op: k });
            out.insert(Action::Call { method: "pop".into(), value: Value::Unit, op: k });
            out.insert(Action::Ret { method: "pop".into(), value: Value::empty(), op: k });
            out.insert(Action::internal(format!("{}.res#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.w#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.rd#{}", self.ns, k)));
            for idx in 0..self.capacity {
                out.insert(Action::internal(format!("{}.pr#{}@{}", self.ns, k, idx)));
            }
        }
        out
    }
}
