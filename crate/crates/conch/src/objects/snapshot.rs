//! A collect-until-stable snapshot object and its concurrent
//! specification.
//!
//! The implementation's `scan` repeatedly collects the memory into `r1`,
//! keeping the previous collect in `r2`, until two consecutive collects
//! agree. The specification's `scan` instead takes instantaneous
//! snapshots of the whole array at nondeterministic moments and finally
//! returns any one of them. Both share single-step `update(i, d)`.
//! Positions are 1-based.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::{Action, OpId, Value};
use crate::model::Model;

/// Bounds shared by the implementation and the specification: array size,
/// value domain, concurrent updaters/scanners and per-role operation
/// counts.
#[derive(Clone, Debug)]
pub struct SnapshotCfg {
    pub n: usize,
    pub values: Vec<i64>,
    pub updaters: u32,
    pub updates_each: u32,
    pub scanners: u32,
    pub scans_each: u32,
}

impl SnapshotCfg {
    pub fn initial_mem(&self) -> Vec<i64> {
        vec![self.values.first().copied().unwrap_or(0); self.n]
    }

    fn max_updates(&self) -> u32 {
        self.updaters * self.updates_each
    }

    fn max_scans(&self) -> u32 {
        self.scanners * self.scans_each
    }

    fn total_ops(&self) -> u32 {
        self.max_updates() + self.max_scans()
    }

    fn update_args(&self) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for &d in &self.values {
                out.push((i, d));
            }
        }
        out
    }

    fn all_arrays(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for _ in 0..self.n {
            let mut next = Vec::new();
            for prefix in &out {
                for &v in &self.values {
                    let mut arr = prefix.clone();
                    arr.push(v);
                    next.push(arr);
                }
            }
            out = next;
        }
        out
    }

    fn interface_alphabet(&self, out: &mut BTreeSet<Action>) {
        for k in 1..=self.total_ops() {
            let k = OpId(k);
            for (i, d) in self.update_args() {
                out.insert(Action::Call {
                    method: "update".into(),
                    value: Value::pair(i as i64, d),
                    op: k,
                });
            }
            out.insert(Action::Ret { method: "update".into(), value: Value::ok(), op: k });
            out.insert(Action::Call { method: "scan".into(), value: Value::Unit, op: k });
            for arr in self.all_arrays() {
                out.insert(Action::Ret { method: "scan".into(), value: Value::ints(&arr), op: k });
            }
        }
    }
}

fn fmt_mem(mem: &[i64]) -> String {
    mem.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------
// Implementation side
// ---------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SnapshotImpl {
    pub cfg: SnapshotCfg,
    pub ns: String,
}

impl SnapshotImpl {
    pub fn new(cfg: SnapshotCfg) -> SnapshotImpl {
        SnapshotImpl { cfg, ns: "snap".to_string() }
    }

    pub fn with_namespace(mut self, ns: &str) -> SnapshotImpl {
        self.ns = ns.to_string();
        self
    }
}

/// Program counter of a scan. `next` is the next 1-based position the
/// current collect will read; positions below it are already set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ScanPc {
    FirstCollect { next: usize },
    Copy,
    Collect { next: usize },
    Test,
    RetReady,
}

impl ScanPc {
    /// Number of leading positions of `r1` set by the collect in
    /// progress. Outside a collect all of `r1` is a completed collect.
    pub fn positions_set(&self, n: usize) -> usize {
        match self {
            ScanPc::FirstCollect { next } | ScanPc::Collect { next } => next - 1,
            ScanPc::Copy | ScanPc::Test | ScanPc::RetReady => n,
        }
    }

    /// True at the location right after a successful equality test.
    pub fn post_equality(&self) -> bool {
        matches!(self, ScanPc::RetReady)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SnapImplFrame {
    Update { i: usize, d: i64, wrote: bool },
    Scan { r1: Vec<i64>, r2: Vec<i64>, pc: ScanPc },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SnapImplState {
    pub mem: Vec<i64>,
    pub next_op: u32,
    pub updates: u32,
    pub scans: u32,
    pub frames: BTreeMap<OpId, SnapImplFrame>,
}

impl SnapImplState {
    fn pending_updates(&self) -> u32 {
        self.frames
            .values()
            .filter(|f| matches!(f, SnapImplFrame::Update { .. }))
            .count() as u32
    }

    fn pending_scans(&self) -> u32 {
        self.frames
            .values()
            .filter(|f| matches!(f, SnapImplFrame::Scan { .. }))
            .count() as u32
    }
}

impl Model for SnapshotImpl {
    type State = SnapImplState;

    fn initial_state(&self) -> SnapImplState {
        SnapImplState {
            mem: self.cfg.initial_mem(),
            next_op: 0,
            updates: 0,
            scans: 0,
            frames: BTreeMap::new(),
        }
    }

    fn successors(&self, s: &SnapImplState) -> Vec<(Action, SnapImplState)> {
        let cfg = &self.cfg;
        let mut out = Vec::new();
        let k = OpId(s.next_op + 1);

        if s.updates < cfg.max_updates() && s.pending_updates() < cfg.updaters {
            for (i, d) in cfg.update_args() {
                let mut next = s.clone();
                next.next_op += 1;
                next.updates += 1;
                next.frames.insert(k, SnapImplFrame::Update { i, d, wrote: false });
                out.push((
                    Action::Call { method: "update".into(), value: Value::pair(i as i64, d), op: k },
                    next,
                ));
            }
        }
        if s.scans < cfg.max_scans() && s.pending_scans() < cfg.scanners {
            let mut next = s.clone();
            next.next_op += 1;
            next.scans += 1;
            // Locals start out holding the memory as of the call.
            next.frames.insert(
                k,
                SnapImplFrame::Scan {
                    r1: s.mem.clone(),
                    r2: s.mem.clone(),
                    pc: ScanPc::FirstCollect { next: 1 },
                },
            );
            out.push((Action::Call { method: "scan".into(), value: Value::Unit, op: k }, next));
        }

        for (&k, frame) in &s.frames {
            match frame {
                SnapImplFrame::Update { i, d, wrote: false } => {
                    let mut next = s.clone();
                    next.mem[*i - 1] = *d;
                    next.frames.insert(k, SnapImplFrame::Update { i: *i, d: *d, wrote: true });
                    out.push((Action::internal(format!("{}.u#{}", self.ns, k)), next));
                }
                SnapImplFrame::Update { wrote: true, .. } => {
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((Action::Ret { method: "update".into(), value: Value::ok(), op: k }, next));
                }
                SnapImplFrame::Scan { r1, r2, pc } => match pc {
                    ScanPc::FirstCollect { next: i } | ScanPc::Collect { next: i } => {
                        let first = matches!(pc, ScanPc::FirstCollect { .. });
                        let mut r1n = r1.clone();
                        r1n[*i - 1] = s.mem[*i - 1];
                        let pc_next = if *i < cfg.n {
                            if first {
                                ScanPc::FirstCollect { next: *i + 1 }
                            } else {
                                ScanPc::Collect { next: *i + 1 }
                            }
                        } else if first {
                            ScanPc::Copy
                        } else {
                            ScanPc::Test
                        };
                        let mut next = s.clone();
                        next.frames.insert(
                            k,
                            SnapImplFrame::Scan { r1: r1n, r2: r2.clone(), pc: pc_next },
                        );
                        out.push((Action::internal(format!("{}.rd#{}@{}", self.ns, k, i)), next));
                    }
                    ScanPc::Copy => {
                        let mut next = s.clone();
                        next.frames.insert(
                            k,
                            SnapImplFrame::Scan {
                                r1: r1.clone(),
                                r2: r1.clone(),
                                pc: ScanPc::Collect { next: 1 },
                            },
                        );
                        out.push((Action::internal(format!("{}.cp#{}", self.ns, k)), next));
                    }
                    ScanPc::Test => {
                        let pc_next = if r1 == r2 { ScanPc::RetReady } else { ScanPc::Copy };
                        let mut next = s.clone();
                        next.frames.insert(
                            k,
                            SnapImplFrame::Scan { r1: r1.clone(), r2: r2.clone(), pc: pc_next },
                        );
                        out.push((Action::internal(format!("{}.tst#{}", self.ns, k)), next));
                    }
                    ScanPc::RetReady => {
                        let mut next = s.clone();
                        next.frames.remove(&k);
                        out.push((
                            Action::Ret { method: "scan".into(), value: Value::ints(r1), op: k },
                            next,
                        ));
                    }
                },
            }
        }
        out
    }

    fn state_name(&self, s: &SnapImplState) -> String {
        let frames = s
            .frames
            .iter()
            .map(|(k, f)| format!("{}:{:?}", k, f))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "mem=[{}] op={} up={} sc={} {{{frames}}}",
            fmt_mem(&s.mem),
            s.next_op,
            s.updates,
            s.scans
        )
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let cfg = &self.cfg;
        let mut out = BTreeSet::new();
        cfg.interface_alphabet(&mut out);
        for k in 1..=cfg.total_ops() {
            out.insert(Action::internal(format!("{}.u#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.cp#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.tst#{}", self.ns, k)));
            for i in 1..=cfg.n {
                out.insert(Action::internal(format!("{}.rd#{}@{}", self.ns, k, i)));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------
// Specification side
// ---------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SnapshotSpec {
    pub cfg: SnapshotCfg,
    /// Cap on snapshots taken per scan; a snapshot is only taken when the
    /// memory moved since the last one, so the cap is not binding as long
    /// as it is at least the update budget.
    pub snap_bound: u32,
    pub ns: String,
}

impl SnapshotSpec {
    pub fn new(cfg: SnapshotCfg, snap_bound: u32) -> SnapshotSpec {
        SnapshotSpec { cfg, snap_bound, ns: "snapspec".to_string() }
    }

    pub fn with_namespace(mut self, ns: &str) -> SnapshotSpec {
        self.ns = ns.to_string();
        self
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SnapSpecFrame {
    Update { i: usize, d: i64, wrote: bool },
    /// `snaps` is the sequence of snapshots taken so far; the scan may
    /// return any element of it.
    Scan { snaps: Vec<Vec<i64>>, taken: u32 },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SnapSpecState {
    pub mem: Vec<i64>,
    pub next_op: u32,
    pub updates: u32,
    pub scans: u32,
    pub frames: BTreeMap<OpId, SnapSpecFrame>,
}

impl SnapSpecState {
    fn pending_updates(&self) -> u32 {
        self.frames
            .values()
            .filter(|f| matches!(f, SnapSpecFrame::Update { .. }))
            .count() as u32
    }

    fn pending_scans(&self) -> u32 {
        self.frames
            .values()
            .filter(|f| matches!(f, SnapSpecFrame::Scan { .. }))
            .count() as u32
    }
}

impl Model for SnapshotSpec {
    type State = SnapSpecState;

    fn initial_state(&self) -> SnapSpecState {
        SnapSpecState {
            mem: self.cfg.initial_mem(),
            next_op: 0,
            updates: 0,
            scans: 0,
            frames: BTreeMap::new(),
        }
    }

    fn successors(&self, s: &SnapSpecState) -> Vec<(Action, SnapSpecState)> {
        let cfg = &self.cfg;
        let mut out = Vec::new();
        let k = OpId(s.next_op + 1);

        if s.updates < cfg.max_updates() && s.pending_updates() < cfg.updaters {
            for (i, d) in cfg.update_args() {
                let mut next = s.clone();
                next.next_op += 1;
                next.updates += 1;
                next.frames.insert(k, SnapSpecFrame::Update { i, d, wrote: false });
                out.push((
                    Action::Call { method: "update".into(), value: Value::pair(i as i64, d), op: k },
                    next,
                ));
            }
        }
        if s.scans < cfg.max_scans() && s.pending_scans() < cfg.scanners {
            let mut next = s.clone();
            next.next_op += 1;
            next.scans += 1;
            next.frames.insert(k, SnapSpecFrame::Scan { snaps: vec![s.mem.clone()], taken: 0 });
            out.push((Action::Call { method: "scan".into(), value: Value::Unit, op: k }, next));
        }

        for (&k, frame) in &s.frames {
            match frame {
                SnapSpecFrame::Update { i, d, wrote: false } => {
                    let mut next = s.clone();
                    next.mem[*i - 1] = *d;
                    next.frames.insert(k, SnapSpecFrame::Update { i: *i, d: *d, wrote: true });
                    out.push((Action::internal(format!("{}.u#{}", self.ns, k)), next));
                }
                SnapSpecFrame::Update { wrote: true, .. } => {
                    let mut next = s.clone();
                    next.frames.remove(&k);
                    out.push((Action::Ret { method: "update".into(), value: Value::ok(), op: k }, next));
                }
                SnapSpecFrame::Scan { snaps, taken } => {
                    if *taken < self.snap_bound && snaps.last() != Some(&s.mem) {
                        let mut next = s.clone();
                        let mut snaps2 = snaps.clone();
                        snaps2.push(s.mem.clone());
                        next.frames
                            .insert(k, SnapSpecFrame::Scan { snaps: snaps2, taken: taken + 1 });
                        out.push((Action::internal(format!("{}.snap#{}", self.ns, k)), next));
                    }
                    let mut distinct: Vec<&Vec<i64>> = Vec::new();
                    for arr in snaps {
                        if !distinct.contains(&arr) {
                            distinct.push(arr);
                        }
                    }
                    for arr in distinct {
                        let mut next = s.clone();
                        next.frames.remove(&k);
                        out.push((
                            Action::Ret { method: "scan".into(), value: Value::ints(arr), op: k },
                            next,
                        ));
                    }
                }
            }
        }
        out
    }

    fn state_name(&self, s: &SnapSpecState) -> String {
        let frames = s
            .frames
            .iter()
            .map(|(k, f)| format!("{}:{:?}", k, f))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "mem=[{}] op={} up={} sc={} {{{frames}}}",
            fmt_mem(&s.mem),
            s.next_op,
            s.updates,
            s.scans
        )
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let cfg = &self.cfg;
        let mut out = BTreeSet::new();
        cfg.interface_alphabet(&mut out);
        for k in 1..=cfg.total_ops() {
            out.insert(Action::internal(format!("{}.u#{}", self.ns, k)));
            out.insert(Action::internal(format!("{}.snap#{}", self.ns, k)));
        }
        out
    }
}

// ---------------------------------------------------------------------
// The simulation relation between the two
// ---------------------------------------------------------------------

/// Smallest-index monotone attribution of a fully collected array:
/// `att[i]` is a snapshot index containing `r[i]` at position `i`, indices
/// nondecreasing, each chosen as small as possible. Greedy, so the final
/// entry is the minimum over all monotone attributions.
fn attribute_from_below(snaps: &[Vec<i64>], r: &[i64]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(r.len());
    let mut floor = 0usize;
    for (i, &v) in r.iter().enumerate() {
        let t = (floor..snaps.len()).find(|&t| snaps[t][i] == v)?;
        out.push(t);
        floor = t;
    }
    Some(out)
}

/// Largest-index monotone attribution of the first `set` positions of a
/// collect in progress. Greedy from the right, so the first entry is the
/// maximum over all monotone attributions; `None` as the first component
/// means no position is set yet (unconstrained).
fn attribute_from_above(snaps: &[Vec<i64>], r: &[i64], set: usize) -> Option<Option<usize>> {
    let mut cap = snaps.len() - 1;
    let mut first = None;
    for i in (0..set).rev() {
        let t = (0..=cap).rev().find(|&t| snaps[t][i] == r[i])?;
        cap = t;
        first = Some(t);
    }
    Some(first)
}

/// Relate one scan's implementation locals to its specification `snaps`:
/// both collect arrays must read from a monotone sequence of snapshots,
/// the previous collect entirely from snapshots no newer than the current
/// collect's earliest, and right after a successful equality test the
/// collected array must itself be one of the snapshots.
pub fn scan_locals_related(
    n: usize,
    r1: &[i64],
    r2: &[i64],
    pc: &ScanPc,
    snaps: &[Vec<i64>],
) -> bool {
    let lo = match attribute_from_below(snaps, r2) {
        Some(att) => att,
        None => return false,
    };
    let hi_first = match attribute_from_above(snaps, r1, pc.positions_set(n)) {
        Some(first) => first,
        None => return false,
    };
    if let (Some(&lo_last), Some(hi_first)) = (lo.last(), hi_first) {
        if lo_last > hi_first {
            return false;
        }
    }
    if pc.post_equality() && !snaps.iter().any(|s| s == r1) {
        return false;
    }
    true
}

/// The candidate forward-simulation relation between implementation and
/// specification states: equal memory and operation counters, the same
/// active invocations (matched by identifier, with equal arguments and
/// update progress), the specification's latest snapshot current, and
/// every active scan related by [`scan_locals_related`].
pub fn snapshot_states_related(n: usize, s1: &SnapImplState, s2: &SnapSpecState) -> bool {
    if s1.mem != s2.mem
        || s1.next_op != s2.next_op
        || s1.updates != s2.updates
        || s1.scans != s2.scans
    {
        return false;
    }
    if s1.frames.len() != s2.frames.len() {
        return false;
    }
    for ((k1, f1), (k2, f2)) in s1.frames.iter().zip(s2.frames.iter()) {
        if k1 != k2 {
            return false;
        }
        match (f1, f2) {
            (
                SnapImplFrame::Update { i: i1, d: d1, wrote: w1 },
                SnapSpecFrame::Update { i: i2, d: d2, wrote: w2 },
            ) => {
                if i1 != i2 || d1 != d2 || w1 != w2 {
                    return false;
                }
            }
            (SnapImplFrame::Scan { r1, r2, pc }, SnapSpecFrame::Scan { snaps, .. }) => {
                if snaps.last() != Some(&s2.mem) {
                    return false;
                }
                if !scan_locals_related(n, r1, r2, pc, snaps) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Evaluate the relation over the full reachable product of two
/// explorations, as a [`crate::fsim::SimRelation`] over their state ids.
/// Pairs are matched within groups sharing memory and counters to keep
/// the product enumeration tractable.
pub fn snapshot_relation(
    n: usize,
    impl_exp: &crate::model::Exploration<SnapImplState>,
    spec_exp: &crate::model::Exploration<SnapSpecState>,
) -> crate::fsim::SimRelation {
    use std::collections::HashMap;

    type GroupKey = (Vec<i64>, u32, u32, u32, Vec<OpId>);
    let key_of_spec = |s: &SnapSpecState| -> GroupKey {
        (s.mem.clone(), s.next_op, s.updates, s.scans, s.frames.keys().copied().collect())
    };
    let key_of_impl = |s: &SnapImplState| -> GroupKey {
        (s.mem.clone(), s.next_op, s.updates, s.scans, s.frames.keys().copied().collect())
    };

    let mut spec_groups: HashMap<GroupKey, Vec<u32>> = HashMap::new();
    for (i, s) in spec_exp.states.iter().enumerate() {
        spec_groups.entry(key_of_spec(s)).or_default().push(i as u32);
    }

    let mut rel = crate::fsim::SimRelation::new(crate::action::Gamma::CallReturn);
    for (i, s1) in impl_exp.states.iter().enumerate() {
        if let Some(group) = spec_groups.get(&key_of_impl(s1)) {
            for &j in group {
                let s2 = &spec_exp.states[j as usize];
                if snapshot_states_related(n, s1, s2) {
                    rel.pairs.insert((crate::lts::StateId(i as u32), crate::lts::StateId(j)));
                }
            }
        }
    }
    rel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use crate::model::{explore, traces, Model};

    fn small_cfg() -> SnapshotCfg {
        SnapshotCfg {
            n: 2,
            values: vec![0, 1],
            updaters: 1,
            updates_each: 1,
            scanners: 1,
            scans_each: 1,
        }
    }

    #[test]
    fn quiet_scan_takes_exactly_two_collects() {
        let cfg = SnapshotCfg { updaters: 0, updates_each: 0, ..small_cfg() };
        let model = SnapshotImpl::new(cfg);
        // Without updates the whole object is deterministic: one maximal run.
        let ts = traces(&model, 32, &Budget::default()).unwrap();
        let longest = ts.iter().max_by_key(|t| t.len()).unwrap();
        // call + n reads + copy + n reads + test + return
        assert_eq!(longest.len(), 1 + 2 + 1 + 2 + 1 + 1);
        let reads = longest
            .actions()
            .iter()
            .filter(|a| matches!(a, Action::Internal { label } if label.contains(".rd#")))
            .count();
        assert_eq!(reads, 4);
        match longest.actions().last().unwrap() {
            Action::Ret { method, value, .. } => {
                assert_eq!(method, "scan");
                assert_eq!(value, &Value::ints(&[0, 0]));
            }
            other => panic!("expected scan return, got {other}"),
        }
    }

    #[test]
    fn interfering_update_forces_a_third_collect() {
        // Drive the model by hand: scan reads both cells, an update hits
        // position 1 between the collects, so the second collect differs
        // and a third one runs.
        let model = SnapshotImpl::new(small_cfg());
        let mut s = model.initial_state();
        let step = |s: &SnapImplState, pick: &dyn Fn(&Action) -> bool| -> SnapImplState {
            let succs = model.successors(s);
            let (_, next) = succs
                .into_iter()
                .find(|(a, _)| pick(a))
                .expect("expected action enabled");
            next
        };
        s = step(&s, &|a| matches!(a, Action::Call { method, .. } if method == "scan"));
        s = step(&s, &|a| matches!(a, Action::Internal { label } if label.contains(".rd#1@1")));
        s = step(&s, &|a| matches!(a, Action::Internal { label } if label.contains(".rd#1@2")));
        s = step(&s, &|a| matches!(a, Action::Call { method, value, .. } if method == "update" && value == &Value::pair(1, 1)));
        s = step(&s, &|a| matches!(a, Action::Internal { label } if label.contains(".u#2")));
        // Second collect now sees [1,0] while r2 = [0,0]: test must fail.
        s = step(&s, &|a| matches!(a, Action::Internal { label } if label.contains(".cp#1")));
        s = step(&s, &|a| matches!(a, Action::Internal { label } if label.contains(".rd#1@1")));
        s = step(&s, &|a| matches!(a, Action::Internal { label } if label.contains(".rd#1@2")));
        s = step(&s, &|a| matches!(a, Action::Internal { label } if label.contains(".tst#1")));
        match s.frames.get(&OpId(1)) {
            Some(SnapImplFrame::Scan { pc, .. }) => assert_eq!(pc, &ScanPc::Copy),
            other => panic!("expected scan frame, got {other:?}"),
        }
    }

    #[test]
    fn spec_scan_with_no_snapshot_returns_call_time_memory() {
        let cfg = SnapshotCfg { updaters: 0, updates_each: 0, ..small_cfg() };
        let model = SnapshotSpec::new(cfg, 3);
        let ts = traces(&model, 3, &Budget::default()).unwrap();
        let expected = crate::history::Trace(vec![
            Action::call("scan", Value::Unit, 1),
            Action::ret("scan", Value::ints(&[0, 0]), 1),
        ]);
        assert!(ts.contains(&expected));
        // No snapshot action is enabled while the memory is unchanged.
        assert!(!ts
            .iter()
            .any(|t| t.actions().iter().any(
                |a| matches!(a, Action::Internal { label } if label.contains(".snap#"))
            )));
    }

    #[test]
    fn spec_scan_after_update_offers_both_returns() {
        let model = SnapshotSpec::new(small_cfg(), 3);
        let ts = traces(&model, 8, &Budget::default()).unwrap();
        let old = Action::ret("scan", Value::ints(&[0, 0]), 1);
        let new = Action::ret("scan", Value::ints(&[1, 0]), 1);
        assert!(ts.iter().any(|t| t.actions().last() == Some(&old)));
        assert!(ts
            .iter()
            .any(|t| t.actions().last() == Some(&new)
                && t.actions().iter().any(
                    |a| matches!(a, Action::Internal { label } if label.contains(".snap#"))
                )));
    }

    #[test]
    fn spec_scan_is_not_atomic() {
        // A scan that returns a post-update value necessarily contains an
        // internal snapshot step between its call and return.
        let model = SnapshotSpec::new(small_cfg(), 3);
        let exp = explore(&model, &Budget::default()).unwrap();
        exp.lts.check_label_deterministic().unwrap();
    }

    #[test]
    fn fresh_scan_is_related_to_fresh_spec_scan() {
        // All reads pending, snaps holds only the call-time memory.
        let mem = vec![0, 0];
        assert!(scan_locals_related(
            2,
            &mem,
            &mem,
            &ScanPc::FirstCollect { next: 1 },
            &[mem.clone()],
        ));
    }

    #[test]
    fn two_equal_collects_from_same_snapshot_are_related() {
        let snaps = vec![vec![0, 0], vec![1, 0]];
        let r = vec![1, 0];
        assert!(scan_locals_related(2, &r, &r, &ScanPc::RetReady, &snaps));
    }

    #[test]
    fn r1_older_than_r2_is_rejected() {
        // r2 was read entirely from the newer snapshot, but r1's first
        // position can only come from the older one: the previous collect
        // would have to be newer than the current one.
        let snaps = vec![vec![0, 0], vec![1, 1]];
        let r1 = vec![0, 1]; // position 1 only in snaps[0], position 2 only in snaps[1]
        let r2 = vec![1, 1]; // entirely snaps[1]
        assert!(!scan_locals_related(2, &r1, &r2, &ScanPc::Test, &snaps));
        // The mirrored case (r2 old, r1 new) is fine.
        let r1b = vec![1, 1];
        let r2b = vec![0, 0];
        assert!(scan_locals_related(2, &r1b, &r2b, &ScanPc::Test, &snaps));
    }

    #[test]
    fn reread_value_present_only_in_newer_snapshot_stays_related() {
        // Position 1 re-read after an update: its value exists only in the
        // newer snapshot while position 2 also occurs in the older one.
        // A monotone attribution still exists.
        let snaps = vec![vec![0, 0], vec![1, 0]];
        let r1 = vec![1, 0];
        let r2 = vec![0, 0];
        assert!(scan_locals_related(2, &r1, &r2, &ScanPc::Test, &snaps));
    }

    #[test]
    fn value_absent_from_every_snapshot_is_rejected() {
        let snaps = vec![vec![0, 0]];
        let r1 = vec![1, 0];
        assert!(!scan_locals_related(2, &r1, &[0, 0], &ScanPc::Collect { next: 2 }, &snaps));
    }
}
