//! Straight-line multi-threaded client programs.
//!
//! Each thread runs a fixed list of operations in order: call, await the
//! return, optionally emit a program action recording the returned value,
//! then move on. Used to drive objects in scheduler and preservation
//! tests, where the observation actions make program-action projections
//! meaningful.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::{Action, OpId, Value};
use crate::model::Model;

#[derive(Clone, Debug)]
pub struct ClientProgram {
    /// Per thread, the (method, argument) list it invokes in order.
    pub threads: Vec<Vec<(String, Value)>>,
    /// Possible return values per method.
    pub returns: BTreeMap<String, Vec<Value>>,
    /// Emit `obs(tN,method,value)` after every return.
    pub observe: bool,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ClientPc {
    Ready { idx: usize },
    Pending { idx: usize, op: OpId },
    Observe { idx: usize, value: Value },
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ClientState {
    pub pcs: Vec<ClientPc>,
    pub next_op: u32,
}

impl ClientProgram {
    pub fn total_ops(&self) -> u32 {
        self.threads.iter().map(|t| t.len() as u32).sum()
    }
}

impl Model for ClientProgram {
    type State = ClientState;

    fn initial_state(&self) -> ClientState {
        ClientState {
            pcs: self.threads.iter().map(|_| ClientPc::Ready { idx: 0 }).collect(),
            next_op: 0,
        }
    }

    fn successors(&self, s: &ClientState) -> Vec<(Action, ClientState)> {
        let mut out = Vec::new();
        for (tid, pc) in s.pcs.iter().enumerate() {
            match pc {
                ClientPc::Ready { idx } => {
                    if let Some((method, arg)) = self.threads[tid].get(*idx) {
                        let k = OpId(s.next_op + 1);
                        let mut next = s.clone();
                        next.pcs[tid] = ClientPc::Pending { idx: *idx, op: k };
                        next.next_op += 1;
                        out.push((
                            Action::Call { method: method.clone(), value: arg.clone(), op: k },
                            next,
                        ));
                    }
                }
                ClientPc::Pending { idx, op } => {
                    let (method, _) = &self.threads[tid][*idx];
                    for v in self.returns.get(method).cloned().unwrap_or_default() {
                        let mut next = s.clone();
                        next.pcs[tid] = if self.observe {
                            ClientPc::Observe { idx: *idx, value: v.clone() }
                        } else {
                            ClientPc::Ready { idx: *idx + 1 }
                        };
                        out.push((
                            Action::Ret { method: method.clone(), value: v, op: *op },
                            next,
                        ));
                    }
                }
                ClientPc::Observe { idx, value } => {
                    let (method, _) = &self.threads[tid][*idx];
                    let mut next = s.clone();
                    next.pcs[tid] = ClientPc::Ready { idx: *idx + 1 };
                    out.push((
                        Action::program(format!("obs(t{tid},{method},{value})")),
                        next,
                    ));
                }
            }
        }
        // Two threads ready to issue the identical call resolve in thread
        // order, keeping the program deterministic per label.
        crate::objects::fig1::dedupe_by_action(&mut out);
        out
    }

    fn state_name(&self, s: &ClientState) -> String {
        let pcs = s
            .pcs
            .iter()
            .map(|pc| format!("{pc:?}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!("client[{pcs}] op={}", s.next_op)
    }

    fn alphabet(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        let total = self.total_ops();
        for k in 1..=total {
            let k = OpId(k);
            for thread in &self.threads {
                for (method, arg) in thread {
                    out.insert(Action::Call { method: method.clone(), value: arg.clone(), op: k });
                    for v in self.returns.get(method).cloned().unwrap_or_default() {
                        out.insert(Action::Ret { method: method.clone(), value: v, op: k });
                    }
                }
            }
        }
        if self.observe {
            for (tid, thread) in self.threads.iter().enumerate() {
                for (method, _) in thread {
                    for v in self.returns.get(method).cloned().unwrap_or_default() {
                        out.insert(Action::program(format!("obs(t{tid},{method},{v})")));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use crate::model::explore;

    #[test]
    fn single_thread_runs_in_order() {
        let mut returns = BTreeMap::new();
        returns.insert("write".to_string(), vec![Value::ok()]);
        let p = ClientProgram {
            threads: vec![vec![
                ("write".to_string(), Value::Int(1)),
                ("write".to_string(), Value::Int(2)),
            ]],
            returns,
            observe: true,
        };
        let exp = explore(&p, &Budget::default()).unwrap();
        exp.lts.check_label_deterministic().unwrap();
        // call, ret, obs, call, ret, obs
        assert_eq!(exp.lts.num_states(), 7);
    }
}
