//! Sequential specifications: a deterministic, total transition function
//! over a finite state, method and value space.

use std::fmt::Debug;
use std::hash::Hash;

use crate::action::Value;

/// A sequential object specification. `apply` must be deterministic and
/// total on the declared call space; `returns` declares the finite return
/// domain per method (used to build alphabets and enumerate completions).
pub trait SeqSpec {
    type State: Clone + Eq + Hash + Ord + Debug;

    fn name(&self) -> &str;
    fn initial(&self) -> Self::State;
    /// The finite set of (method, argument) pairs a client may invoke.
    fn calls(&self) -> Vec<(String, Value)>;
    fn returns(&self, method: &str) -> Vec<Value>;
    fn apply(&self, s: &Self::State, method: &str, arg: &Value) -> (Self::State, Value);
}

fn int(v: &Value) -> i64 {
    match v {
        Value::Int(i) => *i,
        other => panic!("expected integer argument, got {other}"),
    }
}

/// Read/write register over a finite value set.
#[derive(Clone, Debug)]
pub struct RegisterSpec {
    pub values: Vec<i64>,
    pub initial: i64,
}

impl RegisterSpec {
    pub fn new(values: Vec<i64>) -> RegisterSpec {
        let initial = values.first().copied().unwrap_or(0);
        RegisterSpec { values, initial }
    }
}

impl SeqSpec for RegisterSpec {
    type State = i64;

    fn name(&self) -> &str {
        "register"
    }

    fn initial(&self) -> i64 {
        self.initial
    }

    fn calls(&self) -> Vec<(String, Value)> {
        let mut out: Vec<(String, Value)> = self
            .values
            .iter()
            .map(|&v| ("write".to_string(), Value::Int(v)))
            .collect();
        out.push(("read".to_string(), Value::Unit));
        out
    }

    fn returns(&self, method: &str) -> Vec<Value> {
        match method {
            "write" => vec![Value::ok()],
            "read" => self.values.iter().map(|&v| Value::Int(v)).collect(),
            _ => vec![],
        }
    }

    fn apply(&self, s: &i64, method: &str, arg: &Value) -> (i64, Value) {
        match method {
            "write" => (int(arg), Value::ok()),
            "read" => (*s, Value::Int(*s)),
            _ => panic!("register has no method {method}"),
        }
    }
}

/// LIFO stack; `pop` on empty returns `EMPTY`.
#[derive(Clone, Debug)]
pub struct StackSpec {
    pub values: Vec<i64>,
}

impl SeqSpec for StackSpec {
    type State = Vec<i64>;

    fn name(&self) -> &str {
        "stack"
    }

    fn initial(&self) -> Vec<i64> {
        Vec::new()
    }

    fn calls(&self) -> Vec<(String, Value)> {
        let mut out: Vec<(String, Value)> = self
            .values
            .iter()
            .map(|&v| ("push".to_string(), Value::Int(v)))
            .collect();
        out.push(("pop".to_string(), Value::Unit));
        out
    }

    fn returns(&self, method: &str) -> Vec<Value> {
        match method {
            "push" => vec![Value::ok()],
            "pop" => {
                let mut out: Vec<Value> = self.values.iter().map(|&v| Value::Int(v)).collect();
                out.push(Value::empty());
                out
            }
            _ => vec![],
        }
    }

    fn apply(&self, s: &Vec<i64>, method: &str, arg: &Value) -> (Vec<i64>, Value) {
        match method {
            "push" => {
                let mut next = s.clone();
                next.push(int(arg));
                (next, Value::ok())
            }
            "pop" => {
                let mut next = s.clone();
                match next.pop() {
                    Some(v) => (next, Value::Int(v)),
                    None => (next, Value::empty()),
                }
            }
            _ => panic!("stack has no method {method}"),
        }
    }
}

/// FIFO queue; `deq` on empty returns `EMPTY`.
#[derive(Clone, Debug)]
pub struct QueueSpec {
    pub values: Vec<i64>,
}

impl SeqSpec for QueueSpec {
    type State = Vec<i64>;

    fn name(&self) -> &str {
        "queue"
    }

    fn initial(&self) -> Vec<i64> {
        Vec::new()
    }

    fn calls(&self) -> Vec<(String, Value)> {
        let mut out: Vec<(String, Value)> = self
            .values
            .iter()
            .map(|&v| ("enq".to_string(), Value::Int(v)))
            .collect();
        out.push(("deq".to_string(), Value::Unit));
        out
    }

    fn returns(&self, method: &str) -> Vec<Value> {
        match method {
            "enq" => vec![Value::ok()],
            "deq" => {
                let mut out: Vec<Value> = self.values.iter().map(|&v| Value::Int(v)).collect();
                out.push(Value::empty());
                out
            }
            _ => vec![],
        }
    }

    fn apply(&self, s: &Vec<i64>, method: &str, arg: &Value) -> (Vec<i64>, Value) {
        match method {
            "enq" => {
                let mut next = s.clone();
                next.push(int(arg));
                (next, Value::ok())
            }
            "deq" => {
                if s.is_empty() {
                    (s.clone(), Value::empty())
                } else {
                    let mut next = s.clone();
                    let v = next.remove(0);
                    (next, Value::Int(v))
                }
            }
            _ => panic!("queue has no method {method}"),
        }
    }
}

/// Single-step snapshot memory: `update(i,d)` writes one cell, `scan`
/// returns the whole array. Positions are 1-based.
#[derive(Clone, Debug)]
pub struct AtomicSnapshotSpec {
    pub n: usize,
    pub values: Vec<i64>,
}

impl AtomicSnapshotSpec {
    fn initial_mem(&self) -> Vec<i64> {
        vec![self.values.first().copied().unwrap_or(0); self.n]
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
}

impl SeqSpec for AtomicSnapshotSpec {
    type State = Vec<i64>;

    fn name(&self) -> &str {
        "snapshot"
    }

    fn initial(&self) -> Vec<i64> {
        self.initial_mem()
    }

    fn calls(&self) -> Vec<(String, Value)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for &d in &self.values {
                out.push(("update".to_string(), Value::pair(i as i64, d)));
            }
        }
        out.push(("scan".to_string(), Value::Unit));
        out
    }

    fn returns(&self, method: &str) -> Vec<Value> {
        match method {
            "update" => vec![Value::ok()],
            "scan" => self.all_arrays().iter().map(|a| Value::ints(a)).collect(),
            _ => vec![],
        }
    }

    fn apply(&self, s: &Vec<i64>, method: &str, arg: &Value) -> (Vec<i64>, Value) {
        match method {
            "update" => match arg {
                Value::Array(items) if items.len() == 2 => {
                    let i = int(&items[0]) as usize;
                    let d = int(&items[1]);
                    assert!((1..=self.n).contains(&i), "position out of range");
                    let mut next = s.clone();
                    next[i - 1] = d;
                    (next, Value::ok())
                }
                other => panic!("update expects a (position, value) pair, got {other}"),
            },
            "scan" => (s.clone(), Value::ints(s)),
            _ => panic!("snapshot has no method {method}"),
        }
    }
}

/// Bounded counter, used by the instantiation tests.
#[derive(Clone, Debug)]
pub struct CounterSpec {
    pub max: i64,
}

impl SeqSpec for CounterSpec {
    type State = i64;

    fn name(&self) -> &str {
        "counter"
    }

    fn initial(&self) -> i64 {
        0
    }

    fn calls(&self) -> Vec<(String, Value)> {
        vec![("inc".to_string(), Value::Unit), ("get".to_string(), Value::Unit)]
    }

    fn returns(&self, method: &str) -> Vec<Value> {
        match method {
            "inc" => vec![Value::ok()],
            "get" => (0..=self.max).map(Value::Int).collect(),
            _ => vec![],
        }
    }

    fn apply(&self, s: &i64, method: &str, _arg: &Value) -> (i64, Value) {
        match method {
            "inc" => ((*s + 1).min(self.max), Value::ok()),
            "get" => (*s, Value::Int(*s)),
            _ => panic!("counter has no method {method}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stack_is_lifo() {
        let spec = StackSpec { values: vec![1, 2] };
        let s0 = spec.initial();
        let (s1, r1) = spec.apply(&s0, "push", &Value::Int(1));
        let (s2, _) = spec.apply(&s1, "push", &Value::Int(2));
        let (s3, r3) = spec.apply(&s2, "pop", &Value::Unit);
        let (_, r4) = spec.apply(&s3, "pop", &Value::Unit);
        assert_eq!(r1, Value::ok());
        assert_eq!(r3, Value::Int(2));
        assert_eq!(r4, Value::Int(1));
    }

    #[test]
    fn queue_is_fifo_and_empty_returns_token() {
        let spec = QueueSpec { values: vec![1, 2] };
        let s0 = spec.initial();
        let (_, r) = spec.apply(&s0, "deq", &Value::Unit);
        assert_eq!(r, Value::empty());
        let (s1, _) = spec.apply(&s0, "enq", &Value::Int(1));
        let (s2, _) = spec.apply(&s1, "enq", &Value::Int(2));
        let (_, r1) = spec.apply(&s2, "deq", &Value::Unit);
        assert_eq!(r1, Value::Int(1));
    }

    #[test]
    fn snapshot_updates_one_cell() {
        let spec = AtomicSnapshotSpec { n: 2, values: vec![0, 1] };
        let s0 = spec.initial();
        let (s1, _) = spec.apply(&s0, "update", &Value::pair(1, 1));
        let (_, r) = spec.apply(&s1, "scan", &Value::Unit);
        assert_eq!(r, Value::ints(&[1, 0]));
        assert_eq!(spec.returns("scan").len(), 4);
    }
}
