//! Traces, histories and projections.

use std::collections::BTreeMap;
use std::fmt;

use crate::action::{Action, Gamma, OpId, Value};
use crate::error::{Error, Result};

/// A finite action sequence, as produced by walking an LTS.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Trace(pub Vec<Action>);

impl Trace {
    pub fn empty() -> Trace {
        Trace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Maximal subsequence of `actions` admitted by `gamma`, order preserved.
pub fn project(actions: &[Action], gamma: &Gamma) -> Vec<Action> {
    actions.iter().filter(|a| gamma.admits(a)).cloned().collect()
}

pub fn project_trace(t: &Trace, gamma: &Gamma) -> Trace {
    Trace(project(&t.0, gamma))
}

/// One operation of a history: its call, and the return if matched.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpInfo {
    pub method: String,
    pub arg: Value,
    pub call_idx: usize,
    pub ret: Option<(Value, usize)>,
}

/// A well-formed sequence of call and return actions.
///
/// Well-formedness: every return has an earlier call with the same
/// operation identifier and method, identifiers are not reused, and each
/// call has at most one return.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct History(Vec<Action>);

impl History {
    pub fn empty() -> History {
        History(Vec::new())
    }

    pub fn new(actions: Vec<Action>) -> Result<History> {
        validate(&actions)?;
        Ok(History(actions))
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Operations indexed by identifier, in identifier order.
    pub fn ops(&self) -> BTreeMap<OpId, OpInfo> {
        let mut ops = BTreeMap::new();
        for (i, a) in self.0.iter().enumerate() {
            match a {
                Action::Call { method, value, op } => {
                    ops.insert(
                        *op,
                        OpInfo { method: method.clone(), arg: value.clone(), call_idx: i, ret: None },
                    );
                }
                Action::Ret { value, op, .. } => {
                    let info: &mut OpInfo = ops.get_mut(op).expect("validated");
                    info.ret = Some((value.clone(), i));
                }
                _ => unreachable!("validated"),
            }
        }
        ops
    }

    /// Every call is immediately followed by its matching return.
    pub fn is_sequential(&self) -> bool {
        let mut i = 0;
        while i < self.0.len() {
            match &self.0[i] {
                Action::Call { op, .. } => match self.0.get(i + 1) {
                    Some(Action::Ret { op: r, .. }) if r == op => i += 2,
                    _ => return false,
                },
                _ => return false,
            }
        }
        true
    }

    /// True when every call has a matching return.
    pub fn is_complete(&self) -> bool {
        self.ops().values().all(|o| o.ret.is_some())
    }

    pub fn push(&mut self, a: Action) -> Result<()> {
        self.0.push(a);
        match validate(&self.0) {
            Ok(()) => Ok(()),
            Err(e) => {
                self.0.pop();
                Err(e)
            }
        }
    }

    pub fn concat(&self, other: &[Action]) -> Result<History> {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        History::new(v)
    }

    /// Parse the line-oriented text format: one action per line,
    /// `call m v k` or `ret m v k`. Blank lines and `#` comments are
    /// skipped. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<History> {
        let mut actions = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let err = |msg: &str| {
                Error::invalid(format!("line {}: {msg}: `{line}`", lineno + 1))
            };
            let kind = parts.next().ok_or_else(|| err("missing action kind"))?;
            let method = parts.next().ok_or_else(|| err("missing method"))?;
            let value = parts.next().ok_or_else(|| err("missing value"))?;
            let op = parts
                .next()
                .ok_or_else(|| err("missing operation id"))?
                .parse::<u32>()
                .map_err(|_| err("operation id is not an integer"))?;
            if op == 0 {
                return Err(err("operation id must be positive"));
            }
            if parts.next().is_some() {
                return Err(err("trailing tokens"));
            }
            let value = parse_value(value).map_err(|m| err(&m))?;
            let action = match kind {
                "call" => Action::call(method, value, op),
                "ret" => Action::ret(method, value, op),
                _ => return Err(err("action kind must be `call` or `ret`")),
            };
            actions.push(action);
        }
        History::new(actions)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for a in &self.0 {
            match a {
                Action::Call { method, value, op } => {
                    out.push_str(&format!("call {method} {value} {op}\n"))
                }
                Action::Ret { method, value, op } => {
                    out.push_str(&format!("ret {method} {value} {op}\n"))
                }
                _ => unreachable!("validated"),
            }
        }
        out
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

fn parse_value(token: &str) -> std::result::Result<Value, String> {
    if token == "_" {
        return Ok(Value::Unit);
    }
    if let Ok(i) = token.parse::<i64>() {
        return Ok(Value::Int(i));
    }
    if let Some(inner) = token.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        if inner.is_empty() {
            return Ok(Value::Array(Vec::new()));
        }
        let items = inner
            .split(',')
            .map(parse_value)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        return Ok(Value::Array(items));
    }
    Ok(Value::Sym(token.to_string()))
}

fn validate(actions: &[Action]) -> Result<()> {
    let mut called: BTreeMap<OpId, (&str, bool)> = BTreeMap::new();
    for a in actions {
        match a {
            Action::Call { method, op, .. } => {
                if called.contains_key(op) {
                    return Err(Error::IllFormedHistory(format!("operation id {op} reused")));
                }
                called.insert(*op, (method, false));
            }
            Action::Ret { method, op, .. } => match called.get_mut(op) {
                None => {
                    return Err(Error::IllFormedHistory(format!(
                        "return for operation {op} has no earlier call"
                    )))
                }
                Some((m, returned)) => {
                    if *returned {
                        return Err(Error::IllFormedHistory(format!(
                            "operation {op} returns twice"
                        )));
                    }
                    if *m != method {
                        return Err(Error::IllFormedHistory(format!(
                            "return method `{method}` does not match call method `{m}` for operation {op}"
                        )));
                    }
                    *returned = true;
                }
            },
            other => {
                return Err(Error::IllFormedHistory(format!(
                    "history contains non-interface action {other}"
                )))
            }
        }
    }
    Ok(())
}

/// Projection of a trace onto calls and returns, validated as a history.
pub fn hist(t: &Trace) -> Result<History> {
    History::new(project(&t.0, &Gamma::CallReturn))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(actions: Vec<Action>) -> History {
        History::new(actions).unwrap()
    }

    #[test]
    fn project_empty_is_empty() {
        assert!(project(&[], &Gamma::CallReturn).is_empty());
        assert!(project(&[], &Gamma::All).is_empty());
    }

    #[test]
    fn project_drops_internal() {
        let t = vec![
            Action::call("push", Value::Int(0), 1),
            Action::internal("w"),
            Action::ret("push", Value::ok(), 1),
        ];
        let p = project(&t, &Gamma::CallReturn);
        assert_eq!(p, vec![t[0].clone(), t[2].clone()]);
    }

    #[test]
    fn sequential_detection() {
        let seq = h(vec![
            Action::call("push", Value::Int(1), 1),
            Action::ret("push", Value::ok(), 1),
            Action::call("pop", Value::Unit, 2),
            Action::ret("pop", Value::Int(1), 2),
        ]);
        assert!(seq.is_sequential());
        let conc = h(vec![
            Action::call("push", Value::Int(1), 1),
            Action::call("pop", Value::Unit, 2),
            Action::ret("push", Value::ok(), 1),
            Action::ret("pop", Value::Int(1), 2),
        ]);
        assert!(!conc.is_sequential());
    }

    #[test]
    fn rejects_ill_formed() {
        assert!(History::new(vec![Action::ret("pop", Value::Int(1), 1)]).is_err());
        assert!(History::new(vec![
            Action::call("pop", Value::Unit, 1),
            Action::call("pop", Value::Unit, 1),
        ])
        .is_err());
        assert!(History::new(vec![
            Action::call("pop", Value::Unit, 1),
            Action::ret("push", Value::ok(), 1),
        ])
        .is_err());
        assert!(History::new(vec![Action::internal("x")]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let text = "call push 0 1\nret push OK 1\ncall pop _ 2\nret pop EMPTY 2\ncall scan _ 3\nret scan [0,1] 3\n";
        let parsed = History::parse(text).unwrap();
        assert_eq!(parsed.render(), text);
        assert_eq!(parsed.ops().len(), 3);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = History::parse("call push 0 1\nret push OK zero\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
