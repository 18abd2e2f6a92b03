//! Actions and action alphabets.
//!
//! Every transition label is one of four kinds: a method call, a method
//! return, an internal step of an object, or a program step. Calls and
//! returns carry a method name, a value drawn from a finite domain and an
//! operation identifier that pairs them up. Internal and program actions
//! carry an opaque label.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Operation identifier pairing a call with its return. Always positive.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct OpId(pub u32);

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A value from a finite domain: argument or result of an operation.
///
/// `Sym` covers distinguished tokens such as `OK` and `EMPTY`; `Array` is
/// used for snapshot results and composite arguments.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Value {
    Unit,
    Int(i64),
    Sym(String),
    Array(Vec<Value>),
}

impl Value {
    pub fn ok() -> Value {
        Value::Sym("OK".into())
    }

    pub fn empty() -> Value {
        Value::Sym("EMPTY".into())
    }

    pub fn ints(vs: &[i64]) -> Value {
        Value::Array(vs.iter().map(|&v| Value::Int(v)).collect())
    }

    /// Pair value, used for arguments like `update(i, d)`.
    pub fn pair(a: i64, b: i64) -> Value {
        Value::Array(vec![Value::Int(a), Value::Int(b)])
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Unit => serde_json::Value::Null,
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Sym(s) => serde_json::Value::from(s.as_str()),
            Value::Array(vs) => serde_json::Value::Array(vs.iter().map(Value::to_json).collect()),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Value, String> {
        match v {
            serde_json::Value::Null => Ok(Value::Unit),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Value::Int)
                .ok_or_else(|| format!("value {n} is not a 64-bit integer")),
            serde_json::Value::String(s) => Ok(Value::Sym(s.clone())),
            serde_json::Value::Array(vs) => vs
                .iter()
                .map(Value::from_json)
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Array),
            other => Err(format!("unsupported value {other}")),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "_"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Array(vs) => {
                write!(f, "[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// The four alphabet classes, pairwise disjoint by construction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Kind {
    Call,
    Ret,
    Internal,
    Program,
}

/// A transition label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Action {
    Call { method: String, value: Value, op: OpId },
    Ret { method: String, value: Value, op: OpId },
    Internal { label: String },
    Program { label: String },
}

impl Action {
    pub fn call(method: &str, value: Value, op: u32) -> Action {
        Action::Call { method: method.into(), value, op: OpId(op) }
    }

    pub fn ret(method: &str, value: Value, op: u32) -> Action {
        Action::Ret { method: method.into(), value, op: OpId(op) }
    }

    pub fn internal(label: impl Into<String>) -> Action {
        Action::Internal { label: label.into() }
    }

    pub fn program(label: impl Into<String>) -> Action {
        Action::Program { label: label.into() }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Action::Call { .. } => Kind::Call,
            Action::Ret { .. } => Kind::Ret,
            Action::Internal { .. } => Kind::Internal,
            Action::Program { .. } => Kind::Program,
        }
    }

    pub fn is_call(&self) -> bool {
        matches!(self, Action::Call { .. })
    }

    pub fn is_ret(&self) -> bool {
        matches!(self, Action::Ret { .. })
    }

    /// Call or return action, i.e. part of the object interface.
    pub fn is_interface(&self) -> bool {
        self.is_call() || self.is_ret()
    }

    pub fn is_program(&self) -> bool {
        matches!(self, Action::Program { .. })
    }

    pub fn op_id(&self) -> Option<OpId> {
        match self {
            Action::Call { op, .. } | Action::Ret { op, .. } => Some(*op),
            _ => None,
        }
    }

    pub fn method(&self) -> Option<&str> {
        match self {
            Action::Call { method, .. } | Action::Ret { method, .. } => Some(method),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Call { method, value, op } => write!(f, "call({method},{value},{op})"),
            Action::Ret { method, value, op } => write!(f, "ret({method},{value},{op})"),
            Action::Internal { label } => write!(f, "int({label})"),
            Action::Program { label } => write!(f, "prog({label})"),
        }
    }
}

/// An observable-action predicate: the alphabet Γ a projection or
/// simulation is taken with respect to.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Gamma {
    /// Calls and returns: the object interface.
    CallReturn,
    /// Program actions only.
    Program,
    /// Every action.
    All,
    /// An explicit action set.
    Actions(BTreeSet<Action>),
}

impl Gamma {
    pub fn admits(&self, a: &Action) -> bool {
        match self {
            Gamma::CallReturn => a.is_interface(),
            Gamma::Program => a.is_program(),
            Gamma::All => true,
            Gamma::Actions(set) => set.contains(a),
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::CallReturn => write!(f, "call-return"),
            Gamma::Program => write!(f, "program"),
            Gamma::All => write!(f, "all"),
            Gamma::Actions(set) => write!(f, "{} explicit actions", set.len()),
        }
    }
}

/// Wire form of an action in the JSON model format.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ActionDoc {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<serde_json::Value>,
    #[serde(rename = "opId", skip_serializing_if = "Option::is_none")]
    pub op_id: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ActionDoc {
    pub fn from_action(a: &Action) -> ActionDoc {
        match a {
            Action::Call { method, value, op } => ActionDoc {
                kind: "call".into(),
                method: Some(method.clone()),
                value: Some(value.to_json()),
                op_id: Some(op.0),
                label: None,
            },
            Action::Ret { method, value, op } => ActionDoc {
                kind: "ret".into(),
                method: Some(method.clone()),
                value: Some(value.to_json()),
                op_id: Some(op.0),
                label: None,
            },
            Action::Internal { label } => ActionDoc {
                kind: "internal".into(),
                method: None,
                value: None,
                op_id: None,
                label: Some(label.clone()),
            },
            Action::Program { label } => ActionDoc {
                kind: "program".into(),
                method: None,
                value: None,
                op_id: None,
                label: Some(label.clone()),
            },
        }
    }

    pub fn to_action(&self) -> Result<Action, String> {
        let interface = |doc: &ActionDoc| -> Result<(String, Value, OpId), String> {
            let method = doc.method.clone().ok_or("call/ret action needs a method")?;
            let value = match &doc.value {
                Some(v) => Value::from_json(v)?,
                None => Value::Unit,
            };
            let op = doc.op_id.ok_or("call/ret action needs an opId")?;
            if op == 0 {
                return Err("opId must be positive".into());
            }
            Ok((method, value, OpId(op)))
        };
        match self.kind.as_str() {
            "call" => {
                let (method, value, op) = interface(self)?;
                Ok(Action::Call { method, value, op })
            }
            "ret" => {
                let (method, value, op) = interface(self)?;
                Ok(Action::Ret { method, value, op })
            }
            "internal" => Ok(Action::Internal {
                label: self.label.clone().ok_or("internal action needs a label")?,
            }),
            "program" => Ok(Action::Program {
                label: self.label.clone().ok_or("program action needs a label")?,
            }),
            other => Err(format!("unknown action kind `{other}`")),
        }
    }
}
