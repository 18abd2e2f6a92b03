//! Errors and resource budgets.
//!
//! Resource exhaustion is reported through dedicated variants so a run that
//! hits a budget is never confused with a logical verdict.

use thiserror::Error;

use crate::action::Action;

#[derive(Error, Debug)]
pub enum Error {
    #[error("state budget exceeded (limit {limit})")]
    StateBudget { limit: usize },
    #[error("trace budget exceeded (limit {limit})")]
    TraceBudget { limit: usize },
    #[error("ill-formed history: {0}")]
    IllFormedHistory(String),
    #[error("private action `{0}` appears in both alphabets")]
    AlphabetCollision(Action),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("strategy undefined at state `{0}`")]
    StrategyUndefined(String),
    #[error("lts is not deterministic per label: state `{state}` has two `{action}` transitions")]
    Nondeterministic { state: String, action: Action },
    #[error("product graph has a cycle through `{0}`; adversary synthesis needs terminating products")]
    CyclicGame(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid(msg.into())
    }

    /// Budget errors are resource verdicts, everything else is an input or
    /// logic error.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::StateBudget { .. } | Error::TraceBudget { .. } | Error::CyclicGame(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Caps on explored states and enumerated traces.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_states: usize,
    pub max_traces: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_states: 5_000_000, max_traces: 5_000_000 }
    }
}

impl Budget {
    pub fn states(max_states: usize) -> Budget {
        Budget { max_states, ..Budget::default() }
    }

    pub fn charge_state(&self, count: usize) -> Result<()> {
        if count > self.max_states {
            Err(Error::StateBudget { limit: self.max_states })
        } else {
            Ok(())
        }
    }

    pub fn charge_trace(&self, count: usize) -> Result<()> {
        if count > self.max_traces {
            Err(Error::TraceBudget { limit: self.max_traces })
        } else {
            Ok(())
        }
    }
}
