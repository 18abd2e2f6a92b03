//! conch — a finite-state workbench for concurrent-object semantics.
//!
//! Objects and programs are modeled as finite labeled transition systems
//! over call, return, internal and program actions. On top of the LTS
//! kernel the crate provides:
//!
//! - linearizability of histories against sequential specifications, and
//!   the atomic-object construction whose states pair a history with one
//!   of its linearizations ([`objects::atomic`]);
//! - bounded refinement (history inclusion) via on-the-fly
//!   determinization ([`refine`]);
//! - Γ-forward simulations: checking a candidate relation, deciding
//!   existence by greatest-fixpoint refinement, and relation composition
//!   ([`fsim`]);
//! - strong-linearizability witnesses and their equivalence with forward
//!   simulations into the atomic object ([`stronglin`]);
//! - deterministic schedulers (strong adversaries), scheduler-consistent
//!   trace sets, adversary synthesis as an AND–OR game, and
//!   hyperproperty verdicts such as noninterference ([`sched`]).
//!
//! Model builders for the bundled case studies — an array-based lock-free
//! stack, the Herlihy & Wing queue, a collect-until-stable snapshot and
//! its concurrent specification, and a three-thread leak client — live in
//! [`objects`]. Everything is bounded and explicit-state: exploration
//! budgets are explicit and exhaustion is reported separately from
//! logical verdicts.

pub mod action;
pub mod error;
pub mod fsim;
pub mod history;
pub mod lincheck;
pub mod lts;
pub mod model;
pub mod objects;
pub mod refine;
pub mod sampling;
pub mod sched;
pub mod stronglin;

pub use action::{Action, Gamma, Kind, OpId, Value};
pub use error::{Budget, Error, Result};
pub use history::{hist, project, project_trace, History, Trace};
pub use lts::{Lts, StateId};
pub use model::{explore, explore_to_depth, traces, Exploration, LtsModel, Model, Product, SyncPolicy};
pub use refine::{is_gamma_deterministic, refines_bounded, Refines};
