//! Model builders: sequential specifications, the atomic-object
//! construction, and the bundled case studies.
//!
//! All builders produce bounded, finite models. Thread identity is not
//! part of object state; concurrency is capped by a pending-operation
//! limit and fresh operation identifiers are assigned in call order, which
//! keeps every model deterministic per label. Internal labels are
//! namespaced per instance so products never collide.

pub mod afek_stack;
pub mod atomic;
pub mod client;
pub mod fig1;
pub mod hw_queue;
pub mod linpoint;
pub mod seqspec;
pub mod snapshot;

pub use afek_stack::AfekStack;
pub use atomic::{AtomicModel, AtomicState};
pub use client::ClientProgram;
pub use fig1::{Fig1Program, Fig1State};
pub use hw_queue::HwQueue;
pub use linpoint::LinPointObject;
pub use seqspec::{
    AtomicSnapshotSpec, CounterSpec, QueueSpec, RegisterSpec, SeqSpec, StackSpec,
};
pub use snapshot::{SnapImplState, SnapSpecState, SnapshotImpl, SnapshotSpec};
