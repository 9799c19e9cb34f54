//! Generic rely/guarantee semantics over finite state schemas.
//!
//! Operations are data: a rely [`Predicate`] that gates a guarantee producing a
//! [`StateUpdate`]. Keeping the update as data (rather than mutating state in
//! place) is what lets the error injector drop, duplicate or fabricate writes.

mod checks;
mod operation;
mod predicate;
mod reference;
mod schema;
mod update;

use thiserror::Error;

pub use checks::{
    check_layer_weakening, check_rg_compatibility, Check, CompatibilityWitness, WeakeningWitness,
    DEFAULT_CHECK_CAP,
};
pub use operation::{
    arg_tuples, select_layer, step_layered, step_operation, Layer, LayerSelection,
    LayeredOperation, Operation, Param, Proposal, RGOperation, StepResult,
};
pub use predicate::{evaluate_rely, Arity, Predicate};
pub(crate) use reference::gcd as reference_gcd;
pub use reference::{build_gcd_system, find_min, GcdSystem, MIN_PRECONDITION};
pub use schema::{Domain, State, StateIter, StateSchema, Value, VarId, Variable, MAX_DOMAIN_SIZE};
pub use update::{Assignment, StateUpdate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("two-state predicate {predicate} evaluated on a single state")]
    Arity { predicate: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state space of {size} exceeds the cap of {cap}")]
    Explosion { size: u128, cap: u64 },
    #[error("precondition of {op} violated: {message}")]
    Precondition { op: String, message: String },
    #[error("layered operation {0} has no layers")]
    NoLayers(String),
}
