//! Bounded exhaustive exploration and seeded simulation of a system of
//! rely/guarantee operations, optionally disturbed by the error injector.

mod run;
mod search;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::injector::{EiConfig, InjectError};
use crate::kernel::reference_gcd as gcd;
use crate::kernel::{arg_tuples, Arity, GcdSystem, KernelError, Operation, Predicate, State, StateSchema, StateUpdate};
use crate::trace::{ADMIN_ACTOR, EI_ACTOR};

pub use run::{replay, simulate, ReplayMismatch, SimSchedule};
pub use search::{explore, Stats, Status, Verdict};

/// Which argument tuples an actor may call its operation with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgPolicy {
    /// Every tuple over the parameter domains.
    All,
    Only(Vec<Vec<u16>>),
}

#[derive(Debug, Clone)]
pub struct Actor {
    pub id: String,
    pub op: Operation,
    pub args: ArgPolicy,
}

impl Actor {
    pub fn new(id: &str, op: impl Into<Operation>, args: ArgPolicy) -> Self {
        Actor {
            id: id.to_owned(),
            op: op.into(),
            args,
        }
    }

    pub fn tuples(&self) -> Vec<Vec<u16>> {
        match &self.args {
            ArgPolicy::All => arg_tuples(self.op.params()),
            ArgPolicy::Only(t) => t.clone(),
        }
    }

    pub fn labels(&self, args: &[u16]) -> Vec<String> {
        self.op
            .params()
            .iter()
            .zip(args)
            .map(|(p, a)| p.domain.label(*a))
            .collect()
    }

    pub fn resolve(&self, labels: &[String]) -> Result<Vec<u16>, String> {
        let params = self.op.params();
        if labels.len() != params.len() {
            return Err(format!(
                "{} takes {} arguments, got {}",
                self.id,
                params.len(),
                labels.len()
            ));
        }
        params
            .iter()
            .zip(labels)
            .map(|(p, l)| {
                p.domain
                    .index_of_label(l)
                    .ok_or_else(|| format!("{l:?} is not a value of parameter {}", p.name))
            })
            .collect()
    }
}

type AdminFn = dyn Fn(&State) -> Result<StateUpdate, String> + Send + Sync;

/// An out-of-band update applied at the start of a simulation round. A
/// failing update is recorded as blocked.
#[derive(Clone)]
pub struct ScriptedUpdate {
    pub step: usize,
    pub op: String,
    pub args: Vec<String>,
    update: Arc<AdminFn>,
}

impl ScriptedUpdate {
    pub fn new(
        step: usize,
        op: &str,
        args: Vec<String>,
        update: impl Fn(&State) -> Result<StateUpdate, String> + Send + Sync + 'static,
    ) -> Self {
        ScriptedUpdate {
            step,
            op: op.to_owned(),
            args,
            update: Arc::new(update),
        }
    }

    pub fn update(&self, state: &State) -> Result<StateUpdate, String> {
        (self.update)(state)
    }
}

impl fmt::Debug for ScriptedUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScriptedUpdate")
            .field("step", &self.step)
            .field("op", &self.op)
            .field("args", &self.args)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub schema: Arc<StateSchema>,
    pub initial: State,
    pub actors: Vec<Actor>,
    pub ei: Option<EiConfig>,
    /// One-state predicates checked at every visited state.
    pub invariants: Vec<Predicate>,
    /// Scripted administrative updates. Simulation only.
    pub admin: Vec<ScriptedUpdate>,
    /// Maximum number of steps (simulation rounds, or search depth).
    pub depth: usize,
    /// Maximum number of distinct states the search may visit.
    pub cap: usize,
    pub workers: usize,
}

impl SystemConfig {
    pub fn new(schema: Arc<StateSchema>, initial: State) -> Self {
        SystemConfig {
            schema,
            initial,
            actors: Vec::new(),
            ei: None,
            invariants: Vec::new(),
            admin: Vec::new(),
            depth: 12,
            cap: 1_000_000,
            workers: 1,
        }
    }

    pub fn actor(mut self, actor: Actor) -> Self {
        self.actors.push(actor);
        self
    }

    pub fn invariant(mut self, p: Predicate) -> Self {
        self.invariants.push(p);
        self
    }

    pub fn depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn validate(&self) -> Result<(), ExplorerError> {
        let bad = |m: String| Err(ExplorerError::Config(m));
        if self.cap == 0 {
            return bad("cap must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        self.schema.check(&self.initial)?;
        let mut seen = HashSet::new();
        for a in &self.actors {
            if a.id == EI_ACTOR || a.id == ADMIN_ACTOR {
                return bad(format!("actor id {:?} is reserved", a.id));
            }
            if a.id.is_empty() || a.id.contains(['\t', '\n']) {
                return bad(format!("bad actor id {:?}", a.id));
            }
            if !seen.insert(a.id.as_str()) {
                return bad(format!("duplicate actor id {:?}", a.id));
            }
            if let ArgPolicy::Only(tuples) = &a.args {
                let params = a.op.params();
                for t in tuples {
                    let fits = t.len() == params.len()
                        && params.iter().zip(t).all(|(p, v)| (*v as usize) < p.domain.len());
                    if !fits {
                        return bad(format!("actor {} lists an argument tuple {t:?} outside its parameters", a.id));
                    }
                }
            }
        }
        for p in &self.invariants {
            if p.arity() != Arity::OneState {
                return bad(format!("invariant {} must be a one-state predicate", p.name()));
            }
        }
        Ok(())
    }

    pub(crate) fn actor_index(&self, id: &str) -> Option<usize> {
        self.actors.iter().position(|a| a.id == id)
    }

    /// Index of the first invariant `state` falsifies.
    pub(crate) fn violated(&self, state: &State) -> Option<usize> {
        self.invariants.iter().position(|p| !p.holds_at(state, &[]))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplorerError {
    #[error("invalid system: {0}")]
    Config(String),
    #[error("step {step}: {message}")]
    Schedule { step: usize, message: String },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Inject(#[from] InjectError),
}

impl SystemConfig {
    /// The two GCD processes as actors `P1` and `P2`, with the invariant that
    /// the GCD of `(a, b)` never changes. The depth is generous enough for any
    /// fair seeded run to reach quiescence.
    pub fn gcd(sys: &GcdSystem) -> SystemConfig {
        let (a0, b0) = sys.values(&sys.initial);
        let target = gcd(a0, b0);
        let s = sys.clone();
        let preserved = Predicate::state("gcd(a, b) = gcd(a0, b0)", move |state| {
            let (a, b) = s.values(state);
            gcd(a, b) == target
        });
        SystemConfig::new(Arc::new(sys.schema.clone()), sys.initial.clone())
            .actor(Actor::new("P1", sys.p1.clone(), ArgPolicy::All))
            .actor(Actor::new("P2", sys.p2.clone(), ArgPolicy::All))
            .invariant(preserved)
            .depth(64 * (a0 + b0) as usize)
    }
}
