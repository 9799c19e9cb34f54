//! Rely/guarantee operations and their layered (fault tolerant) form.

use std::fmt;
use std::sync::Arc;

use super::predicate::Predicate;
use super::schema::{Domain, State, StateSchema};
use super::update::StateUpdate;
use super::KernelError;

type GuaranteeFn = dyn Fn(&State, &[u16]) -> StateUpdate + Send + Sync;
type PreconditionFn = dyn Fn(&State, &[u16]) -> Result<(), String> + Send + Sync;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub domain: Domain,
}

impl Param {
    pub fn new(name: &str, domain: Domain) -> Self {
        Param {
            name: name.to_owned(),
            domain,
        }
    }
}

/// One rely/guarantee pair.
#[derive(Clone)]
pub struct Layer {
    pub rely: Predicate,
    guarantee: Arc<GuaranteeFn>,
}

impl Layer {
    pub fn new(
        rely: Predicate,
        guarantee: impl Fn(&State, &[u16]) -> StateUpdate + Send + Sync + 'static,
    ) -> Self {
        Layer {
            rely,
            guarantee: Arc::new(guarantee),
        }
    }

    pub fn guarantee(&self, state: &State, args: &[u16]) -> StateUpdate {
        (self.guarantee)(state, args)
    }
}

/// What an operation would do in a given state, before anything is applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proposal {
    Blocked,
    Fire {
        /// Index of the layer that fired; `None` for single-layer operations.
        layer: Option<usize>,
        update: StateUpdate,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    NewState(State),
    Blocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSelection {
    Layer(usize),
    NoLayer,
}

fn check_args(op: &str, params: &[Param], args: &[u16]) -> Result<(), KernelError> {
    if args.len() != params.len() {
        return Err(KernelError::Domain(format!(
            "{op} takes {} arguments, got {}",
            params.len(),
            args.len()
        )));
    }
    for (p, a) in params.iter().zip(args) {
        if *a as usize >= p.domain.len() {
            return Err(KernelError::Domain(format!(
                "argument {} of {op} is outside its domain (index {a})",
                p.name
            )));
        }
    }
    Ok(())
}

/// A named operation with a rely condition gating a deterministic guarantee.
#[derive(Clone)]
pub struct RGOperation {
    name: String,
    params: Vec<Param>,
    rely: Predicate,
    guarantee: Arc<GuaranteeFn>,
    precondition: Option<Arc<PreconditionFn>>,
}

impl fmt::Debug for RGOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RGOperation")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("rely", &self.rely)
            .finish()
    }
}

impl RGOperation {
    pub fn new(
        name: &str,
        params: Vec<Param>,
        rely: Predicate,
        guarantee: impl Fn(&State, &[u16]) -> StateUpdate + Send + Sync + 'static,
    ) -> Self {
        RGOperation {
            name: name.to_owned(),
            params,
            rely,
            guarantee: Arc::new(guarantee),
            precondition: None,
        }
    }

    /// Adds an engine-level precondition. Its failure is a reported error, not
    /// a blocked step.
    pub fn with_precondition(
        mut self,
        check: impl Fn(&State, &[u16]) -> Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        self.precondition = Some(Arc::new(check));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn rely(&self) -> &Predicate {
        &self.rely
    }

    pub fn guarantee(&self, state: &State, args: &[u16]) -> StateUpdate {
        (self.guarantee)(state, args)
    }

    pub fn propose(&self, state: &State, args: &[u16]) -> Result<Proposal, KernelError> {
        check_args(&self.name, &self.params, args)?;
        if let Some(pre) = &self.precondition {
            pre(state, args).map_err(|message| KernelError::Precondition {
                op: self.name.clone(),
                message,
            })?;
        }
        if !self.rely.holds_at(state, args) {
            return Ok(Proposal::Blocked);
        }
        Ok(Proposal::Fire {
            layer: None,
            update: self.guarantee(state, args),
        })
    }
}

/// Runs one operation step: the guarantee's update when the rely holds,
/// `Blocked` (and no mutation) otherwise.
pub fn step_operation(
    op: &RGOperation,
    schema: &StateSchema,
    state: &State,
    args: &[u16],
) -> Result<StepResult, KernelError> {
    schema.check(state)?;
    match op.propose(state, args)? {
        Proposal::Blocked => Ok(StepResult::Blocked),
        Proposal::Fire { update, .. } => Ok(StepResult::NewState(update.apply(schema, state)?)),
    }
}

/// An operation specified as ordered layers; layer 0 is normal behavior and
/// each later layer handles a more degraded environment.
#[derive(Clone)]
pub struct LayeredOperation {
    name: String,
    params: Vec<Param>,
    layers: Vec<Layer>,
    precondition: Option<Arc<PreconditionFn>>,
}

impl fmt::Debug for LayeredOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LayeredOperation")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("layers", &self.layers.len())
            .finish()
    }
}

impl LayeredOperation {
    pub fn new(name: &str, params: Vec<Param>, layers: Vec<Layer>) -> Result<Self, KernelError> {
        if layers.is_empty() {
            return Err(KernelError::NoLayers(name.to_owned()));
        }
        Ok(LayeredOperation {
            name: name.to_owned(),
            params,
            layers,
            precondition: None,
        })
    }

    pub fn with_precondition(
        mut self,
        check: impl Fn(&State, &[u16]) -> Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        self.precondition = Some(Arc::new(check));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Smallest layer index whose rely holds.
    pub fn select_layer(&self, state: &State, args: &[u16]) -> Result<LayerSelection, KernelError> {
        check_args(&self.name, &self.params, args)?;
        Ok(self
            .layers
            .iter()
            .position(|l| l.rely.holds_at(state, args))
            .map_or(LayerSelection::NoLayer, LayerSelection::Layer))
    }

    pub fn propose(&self, state: &State, args: &[u16]) -> Result<Proposal, KernelError> {
        check_args(&self.name, &self.params, args)?;
        if let Some(pre) = &self.precondition {
            pre(state, args).map_err(|message| KernelError::Precondition {
                op: self.name.clone(),
                message,
            })?;
        }
        match self.select_layer(state, args)? {
            LayerSelection::NoLayer => Ok(Proposal::Blocked),
            LayerSelection::Layer(i) => Ok(Proposal::Fire {
                layer: Some(i),
                update: self.layers[i].guarantee(state, args),
            }),
        }
    }
}

pub fn select_layer(
    lop: &LayeredOperation,
    schema: &StateSchema,
    state: &State,
    args: &[u16],
) -> Result<LayerSelection, KernelError> {
    schema.check(state)?;
    lop.select_layer(state, args)
}

/// Steps a layered operation. `NoLayer` surfaces as `Blocked`.
pub fn step_layered(
    lop: &LayeredOperation,
    schema: &StateSchema,
    state: &State,
    args: &[u16],
) -> Result<(StepResult, LayerSelection), KernelError> {
    schema.check(state)?;
    match lop.propose(state, args)? {
        Proposal::Blocked => Ok((StepResult::Blocked, LayerSelection::NoLayer)),
        Proposal::Fire { layer, update } => Ok((
            StepResult::NewState(update.apply(schema, state)?),
            LayerSelection::Layer(layer.unwrap_or(0)),
        )),
    }
}

/// Either kind of operation, as scheduled by the explorer.
#[derive(Debug, Clone)]
pub enum Operation {
    Plain(RGOperation),
    Layered(LayeredOperation),
}

impl Operation {
    pub fn name(&self) -> &str {
        match self {
            Operation::Plain(op) => op.name(),
            Operation::Layered(op) => op.name(),
        }
    }

    pub fn params(&self) -> &[Param] {
        match self {
            Operation::Plain(op) => op.params(),
            Operation::Layered(op) => op.params(),
        }
    }

    pub fn propose(&self, state: &State, args: &[u16]) -> Result<Proposal, KernelError> {
        match self {
            Operation::Plain(op) => op.propose(state, args),
            Operation::Layered(op) => op.propose(state, args),
        }
    }
}

impl From<RGOperation> for Operation {
    fn from(op: RGOperation) -> Self {
        Operation::Plain(op)
    }
}

impl From<LayeredOperation> for Operation {
    fn from(op: LayeredOperation) -> Self {
        Operation::Layered(op)
    }
}

/// Every argument tuple over the given parameter domains, in odometer order.
pub fn arg_tuples(params: &[Param]) -> Vec<Vec<u16>> {
    let mut tuples = vec![Vec::new()];
    for p in params {
        let n = p.domain.len() as u16;
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut next = t.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    tuples
}
