use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::injector::{apply_fault, ei_step, filter_update, FaultClass};
use crate::kernel::{KernelError, Proposal, State, StateUpdate};
use crate::trace::{Event, Outcome, Termination, Trace, ADMIN_ACTOR, EI_ACTOR};

use super::{ExplorerError, SystemConfig};

/// How [`simulate`] picks the next actor step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimSchedule {
    /// `(actor id, argument labels)` per round.
    Explicit(Vec<(String, Vec<String>)>),
    /// Uniform over enabled actors, then over that actor's enabled tuples.
    Seeded(u64),
}

struct Recorder<'a> {
    cfg: &'a SystemConfig,
    trace: Trace,
}

impl Recorder<'_> {
    fn push(&mut self, actor: &str, op: &str, args: Vec<String>, layer: Option<usize>, outcome: Outcome, update: StateUpdate) {
        let step = self.trace.events.len();
        self.trace.events.push(Event {
            step,
            actor: actor.to_owned(),
            op: op.to_owned(),
            args,
            layer,
            outcome,
            update,
        });
    }

    fn apply(&self, state: &State, update: &StateUpdate) -> Result<(State, Outcome), KernelError> {
        let next = update.apply(&self.cfg.schema, state)?;
        let outcome = if next == *state { Outcome::NoOp } else { Outcome::Applied };
        Ok((next, outcome))
    }
}

/// Actor index and the indices of its enabled tuples.
type Enabled = Vec<(usize, Vec<usize>)>;

fn enabled_moves(cfg: &SystemConfig, tuples: &[Vec<Vec<u16>>], state: &State) -> Result<(Enabled, bool), ExplorerError> {
    let mut enabled = Vec::new();
    let mut progress = false;
    for (ai, actor) in cfg.actors.iter().enumerate() {
        let mut ok = Vec::new();
        for (ti, t) in tuples[ai].iter().enumerate() {
            match actor.op.propose(state, t) {
                Ok(Proposal::Fire { update, .. }) => {
                    progress |= update.apply(&cfg.schema, state)? != *state;
                    ok.push(ti);
                }
                Ok(Proposal::Blocked) | Err(KernelError::Precondition { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        if !ok.is_empty() {
            enabled.push((ai, ok));
        }
    }
    Ok((enabled, progress))
}

/// Runs the system for at most `cfg.depth` rounds.
///
/// A round applies the scripted admin updates due at that round, then one
/// actor step (with any lost/duplicated fault scheduled for the round), then
/// any fake update the injector fabricates. Each of these is one trace event.
/// Seeded runs stop early at deadlock (nothing enabled) or quiescence
/// (nothing enabled changes the state).
pub fn simulate(cfg: &SystemConfig, schedule: &SimSchedule) -> Result<Trace, ExplorerError> {
    cfg.validate()?;
    let tuples: Vec<Vec<Vec<u16>>> = cfg.actors.iter().map(|a| a.tuples()).collect();
    let mut rng = match schedule {
        SimSchedule::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        SimSchedule::Explicit(_) => None,
    };
    let mut rec = Recorder { cfg, trace: Trace::new() };
    let mut state = cfg.initial.clone();
    let mut end = Termination::DepthReached;

    for round in 0..cfg.depth {
        for adm in cfg.admin.iter().filter(|a| a.step == round) {
            match adm.update(&state) {
                Ok(u) => {
                    let (next, outcome) = rec.apply(&state, &u)?;
                    state = next;
                    rec.push(ADMIN_ACTOR, &adm.op, adm.args.clone(), None, outcome, u);
                }
                Err(_) => rec.push(ADMIN_ACTOR, &adm.op, adm.args.clone(), None, Outcome::Blocked, StateUpdate::new()),
            }
        }

        let (ai, args) = match schedule {
            SimSchedule::Explicit(list) => {
                let Some((id, labels)) = list.get(round) else {
                    end = Termination::ScheduleExhausted;
                    break;
                };
                let ai = cfg.actor_index(id).ok_or_else(|| ExplorerError::Schedule {
                    step: round,
                    message: format!("unknown actor {id:?}"),
                })?;
                let args = cfg.actors[ai]
                    .resolve(labels)
                    .map_err(|message| ExplorerError::Schedule { step: round, message })?;
                (ai, args)
            }
            SimSchedule::Seeded(_) => {
                let rng = rng.as_mut().expect("seeded");
                let (enabled, progress) = enabled_moves(cfg, &tuples, &state)?;
                if enabled.is_empty() {
                    end = Termination::Deadlock;
                    break;
                }
                if !progress {
                    end = Termination::Quiescent;
                    break;
                }
                let (ai, ok) = &enabled[rng.gen_range(0..enabled.len())];
                let ti = ok[rng.gen_range(0..ok.len())];
                (*ai, tuples[*ai][ti].clone())
            }
        };

        let actor = &cfg.actors[ai];
        let labels = actor.labels(&args);
        match actor.op.propose(&state, &args) {
            Err(e) => {
                return Err(ExplorerError::Schedule {
                    step: round,
                    message: e.to_string(),
                })
            }
            Ok(Proposal::Blocked) => {
                rec.push(&actor.id, actor.op.name(), labels, None, Outcome::Blocked, StateUpdate::new());
            }
            Ok(Proposal::Fire { layer, update }) => {
                let update = match &cfg.ei {
                    Some(ei) => {
                        let f = filter_update(&ei.schedule, &ei.scope, &cfg.schema, round, &update)?;
                        if let Some(fault) = f.fault {
                            rec.push(EI_ACTOR, fault.class.as_str(), vec![actor.id.clone()], None, Outcome::Applied, fault.writes);
                        }
                        f.update
                    }
                    None => update,
                };
                let (next, outcome) = rec.apply(&state, &update)?;
                state = next;
                rec.push(&actor.id, actor.op.name(), labels, layer, outcome, update);
            }
        }

        if let Some(ei) = &cfg.ei {
            let fake = ei_step(&ei.schedule, &ei.scope, &cfg.schema, round)?;
            if !fake.is_empty() {
                let (next, outcome) = rec.apply(&state, &fake)?;
                state = next;
                rec.push(EI_ACTOR, FaultClass::Fake.as_str(), Vec::new(), None, outcome, fake);
            }
        }
    }
    rec.trace.end = end;
    Ok(rec.trace)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("replay diverges at step {step}: {reason}")]
pub struct ReplayMismatch {
    pub step: usize,
    pub reason: String,
}

/// Re-executes a trace from the initial state, checking every recorded
/// outcome, layer and update against recomputation.
///
/// Injector events are checked against the configured scope, not the
/// schedule, so search witnesses replay as well as simulations.
pub fn replay(cfg: &SystemConfig, trace: &Trace) -> Result<State, ReplayMismatch> {
    let schema = &cfg.schema;
    let mut state = cfg.initial.clone();
    let mut pending: Option<(FaultClass, &StateUpdate, &str)> = None;

    for (i, e) in trace.events.iter().enumerate() {
        let fail = |reason: String| ReplayMismatch { step: e.step, reason };
        if e.step != i {
            return Err(fail(format!("expected step index {i}")));
        }
        let apply = |state: &State, u: &StateUpdate| -> Result<(State, Outcome), ReplayMismatch> {
            let next = u
                .apply(schema, state)
                .map_err(|err| ReplayMismatch { step: e.step, reason: err.to_string() })?;
            let outcome = if next == *state { Outcome::NoOp } else { Outcome::Applied };
            Ok((next, outcome))
        };
        let expect_outcome = |got: Outcome| {
            if got == e.outcome {
                Ok(())
            } else {
                Err(ReplayMismatch {
                    step: e.step,
                    reason: format!("recorded outcome {}, recomputed {}", e.outcome.as_str(), got.as_str()),
                })
            }
        };

        if e.is_ei() {
            let ei = cfg.ei.as_ref().ok_or_else(|| fail("injector event, but no injector is configured".into()))?;
            let class = FaultClass::parse(&e.op).ok_or_else(|| fail(format!("unknown fault class {:?}", e.op)))?;
            if !ei.scope.permits_class(class) {
                return Err(fail(format!("fault class {class} is outside the scope")));
            }
            if let Some(a) = e.update.assignments().iter().find(|a| !ei.scope.permits_assignment(schema, a)) {
                return Err(fail(format!("{} is outside the scope", a.describe(schema))));
            }
            if pending.is_some() {
                return Err(fail("two faults in one step".into()));
            }
            match class {
                FaultClass::Fake => {
                    let (next, outcome) = apply(&state, &e.update)?;
                    expect_outcome(outcome)?;
                    state = next;
                }
                FaultClass::Lost | FaultClass::Duplicated => {
                    let victim = e.args.first().ok_or_else(|| fail("fault names no victim actor".into()))?;
                    pending = Some((class, &e.update, victim.as_str()));
                }
            }
            continue;
        }

        if e.actor == ADMIN_ACTOR {
            if pending.is_some() {
                return Err(fail("fault is not followed by its victim".into()));
            }
            let adm = cfg
                .admin
                .iter()
                .find(|a| a.op == e.op && a.args == e.args)
                .ok_or_else(|| fail(format!("no scripted {} {:?}", e.op, e.args)))?;
            match adm.update(&state) {
                Ok(u) => {
                    if u != e.update {
                        return Err(fail(format!("recorded update {}, recomputed {}", e.update.describe(schema), u.describe(schema))));
                    }
                    let (next, outcome) = apply(&state, &u)?;
                    expect_outcome(outcome)?;
                    state = next;
                }
                Err(_) => expect_outcome(Outcome::Blocked)?,
            }
            continue;
        }

        let ai = cfg.actor_index(&e.actor).ok_or_else(|| fail(format!("unknown actor {:?}", e.actor)))?;
        let actor = &cfg.actors[ai];
        if actor.op.name() != e.op {
            return Err(fail(format!("actor {} runs {}, not {}", actor.id, actor.op.name(), e.op)));
        }
        let args = actor.resolve(&e.args).map_err(fail)?;
        let fault = pending.take();
        if let Some((_, _, victim)) = fault {
            if victim != actor.id {
                return Err(fail(format!("fault names {victim}, but the step belongs to {}", actor.id)));
            }
        }
        match actor.op.propose(&state, &args).map_err(|err| fail(err.to_string()))? {
            Proposal::Blocked => {
                if fault.is_some() {
                    return Err(fail("fault on a blocked step".into()));
                }
                if !e.update.is_empty() {
                    return Err(fail("blocked step records an update".into()));
                }
                expect_outcome(Outcome::Blocked)?;
            }
            Proposal::Fire { layer, update } => {
                let update = match fault {
                    Some((class, writes, _)) => {
                        let targeted: Vec<usize> = update
                            .assignments()
                            .iter()
                            .enumerate()
                            .filter(|(_, a)| writes.assignments().contains(a))
                            .map(|(k, _)| k)
                            .collect();
                        if targeted.is_empty() {
                            return Err(fail(format!("{class} fault targets writes the step does not make")));
                        }
                        apply_fault(&update, class, &targeted).update
                    }
                    None => update,
                };
                if layer != e.layer {
                    return Err(fail(format!("recorded layer {:?}, recomputed {layer:?}", e.layer)));
                }
                if update != e.update {
                    return Err(fail(format!(
                        "recorded update {}, recomputed {}",
                        e.update.describe(schema),
                        update.describe(schema)
                    )));
                }
                let (next, outcome) = apply(&state, &update)?;
                expect_outcome(outcome)?;
                state = next;
            }
        }
    }
    if pending.is_some() {
        let step = trace.events.len().saturating_sub(1);
        return Err(ReplayMismatch { step, reason: "trailing fault without its victim step".into() });
    }
    Ok(state)
}
