//! The error injector: environment interference that loses, duplicates or
//! fabricates state updates, limited by its own guarantee (the [`FaultScope`]).
//!
//! Faults attach to the [`StateUpdate`]s produced by guarantees. Lost and
//! duplicated faults rewrite an operation's update on its way to the state;
//! fake faults are updates of their own. At most one fault fires per step.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::Deserialize;
use thiserror::Error;

use crate::kernel::{Assignment, Check, StateSchema, StateUpdate};
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultClass {
    /// The update's effect never happens.
    Lost,
    /// The update is performed twice.
    Duplicated,
    /// An update nobody issued.
    Fake,
}

impl FaultClass {
    pub const ALL: [FaultClass; 3] = [FaultClass::Lost, FaultClass::Duplicated, FaultClass::Fake];

    pub fn as_str(self) -> &'static str {
        match self {
            FaultClass::Lost => "lost",
            FaultClass::Duplicated => "duplicated",
            FaultClass::Fake => "fake",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        FaultClass::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for FaultClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InjectError {
    #[error("bad pattern {pattern:?}: {reason}")]
    Pattern { pattern: String, reason: String },
    #[error("pattern {0:?} matches no state variable")]
    UnmatchedPattern(String),
    #[error("the injector scope must name at least one variable pattern and one fault class")]
    EmptyScope,
    #[error("scripted faults must be sorted by step (step {0} is out of order)")]
    Unsorted(usize),
    #[error("more than one fault scheduled at step {0}")]
    DuplicateStep(usize),
    #[error("fault probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("scheduled fault at step {step} lies outside the scope: {detail}")]
    OutOfScope { step: usize, detail: String },
    #[error("scheduled {class} fault at step {step}: target {target} matches nothing in the update")]
    ScheduleMismatch {
        step: usize,
        class: FaultClass,
        target: String,
    },
    #[error("fabricated update at step {step} escapes the scope: {detail}")]
    ScopeViolation { step: usize, detail: String },
    #[error("injection config: {0}")]
    Config(String),
}

/// `name-glob` or `name-glob:=value`, where `*` in the name matches any run of
/// characters. `status(*):=free` selects every write of `free` to a status.
#[derive(Debug, Clone)]
pub struct Selector {
    text: String,
    name: Regex,
    value: Option<String>,
}

impl Selector {
    pub fn parse(text: &str) -> Result<Self, InjectError> {
        let (name, value) = match text.split_once(":=") {
            Some((n, v)) => (n.trim(), Some(v.trim().to_owned())),
            None => (text.trim(), None),
        };
        if name.is_empty() {
            return Err(InjectError::Pattern {
                pattern: text.to_owned(),
                reason: "empty variable pattern".into(),
            });
        }
        let re = format!(
            "^{}$",
            name.split('*').map(regex::escape).collect::<Vec<_>>().join(".*")
        );
        let name = Regex::new(&re).map_err(|e| InjectError::Pattern {
            pattern: text.to_owned(),
            reason: e.to_string(),
        })?;
        Ok(Selector {
            text: text.trim().to_owned(),
            name,
            value,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn matches_name(&self, name: &str) -> bool {
        self.name.is_match(name)
    }

    pub fn matches(&self, schema: &StateSchema, a: &Assignment) -> bool {
        self.matches_name(schema.name(a.var))
            && self
                .value
                .as_deref()
                .is_none_or(|v| schema.label(a.var, a.value) == v)
    }

    /// The single assignment this selector denotes, if it names exactly one
    /// variable and a value in its domain.
    fn exact(&self, schema: &StateSchema) -> Option<Assignment> {
        let value = self.value.as_deref()?;
        let mut vars = schema.var_ids().filter(|v| self.matches_name(schema.name(*v)));
        let var = vars.next()?;
        if vars.next().is_some() {
            return None;
        }
        let index = schema.domain(var).index_of_label(value)?;
        Some(Assignment::new(var, index))
    }
}

/// What the injector may touch: variable patterns and fault classes.
#[derive(Debug, Clone)]
pub struct FaultScope {
    patterns: Vec<Selector>,
    classes: BTreeSet<FaultClass>,
}

impl FaultScope {
    pub fn new<S: AsRef<str>>(
        schema: &StateSchema,
        patterns: &[S],
        classes: impl IntoIterator<Item = FaultClass>,
    ) -> Result<Self, InjectError> {
        let classes: BTreeSet<_> = classes.into_iter().collect();
        if patterns.is_empty() || classes.is_empty() {
            return Err(InjectError::EmptyScope);
        }
        let patterns = patterns
            .iter()
            .map(|p| Selector::parse(p.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        for p in &patterns {
            let hit = schema.var_ids().any(|v| {
                p.matches_name(schema.name(v))
                    && p
                        .value
                        .as_deref()
                        .is_none_or(|val| schema.domain(v).index_of_label(val).is_some())
            });
            if !hit {
                return Err(InjectError::UnmatchedPattern(p.text.clone()));
            }
        }
        Ok(FaultScope { patterns, classes })
    }

    pub fn classes(&self) -> &BTreeSet<FaultClass> {
        &self.classes
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.patterns.iter().map(Selector::as_str)
    }

    pub fn permits_class(&self, class: FaultClass) -> bool {
        self.classes.contains(&class)
    }

    pub fn permits_assignment(&self, schema: &StateSchema, a: &Assignment) -> bool {
        self.patterns.iter().any(|p| p.matches(schema, a))
    }

    pub fn permits(&self, schema: &StateSchema, class: FaultClass, a: &Assignment) -> bool {
        self.permits_class(class) && self.permits_assignment(schema, a)
    }

    /// Every `(variable, value)` pair a fake update may write, in schema order.
    pub fn fake_candidates(&self, schema: &StateSchema) -> Vec<Assignment> {
        if !self.permits_class(FaultClass::Fake) {
            return Vec::new();
        }
        schema
            .var_ids()
            .flat_map(|v| (0..schema.domain(v).len() as u16).map(move |i| Assignment::new(v, i)))
            .filter(|a| self.permits_assignment(schema, a))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ScriptedFault {
    pub step: usize,
    pub class: FaultClass,
    pub target: Selector,
}

/// When faults fire. Step indices count simulation rounds from 0.
#[derive(Debug, Clone)]
pub enum InjectionSchedule {
    Scripted(Vec<ScriptedFault>),
    /// Each step fires a fault with `probability`, drawing the class and the
    /// target uniformly from a generator seeded by `(seed, step)`.
    Random { seed: u64, probability: f64 },
}

impl InjectionSchedule {
    pub fn none() -> Self {
        InjectionSchedule::Scripted(Vec::new())
    }

    pub fn scripted(
        schema: &StateSchema,
        scope: &FaultScope,
        faults: Vec<ScriptedFault>,
    ) -> Result<Self, InjectError> {
        for pair in faults.windows(2) {
            if pair[1].step < pair[0].step {
                return Err(InjectError::Unsorted(pair[1].step));
            }
            if pair[1].step == pair[0].step {
                return Err(InjectError::DuplicateStep(pair[1].step));
            }
        }
        for f in &faults {
            if !scope.permits_class(f.class) {
                return Err(InjectError::OutOfScope {
                    step: f.step,
                    detail: format!("class {} is not permitted", f.class),
                });
            }
            match f.class {
                FaultClass::Fake => {
                    let a = f.target.exact(schema).ok_or_else(|| InjectError::OutOfScope {
                        step: f.step,
                        detail: format!("fake target {} must name one variable and a value", f.target.text),
                    })?;
                    if !scope.permits_assignment(schema, &a) {
                        return Err(InjectError::OutOfScope {
                            step: f.step,
                            detail: format!("{} is not a permitted write", a.describe(schema)),
                        });
                    }
                }
                FaultClass::Lost | FaultClass::Duplicated => {
                    let reachable = schema.var_ids().any(|v| {
                        (0..schema.domain(v).len() as u16).any(|i| {
                            let a = Assignment::new(v, i);
                            f.target.matches(schema, &a) && scope.permits_assignment(schema, &a)
                        })
                    });
                    if !reachable {
                        return Err(InjectError::OutOfScope {
                            step: f.step,
                            detail: format!("target {} selects no permitted write", f.target.text),
                        });
                    }
                }
            }
        }
        Ok(InjectionSchedule::Scripted(faults))
    }

    pub fn random(seed: u64, probability: f64) -> Result<Self, InjectError> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(InjectError::Probability(probability));
        }
        Ok(InjectionSchedule::Random { seed, probability })
    }
}

enum Plan<'a> {
    Scripted(&'a ScriptedFault),
    Random(FaultClass, Box<ChaCha8Rng>),
}

impl Plan<'_> {
    fn class(&self) -> FaultClass {
        match self {
            Plan::Scripted(f) => f.class,
            Plan::Random(c, _) => *c,
        }
    }
}

fn plan<'a>(sched: &'a InjectionSchedule, scope: &FaultScope, step: usize) -> Option<Plan<'a>> {
    match sched {
        InjectionSchedule::Scripted(faults) => faults
            .binary_search_by_key(&step, |f| f.step)
            .ok()
            .map(|i| Plan::Scripted(&faults[i])),
        InjectionSchedule::Random { seed, probability } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            rng.set_stream(step as u64);
            if !rng.gen_bool(*probability) {
                return None;
            }
            let classes: Vec<_> = scope.classes.iter().copied().collect();
            let class = classes[rng.gen_range(0..classes.len())];
            Some(Plan::Random(class, Box::new(rng)))
        }
    }
}

/// A fault that changed an update, with the writes it removed or repeated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppliedFault {
    pub class: FaultClass,
    pub writes: StateUpdate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtered {
    pub update: StateUpdate,
    pub fault: Option<AppliedFault>,
}

impl Filtered {
    fn unchanged(update: &StateUpdate) -> Self {
        Filtered {
            update: update.clone(),
            fault: None,
        }
    }
}

/// Applies the lost/duplicated fault scheduled at `step`, if any, to an
/// operation's update.
///
/// Scripted faults act on every write the target selects; a target that
/// selects nothing is a [`InjectError::ScheduleMismatch`]. Random faults pick
/// one in-scope write uniformly and are skipped when there is none.
pub fn filter_update(
    sched: &InjectionSchedule,
    scope: &FaultScope,
    schema: &StateSchema,
    step: usize,
    update: &StateUpdate,
) -> Result<Filtered, InjectError> {
    let Some(plan) = plan(sched, scope, step) else {
        return Ok(Filtered::unchanged(update));
    };
    let class = plan.class();
    if class == FaultClass::Fake {
        return Ok(Filtered::unchanged(update));
    }
    let targeted: Vec<usize> = match plan {
        Plan::Scripted(f) => {
            let hits: Vec<usize> = update
                .assignments()
                .iter()
                .enumerate()
                .filter(|(_, a)| f.target.matches(schema, a) && scope.permits_assignment(schema, a))
                .map(|(i, _)| i)
                .collect();
            if hits.is_empty() {
                return Err(InjectError::ScheduleMismatch {
                    step,
                    class,
                    target: f.target.text.clone(),
                });
            }
            hits
        }
        Plan::Random(_, mut rng) => {
            let candidates: Vec<usize> = update
                .assignments()
                .iter()
                .enumerate()
                .filter(|(_, a)| scope.permits_assignment(schema, a))
                .map(|(i, _)| i)
                .collect();
            if candidates.is_empty() {
                return Ok(Filtered::unchanged(update));
            }
            vec![candidates[rng.gen_range(0..candidates.len())]]
        }
    };
    Ok(apply_fault(update, class, &targeted))
}

/// Rewrites `update` with a lost or duplicated fault on the writes at
/// `targeted` (indices into the update).
pub fn apply_fault(update: &StateUpdate, class: FaultClass, targeted: &[usize]) -> Filtered {
    let writes: StateUpdate = targeted.iter().map(|i| update.assignments()[*i]).collect();
    let rewritten = match class {
        FaultClass::Lost => update
            .assignments()
            .iter()
            .enumerate()
            .filter(|(i, _)| !targeted.contains(i))
            .map(|(_, a)| *a)
            .collect(),
        FaultClass::Duplicated => {
            let mut u = update.clone();
            u.extend(writes.assignments().iter().copied());
            u
        }
        FaultClass::Fake => update.clone(),
    };
    Filtered {
        update: rewritten,
        fault: Some(AppliedFault { class, writes }),
    }
}

/// The fabricated update for `step`: empty unless a fake fault fires.
pub fn ei_step(
    sched: &InjectionSchedule,
    scope: &FaultScope,
    schema: &StateSchema,
    step: usize,
) -> Result<StateUpdate, InjectError> {
    let Some(plan) = plan(sched, scope, step) else {
        return Ok(StateUpdate::new());
    };
    let a = match plan {
        Plan::Scripted(f) if f.class == FaultClass::Fake => {
            f.target.exact(schema).ok_or_else(|| InjectError::ScopeViolation {
                step,
                detail: format!("target {} is not a single write", f.target.text),
            })?
        }
        Plan::Random(FaultClass::Fake, mut rng) => {
            let candidates = scope.fake_candidates(schema);
            if candidates.is_empty() {
                return Ok(StateUpdate::new());
            }
            candidates[rng.gen_range(0..candidates.len())]
        }
        _ => return Ok(StateUpdate::new()),
    };
    if !scope.permits(schema, FaultClass::Fake, &a) {
        return Err(InjectError::ScopeViolation {
            step,
            detail: a.describe(schema),
        });
    }
    Ok(StateUpdate::new().set(a.var, a.value))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EiViolation {
    /// Step index of the offending trace event.
    pub step: usize,
    pub reason: String,
}

/// Audits a trace: every injector event must use a permitted fault class and
/// touch only permitted writes.
pub fn check_ei_respects_guarantee(
    scope: &FaultScope,
    schema: &StateSchema,
    trace: &Trace,
) -> Check<EiViolation> {
    let mut checked = 0;
    for e in trace.events.iter().filter(|e| e.is_ei()) {
        checked += 1;
        let Some(class) = FaultClass::parse(&e.op) else {
            return Check::Refuted(EiViolation {
                step: e.step,
                reason: format!("unknown fault class {:?}", e.op),
            });
        };
        if !scope.permits_class(class) {
            return Check::Refuted(EiViolation {
                step: e.step,
                reason: format!("fault class {class} is outside the scope"),
            });
        }
        if let Some(a) = e
            .update
            .assignments()
            .iter()
            .find(|a| !scope.permits_assignment(schema, a))
        {
            return Check::Refuted(EiViolation {
                step: e.step,
                reason: format!("{} is outside the scope", a.describe(schema)),
            });
        }
    }
    Check::Holds { checked }
}

/// Scope plus schedule, as loaded from an injection config file.
#[derive(Debug, Clone)]
pub struct EiConfig {
    pub scope: FaultScope,
    pub schedule: InjectionSchedule,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScopeDoc {
    variables: Vec<String>,
    classes: Vec<FaultClass>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptDoc {
    step: usize,
    class: FaultClass,
    target: String,
    #[serde(default)]
    value: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomDoc {
    seed: u64,
    probability: f64,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeDoc {
    Scripted,
    Random,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    scope: ScopeDoc,
    #[serde(default)]
    mode: Option<ModeDoc>,
    #[serde(default)]
    script: Vec<ScriptDoc>,
    #[serde(default)]
    random: Option<RandomDoc>,
}

impl EiConfig {
    pub fn new(scope: FaultScope, schedule: InjectionSchedule) -> Self {
        EiConfig { scope, schedule }
    }

    /// Parses an injection config and validates it against `schema`.
    ///
    /// Malformed JSON is reported with its line and column.
    pub fn from_json(text: &str, schema: &StateSchema) -> Result<Self, InjectError> {
        let doc: ConfigDoc = serde_json::from_str(text).map_err(|e| {
            InjectError::Config(format!("{e} (line {}, column {})", e.line(), e.column()))
        })?;
        let scope = FaultScope::new(schema, &doc.scope.variables, doc.scope.classes)?;
        let mode = doc.mode.unwrap_or(if doc.random.is_some() {
            ModeDoc::Random
        } else {
            ModeDoc::Scripted
        });
        let schedule = match mode {
            ModeDoc::Scripted => {
                let faults = doc
                    .script
                    .into_iter()
                    .map(|s| {
                        let target = match s.value {
                            Some(v) => format!("{}:={v}", s.target),
                            None => s.target,
                        };
                        Ok(ScriptedFault {
                            step: s.step,
                            class: s.class,
                            target: Selector::parse(&target)?,
                        })
                    })
                    .collect::<Result<Vec<_>, InjectError>>()?;
                InjectionSchedule::scripted(schema, &scope, faults)?
            }
            ModeDoc::Random => {
                let r = doc
                    .random
                    .ok_or_else(|| InjectError::Config("random mode needs a \"random\" object".into()))?;
                InjectionSchedule::random(r.seed, r.probability)?
            }
        };
        Ok(EiConfig { scope, schedule })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Domain;
    use crate::trace::{Event, Outcome, EI_ACTOR};

    fn schema() -> StateSchema {
        let status = Domain::symbols(["free", "occupied"]);
        StateSchema::new([
            ("status(A)", status.clone()),
            ("status(B)", status.clone()),
            ("availability(R)", Domain::symbols(["available", "reserved", "maintenance"])),
        ])
        .unwrap()
    }

    fn moving_update(schema: &StateSchema) -> StateUpdate {
        StateUpdate::parse(schema, "status(A):=free;status(B):=occupied").unwrap()
    }

    fn scripted(schema: &StateSchema, scope: &FaultScope, step: usize, class: FaultClass, target: &str) -> InjectionSchedule {
        InjectionSchedule::scripted(
            schema,
            scope,
            vec![ScriptedFault {
                step,
                class,
                target: Selector::parse(target).unwrap(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn lost_removes_targeted_write() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(*):=free"], [FaultClass::Lost]).unwrap();
        let sched = scripted(&schema, &scope, 3, FaultClass::Lost, "status(A):=free");
        let u = moving_update(&schema);
        let f = filter_update(&sched, &scope, &schema, 3, &u).unwrap();
        assert_eq!(f.update.describe(&schema), "status(B):=occupied");
        assert_eq!(f.fault.unwrap().writes.describe(&schema), "status(A):=free");
        // other steps untouched
        assert_eq!(filter_update(&sched, &scope, &schema, 2, &u).unwrap(), Filtered::unchanged(&u));
    }

    #[test]
    fn duplicate_is_recorded_but_idempotent() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(*)"], [FaultClass::Duplicated]).unwrap();
        let sched = scripted(&schema, &scope, 0, FaultClass::Duplicated, "status(B)");
        let u = moving_update(&schema);
        let f = filter_update(&sched, &scope, &schema, 0, &u).unwrap();
        assert_eq!(f.update.len(), 3);
        let s0 = crate::kernel::State::from_slots(vec![1, 0, 0]);
        assert_eq!(f.update.apply(&schema, &s0).unwrap(), u.apply(&schema, &s0).unwrap());
    }

    #[test]
    fn scripted_target_missing_from_update_is_a_mismatch() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(*)"], [FaultClass::Lost]).unwrap();
        let sched = scripted(&schema, &scope, 1, FaultClass::Lost, "status(A):=occupied");
        assert!(matches!(
            filter_update(&sched, &scope, &schema, 1, &moving_update(&schema)),
            Err(InjectError::ScheduleMismatch { step: 1, .. })
        ));
    }

    #[test]
    fn schedules_outside_scope_are_rejected() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(*):=free"], [FaultClass::Lost]).unwrap();
        let bad_class = InjectionSchedule::scripted(
            &schema,
            &scope,
            vec![ScriptedFault { step: 0, class: FaultClass::Fake, target: Selector::parse("status(A):=free").unwrap() }],
        );
        assert!(matches!(bad_class, Err(InjectError::OutOfScope { .. })));
        let bad_target = InjectionSchedule::scripted(
            &schema,
            &scope,
            vec![ScriptedFault { step: 0, class: FaultClass::Lost, target: Selector::parse("availability(R)").unwrap() }],
        );
        assert!(matches!(bad_target, Err(InjectError::OutOfScope { .. })));
        let unsorted = InjectionSchedule::scripted(
            &schema,
            &scope,
            vec![
                ScriptedFault { step: 4, class: FaultClass::Lost, target: Selector::parse("status(A)").unwrap() },
                ScriptedFault { step: 2, class: FaultClass::Lost, target: Selector::parse("status(A)").unwrap() },
            ],
        );
        assert!(matches!(unsorted, Err(InjectError::Unsorted(2))));
        assert!(matches!(InjectionSchedule::random(1, 1.5), Err(InjectError::Probability(_))));
    }

    #[test]
    fn scope_patterns_must_match_something() {
        let schema = schema();
        assert!(matches!(
            FaultScope::new(&schema, &["speed(*)"], [FaultClass::Lost]),
            Err(InjectError::UnmatchedPattern(_))
        ));
        assert!(matches!(
            FaultScope::new(&schema, &["status(*):=broken"], [FaultClass::Lost]),
            Err(InjectError::UnmatchedPattern(_))
        ));
        assert!(matches!(
            FaultScope::new::<&str>(&schema, &[], [FaultClass::Lost]),
            Err(InjectError::EmptyScope)
        ));
    }

    #[test]
    fn fake_follows_script_and_scope() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(*)"], [FaultClass::Fake]).unwrap();
        let sched = scripted(&schema, &scope, 2, FaultClass::Fake, "status(B):=free");
        assert!(ei_step(&sched, &scope, &schema, 1).unwrap().is_empty());
        assert_eq!(ei_step(&sched, &scope, &schema, 2).unwrap().describe(&schema), "status(B):=free");
        let none = InjectionSchedule::none();
        assert!((0..20).all(|k| ei_step(&none, &scope, &schema, k).unwrap().is_empty()));
    }

    #[test]
    fn zero_probability_never_fires() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(*)"], FaultClass::ALL).unwrap();
        for seed in [0, 1, 42, u64::MAX] {
            let sched = InjectionSchedule::random(seed, 0.0).unwrap();
            for step in 0..50 {
                assert!(ei_step(&sched, &scope, &schema, step).unwrap().is_empty());
                let u = moving_update(&schema);
                assert_eq!(filter_update(&sched, &scope, &schema, step, &u).unwrap().update, u);
            }
        }
    }

    #[test]
    fn random_faults_stay_in_scope_and_repeat_per_seed() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(A)"], FaultClass::ALL).unwrap();
        let sched = InjectionSchedule::random(9, 0.7).unwrap();
        let mut fired = 0;
        for step in 0..200 {
            let fake = ei_step(&sched, &scope, &schema, step).unwrap();
            assert_eq!(fake, ei_step(&sched, &scope, &schema, step).unwrap());
            for a in fake.assignments() {
                assert!(scope.permits_assignment(&schema, a));
                fired += 1;
            }
            let f = filter_update(&sched, &scope, &schema, step, &moving_update(&schema)).unwrap();
            if let Some(fault) = f.fault {
                assert!(fault.writes.assignments().iter().all(|a| schema.name(a.var) == "status(A)"));
                fired += 1;
            }
        }
        assert!(fired > 50, "p=0.7 over 200 steps fired only {fired} times");
    }

    #[test]
    fn audit_flags_out_of_scope_events() {
        let schema = schema();
        let scope = FaultScope::new(&schema, &["status(*):=free"], [FaultClass::Lost]).unwrap();
        let ei = |step, op: &str, update: &str| Event {
            step,
            actor: EI_ACTOR.into(),
            op: op.into(),
            args: vec![],
            layer: None,
            outcome: Outcome::Applied,
            update: StateUpdate::parse(&schema, update).unwrap(),
        };
        let ok = Trace { events: vec![ei(0, "lost", "status(A):=free")], ..Trace::new() };
        assert!(check_ei_respects_guarantee(&scope, &schema, &ok).holds());
        let wrong_var = Trace { events: vec![ei(4, "lost", "availability(R):=available")], ..Trace::new() };
        assert_eq!(check_ei_respects_guarantee(&scope, &schema, &wrong_var).witness().unwrap().step, 4);
        let fake = Trace { events: vec![ei(7, "fake", "status(A):=free")], ..Trace::new() };
        assert_eq!(check_ei_respects_guarantee(&scope, &schema, &fake).witness().unwrap().step, 7);
    }

    #[test]
    fn config_file_round_trip() {
        let schema = schema();
        let cfg = EiConfig::from_json(
            r#"{"scope": {"variables": ["status(*)"], "classes": ["fake", "lost"]},
                "mode": "scripted",
                "script": [{"step": 1, "class": "fake", "target": "status(A)", "value": "free"}]}"#,
            &schema,
        )
        .unwrap();
        assert_eq!(ei_step(&cfg.schedule, &cfg.scope, &schema, 1).unwrap().describe(&schema), "status(A):=free");
        let err = EiConfig::from_json("{\"scope\": ", &schema).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let random = EiConfig::from_json(
            r#"{"scope": {"variables": ["status(*)"], "classes": ["lost"]}, "random": {"seed": 3, "probability": 0.25}}"#,
            &schema,
        )
        .unwrap();
        assert!(matches!(random.schedule, InjectionSchedule::Random { seed: 3, .. }));
    }
}
