use std::collections::BTreeMap;
use std::fmt::Write as _;

use indexmap::IndexSet;
use rayon::prelude::*;

use crate::injector::{apply_fault, FaultClass};
use crate::kernel::{Assignment, KernelError, Proposal, State, StateSchema, StateUpdate};
use crate::trace::{Event, Outcome, Trace, EI_ACTOR};

use super::{ExplorerError, SystemConfig};

/// States expanded per batch; bounds the memory held by pending successors.
const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
    CapExceeded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "Holds",
            Status::Violated => "Violated",
            Status::CapExceeded => "CapExceeded",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub states_visited: usize,
    /// Depth of the deepest level that produced a new state.
    pub max_depth: usize,
    /// Successor edges generated, duplicates included.
    pub transitions: u64,
    /// Per layered operation: how often each layer fired during expansion.
    pub layer_selections: BTreeMap<String, BTreeMap<usize, u64>>,
}

impl Stats {
    pub fn selections(&self, op: &str, layer: usize) -> u64 {
        self.layer_selections
            .get(op)
            .and_then(|m| m.get(&layer))
            .copied()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    /// The falsified invariant, when violated.
    pub invariant: Option<String>,
    /// Shortest path to the violating state.
    pub witness: Option<Trace>,
    pub violating_state: Option<State>,
    pub stats: Stats,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn to_json(&self, schema: &StateSchema) -> serde_json::Value {
        let layers: serde_json::Map<String, serde_json::Value> = self
            .stats
            .layer_selections
            .iter()
            .map(|(op, m)| {
                let per: serde_json::Map<String, serde_json::Value> =
                    m.iter().map(|(l, n)| (l.to_string(), (*n).into())).collect();
                (op.clone(), per.into())
            })
            .collect();
        let mut v = serde_json::json!({
            "status": self.status.as_str(),
            "statesVisited": self.stats.states_visited,
            "maxDepth": self.stats.max_depth,
            "transitions": self.stats.transitions,
            "layerSelections": layers,
        });
        if let Some(inv) = &self.invariant {
            v["invariant"] = inv.clone().into();
        }
        if let Some(w) = &self.witness {
            v["witness"] = w.events.iter().map(|e| e.to_json(schema)).collect();
        }
        v
    }

    /// Human summary; `color` adds ANSI colors to the status word.
    pub fn summary(&self, schema: &StateSchema, color: bool) -> String {
        let word = self.status.as_str();
        let word = match (color, self.status) {
            (false, _) => word.to_owned(),
            (true, Status::Holds) => format!("\x1b[32m{word}\x1b[0m"),
            (true, Status::Violated) => format!("\x1b[31m{word}\x1b[0m"),
            (true, Status::CapExceeded) => format!("\x1b[33m{word}\x1b[0m"),
        };
        let mut out = format!(
            "{word}: {} states visited, max depth {}, {} transitions\n",
            self.stats.states_visited, self.stats.max_depth, self.stats.transitions
        );
        for (op, m) in &self.stats.layer_selections {
            let per: Vec<String> = m.iter().map(|(l, n)| format!("layer {l}: {n}")).collect();
            let _ = writeln!(out, "  {op} selections: {}", per.join(", "));
        }
        if let Some(inv) = &self.invariant {
            let _ = writeln!(out, "invariant {inv} falsified");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "witness ({} events):", w.len());
            for e in &w.events {
                let _ = writeln!(out, "  {}", e.to_line(schema));
            }
        }
        if let Some(s) = &self.violating_state {
            let _ = writeln!(out, "final state: {}", schema.describe(s));
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Edge {
    Step {
        actor: usize,
        tuple: usize,
        /// A lost write, by index into the step's update.
        lost: Option<usize>,
    },
    Fake(Assignment),
}

struct Expansion {
    succs: Vec<(State, Edge, Option<usize>)>,
    transitions: u64,
    layers: Vec<(usize, usize)>,
}

fn expand(
    cfg: &SystemConfig,
    tuples: &[Vec<Vec<u16>>],
    fakes: &[Assignment],
    lost_allowed: bool,
    state: &State,
) -> Result<Expansion, KernelError> {
    let mut exp = Expansion { succs: Vec::new(), transitions: 0, layers: Vec::new() };
    let push = |exp: &mut Expansion, s: State, edge: Edge| {
        let bad = cfg.violated(&s);
        exp.transitions += 1;
        exp.succs.push((s, edge, bad));
    };
    for (ai, actor) in cfg.actors.iter().enumerate() {
        for (ti, t) in tuples[ai].iter().enumerate() {
            let (layer, update) = match actor.op.propose(state, t) {
                Ok(Proposal::Fire { layer, update }) => (layer, update),
                Ok(Proposal::Blocked) | Err(KernelError::Precondition { .. }) => continue,
                Err(e) => return Err(e),
            };
            if let Some(l) = layer {
                exp.layers.push((ai, l));
            }
            push(&mut exp, update.apply(&cfg.schema, state)?, Edge::Step { actor: ai, tuple: ti, lost: None });
            if lost_allowed {
                let ei = cfg.ei.as_ref().expect("lost faults need an injector");
                for (k, a) in update.assignments().iter().enumerate() {
                    if ei.scope.permits_assignment(&cfg.schema, a) {
                        let faulty = apply_fault(&update, FaultClass::Lost, &[k]).update;
                        push(&mut exp, faulty.apply(&cfg.schema, state)?, Edge::Step { actor: ai, tuple: ti, lost: Some(k) });
                    }
                }
            }
        }
    }
    for a in fakes {
        if state.get(a.var) != a.value {
            let mut s = state.clone();
            s.set(a.var, a.value);
            push(&mut exp, s, Edge::Fake(*a));
        }
    }
    Ok(exp)
}

/// Breadth-first search over all interleavings up to `cfg.depth`, with state
/// deduplication, checking every invariant at every visited state.
///
/// The injector acts nondeterministically within its scope: any permitted
/// write of any step may be lost, and any permitted fake write may occur
/// between steps. Its schedule is ignored. Duplicated writes are idempotent
/// and add no states. Admin scripts do not run.
///
/// With `workers > 1` each batch of a level is expanded in parallel and
/// merged in order, so the verdict and witness do not depend on the number of
/// workers.
pub fn explore(cfg: &SystemConfig) -> Result<Verdict, ExplorerError> {
    cfg.validate()?;
    let tuples: Vec<Vec<Vec<u16>>> = cfg.actors.iter().map(|a| a.tuples()).collect();
    let (fakes, lost_allowed) = match &cfg.ei {
        Some(ei) => (ei.scope.fake_candidates(&cfg.schema), ei.scope.permits_class(FaultClass::Lost)),
        None => (Vec::new(), false),
    };
    let pool = if cfg.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|e| ExplorerError::Config(e.to_string()))?,
        )
    } else {
        None
    };

    let mut visited: IndexSet<State> = IndexSet::new();
    let mut parents: Vec<Option<(usize, Edge)>> = vec![None];
    let mut stats = Stats::default();
    visited.insert(cfg.initial.clone());
    if let Some(inv) = cfg.violated(&cfg.initial) {
        stats.states_visited = 1;
        return Ok(violated(cfg, &tuples, &visited, &parents, 0, inv, stats));
    }

    let mut level_start = 0;
    for depth in 0..cfg.depth {
        let level_end = visited.len();
        if level_start == level_end {
            break;
        }
        for batch_start in (level_start..level_end).step_by(BATCH) {
            let batch = batch_start..(batch_start + BATCH).min(level_end);
            let run = |i: usize| expand(cfg, &tuples, &fakes, lost_allowed, &visited[i]);
            let expansions: Vec<Expansion> = match &pool {
                Some(pool) => pool.install(|| batch.clone().into_par_iter().map(run).collect::<Result<_, _>>())?,
                None => batch.clone().map(run).collect::<Result<_, _>>()?,
            };
            for (i, exp) in batch.zip(expansions) {
                stats.transitions += exp.transitions;
                for (ai, l) in exp.layers {
                    *stats
                        .layer_selections
                        .entry(cfg.actors[ai].op.name().to_owned())
                        .or_default()
                        .entry(l)
                        .or_default() += 1;
                }
                for (s, edge, bad) in exp.succs {
                    let (idx, fresh) = visited.insert_full(s);
                    if !fresh {
                        continue;
                    }
                    parents.push(Some((i, edge)));
                    stats.max_depth = depth + 1;
                    stats.states_visited = visited.len();
                    if let Some(inv) = bad {
                        return Ok(violated(cfg, &tuples, &visited, &parents, idx, inv, stats));
                    }
                    if visited.len() > cfg.cap {
                        return Ok(Verdict {
                            status: Status::CapExceeded,
                            invariant: None,
                            witness: None,
                            violating_state: None,
                            stats,
                        });
                    }
                }
            }
        }
        level_start = level_end;
    }
    stats.states_visited = visited.len();
    Ok(Verdict {
        status: Status::Holds,
        invariant: None,
        witness: None,
        violating_state: None,
        stats,
    })
}

fn violated(
    cfg: &SystemConfig,
    tuples: &[Vec<Vec<u16>>],
    visited: &IndexSet<State>,
    parents: &[Option<(usize, Edge)>],
    idx: usize,
    inv: usize,
    stats: Stats,
) -> Verdict {
    let mut path = Vec::new();
    let mut cur = idx;
    while let Some((p, edge)) = &parents[cur] {
        path.push((*p, edge));
        cur = *p;
    }
    path.reverse();
    let mut events = Vec::new();
    let mut push = |actor: &str, op: &str, args: Vec<String>, layer, outcome, update| {
        events.push(Event { step: events.len(), actor: actor.to_owned(), op: op.to_owned(), args, layer, outcome, update });
    };
    for (p, edge) in path {
        let state = &visited[p];
        match edge {
            Edge::Step { actor, tuple, lost } => {
                let a = &cfg.actors[*actor];
                let t = &tuples[*actor][*tuple];
                let Ok(Proposal::Fire { layer, update }) = a.op.propose(state, t) else {
                    unreachable!("recorded edges fire deterministically")
                };
                let update = match lost {
                    Some(k) => {
                        let f = apply_fault(&update, FaultClass::Lost, &[*k]);
                        let fault = f.fault.expect("lost fault");
                        push(EI_ACTOR, FaultClass::Lost.as_str(), vec![a.id.clone()], None, Outcome::Applied, fault.writes);
                        f.update
                    }
                    None => update,
                };
                let next = update.apply(&cfg.schema, state).expect("explored update applies");
                let outcome = if next == *state { Outcome::NoOp } else { Outcome::Applied };
                push(&a.id, a.op.name(), a.labels(t), layer, outcome, update);
            }
            Edge::Fake(a) => {
                let update = StateUpdate::new().set(a.var, a.value);
                push(EI_ACTOR, FaultClass::Fake.as_str(), Vec::new(), None, Outcome::Applied, update);
            }
        }
    }
    Verdict {
        status: Status::Violated,
        invariant: Some(cfg.invariants[inv].name().to_owned()),
        witness: Some(Trace { events, ..Trace::new() }),
        violating_state: Some(visited[idx].clone()),
        stats,
    }
}
