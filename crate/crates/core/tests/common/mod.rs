#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use lfts::explorer::{Actor, ArgPolicy, SystemConfig};
use lfts::injector::{EiConfig, FaultClass, FaultScope, InjectionSchedule};
use lfts::kernel::{Domain, Layer, LayeredOperation, Predicate, RGOperation, State, StateSchema, StateUpdate};
use lfts::train::Scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

pub fn scenario(name: &str) -> Scenario {
    Scenario::from_json(&read(name)).unwrap()
}

/// A state built from the initial one by `var=label` overrides.
pub fn state_with(schema: &StateSchema, base: &State, overrides: &[(&str, &str)]) -> State {
    let mut s = base.clone();
    for (name, label) in overrides {
        let var = schema.var(name).unwrap_or_else(|| panic!("no variable {name}"));
        let v = schema
            .domain(var)
            .index_of_label(label)
            .unwrap_or_else(|| panic!("{label} is not a value of {name}"));
        s.set(var, v);
    }
    s
}

/// A small system described by plain tables, so an oracle can step it
/// without going through the kernel.
/// One layer: rely and update tables, indexed by state code.
pub type TableLayer = (Vec<bool>, Vec<Vec<(usize, u16)>>);

#[derive(Debug, Clone)]
pub struct TableSystem {
    pub sizes: Vec<u16>,
    /// Per operation, per layer: (rely table, update table), indexed by the
    /// state's mixed-radix code.
    pub ops: Vec<Vec<TableLayer>>,
    pub bad: Vec<bool>,
    pub initial: Vec<u16>,
    /// Variable a fake injector may overwrite with any value.
    pub fake_var: Option<usize>,
    pub depth: usize,
}

pub fn code(sizes: &[u16], slots: &[u16]) -> usize {
    slots
        .iter()
        .zip(sizes)
        .fold(0, |acc, (v, n)| acc * *n as usize + *v as usize)
}

impl TableSystem {
    pub fn random(seed: u64) -> TableSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nvars = rng.gen_range(2..=3);
        let sizes: Vec<u16> = (0..nvars).map(|_| rng.gen_range(2..=4)).collect();
        let total: usize = sizes.iter().map(|n| *n as usize).product();
        let nops = rng.gen_range(1..=3);
        let ops = (0..nops)
            .map(|_| {
                let layers = rng.gen_range(1..=2);
                (0..layers)
                    .map(|_| {
                        let rely = (0..total).map(|_| rng.gen_bool(0.6)).collect();
                        let updates = (0..total)
                            .map(|_| {
                                let writes = rng.gen_range(0..=2);
                                (0..writes)
                                    .map(|_| {
                                        let var = rng.gen_range(0..nvars);
                                        (var, rng.gen_range(0..sizes[var]))
                                    })
                                    .collect()
                            })
                            .collect();
                        (rely, updates)
                    })
                    .collect()
            })
            .collect();
        let bad = (0..total).map(|_| rng.gen_bool(0.08)).collect();
        let initial: Vec<u16> = sizes.iter().map(|n| rng.gen_range(0..*n)).collect();
        let fake_var = rng.gen_bool(0.3).then(|| rng.gen_range(0..nvars));
        let depth = rng.gen_range(2..=6);
        let mut sys = TableSystem { sizes, ops, bad, initial, fake_var, depth };
        // keep the start state good so verdicts depend on exploration
        let c = code(&sys.sizes, &sys.initial);
        sys.bad[c] = false;
        sys
    }

    pub fn total_states(&self) -> usize {
        self.sizes.iter().map(|n| *n as usize).product()
    }

    pub fn schema(&self) -> StateSchema {
        StateSchema::new(
            self.sizes
                .iter()
                .enumerate()
                .map(|(i, n)| (format!("v{i}"), Domain::range(0, *n as i64 - 1))),
        )
        .unwrap()
    }

    pub fn config(&self) -> SystemConfig {
        let schema = Arc::new(self.schema());
        let vars: Vec<_> = schema.var_ids().collect();
        let mut cfg = SystemConfig::new(schema.clone(), State::from_slots(self.initial.clone()));
        for (oi, layers) in self.ops.iter().enumerate() {
            let built: Vec<Layer> = layers
                .iter()
                .map(|(rely, updates)| {
                    let (sizes, rely, updates) = (self.sizes.clone(), rely.clone(), updates.clone());
                    let sizes2 = sizes.clone();
                    let vars = vars.clone();
                    let pred = Predicate::state("rely", move |s| rely[code(&sizes, s.slots())]);
                    Layer::new(pred, move |s, _| {
                        updates[code(&sizes2, s.slots())]
                            .iter()
                            .map(|(v, x)| lfts::kernel::Assignment::new(vars[*v], *x))
                            .collect::<StateUpdate>()
                    })
                })
                .collect();
            let id = format!("op{oi}");
            let actor = if built.len() == 1 {
                let l = built.into_iter().next().unwrap();
                let rely = l.rely.clone();
                Actor::new(&id, RGOperation::new(&id, vec![], rely, move |s, a| l.guarantee(s, a)), ArgPolicy::All)
            } else {
                Actor::new(&id, LayeredOperation::new(&id, vec![], built).unwrap(), ArgPolicy::All)
            };
            cfg = cfg.actor(actor);
        }
        let (sizes, bad) = (self.sizes.clone(), self.bad.clone());
        cfg = cfg.invariant(Predicate::state("good", move |s| !bad[code(&sizes, s.slots())]));
        if let Some(v) = self.fake_var {
            let scope = FaultScope::new(&schema, &[format!("v{v}")], [FaultClass::Fake]).unwrap();
            cfg.ei = Some(EiConfig::new(scope, InjectionSchedule::none()));
        }
        cfg.depth(self.depth)
    }

    fn successors(&self, s: &[u16]) -> Vec<Vec<u16>> {
        let c = code(&self.sizes, s);
        let mut out = Vec::new();
        for layers in &self.ops {
            if let Some((_, updates)) = layers.iter().find(|(rely, _)| rely[c]) {
                let mut next = s.to_vec();
                for (v, x) in &updates[c] {
                    next[*v] = *x;
                }
                out.push(next);
            }
        }
        if let Some(v) = self.fake_var {
            for x in 0..self.sizes[v] {
                if x != s[v] {
                    let mut next = s.to_vec();
                    next[v] = x;
                    out.push(next);
                }
            }
        }
        out
    }

    /// Naive enumeration of every path up to the depth, without remembering
    /// visited states. Returns the length of the shortest path to a bad
    /// state, if any.
    pub fn naive_shortest_violation(&self) -> Option<usize> {
        fn go(sys: &TableSystem, s: &[u16], depth: usize, best: &mut Option<usize>) {
            if sys.bad[code(&sys.sizes, s)] {
                *best = Some(best.map_or(depth, |b| b.min(depth)));
                return;
            }
            if depth == sys.depth {
                return;
            }
            for next in sys.successors(s) {
                go(sys, &next, depth + 1, best);
            }
        }
        let mut best = None;
        go(self, &self.initial, 0, &mut best);
        best
    }

    /// Distinct states reachable within the depth (a set-based count, for
    /// sizing only).
    pub fn reachable(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut frontier = vec![self.initial.clone()];
        seen.insert(self.initial.clone());
        for _ in 0..self.depth {
            let mut next = Vec::new();
            for s in &frontier {
                for n in self.successors(s) {
                    if seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
            frontier = next;
        }
        seen.len()
    }
}
