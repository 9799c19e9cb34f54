//! Scenario files: a network plus trains, initial overrides, per-train route
//! restrictions and an admin script, all in one JSON document.
//!
//! ```json
//! {
//!   "blocks": ["A", "B", "C"],
//!   "points": {"B": "pB"},
//!   "routes": {"ABC": ["A", "B", "C"]},
//!   "orientations": {"ABC": {"pB": "directed"}},
//!   "trains": ["t1"],
//!   "initial": {"availability": {"ABC": "available"}, "status": {"C": "free"}},
//!   "allowedRoutes": {"t1": ["ABC"]},
//!   "variant": "reservation-keeps-first-free",
//!   "admin": [{"step": 6, "clearMaintenance": "ABC"}]
//! }
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::explorer::{Actor, ArgPolicy, ScriptedUpdate, SystemConfig};
use crate::injector::{EiConfig, InjectError};
use crate::kernel::{Operation, State, StateSchema};

use super::model::{BlockId, RouteId, TrainId, TrainModel, Variant};
use super::ops::CLEAR_MAINTENANCE;
use super::topology::{PointSpec, Topology};
use super::{Availability, BlockStatus, Direction, TrainError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("{message} at line {line}, column {column}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Inject(#[from] InjectError),
}

impl From<serde_json::Error> for ScenarioError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends its own " at line L column C"
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_owned(),
            None => message,
        };
        ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialDoc {
    #[serde(default)]
    availability: BTreeMap<String, Availability>,
    #[serde(default)]
    status: BTreeMap<String, BlockStatus>,
    #[serde(default)]
    direction: BTreeMap<String, Direction>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct AdminDoc {
    step: usize,
    clear_maintenance: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ScenarioDoc {
    blocks: Vec<String>,
    #[serde(default)]
    points: BTreeMap<String, PointSpec>,
    routes: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    orientations: BTreeMap<String, BTreeMap<String, Direction>>,
    #[serde(default)]
    trains: Vec<String>,
    #[serde(default)]
    initial: Option<InitialDoc>,
    #[serde(default)]
    allowed_routes: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    variant: Variant,
    #[serde(default)]
    admin: Vec<AdminDoc>,
}

impl ScenarioDoc {
    fn topology(&self) -> Topology {
        Topology {
            blocks: self.blocks.clone(),
            points: self
                .points
                .iter()
                .map(|(b, p)| (b.clone(), p.clone().into_vec()))
                .collect(),
            routes: self.routes.clone(),
            orientations: self.orientations.clone(),
        }
    }
}

impl Topology {
    /// Reads the network part of a scenario document. The result may still be
    /// an invalid network.
    pub fn from_json(text: &str) -> Result<Topology, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;
        Ok(doc.topology())
    }
}

/// A scheduled `clear_maintenance` of one route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdminAction {
    pub step: usize,
    pub route: RouteId,
}

/// Knobs for turning a scenario into an explorable system.
#[derive(Debug, Clone)]
pub struct SystemOptions {
    /// Use the layered reservation instead of the plain one.
    pub layered: bool,
    pub depth: usize,
    pub cap: usize,
    pub workers: usize,
    pub ei: Option<EiConfig>,
}

impl Default for SystemOptions {
    fn default() -> Self {
        SystemOptions {
            layered: true,
            depth: 12,
            cap: 1_000_000,
            workers: 1,
            ei: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: TrainModel,
    pub initial: State,
    /// Routes each train may reserve, by train index.
    pub allowed: Vec<Vec<RouteId>>,
    pub admin: Vec<AdminAction>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;
        let model = TrainModel::new(doc.topology(), doc.trains.clone(), doc.variant)?;

        let mut ts = model.decode(&model.initial_state());
        if let Some(init) = &doc.initial {
            for (r, a) in &init.availability {
                ts.availability[model.route(r)?.index()] = *a;
            }
            for (b, s) in &init.status {
                ts.status[model.block(b)?.index()] = *s;
            }
            for (p, d) in &init.direction {
                ts.direction[model.point(p)?.index()] = *d;
            }
        }
        let initial = model.encode(&ts)?;

        let mut allowed: Vec<Vec<RouteId>> = (0..model.trains().len())
            .map(|_| (0..model.routes().len() as u16).map(RouteId).collect())
            .collect();
        for (t, routes) in &doc.allowed_routes {
            let t = model.train(t)?;
            allowed[t.index()] = routes.iter().map(|r| model.route(r)).collect::<Result<_, _>>()?;
        }
        let admin = doc
            .admin
            .iter()
            .map(|a| {
                Ok(AdminAction {
                    step: a.step,
                    route: model.route(&a.clear_maintenance)?,
                })
            })
            .collect::<Result<Vec<_>, TrainError>>()?;
        Ok(Scenario { model, initial, allowed, admin })
    }

    /// The same scenario under another reservation variant.
    pub fn with_variant(&self, variant: Variant) -> Result<Scenario, ScenarioError> {
        let trains = self.model.trains().to_vec();
        let model = TrainModel::new(self.model.topology().clone(), trains, variant)?;
        let initial = model.encode(&self.model.decode(&self.initial))?;
        Ok(Scenario { model, initial, ..self.clone() })
    }

    pub fn schema(&self) -> &StateSchema {
        self.model.schema()
    }

    /// Parses an injection config against this scenario's state variables.
    pub fn injection(&self, text: &str) -> Result<EiConfig, ScenarioError> {
        Ok(EiConfig::from_json(text, self.model.schema())?)
    }

    /// One actor per operation, restricted to each train's allowed routes,
    /// with the safety invariant.
    ///
    /// Moves range over the blocks of a train's allowed routes and exits over
    /// their last blocks; every other combination would only fail the rely or
    /// an engine guard.
    pub fn system_config(&self, opts: &SystemOptions) -> SystemConfig {
        let m = &self.model;
        let ops = m.ops();
        let trains = (0..m.trains().len() as u16).map(TrainId);

        let reserve: Vec<Vec<u16>> = trains
            .clone()
            .flat_map(|t| self.allowed[t.index()].iter().map(move |r| vec![t.0, r.0]))
            .collect();
        let single: Vec<Vec<u16>> = trains.clone().map(|t| vec![t.0]).collect();
        let mut moves = Vec::new();
        let mut exits = Vec::new();
        for t in trains {
            let mut blocks: Vec<BlockId> = Vec::new();
            let mut lasts: Vec<BlockId> = Vec::new();
            for r in &self.allowed[t.index()] {
                let bs = m.blocks_of(*r);
                blocks.extend(&bs[..bs.len() - 1]);
                lasts.push(m.last(*r));
            }
            blocks.sort_unstable();
            blocks.dedup();
            lasts.sort_unstable();
            lasts.dedup();
            moves.extend(blocks.into_iter().map(|b| vec![t.0, b.0]));
            exits.extend(lasts.into_iter().map(|b| vec![t.0, b.0]));
        }

        let reserving: Operation = if opts.layered {
            ops.layered_route_reserving.clone().into()
        } else {
            ops.route_reserving.clone().into()
        };
        let actor = |op: Operation, tuples: Vec<Vec<u16>>| Actor {
            id: op.name().to_owned(),
            op,
            args: ArgPolicy::Only(tuples),
        };
        let mut cfg = SystemConfig::new(m.schema().clone(), self.initial.clone());
        cfg.actors = vec![
            actor(reserving, reserve),
            actor(ops.route_freeing.clone().into(), single.clone()),
            actor(ops.enter_route.clone().into(), single),
            actor(ops.moving_on_route.clone().into(), moves),
            actor(ops.exit_route.clone().into(), exits),
        ];
        cfg.invariants = vec![m.safety_invariant()];
        cfg.admin = self
            .admin
            .iter()
            .map(|a| {
                let model = m.clone();
                let route = a.route;
                ScriptedUpdate::new(a.step, CLEAR_MAINTENANCE, vec![m.route_name(route).to_owned()], move |s| {
                    model.clear_maintenance(s, route).map_err(|e| e.to_string())
                })
            })
            .collect();
        cfg.ei = opts.ei.clone();
        cfg.depth = opts.depth;
        cfg.cap = opts.cap;
        cfg.workers = opts.workers;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{
        "blocks": ["A", "B", "C"],
        "points": {"B": "pB"},
        "routes": {"ABC": ["A", "B", "C"], "CB": ["C", "B"]},
        "orientations": {"ABC": {"pB": "directed"}, "CB": {"pB": "diverted"}},
        "trains": ["t1", "t2"],
        "initial": {"availability": {"CB": "maintenance"}, "status": {"C": "occupied"}},
        "allowedRoutes": {"t2": ["CB"]},
        "admin": [{"step": 2, "clearMaintenance": "CB"}]
    }"#;

    #[test]
    fn loads_overrides_and_restrictions() {
        let sc = Scenario::from_json(TOY).unwrap();
        let ts = sc.model.decode(&sc.initial);
        let cb = sc.model.route("CB").unwrap();
        assert_eq!(ts.availability[cb.index()], Availability::Maintenance);
        assert_eq!(ts.status[sc.model.block("C").unwrap().index()], BlockStatus::Occupied);
        assert_eq!(sc.allowed[0].len(), 2);
        assert_eq!(sc.allowed[1], vec![cb]);
        assert_eq!(sc.admin, vec![AdminAction { step: 2, route: cb }]);
        assert_eq!(sc.model.variant(), Variant::Verbatim);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = Scenario::from_json("{\n  \"blocks\": [\"A\",\n").unwrap_err();
        match err {
            ScenarioError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = Scenario::from_json(r#"{"blocks": [], "routes": {}, "colour": 1}"#).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { .. }), "{err}");
    }

    #[test]
    fn unknown_names_are_rejected() {
        let bad = TOY.replace(r#""allowedRoutes": {"t2""#, r#""allowedRoutes": {"t9""#);
        assert!(matches!(
            Scenario::from_json(&bad),
            Err(ScenarioError::Train(TrainError::UnknownTrain(_)))
        ));
    }

    #[test]
    fn system_config_restricts_tuples() {
        let sc = Scenario::from_json(TOY).unwrap();
        let cfg = sc.system_config(&SystemOptions::default());
        cfg.validate().unwrap();
        let names: Vec<&str> = cfg.actors.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(names, ["RouteReserving", "RouteFreeing", "EnterRoute", "MovingOnRoute", "ExitRoute"]);
        // t1: ABC, CB; t2: CB only
        assert_eq!(cfg.actors[0].tuples().len(), 3);
        assert!(matches!(cfg.actors[0].op, Operation::Layered(_)));
        let plain = sc.system_config(&SystemOptions { layered: false, ..SystemOptions::default() });
        assert!(matches!(plain.actors[0].op, Operation::Plain(_)));
        assert_eq!(cfg.admin.len(), 1);
    }

    #[test]
    fn variant_switch_keeps_initial_state() {
        let sc = Scenario::from_json(TOY).unwrap();
        let two = sc.with_variant(Variant::ReservationKeepsFirstFree).unwrap();
        assert_eq!(two.model.variant(), Variant::ReservationKeepsFirstFree);
        assert_eq!(two.initial, sc.initial);
    }
}
