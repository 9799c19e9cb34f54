//! The train system's global state as a kernel schema.
//!
//! Variables, in schema order:
//!
//! | variable          | values                               |
//! |-------------------|--------------------------------------|
//! | `status(b)`       | `free`, `occupied`                   |
//! | `occupant(b)`     | `none`, then one value per train     |
//! | `availability(r)` | `available`, `reserved`, `maintenance` |
//! | `route(t)`        | `null`, then one value per route     |
//! | `direction(p)`    | `directed`, `diverted`               |

use std::collections::HashMap;
use std::sync::Arc;

use crate::kernel::{Domain, State, StateSchema, VarId};

use super::ops::TrainOps;
use super::topology::{validate_topology, Topology};
use super::{Availability, BlockStatus, Direction, TrainError};

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u16);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(TrainId);
id_type!(BlockId);
id_type!(RouteId);
id_type!(PointId);

/// How the reservation guarantee treats block status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Reservation marks every block of the route occupied, as written.
    /// EnterRoute then finds its first block occupied and stays blocked.
    #[default]
    Verbatim,
    /// Reservation is recorded through availability only and leaves block
    /// status alone, so the train can enter the first block afterwards.
    ReservationKeepsFirstFree,
}

#[derive(Debug)]
pub(crate) struct Layout {
    pub topology: Topology,
    pub variant: Variant,
    pub trains: Vec<String>,
    pub blocks: Vec<String>,
    pub routes: Vec<String>,
    pub points: Vec<String>,
    pub route_blocks: Vec<Vec<BlockId>>,
    pub route_points: Vec<Vec<(PointId, Direction)>>,
    pub schema: Arc<StateSchema>,
    pub status: Vec<VarId>,
    pub occupant: Vec<VarId>,
    pub availability: Vec<VarId>,
    pub route: Vec<VarId>,
    pub direction: Vec<VarId>,
    train_index: HashMap<String, TrainId>,
    block_index: HashMap<String, BlockId>,
    route_index: HashMap<String, RouteId>,
    point_index: HashMap<String, PointId>,
}

impl Layout {
    pub fn status(&self, s: &State, b: BlockId) -> BlockStatus {
        BlockStatus::from_index(s.get(self.status[b.index()]))
    }

    pub fn occupant(&self, s: &State, b: BlockId) -> Option<TrainId> {
        match s.get(self.occupant[b.index()]) {
            0 => None,
            i => Some(TrainId(i - 1)),
        }
    }

    pub fn availability(&self, s: &State, r: RouteId) -> Availability {
        Availability::from_index(s.get(self.availability[r.index()]))
    }

    pub fn assignment(&self, s: &State, t: TrainId) -> Option<RouteId> {
        match s.get(self.route[t.index()]) {
            0 => None,
            i => Some(RouteId(i - 1)),
        }
    }

    pub fn direction(&self, s: &State, p: PointId) -> Direction {
        Direction::from_index(s.get(self.direction[p.index()]))
    }

    pub fn blocks_of(&self, r: RouteId) -> &[BlockId] {
        &self.route_blocks[r.index()]
    }

    pub fn position(&self, r: RouteId, b: BlockId) -> Option<usize> {
        self.blocks_of(r).iter().position(|x| *x == b)
    }

    pub fn next(&self, r: RouteId, b: BlockId) -> Option<BlockId> {
        let blocks = self.blocks_of(r);
        self.position(r, b).and_then(|i| blocks.get(i + 1).copied())
    }

    pub fn first(&self, r: RouteId) -> BlockId {
        self.blocks_of(r)[0]
    }

    pub fn last(&self, r: RouteId) -> BlockId {
        *self.blocks_of(r).last().expect("validated routes are non-empty")
    }

    pub fn occupied_by(&self, s: &State, t: TrainId) -> Vec<BlockId> {
        (0..self.blocks.len() as u16)
            .map(BlockId)
            .filter(|b| self.occupant(s, *b) == Some(t))
            .collect()
    }
}

/// A validated network plus its trains, compiled to a kernel schema and the
/// five rely/guarantee operations.
#[derive(Debug, Clone)]
pub struct TrainModel {
    pub(crate) layout: Arc<Layout>,
    ops: TrainOps,
}

/// The global state in typed form, indexed by the model's ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainState {
    pub status: Vec<BlockStatus>,
    pub occupant: Vec<Option<TrainId>>,
    pub availability: Vec<Availability>,
    pub assignment: Vec<Option<RouteId>>,
    pub direction: Vec<Direction>,
}

impl TrainModel {
    pub fn new(topology: Topology, trains: Vec<String>, variant: Variant) -> Result<Self, TrainError> {
        let violations = validate_topology(&topology);
        if !violations.is_empty() {
            return Err(TrainError::InvalidTopology(violations));
        }
        let mut train_index = HashMap::new();
        for (i, t) in trains.iter().enumerate() {
            if t.is_empty() || t == "none" || train_index.insert(t.clone(), TrainId(i as u16)).is_some() {
                return Err(TrainError::BadTrainName(t.clone()));
            }
        }
        let blocks = topology.blocks.clone();
        let routes: Vec<String> = topology.routes.keys().cloned().collect();
        if routes.iter().any(|r| r == "null") {
            return Err(TrainError::UnknownRoute("null is reserved for the empty assignment".into()));
        }
        let block_index: HashMap<String, BlockId> = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), BlockId(i as u16)))
            .collect();
        let route_index: HashMap<String, RouteId> = routes
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), RouteId(i as u16)))
            .collect();
        // points in block declaration order
        let points: Vec<String> = blocks
            .iter()
            .filter_map(|b| topology.points.get(b).and_then(|ps| ps.first()).cloned())
            .collect();
        let point_index: HashMap<String, PointId> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), PointId(i as u16)))
            .collect();
        let route_blocks: Vec<Vec<BlockId>> = routes
            .iter()
            .map(|r| topology.routes[r].iter().map(|b| block_index[b]).collect())
            .collect();
        let route_points: Vec<Vec<(PointId, Direction)>> = routes
            .iter()
            .map(|r| {
                topology.routes[r]
                    .iter()
                    .filter_map(|b| topology.points.get(b).and_then(|ps| ps.first()))
                    .map(|p| (point_index[p], topology.orientations[r][p]))
                    .collect()
            })
            .collect();

        let mut vars = Vec::new();
        let status_domain = Domain::symbols(["free", "occupied"]);
        let occupant_domain = Domain::symbols(std::iter::once("none".to_owned()).chain(trains.iter().cloned()));
        let availability_domain = Domain::symbols(["available", "reserved", "maintenance"]);
        let route_domain = Domain::symbols(std::iter::once("null".to_owned()).chain(routes.iter().cloned()));
        let direction_domain = Domain::symbols(["directed", "diverted"]);
        for b in &blocks {
            vars.push((format!("status({b})"), status_domain.clone()));
        }
        for b in &blocks {
            vars.push((format!("occupant({b})"), occupant_domain.clone()));
        }
        for r in &routes {
            vars.push((format!("availability({r})"), availability_domain.clone()));
        }
        for t in &trains {
            vars.push((format!("route({t})"), route_domain.clone()));
        }
        for p in &points {
            vars.push((format!("direction({p})"), direction_domain.clone()));
        }
        let schema = StateSchema::new(vars)?;
        let ids = |prefix: &str, names: &[String]| -> Vec<VarId> {
            names
                .iter()
                .map(|n| schema.var(&format!("{prefix}({n})")).expect("declared above"))
                .collect()
        };
        let status = ids("status", &blocks);
        let occupant = ids("occupant", &blocks);
        let availability = ids("availability", &routes);
        let route = ids("route", &trains);
        let direction = ids("direction", &points);

        let layout = Arc::new(Layout {
            topology,
            variant,
            trains,
            blocks,
            routes,
            points,
            route_blocks,
            route_points,
            schema: Arc::new(schema),
            status,
            occupant,
            availability,
            route,
            direction,
            train_index,
            block_index,
            route_index,
            point_index,
        });
        let ops = TrainOps::build(&layout)?;
        Ok(TrainModel { layout, ops })
    }

    pub fn schema(&self) -> &Arc<StateSchema> {
        &self.layout.schema
    }

    pub fn topology(&self) -> &Topology {
        &self.layout.topology
    }

    pub fn variant(&self) -> Variant {
        self.layout.variant
    }

    pub fn ops(&self) -> &TrainOps {
        &self.ops
    }

    pub fn trains(&self) -> &[String] {
        &self.layout.trains
    }

    pub fn blocks(&self) -> &[String] {
        &self.layout.blocks
    }

    pub fn routes(&self) -> &[String] {
        &self.layout.routes
    }

    pub fn points(&self) -> &[String] {
        &self.layout.points
    }

    pub fn train(&self, name: &str) -> Result<TrainId, TrainError> {
        self.layout
            .train_index
            .get(name)
            .copied()
            .ok_or_else(|| TrainError::UnknownTrain(name.to_owned()))
    }

    pub fn block(&self, name: &str) -> Result<BlockId, TrainError> {
        self.layout
            .block_index
            .get(name)
            .copied()
            .ok_or_else(|| TrainError::UnknownBlock(name.to_owned()))
    }

    pub fn route(&self, name: &str) -> Result<RouteId, TrainError> {
        self.layout
            .route_index
            .get(name)
            .copied()
            .ok_or_else(|| TrainError::UnknownRoute(name.to_owned()))
    }

    pub fn point(&self, name: &str) -> Result<PointId, TrainError> {
        self.layout
            .point_index
            .get(name)
            .copied()
            .ok_or_else(|| TrainError::UnknownPoint(name.to_owned()))
    }

    pub fn train_name(&self, t: TrainId) -> &str {
        &self.layout.trains[t.index()]
    }

    pub fn block_name(&self, b: BlockId) -> &str {
        &self.layout.blocks[b.index()]
    }

    pub fn route_name(&self, r: RouteId) -> &str {
        &self.layout.routes[r.index()]
    }

    pub fn blocks_of(&self, r: RouteId) -> &[BlockId] {
        self.layout.blocks_of(r)
    }

    pub fn first(&self, r: RouteId) -> BlockId {
        self.layout.first(r)
    }

    pub fn last(&self, r: RouteId) -> BlockId {
        self.layout.last(r)
    }

    /// Successor of `b` along route `r`; `None` at the last block or when
    /// `b` is not on `r`.
    pub fn next(&self, r: RouteId, b: BlockId) -> Option<BlockId> {
        self.layout.next(r, b)
    }

    /// Points crossed by `r` with the orientation `r` requires.
    pub fn route_points(&self, r: RouteId) -> &[(PointId, Direction)] {
        &self.layout.route_points[r.index()]
    }

    pub fn status(&self, s: &State, b: BlockId) -> BlockStatus {
        self.layout.status(s, b)
    }

    pub fn occupant(&self, s: &State, b: BlockId) -> Option<TrainId> {
        self.layout.occupant(s, b)
    }

    pub fn availability(&self, s: &State, r: RouteId) -> Availability {
        self.layout.availability(s, r)
    }

    pub fn assignment(&self, s: &State, t: TrainId) -> Option<RouteId> {
        self.layout.assignment(s, t)
    }

    pub fn direction(&self, s: &State, p: PointId) -> Direction {
        self.layout.direction(s, p)
    }

    pub fn status_var(&self, b: BlockId) -> VarId {
        self.layout.status[b.index()]
    }

    pub fn occupant_var(&self, b: BlockId) -> VarId {
        self.layout.occupant[b.index()]
    }

    pub fn availability_var(&self, r: RouteId) -> VarId {
        self.layout.availability[r.index()]
    }

    pub fn route_var(&self, t: TrainId) -> VarId {
        self.layout.route[t.index()]
    }

    pub fn direction_var(&self, p: PointId) -> VarId {
        self.layout.direction[p.index()]
    }

    /// All blocks free and unoccupied, all routes available, no assignments,
    /// every point directed.
    pub fn initial_state(&self) -> State {
        State::from_slots(vec![0; self.layout.schema.len()])
    }

    pub fn decode(&self, s: &State) -> TrainState {
        let l = &self.layout;
        TrainState {
            status: (0..l.blocks.len() as u16).map(|b| l.status(s, BlockId(b))).collect(),
            occupant: (0..l.blocks.len() as u16).map(|b| l.occupant(s, BlockId(b))).collect(),
            availability: (0..l.routes.len() as u16)
                .map(|r| l.availability(s, RouteId(r)))
                .collect(),
            assignment: (0..l.trains.len() as u16).map(|t| l.assignment(s, TrainId(t))).collect(),
            direction: (0..l.points.len() as u16).map(|p| l.direction(s, PointId(p))).collect(),
        }
    }

    pub fn encode(&self, ts: &TrainState) -> Result<State, TrainError> {
        let l = &self.layout;
        if ts.status.len() != l.blocks.len()
            || ts.occupant.len() != l.blocks.len()
            || ts.availability.len() != l.routes.len()
            || ts.assignment.len() != l.trains.len()
            || ts.direction.len() != l.points.len()
        {
            return Err(TrainError::ShapeMismatch);
        }
        let mut s = self.initial_state();
        for (i, v) in ts.status.iter().enumerate() {
            s.set(l.status[i], v.index());
        }
        for (i, v) in ts.occupant.iter().enumerate() {
            s.set(l.occupant[i], v.map_or(0, |t| t.0 + 1));
        }
        for (i, v) in ts.availability.iter().enumerate() {
            s.set(l.availability[i], v.index());
        }
        for (i, v) in ts.assignment.iter().enumerate() {
            s.set(l.route[i], v.map_or(0, |r| r.0 + 1));
        }
        for (i, v) in ts.direction.iter().enumerate() {
            s.set(l.direction[i], v.index());
        }
        l.schema.check(&s)?;
        Ok(s)
    }
}
