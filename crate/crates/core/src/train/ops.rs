//! The five train operations and the layered route reservation.
//!
//! Rely and guarantee bodies follow the formulas clause by clause. Engine-level
//! guards (a train holds one route at a time, a train moves or exits from the
//! block it is on) are preconditions: their failure is an error, not a blocked
//! step.

use std::sync::Arc;

use crate::kernel::{
    step_layered, step_operation, Domain, Layer, LayerSelection, LayeredOperation, Param,
    Predicate, RGOperation, State, StateUpdate, StepResult,
};

use super::model::{BlockId, Layout, RouteId, TrainId, TrainModel};
use super::{Availability, BlockStatus, TrainError};

pub const ROUTE_RESERVING: &str = "RouteReserving";
pub const ROUTE_FREEING: &str = "RouteFreeing";
pub const ENTER_ROUTE: &str = "EnterRoute";
pub const MOVING_ON_ROUTE: &str = "MovingOnRoute";
pub const EXIT_ROUTE: &str = "ExitRoute";
pub const CLEAR_MAINTENANCE: &str = "clear_maintenance";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Reserve,
    Free,
    Enter,
    Move,
    Exit,
}

fn guard(l: &Layout, kind: Kind, s: &State, args: &[u16]) -> Result<(), TrainError> {
    let t = TrainId(args[0]);
    let train = || l.trains[t.index()].clone();
    let assigned = l.assignment(s, t);
    match kind {
        Kind::Reserve => {
            if let Some(r) = assigned {
                return Err(TrainError::AlreadyAssigned {
                    train: train(),
                    route: l.routes[r.index()].clone(),
                });
            }
        }
        Kind::Free => {
            assigned.ok_or_else(|| TrainError::Unassigned { train: train() })?;
        }
        Kind::Enter => {
            assigned.ok_or_else(|| TrainError::Unassigned { train: train() })?;
            if let Some(b) = l.occupied_by(s, t).first() {
                return Err(TrainError::AlreadyOnTrack {
                    train: train(),
                    block: l.blocks[b.index()].clone(),
                });
            }
        }
        Kind::Move | Kind::Exit => {
            let r = assigned.ok_or_else(|| TrainError::Unassigned { train: train() })?;
            let b = BlockId(args[1]);
            let block = || l.blocks[b.index()].clone();
            // off-route blocks fail the rely's membership conjunct instead
            if l.position(r, b).is_some() {
                let is_last = l.last(r) == b;
                if kind == Kind::Move && is_last {
                    return Err(TrainError::NoNextBlock { train: train(), block: block() });
                }
                if kind == Kind::Exit && !is_last {
                    return Err(TrainError::NotLastBlock { train: train(), block: block() });
                }
                if l.occupant(s, b) != Some(t) {
                    return Err(TrainError::NotOnBlock { train: train(), block: block() });
                }
            }
        }
    }
    Ok(())
}

fn kernel_guard(l: Arc<Layout>, kind: Kind) -> impl Fn(&State, &[u16]) -> Result<(), String> + Send + Sync {
    move |s, args| guard(&l, kind, s, args).map_err(|e| e.to_string())
}

const FREE: u16 = 0;
const OCCUPIED: u16 = 1;
const AVAILABLE: u16 = 0;
const RESERVED: u16 = 1;
const MAINTENANCE: u16 = 2;
const NONE: u16 = 0;

fn all_free(l: &Layout, s: &State, r: RouteId) -> bool {
    l.blocks_of(r).iter().all(|b| l.status(s, *b) == BlockStatus::Free)
}

fn reserve_rely(l: Arc<Layout>) -> Predicate {
    Predicate::state_with_args(
        "availability(r) = available ∧ ∀b ∈ blocks(r) (status(b) = free)",
        move |s, args| {
            let r = RouteId(args[1]);
            l.availability(s, r) == Availability::Available && all_free(&l, s, r)
        },
    )
}

fn reserve_guarantee(l: Arc<Layout>) -> impl Fn(&State, &[u16]) -> StateUpdate + Send + Sync {
    move |_, args| {
        let (t, r) = (TrainId(args[0]), RouteId(args[1]));
        let mut u = StateUpdate::new().set(l.availability[r.index()], RESERVED);
        if l.variant == super::Variant::Verbatim {
            for b in l.blocks_of(r) {
                u = u.set(l.status[b.index()], OCCUPIED);
            }
        }
        u = u.set(l.route[t.index()], r.0 + 1);
        for (p, d) in &l.route_points[r.index()] {
            u = u.set(l.direction[p.index()], d.index());
        }
        u
    }
}

fn maintenance_rely(l: Arc<Layout>) -> Predicate {
    Predicate::state_with_args("availability(r) = available", move |s, args| {
        l.availability(s, RouteId(args[1])) == Availability::Available
    })
}

fn maintenance_guarantee(l: Arc<Layout>) -> impl Fn(&State, &[u16]) -> StateUpdate + Send + Sync {
    move |_, args| {
        let (t, r) = (TrainId(args[0]), RouteId(args[1]));
        let mut u = StateUpdate::new().set(l.availability[r.index()], MAINTENANCE);
        for b in l.blocks_of(r) {
            u = u.set(l.status[b.index()], OCCUPIED);
        }
        u.set(l.route[t.index()], NONE)
    }
}

/// The operations of one [`TrainModel`], ready for stepping or exploration.
#[derive(Debug, Clone)]
pub struct TrainOps {
    pub route_reserving: RGOperation,
    pub route_freeing: RGOperation,
    pub enter_route: RGOperation,
    pub moving_on_route: RGOperation,
    pub exit_route: RGOperation,
    /// Layer 0 is `route_reserving`; layer 1 quarantines the route.
    pub layered_route_reserving: LayeredOperation,
}

impl TrainOps {
    pub(crate) fn build(l: &Arc<Layout>) -> Result<Self, TrainError> {
        let t = Param::new("t", Domain::symbols(l.trains.iter().cloned()));
        let r = Param::new("r", Domain::symbols(l.routes.iter().cloned()));
        let b = Param::new("b", Domain::symbols(l.blocks.iter().cloned()));

        let route_reserving = RGOperation::new(
            ROUTE_RESERVING,
            vec![t.clone(), r.clone()],
            reserve_rely(l.clone()),
            reserve_guarantee(l.clone()),
        )
        .with_precondition(kernel_guard(l.clone(), Kind::Reserve));

        let layered_route_reserving = LayeredOperation::new(
            ROUTE_RESERVING,
            vec![t.clone(), r.clone()],
            vec![
                Layer::new(reserve_rely(l.clone()), reserve_guarantee(l.clone())),
                Layer::new(maintenance_rely(l.clone()), maintenance_guarantee(l.clone())),
            ],
        )?
        .with_precondition(kernel_guard(l.clone(), Kind::Reserve));

        let route_freeing = {
            let lr = l.clone();
            let lg = l.clone();
            RGOperation::new(
                ROUTE_FREEING,
                vec![t.clone()],
                Predicate::state_with_args("∀b ∈ blocks(route(t)) (status(b) = free)", move |s, args| {
                    lr.assignment(s, TrainId(args[0]))
                        .is_some_and(|r| all_free(&lr, s, r))
                }),
                move |s, args| {
                    let t = TrainId(args[0]);
                    match lg.assignment(s, t) {
                        Some(r) => StateUpdate::new()
                            .set(lg.availability[r.index()], AVAILABLE)
                            .set(lg.route[t.index()], NONE),
                        None => StateUpdate::new(),
                    }
                },
            )
            .with_precondition(kernel_guard(l.clone(), Kind::Free))
        };

        let enter_route = {
            let lr = l.clone();
            let lg = l.clone();
            RGOperation::new(
                ENTER_ROUTE,
                vec![t.clone()],
                Predicate::state_with_args(
                    "availability(route(t)) = reserved ∧ status(first(route(t))) = free",
                    move |s, args| {
                        lr.assignment(s, TrainId(args[0])).is_some_and(|r| {
                            lr.availability(s, r) == Availability::Reserved
                                && lr.status(s, lr.first(r)) == BlockStatus::Free
                        })
                    },
                ),
                move |s, args| {
                    let t = TrainId(args[0]);
                    match lg.assignment(s, t) {
                        Some(r) => {
                            let first = lg.first(r);
                            StateUpdate::new()
                                .set(lg.status[first.index()], OCCUPIED)
                                .set(lg.occupant[first.index()], t.0 + 1)
                        }
                        None => StateUpdate::new(),
                    }
                },
            )
            .with_precondition(kernel_guard(l.clone(), Kind::Enter))
        };

        let moving_on_route = {
            let lr = l.clone();
            let lg = l.clone();
            RGOperation::new(
                MOVING_ON_ROUTE,
                vec![t.clone(), b.clone()],
                Predicate::state_with_args(
                    "availability(route(t)) = reserved ∧ b ∈ blocks(route(t)) ∧ status(next(b)) = free",
                    move |s, args| {
                        let (t, b) = (TrainId(args[0]), BlockId(args[1]));
                        lr.assignment(s, t).is_some_and(|r| {
                            lr.availability(s, r) == Availability::Reserved
                                && lr.next(r, b).is_some_and(|n| lr.status(s, n) == BlockStatus::Free)
                        })
                    },
                ),
                move |s, args| {
                    let (t, b) = (TrainId(args[0]), BlockId(args[1]));
                    match lg.assignment(s, t).and_then(|r| lg.next(r, b)) {
                        Some(n) => StateUpdate::new()
                            .set(lg.status[b.index()], FREE)
                            .set(lg.status[n.index()], OCCUPIED)
                            .set(lg.occupant[b.index()], NONE)
                            .set(lg.occupant[n.index()], t.0 + 1),
                        None => StateUpdate::new(),
                    }
                },
            )
            .with_precondition(kernel_guard(l.clone(), Kind::Move))
        };

        let exit_route = {
            let lr = l.clone();
            let lg = l.clone();
            RGOperation::new(
                EXIT_ROUTE,
                vec![t, b],
                Predicate::state_with_args(
                    "availability(route(t)) = reserved ∧ b ∈ blocks(route(t)) ∧ next(b) = ∅",
                    move |s, args| {
                        let (t, b) = (TrainId(args[0]), BlockId(args[1]));
                        lr.assignment(s, t).is_some_and(|r| {
                            lr.availability(s, r) == Availability::Reserved
                                && lr.position(r, b).is_some()
                                && lr.next(r, b).is_none()
                        })
                    },
                ),
                move |s, args| {
                    let t = TrainId(args[0]);
                    let Some(r) = lg.assignment(s, t) else {
                        return StateUpdate::new();
                    };
                    let mut u = StateUpdate::new();
                    for b in lg.blocks_of(r) {
                        u = u.set(lg.status[b.index()], FREE);
                    }
                    for b in lg.blocks_of(r) {
                        if lg.occupant(s, *b).is_some() {
                            u = u.set(lg.occupant[b.index()], NONE);
                        }
                    }
                    u
                },
            )
            .with_precondition(kernel_guard(l.clone(), Kind::Exit))
        };

        Ok(TrainOps {
            route_reserving,
            route_freeing,
            enter_route,
            moving_on_route,
            exit_route,
            layered_route_reserving,
        })
    }
}

impl TrainModel {
    fn step(&self, op: &RGOperation, kind: Kind, s: &State, args: &[u16]) -> Result<StepResult, TrainError> {
        self.layout.schema.check(s)?;
        guard(&self.layout, kind, s, args)?;
        Ok(step_operation(op, &self.layout.schema, s, args)?)
    }

    pub fn route_reserving(&self, s: &State, t: TrainId, r: RouteId) -> Result<StepResult, TrainError> {
        self.step(&self.ops().route_reserving, Kind::Reserve, s, &[t.0, r.0])
    }

    pub fn route_freeing(&self, s: &State, t: TrainId) -> Result<StepResult, TrainError> {
        self.step(&self.ops().route_freeing, Kind::Free, s, &[t.0])
    }

    pub fn enter_route(&self, s: &State, t: TrainId) -> Result<StepResult, TrainError> {
        self.step(&self.ops().enter_route, Kind::Enter, s, &[t.0])
    }

    pub fn moving_on_route(&self, s: &State, t: TrainId, b: BlockId) -> Result<StepResult, TrainError> {
        self.step(&self.ops().moving_on_route, Kind::Move, s, &[t.0, b.0])
    }

    pub fn exit_route(&self, s: &State, t: TrainId, b: BlockId) -> Result<StepResult, TrainError> {
        self.step(&self.ops().exit_route, Kind::Exit, s, &[t.0, b.0])
    }

    pub fn layered_route_reserving(
        &self,
        s: &State,
        t: TrainId,
        r: RouteId,
    ) -> Result<(StepResult, LayerSelection), TrainError> {
        self.layout.schema.check(s)?;
        guard(&self.layout, Kind::Reserve, s, &[t.0, r.0])?;
        Ok(step_layered(&self.ops().layered_route_reserving, &self.layout.schema, s, &[t.0, r.0])?)
    }

    /// Administrative release of a quarantined route: availability back to
    /// available and its unoccupied blocks freed. Not a train operation.
    pub fn clear_maintenance(&self, s: &State, r: RouteId) -> Result<StateUpdate, TrainError> {
        let l = &self.layout;
        if l.availability(s, r) != Availability::Maintenance {
            return Err(TrainError::NotInMaintenance(l.routes[r.index()].clone()));
        }
        let mut u = StateUpdate::new().set(l.availability[r.index()], AVAILABLE);
        for b in l.blocks_of(r) {
            if l.occupant(s, *b).is_none() {
                u = u.set(l.status[b.index()], FREE);
            }
        }
        Ok(u)
    }
}
