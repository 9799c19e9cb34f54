//! The railway case study: a block/route/point network, its global state, and
//! the operations that reserve, enter, traverse, exit and free routes.

mod model;
mod ops;
mod safety;
mod scenario;
mod topology;

use serde::Deserialize;
use thiserror::Error;

use crate::kernel::KernelError;

pub use model::{BlockId, PointId, RouteId, TrainId, TrainModel, TrainState, Variant};
pub use ops::{
    TrainOps, CLEAR_MAINTENANCE, ENTER_ROUTE, EXIT_ROUTE, MOVING_ON_ROUTE, ROUTE_FREEING,
    ROUTE_RESERVING,
};
pub use safety::SafetyViolation;
pub use scenario::{AdminAction, Scenario, ScenarioError, SystemOptions};
pub use topology::{validate_topology, Topology, TopologyViolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockStatus {
    Free,
    Occupied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Availability {
    Available,
    Reserved,
    Maintenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Directed,
    Diverted,
}

impl BlockStatus {
    pub(crate) fn index(self) -> u16 {
        self as u16
    }

    pub(crate) fn from_index(i: u16) -> Self {
        match i {
            0 => BlockStatus::Free,
            _ => BlockStatus::Occupied,
        }
    }
}

impl Availability {
    pub(crate) fn index(self) -> u16 {
        self as u16
    }

    pub(crate) fn from_index(i: u16) -> Self {
        match i {
            0 => Availability::Available,
            1 => Availability::Reserved,
            _ => Availability::Maintenance,
        }
    }
}

impl Direction {
    pub(crate) fn index(self) -> u16 {
        self as u16
    }

    pub(crate) fn from_index(i: u16) -> Self {
        match i {
            0 => Direction::Directed,
            _ => Direction::Diverted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrainError {
    #[error("unknown train {0}")]
    UnknownTrain(String),
    #[error("unknown route {0}")]
    UnknownRoute(String),
    #[error("unknown block {0}")]
    UnknownBlock(String),
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("invalid train name {0:?}")]
    BadTrainName(String),
    #[error("train {train} already holds route {route}")]
    AlreadyAssigned { train: String, route: String },
    #[error("train {train} has no assigned route")]
    Unassigned { train: String },
    #[error("train {train} is already on block {block}")]
    AlreadyOnTrack { train: String, block: String },
    #[error("block {block} is the last of {train}'s route; use ExitRoute")]
    NoNextBlock { train: String, block: String },
    #[error("block {block} is not the last of {train}'s route")]
    NotLastBlock { train: String, block: String },
    #[error("train {train} is not on block {block}")]
    NotOnBlock { train: String, block: String },
    #[error("route {0} is not under maintenance")]
    NotInMaintenance(String),
    #[error("typed state does not match the model's shape")]
    ShapeMismatch,
    #[error("invalid topology: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidTopology(Vec<TopologyViolation>),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
