use std::fmt;

use crate::kernel::{Predicate, State};

use super::model::{BlockId, TrainId, TrainModel};
use super::BlockStatus;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SafetyViolation {
    /// `occupant(b)` is set while `status(b)` says free.
    OccupiedBlockMarkedFree { block: String, train: String },
    /// A train sits on track without holding a route.
    OccupantWithoutRoute { train: String, block: String },
    /// A train sits on a block outside its assigned route.
    OffRoute { train: String, block: String, route: String },
    /// A train's blocks do not form one contiguous stretch of its route.
    Scattered { train: String, blocks: Vec<String> },
}

impl fmt::Display for SafetyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SafetyViolation::OccupiedBlockMarkedFree { block, train } => {
                write!(f, "block {block} holds train {train} but its status is free")
            }
            SafetyViolation::OccupantWithoutRoute { train, block } => {
                write!(f, "train {train} occupies block {block} without an assigned route")
            }
            SafetyViolation::OffRoute { train, block, route } => {
                write!(f, "train {train} occupies block {block}, which is not on its route {route}")
            }
            SafetyViolation::Scattered { train, blocks } => write!(
                f,
                "train {train} occupies non-contiguous blocks {}",
                blocks.join(",")
            ),
        }
    }
}

impl TrainModel {
    /// Collision freedom and occupancy consistency.
    ///
    /// `occupant` is a partial function, so a block never holds two trains by
    /// construction. What can go wrong is the bookkeeping around it, and every
    /// such inconsistency is reported.
    pub fn check_safety(&self, s: &State) -> Vec<SafetyViolation> {
        let l = &self.layout;
        let mut out = Vec::new();
        let mut held: Vec<Vec<BlockId>> = vec![Vec::new(); l.trains.len()];
        for b in (0..l.blocks.len() as u16).map(BlockId) {
            if let Some(t) = l.occupant(s, b) {
                held[t.index()].push(b);
                if l.status(s, b) == BlockStatus::Free {
                    out.push(SafetyViolation::OccupiedBlockMarkedFree {
                        block: l.blocks[b.index()].clone(),
                        train: l.trains[t.index()].clone(),
                    });
                }
            }
        }
        for (t, blocks) in held.iter().enumerate() {
            if blocks.is_empty() {
                continue;
            }
            let train = l.trains[t].clone();
            let Some(r) = l.assignment(s, TrainId(t as u16)) else {
                for b in blocks {
                    out.push(SafetyViolation::OccupantWithoutRoute {
                        train: train.clone(),
                        block: l.blocks[b.index()].clone(),
                    });
                }
                continue;
            };
            let mut positions = Vec::new();
            for b in blocks {
                match l.position(r, *b) {
                    Some(i) => positions.push(i),
                    None => out.push(SafetyViolation::OffRoute {
                        train: train.clone(),
                        block: l.blocks[b.index()].clone(),
                        route: l.routes[r.index()].clone(),
                    }),
                }
            }
            positions.sort_unstable();
            if positions.windows(2).any(|w| w[1] != w[0] + 1) {
                out.push(SafetyViolation::Scattered {
                    train,
                    blocks: positions
                        .iter()
                        .map(|i| l.blocks[l.blocks_of(r)[*i].index()].clone())
                        .collect(),
                });
            }
        }
        out
    }

    /// [`TrainModel::check_safety`] as a named invariant for the explorer.
    pub fn safety_invariant(&self) -> Predicate {
        let model = self.clone();
        Predicate::state("safety", move |s| model.check_safety(s).is_empty())
    }
}
