use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Deserialize;

use super::Direction;

/// The static railway network: blocks, the points they host, routes as
/// ordered block sequences, and the point orientation each route needs.
///
/// A `Topology` can hold an invalid network; [`validate_topology`] reports
/// what is wrong with it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Topology {
    pub blocks: Vec<String>,
    /// Block name to the points it hosts. Valid networks host at most one.
    pub points: BTreeMap<String, Vec<String>>,
    pub routes: BTreeMap<String, Vec<String>>,
    pub orientations: BTreeMap<String, BTreeMap<String, Direction>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub(crate) enum PointSpec {
    One(String),
    Many(Vec<String>),
}

impl PointSpec {
    pub(crate) fn into_vec(self) -> Vec<String> {
        match self {
            PointSpec::One(p) => vec![p],
            PointSpec::Many(ps) => ps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyViolation {
    DuplicateBlock { block: String },
    PointOnUnknownBlock { block: String, point: String },
    MultiplePoints { block: String, points: Vec<String> },
    PointOnSeveralBlocks { point: String, blocks: Vec<String> },
    /// A route needs two blocks so that its first and last differ.
    ShortRoute { route: String, len: usize },
    UnknownBlockInRoute { route: String, block: String },
    RepeatedBlockInRoute { route: String, block: String },
    OrientationsForUnknownRoute { route: String },
    MissingOrientation { route: String, point: String },
    StrayOrientation { route: String, point: String },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TopologyViolation::*;
        match self {
            DuplicateBlock { block } => write!(f, "block {block} is declared twice"),
            PointOnUnknownBlock { block, point } => {
                write!(f, "point {point} is attached to undeclared block {block}")
            }
            MultiplePoints { block, points } => write!(
                f,
                "block {block} hosts {} points ({}); a block hosts at most one",
                points.len(),
                points.join(", ")
            ),
            PointOnSeveralBlocks { point, blocks } => {
                write!(f, "point {point} is attached to several blocks ({})", blocks.join(", "))
            }
            ShortRoute { route, len } => write!(
                f,
                "route {route} has {len} block(s); first(r) ≠ last(r) needs at least two"
            ),
            UnknownBlockInRoute { route, block } => {
                write!(f, "route {route} uses undeclared block {block}")
            }
            RepeatedBlockInRoute { route, block } => {
                write!(f, "route {route} visits block {block} more than once")
            }
            OrientationsForUnknownRoute { route } => {
                write!(f, "orientations given for undeclared route {route}")
            }
            MissingOrientation { route, point } => {
                write!(f, "route {route} crosses point {point} but gives it no orientation")
            }
            StrayOrientation { route, point } => {
                write!(f, "route {route} orients point {point}, which is not on the route")
            }
        }
    }
}

/// Every invariant violation of `topo`, in a stable order. Empty means valid.
pub fn validate_topology(topo: &Topology) -> Vec<TopologyViolation> {
    use TopologyViolation::*;
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for b in &topo.blocks {
        if !seen.insert(b.as_str()) {
            out.push(DuplicateBlock { block: b.clone() });
        }
    }

    let mut hosts: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (block, points) in &topo.points {
        if !seen.contains(block.as_str()) {
            for p in points {
                out.push(PointOnUnknownBlock {
                    block: block.clone(),
                    point: p.clone(),
                });
            }
        }
        if points.len() > 1 {
            out.push(MultiplePoints {
                block: block.clone(),
                points: points.clone(),
            });
        }
        for p in points {
            hosts.entry(p.as_str()).or_default().push(block.clone());
        }
    }
    for (point, blocks) in hosts {
        if blocks.len() > 1 {
            out.push(PointOnSeveralBlocks {
                point: point.to_owned(),
                blocks,
            });
        }
    }

    for (route, blocks) in &topo.routes {
        if blocks.len() < 2 {
            out.push(ShortRoute {
                route: route.clone(),
                len: blocks.len(),
            });
        }
        let mut on_route = HashSet::new();
        for b in blocks {
            if !seen.contains(b.as_str()) {
                out.push(UnknownBlockInRoute {
                    route: route.clone(),
                    block: b.clone(),
                });
            }
            if !on_route.insert(b.as_str()) {
                out.push(RepeatedBlockInRoute {
                    route: route.clone(),
                    block: b.clone(),
                });
            }
        }
        let needed: BTreeSet<&str> = blocks
            .iter()
            .filter_map(|b| topo.points.get(b))
            .flatten()
            .map(String::as_str)
            .collect();
        let given = topo.orientations.get(route);
        for p in &needed {
            if !given.is_some_and(|o| o.contains_key(*p)) {
                out.push(MissingOrientation {
                    route: route.clone(),
                    point: (*p).to_owned(),
                });
            }
        }
        if let Some(given) = given {
            for p in given.keys() {
                if !needed.contains(p.as_str()) {
                    out.push(StrayOrientation {
                        route: route.clone(),
                        point: p.clone(),
                    });
                }
            }
        }
    }
    for route in topo.orientations.keys() {
        if !topo.routes.contains_key(route) {
            out.push(OrientationsForUnknownRoute {
                route: route.clone(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_block() -> Topology {
        Topology {
            blocks: vec!["A".into(), "B".into()],
            points: BTreeMap::from([("A".into(), vec!["p".into()])]),
            routes: BTreeMap::from([("AB".into(), vec!["A".into(), "B".into()])]),
            orientations: BTreeMap::from([(
                "AB".into(),
                BTreeMap::from([("p".into(), Direction::Directed)]),
            )]),
        }
    }

    #[test]
    fn minimal_network_is_valid() {
        assert!(validate_topology(&two_block()).is_empty());
    }

    #[test]
    fn single_block_route_is_rejected() {
        let mut t = two_block();
        t.routes.insert("A".into(), vec!["A".into()]);
        t.orientations.insert("A".into(), BTreeMap::from([("p".into(), Direction::Directed)]));
        let v = validate_topology(&t);
        assert_eq!(v, vec![TopologyViolation::ShortRoute { route: "A".into(), len: 1 }]);
        assert!(v[0].to_string().contains("first(r) ≠ last(r)"));
    }

    #[test]
    fn two_points_on_one_block_are_rejected() {
        let mut t = two_block();
        t.points.insert("A".into(), vec!["p".into(), "q".into()]);
        let v = validate_topology(&t);
        assert!(v.iter().any(|x| matches!(x, TopologyViolation::MultiplePoints { block, .. } if block == "A")));
    }

    #[test]
    fn orientation_must_match_route_points() {
        let mut t = two_block();
        t.orientations.get_mut("AB").unwrap().clear();
        assert_eq!(
            validate_topology(&t),
            vec![TopologyViolation::MissingOrientation { route: "AB".into(), point: "p".into() }]
        );
        t.orientations
            .get_mut("AB")
            .unwrap()
            .extend([("p".into(), Direction::Diverted), ("q".into(), Direction::Directed)]);
        assert_eq!(
            validate_topology(&t),
            vec![TopologyViolation::StrayOrientation { route: "AB".into(), point: "q".into() }]
        );
    }

    #[test]
    fn repeated_and_unknown_blocks_are_located() {
        let mut t = two_block();
        t.routes.insert("ABA".into(), vec!["A".into(), "B".into(), "A".into(), "Z".into()]);
        t.orientations.insert("ABA".into(), BTreeMap::from([("p".into(), Direction::Directed)]));
        let v = validate_topology(&t);
        assert!(v.contains(&TopologyViolation::RepeatedBlockInRoute { route: "ABA".into(), block: "A".into() }));
        assert!(v.contains(&TopologyViolation::UnknownBlockInRoute { route: "ABA".into(), block: "Z".into() }));
    }
}
