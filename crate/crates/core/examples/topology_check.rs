//! Validating networks: the shipped reference network, and a broken one.

use lfts::train::{validate_topology, Topology};

fn main() {
    let net = Topology::from_json(include_str!("network.json")).unwrap();
    println!("network: {} blocks, {} routes", net.blocks.len(), net.routes.len());
    println!("  violations: {:?}", validate_topology(&net));

    let broken = Topology::from_json(
        r#"{
            "blocks": ["A", "B", "C"],
            "points": {"B": ["p1", "p2"]},
            "routes": {"AA": ["A"], "ABA": ["A", "B", "A"], "AX": ["A", "X"]},
            "orientations": {"ABA": {"p1": "directed"}}
        }"#,
    )
    .unwrap();
    for v in validate_topology(&broken) {
        println!("  {v}");
    }

    match Topology::from_json("{\"blocks\": [\"A\",") {
        Ok(_) => unreachable!(),
        Err(e) => println!("truncated file: {e}"),
    }
}
