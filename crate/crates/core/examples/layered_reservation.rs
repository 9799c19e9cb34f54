//! The layered route reservation: normal layer, the maintenance fallback when
//! a block is stuck occupied, and an exhaustive check that the layers weaken.

use lfts::kernel::{check_layer_weakening, LayerSelection, StepResult};
use lfts::train::{BlockStatus, Scenario};

fn main() {
    let sc = Scenario::from_json(include_str!("network.json")).unwrap();
    let m = &sc.model;
    let (t1, r) = (m.train("t1").unwrap(), m.route("LABDKJN").unwrap());

    let (_, sel) = m.layered_route_reserving(&sc.initial, t1, r).unwrap();
    println!("all blocks free: {sel:?}");

    // a sensor on D stopped reporting free
    let mut ts = m.decode(&sc.initial);
    ts.status[m.block("D").unwrap().index()] = BlockStatus::Occupied;
    let stuck = m.encode(&ts).unwrap();
    let (res, sel) = m.layered_route_reserving(&stuck, t1, r).unwrap();
    assert_eq!(sel, LayerSelection::Layer(1));
    if let StepResult::NewState(s) = res {
        let ts = m.decode(&s);
        println!(
            "D stuck: {sel:?}, LABDKJN is {:?}, t1 holds {:?}",
            ts.availability[r.index()],
            ts.assignment[t1.index()]
        );
    }

    // exhaustive weakening check on a two-route toy network
    let toy = Scenario::from_json(
        r#"{"blocks": ["A", "B", "C"], "routes": {"AB": ["A", "B"], "CB": ["C", "B"]}, "trains": ["t"]}"#,
    )
    .unwrap();
    let lop = &toy.model.ops().layered_route_reserving;
    println!("layer weakening: {:?}", check_layer_weakening(lop, toy.schema(), 1_000_000).unwrap());
}
