//! One train around LABDKJN with the typed operations: reserve, enter, move to
//! the end, exit, free. Shows both reservation variants.

use lfts::kernel::StepResult;
use lfts::train::{Scenario, Variant};

fn next(r: StepResult) -> lfts::kernel::State {
    match r {
        StepResult::NewState(s) => s,
        StepResult::Blocked => panic!("unexpected block"),
    }
}

fn main() {
    let sc = Scenario::from_json(include_str!("network.json")).unwrap();

    // as written: the reservation occupies the first block, so nobody enters
    let m = &sc.model;
    let (t1, r) = (m.train("t1").unwrap(), m.route("LABDKJN").unwrap());
    let s = next(m.route_reserving(&sc.initial, t1, r).unwrap());
    println!("verbatim, after reservation: enter -> {:?}", m.enter_route(&s, t1).unwrap());

    let sc = sc.with_variant(Variant::ReservationKeepsFirstFree).unwrap();
    let m = &sc.model;
    let mut s = next(m.route_reserving(&sc.initial, t1, r).unwrap());
    s = next(m.enter_route(&s, t1).unwrap());
    for b in &m.blocks_of(r)[..m.blocks_of(r).len() - 1] {
        s = next(m.moving_on_route(&s, t1, *b).unwrap());
        println!("t1 on {}", m.block_name(m.next(r, *b).unwrap()));
    }
    println!("moving past the end: {}", m.moving_on_route(&s, t1, m.last(r)).unwrap_err());
    // the route's points stay where the reservation put them
    s = next(m.exit_route(&s, t1, m.last(r)).unwrap());
    s = next(m.route_freeing(&s, t1).unwrap());
    let (end, start) = (m.decode(&s), m.decode(&sc.initial));
    println!("back to start (points aside): {}", end.status == start.status
        && end.occupant == start.occupant
        && end.availability == start.availability
        && end.assignment == start.assignment);
    println!("entering again: {}", m.enter_route(&s, t1).unwrap_err());
}
