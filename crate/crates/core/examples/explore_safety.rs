//! Exhaustive exploration of the train system: fault free, with lost
//! free-updates absorbed by the maintenance layer, and with fake updates that
//! break safety.

use lfts::explorer::{explore, replay};
use lfts::train::{Scenario, SystemOptions, Variant};

fn main() {
    let disjoint = Scenario::from_json(include_str!("disjoint.json")).unwrap();
    let opts = SystemOptions { depth: 14, ..SystemOptions::default() };
    for variant in [Variant::Verbatim, Variant::ReservationKeepsFirstFree] {
        let sc = disjoint.with_variant(variant).unwrap();
        let v = explore(&sc.system_config(&opts)).unwrap();
        print!("disjoint routes, no faults, {variant:?}:\n{}", v.summary(sc.schema(), false));
    }

    let shared = Scenario::from_json(include_str!("shared.json")).unwrap();
    let lost = shared.injection(include_str!("lost_free.json")).unwrap();
    for layered in [true, false] {
        let opts = SystemOptions { layered, ei: Some(lost.clone()), ..SystemOptions::default() };
        let v = explore(&shared.system_config(&opts)).unwrap();
        print!("shared routes, lost free-updates, layered {layered}:\n{}", v.summary(shared.schema(), false));
    }

    let fake = shared.injection(include_str!("fake_status.json")).unwrap();
    let cfg = shared.system_config(&SystemOptions { layered: false, ei: Some(fake), ..SystemOptions::default() });
    let v = explore(&cfg).unwrap();
    print!("shared routes, fake status updates:\n{}", v.summary(shared.schema(), false));
    let end = replay(&cfg, v.witness.as_ref().unwrap()).unwrap();
    for problem in shared.model.check_safety(&end) {
        println!("replayed witness ends unsafe: {problem}");
    }
}
