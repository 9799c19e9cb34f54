mod common;

use std::sync::Arc;

use common::{read, scenario, TableSystem};
use lfts::explorer::{explore, replay, simulate, SimSchedule, Status, SystemConfig};
use lfts::kernel::{build_gcd_system, Domain, Predicate, RGOperation, State, StateSchema, StateUpdate};
use lfts::trace::{Outcome, Termination};
use lfts::train::SystemOptions;

#[test]
fn depth_zero_simulation_is_empty() {
    let sc = scenario("single.json");
    let cfg = sc.system_config(&SystemOptions { depth: 0, ..SystemOptions::default() });
    let t = simulate(&cfg, &SimSchedule::Seeded(5)).unwrap();
    assert!(t.is_empty());
    assert_eq!(t.end, Termination::DepthReached);
    assert_eq!(replay(&cfg, &t).unwrap(), sc.initial);
}

#[test]
fn depth_zero_exploration_checks_initial_only() {
    let sc = scenario("shared.json");
    let v = explore(&sc.system_config(&SystemOptions { depth: 0, ..SystemOptions::default() })).unwrap();
    assert_eq!(v.status, Status::Holds);
    assert_eq!(v.stats.states_visited, 1);
}

#[test]
fn constant_true_invariant_holds() {
    let sc = scenario("single.json");
    let mut cfg = sc.system_config(&SystemOptions { depth: 20, ..SystemOptions::default() });
    cfg.invariants = vec![Predicate::constant("true", true)];
    let v = explore(&cfg).unwrap();
    assert!(v.holds());
    assert!(v.stats.states_visited > 1);
}

#[test]
fn violated_initial_state_has_empty_witness() {
    let sc = scenario("single.json");
    let mut cfg = sc.system_config(&SystemOptions::default());
    cfg.invariants = vec![Predicate::constant("false", false)];
    let v = explore(&cfg).unwrap();
    assert_eq!(v.status, Status::Violated);
    assert!(v.witness.unwrap().is_empty());
}

#[test]
fn worker_count_does_not_change_verdict() {
    let sc = scenario("shared.json");
    for inject in ["lost_free.json", "fake_status.json"] {
        let ei = sc.injection(&read(inject)).unwrap();
        let opts = SystemOptions { layered: inject == "lost_free.json", ei: Some(ei), ..SystemOptions::default() };
        let one = explore(&sc.system_config(&opts)).unwrap();
        let four = explore(&sc.system_config(&SystemOptions { workers: 4, ..opts })).unwrap();
        assert_eq!(one.status, four.status);
        assert_eq!(one.stats, four.stats);
        let text = |v: &lfts::explorer::Verdict| v.witness.as_ref().map(|w| w.to_text(sc.schema()));
        assert_eq!(text(&one), text(&four));
    }
}

#[test]
fn cap_exceeded() {
    let sc = scenario("shared.json");
    let ei = sc.injection(&read("lost_free.json")).unwrap();
    let v = explore(&sc.system_config(&SystemOptions { cap: 50, ei: Some(ei), ..SystemOptions::default() })).unwrap();
    assert_eq!(v.status, Status::CapExceeded);
    assert!(v.witness.is_none());
}

#[test]
fn gcd_alternating_schedule() {
    let sys = build_gcd_system(12, 8).unwrap();
    let cfg = SystemConfig::gcd(&sys);
    let rounds = (0..6).map(|i| (if i % 2 == 0 { "P1" } else { "P2" }.to_owned(), vec![])).collect();
    let t = simulate(&cfg, &SimSchedule::Explicit(rounds)).unwrap();
    let end = replay(&cfg, &t).unwrap();
    assert_eq!(sys.values(&end), (4, 4));
    assert_eq!(t.events[0].outcome, Outcome::Applied);
}

#[test]
fn explicit_schedule_unknown_actor() {
    let sys = build_gcd_system(4, 2).unwrap();
    let cfg = SystemConfig::gcd(&sys);
    assert!(simulate(&cfg, &SimSchedule::Explicit(vec![("P9".into(), vec![])])).is_err());
}

#[test]
fn two_state_invariant_rejected() {
    let schema = Arc::new(StateSchema::new([("x", Domain::range(0, 1))]).unwrap());
    let x = schema.var("x").unwrap();
    let cfg = SystemConfig::new(schema, State::from_slots(vec![0]))
        .actor(lfts::explorer::Actor::new(
            "A",
            RGOperation::new("flip", vec![], Predicate::constant("true", true), move |s, _| {
                StateUpdate::new().set(x, 1 - s.get(x))
            }),
            lfts::explorer::ArgPolicy::All,
        ))
        .invariant(Predicate::transition("x unchanged", move |a, b| a.get(x) == b.get(x)));
    assert!(explore(&cfg).is_err());
}

#[test]
fn witness_for_fake_status_is_shortest_and_replays() {
    let sc = scenario("shared.json");
    let ei = sc.injection(&read("fake_status.json")).unwrap();
    let cfg = sc.system_config(&SystemOptions { layered: false, ei: Some(ei), ..SystemOptions::default() });
    let v = explore(&cfg).unwrap();
    assert_eq!(v.status, Status::Violated);
    let w = v.witness.unwrap();
    let end = replay(&cfg, &w).unwrap();
    assert_eq!(Some(&end), v.violating_state.as_ref());
    assert!(!sc.model.check_safety(&end).is_empty());
    // no shorter path exists: exploring one level less finds nothing
    let shallower = SystemConfig { depth: w.len() - 1, ..cfg };
    assert!(explore(&shallower).unwrap().holds());
}

#[test]
fn random_table_systems_agree_with_naive_search() {
    let mut compared = 0;
    for seed in 1000..1100 {
        let sys = TableSystem::random(seed);
        if sys.reachable() > 300 {
            continue;
        }
        let v = explore(&sys.config()).unwrap();
        match sys.naive_shortest_violation() {
            None => assert_eq!(v.status, Status::Holds, "seed {seed}"),
            Some(d) => {
                assert_eq!(v.status, Status::Violated, "seed {seed}");
                assert_eq!(v.witness.unwrap().len(), d, "seed {seed}");
            }
        }
        compared += 1;
    }
    assert!(compared >= 50);
}
