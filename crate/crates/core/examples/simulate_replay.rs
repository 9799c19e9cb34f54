//! Seeded simulation with random lost updates, deterministic replay, and what
//! a tampered trace does to it.

use lfts::explorer::{replay, simulate, SimSchedule};
use lfts::trace::{Outcome, Trace};
use lfts::train::{Scenario, SystemOptions};

fn main() {
    let sc = Scenario::from_json(include_str!("maintenance.json")).unwrap();
    let ei = sc.injection(include_str!("lost_free.json")).unwrap();
    let cfg = sc.system_config(&SystemOptions { depth: 20, ei: Some(ei), ..SystemOptions::default() });

    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(9);
    let trace = simulate(&cfg, &SimSchedule::Seeded(seed)).unwrap();
    let text = trace.to_text(sc.schema());
    print!("{text}");
    assert_eq!(text, simulate(&cfg, &SimSchedule::Seeded(seed)).unwrap().to_text(sc.schema()));

    let parsed = Trace::parse(&text, sc.schema()).unwrap();
    let end = replay(&cfg, &parsed).unwrap();
    println!("replayed; safety problems at the end: {}", sc.model.check_safety(&end).len());

    let mut tampered = parsed.clone();
    if let Some(e) = tampered.events.iter_mut().find(|e| e.outcome == Outcome::Applied && e.actor != "EI") {
        e.outcome = Outcome::Blocked;
    }
    println!("tampered: {}", replay(&cfg, &tampered).unwrap_err());
}
