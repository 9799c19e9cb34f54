//! The error injector on its own: a lost free-update, a duplicated write, a
//! fabricated one, and the after-the-fact audit.

use lfts::injector::{
    check_ei_respects_guarantee, ei_step, filter_update, FaultClass, FaultScope, InjectionSchedule, ScriptedFault,
    Selector,
};
use lfts::kernel::StateUpdate;
use lfts::trace::{Event, Outcome, Trace, EI_ACTOR};
use lfts::train::Scenario;

fn main() {
    let sc = Scenario::from_json(include_str!("network.json")).unwrap();
    let schema = sc.schema();
    let moving = StateUpdate::parse(schema, "status(A):=free;status(B):=occupied;occupant(A):=none;occupant(B):=t1").unwrap();

    let scope = FaultScope::new(schema, &["status(*)"], FaultClass::ALL).unwrap();
    let script = vec![
        ScriptedFault { step: 0, class: FaultClass::Lost, target: Selector::parse("status(A):=free").unwrap() },
        ScriptedFault { step: 1, class: FaultClass::Duplicated, target: Selector::parse("status(B)").unwrap() },
        ScriptedFault { step: 2, class: FaultClass::Fake, target: Selector::parse("status(D):=free").unwrap() },
    ];
    let sched = InjectionSchedule::scripted(schema, &scope, script).unwrap();
    for step in 0..3 {
        let f = filter_update(&sched, &scope, schema, step, &moving).unwrap();
        println!("step {step}: {}", f.update.describe(schema));
        let fake = ei_step(&sched, &scope, schema, step).unwrap();
        if !fake.is_empty() {
            println!("step {step}: fabricated {}", fake.describe(schema));
        }
    }

    // a lost-only injector may not fabricate anything
    let lost_only = FaultScope::new(schema, &["status(*):=free"], [FaultClass::Lost]).unwrap();
    let forged = Trace {
        events: vec![Event {
            step: 0,
            actor: EI_ACTOR.into(),
            op: "fake".into(),
            args: vec![],
            layer: None,
            outcome: Outcome::Applied,
            update: StateUpdate::parse(schema, "status(D):=free").unwrap(),
        }],
        ..Trace::new()
    };
    println!("audit: {:?}", check_ei_respects_guarantee(&lost_only, schema, &forged));

    let random = InjectionSchedule::random(42, 0.3).unwrap();
    let fired = (0..100).filter(|k| !ei_step(&random, &scope, schema, *k).unwrap().is_empty()).count();
    println!("random p=0.3, seed 42: {fired} fake updates in 100 steps");
}
