//! Rely/guarantee compatibility of the GCD processes, and what a broken
//! guarantee looks like.

use lfts::kernel::{build_gcd_system, check_rg_compatibility, Check, RGOperation, StateUpdate};

fn main() {
    let sys = build_gcd_system(12, 8).unwrap();
    let ops = [sys.p1.clone(), sys.p2.clone()];
    let verdict = check_rg_compatibility(&ops, &sys.schema, 1_000_000).unwrap();
    println!("P1 || P2: {:?}", verdict);

    // P2 that also nudges `a` down when it can
    let (a, b) = (sys.a, sys.b);
    let greedy = RGOperation::new("P2'", vec![], sys.r2(), move |s, _| {
        let (x, y) = (s.get(a) + 1, s.get(b) + 1);
        let mut u = StateUpdate::new();
        if y > x {
            u = u.set(b, y - x - 1);
        }
        if x > 1 {
            u = u.set(a, x - 2);
        }
        u
    });
    match check_rg_compatibility(&[sys.p1.clone(), greedy], &sys.schema, 1_000_000).unwrap() {
        Check::Holds { .. } => println!("P1 || P2': holds?"),
        Check::Refuted(w) => println!(
            "P1 || P2': {} steps {} -> {}, which {}'s rely does not tolerate",
            w.actor,
            sys.schema.describe(&w.before),
            sys.schema.describe(&w.after),
            w.victim
        ),
    }
}
