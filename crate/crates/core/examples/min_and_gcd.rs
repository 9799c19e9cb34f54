//! The two warm-up systems: a minimum under a precondition, and two processes
//! computing a GCD by interleaved subtraction.
//!
//!     cargo run --example min_and_gcd -- 12 8

use lfts::explorer::{replay, simulate, SimSchedule, SystemConfig};
use lfts::kernel::{build_gcd_system, find_min};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (a, b) = match args[..] {
        [a, b, ..] => (a, b),
        _ => (12, 8),
    };

    println!("min {{3, 1, 2}} = {}", find_min(&[3, 1, 2]).unwrap());
    match find_min(&[]) {
        Ok(m) => println!("min {{}} = {m}?"),
        Err(e) => println!("min {{}}: {e}"),
    }

    let sys = build_gcd_system(a, b).expect("positive inputs");
    let cfg = SystemConfig::gcd(&sys);
    for seed in 0..3 {
        let trace = simulate(&cfg, &SimSchedule::Seeded(seed)).unwrap();
        let (x, y) = sys.values(&replay(&cfg, &trace).unwrap());
        println!("seed {seed}: ({a}, {b}) -> ({x}, {y}) in {} steps, {}", trace.len(), trace.end);
    }

    // a strict alternation, written out
    let alternate: Vec<_> = (0..6)
        .map(|i| (if i % 2 == 0 { "P1" } else { "P2" }.to_owned(), vec![]))
        .collect();
    let trace = simulate(&cfg.clone().depth(alternate.len()), &SimSchedule::Explicit(alternate)).unwrap();
    print!("{}", trace.to_text(&sys.schema));
}
