//! Executable rely/guarantee specifications with layered fault tolerance.
//!
//! The crate is organized bottom-up:
//!
//! * [`kernel`]: finite schemas, predicates, rely/guarantee operations, layered
//!   operations, and exhaustive layer-weakening / compatibility checks.
//! * [`train`]: the railway case study (blocks, routes, points) as five
//!   operations plus a layered route reservation with a maintenance fallback.
//! * [`injector`]: an error injector that loses, duplicates or fabricates
//!   state updates, bounded by its own scope.
//! * [`explorer`]: seeded simulation, breadth-first exploration with shortest
//!   counterexamples, and trace replay.
//! * [`cli`]: the `lfts` command line.
//!
//! The `examples/` directory of this crate has one runnable program per
//! capability.

pub mod cli;
pub mod explorer;
pub mod injector;
pub mod kernel;
pub mod trace;
pub mod train;
