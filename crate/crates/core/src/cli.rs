//! The `lfts` command line. [`run`] holds all the logic so it can be driven
//! in-process; the binary only forwards `std::env::args` and the exit code.
//!
//! Exit codes: `check` 0 valid, 1 invalid, 2 unreadable; `explore` 0 holds,
//! 1 violated, 3 cap exceeded; `replay` 1 on divergence; `demo min` 1 on an
//! empty set. Configuration and parse errors exit 2.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::explorer::{explore, replay, simulate, SimSchedule, Status, SystemConfig};
use crate::kernel::{build_gcd_system, check_rg_compatibility, find_min, Check, KernelError, DEFAULT_CHECK_CAP};
use crate::trace::Trace;
use crate::train::{validate_topology, Scenario, ScenarioError, SystemOptions, Topology, Variant};

#[derive(Parser, Debug)]
#[command(name = "lfts", version, about = "Layered rely/guarantee specifications: check, explore, simulate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the network of a scenario file.
    Check { scenario: PathBuf },
    /// Explore every interleaving up to a depth and check safety.
    Explore {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
        /// Write the witness trace here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one seeded simulation and print its trace.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute a trace file and report the first divergence.
    Replay {
        #[command(flatten)]
        system: SystemArgs,
        trace: PathBuf,
    },
    /// Reference examples.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// Two processes computing gcd(a, b) by interleaved subtraction.
    Gcd {
        a: u64,
        b: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimum of a set of naturals.
    Min { elems: Vec<u64> },
}

#[derive(Args, Debug)]
struct SystemArgs {
    scenario: PathBuf,
    /// Injection config (scope and schedule).
    #[arg(long)]
    inject: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    layered: Switch,
    /// Reservation leaves block status free, so trains can enter.
    #[arg(long)]
    reservation_keeps_first_free: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

/// Exit code for a failed run.
struct Fail(i32);

macro_rules! diag {
    ($io:expr, $($arg:tt)*) => {{
        let _ = writeln!($io.err, $($arg)*);
    }};
}

fn read(io: &mut Io, path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| {
        diag!(io, "error: cannot read {}: {e}", path.display());
        Fail(2)
    })
}

fn scenario_error(io: &mut Io, path: &Path, e: ScenarioError) -> Fail {
    match e {
        ScenarioError::Parse { line, column, message } => {
            diag!(io, "error: {}:{line}:{column}: {message}", path.display())
        }
        other => diag!(io, "error: {}: {other}", path.display()),
    }
    Fail(2)
}

fn load_system(io: &mut Io, args: &SystemArgs, depth: usize, cap: usize, workers: usize) -> Result<(Scenario, SystemConfig), Fail> {
    let text = read(io, &args.scenario)?;
    let mut sc = Scenario::from_json(&text).map_err(|e| scenario_error(io, &args.scenario, e))?;
    if args.reservation_keeps_first_free {
        sc = sc
            .with_variant(Variant::ReservationKeepsFirstFree)
            .map_err(|e| scenario_error(io, &args.scenario, e))?;
    }
    let ei = match &args.inject {
        Some(path) => {
            let text = read(io, path)?;
            Some(sc.injection(&text).map_err(|e| scenario_error(io, path, e))?)
        }
        None => None,
    };
    let opts = SystemOptions {
        layered: args.layered == Switch::On,
        depth,
        cap,
        workers,
        ei,
    };
    let cfg = sc.system_config(&opts);
    Ok((sc, cfg))
}

fn emit(io: &mut Io, out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            diag!(io, "error: cannot write {}: {e}", path.display());
            Fail(2)
        }),
        None => io.out.write_all(text.as_bytes()).map_err(|_| Fail(2)),
    }
}

fn cmd_check(io: &mut Io, path: &Path) -> Result<i32, Fail> {
    let text = read(io, path)?;
    let topo = Topology::from_json(&text).map_err(|e| scenario_error(io, path, e))?;
    let violations = validate_topology(&topo);
    if violations.is_empty() {
        let points: usize = topo.points.values().map(Vec::len).sum();
        let _ = writeln!(
            io.out,
            "valid: {} blocks, {} routes, {points} points",
            topo.blocks.len(),
            topo.routes.len()
        );
        return Ok(0);
    }
    let _ = writeln!(io.out, "invalid: {} violation(s)", violations.len());
    for v in &violations {
        let _ = writeln!(io.out, "  {v}");
    }
    Ok(1)
}

fn cmd_explore(io: &mut Io, cmd: &Command) -> Result<i32, Fail> {
    let Command::Explore { system, depth, cap, workers, json, out } = cmd else {
        unreachable!()
    };
    let (sc, cfg) = load_system(io, system, *depth, *cap as usize, *workers as usize)?;
    let verdict = explore(&cfg).map_err(|e| {
        diag!(io, "error: {e}");
        Fail(2)
    })?;
    let schema = sc.schema();
    if *json {
        let _ = writeln!(io.out, "{:#}", verdict.to_json(schema));
    } else {
        let _ = write!(io.out, "{}", verdict.summary(schema, io.color));
    }
    if let (Some(path), Some(w)) = (out, &verdict.witness) {
        emit(io, Some(path), &w.to_text(schema))?;
        diag!(io, "witness written to {}", path.display());
    }
    Ok(match verdict.status {
        Status::Holds => 0,
        Status::Violated => 1,
        Status::CapExceeded => 3,
    })
}

fn cmd_simulate(io: &mut Io, cmd: &Command) -> Result<i32, Fail> {
    let Command::Simulate { system, seed, steps, out } = cmd else {
        unreachable!()
    };
    let (sc, cfg) = load_system(io, system, *steps, 1, 1)?;
    let trace = simulate(&cfg, &SimSchedule::Seeded(*seed)).map_err(|e| {
        diag!(io, "error: {e}");
        Fail(2)
    })?;
    emit(io, out.as_deref(), &trace.to_text(sc.schema()))?;
    Ok(0)
}

fn cmd_replay(io: &mut Io, system: &SystemArgs, path: &Path) -> Result<i32, Fail> {
    let (sc, cfg) = load_system(io, system, 0, 1, 1)?;
    let text = read(io, path)?;
    let trace = Trace::parse(&text, sc.schema()).map_err(|e| {
        diag!(io, "error: {}: {e}", path.display());
        Fail(2)
    })?;
    match replay(&cfg, &trace) {
        Ok(state) => {
            let _ = writeln!(io.out, "replayed {} events", trace.len());
            let _ = writeln!(io.out, "final state: {}", sc.schema().describe(&state));
            let unsafe_now = sc.model.check_safety(&state);
            for v in &unsafe_now {
                let _ = writeln!(io.out, "  safety: {v}");
            }
            Ok(0)
        }
        Err(e) => {
            diag!(io, "error: {e}");
            Ok(1)
        }
    }
}

fn kernel_fail(io: &mut Io, e: KernelError) -> Fail {
    match e {
        KernelError::Precondition { message, .. } => {
            diag!(io, "precondition violated: {message}");
            Fail(1)
        }
        other => {
            diag!(io, "error: {other}");
            Fail(2)
        }
    }
}

fn cmd_demo(io: &mut Io, demo: &Demo) -> Result<i32, Fail> {
    match demo {
        Demo::Min { elems } => {
            let m = find_min(elems).map_err(|e| kernel_fail(io, e))?;
            let _ = writeln!(io.out, "{m}");
            Ok(0)
        }
        Demo::Gcd { a, b, seed } => {
            let sys = build_gcd_system(*a, *b).map_err(|e| kernel_fail(io, e))?;
            let cfg = SystemConfig::gcd(&sys);
            let trace = simulate(&cfg, &SimSchedule::Seeded(*seed)).map_err(|e| {
                diag!(io, "error: {e}");
                Fail(2)
            })?;
            let last = replay(&cfg, &trace).map_err(|e| {
                diag!(io, "error: {e}");
                Fail(2)
            })?;
            let (ra, rb) = sys.values(&last);
            let _ = writeln!(io.out, "gcd({a}, {b}) = {ra}");
            if ra != rb {
                diag!(io, "run stopped before a = b ({})", trace.end);
                return Ok(1);
            }
            let _ = writeln!(io.out, "{} steps ({})", trace.len(), trace.end);
            let ops = [sys.p1.clone(), sys.p2.clone()];
            match check_rg_compatibility(&ops, &sys.schema, DEFAULT_CHECK_CAP) {
                Ok(Check::Holds { checked }) => {
                    let _ = writeln!(io.out, "compatibility: Holds (R2 = G1, G2 = R1; {checked} transitions checked)");
                    Ok(0)
                }
                Ok(Check::Refuted(w)) => {
                    let _ = writeln!(
                        io.out,
                        "compatibility: Violated ({} moves {} to {}, breaking {}'s rely)",
                        w.actor,
                        sys.schema.describe(&w.before),
                        sys.schema.describe(&w.after),
                        w.victim
                    );
                    Ok(1)
                }
                Err(e) => Err(kernel_fail(io, e)),
            }
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Machine output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let color = std::env::var("LFTS_COLOR").is_ok_and(|v| v == "1");
    let mut io = Io { out, err, color };
    let result = match &cli.command {
        Command::Check { scenario } => cmd_check(&mut io, scenario),
        cmd @ Command::Explore { .. } => cmd_explore(&mut io, cmd),
        cmd @ Command::Simulate { .. } => cmd_simulate(&mut io, cmd),
        Command::Replay { system, trace } => cmd_replay(&mut io, system, trace),
        Command::Demo(demo) => cmd_demo(&mut io, demo),
    };
    result.unwrap_or_else(|Fail(code)| code)
}
