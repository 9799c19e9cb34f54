//! Event traces and their line-oriented text form.
//!
//! One event per line, tab separated:
//!
//! ```text
//! step  actor  op  args(comma-separated)  layer(or -)  outcome  update(var:=value;...)
//! ```
//!
//! A trailing `# end <reason>` line records why the run stopped. Lines starting
//! with `#` are otherwise ignored by the parser.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{StateSchema, StateUpdate};

/// Actor name used for error-injector events.
pub const EI_ACTOR: &str = "EI";
/// Actor name used for scripted administrative updates.
pub const ADMIN_ACTOR: &str = "admin";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Applied,
    Blocked,
    NoOp,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Applied => "applied",
            Outcome::Blocked => "blocked",
            Outcome::NoOp => "noop",
        }
    }
}

impl FromStr for Outcome {
    type Err = TraceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "applied" => Ok(Outcome::Applied),
            "blocked" => Ok(Outcome::Blocked),
            "noop" => Ok(Outcome::NoOp),
            other => Err(TraceParseError::new(0, format!("unknown outcome {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub step: usize,
    pub actor: String,
    pub op: String,
    /// Argument values by label.
    pub args: Vec<String>,
    pub layer: Option<usize>,
    pub outcome: Outcome,
    /// The writes that actually reached the state (for EI lost/duplicated
    /// events: the writes the fault removed or repeated).
    pub update: StateUpdate,
}

impl Event {
    pub fn is_ei(&self) -> bool {
        self.actor == EI_ACTOR
    }

    pub fn to_line(&self, schema: &StateSchema) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.step,
            self.actor,
            self.op,
            self.args.join(","),
            self.layer.map_or_else(|| "-".to_owned(), |l| l.to_string()),
            self.outcome.as_str(),
            self.update.describe(schema)
        )
    }

    pub fn to_json(&self, schema: &StateSchema) -> serde_json::Value {
        serde_json::json!({
            "step": self.step,
            "actor": self.actor,
            "op": self.op,
            "args": self.args,
            "layer": self.layer,
            "outcome": self.outcome,
            "update": self
                .update
                .assignments()
                .iter()
                .map(|a| a.describe(schema))
                .collect::<Vec<_>>(),
        })
    }
}

/// Why a simulation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    /// The step budget ran out.
    DepthReached,
    /// Every enabled step leaves the state unchanged.
    Quiescent,
    /// No operation is enabled.
    Deadlock,
    /// An explicit schedule ran out of entries.
    ScheduleExhausted,
    /// The trace is a prefix (counterexample or hand-built).
    Unspecified,
}

impl Termination {
    fn as_str(self) -> &'static str {
        match self {
            Termination::DepthReached => "depth",
            Termination::Quiescent => "quiescent",
            Termination::Deadlock => "deadlock",
            Termination::ScheduleExhausted => "schedule-exhausted",
            Termination::Unspecified => "unspecified",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "depth" => Termination::DepthReached,
            "quiescent" => Termination::Quiescent,
            "deadlock" => Termination::Deadlock,
            "schedule-exhausted" => Termination::ScheduleExhausted,
            "unspecified" => Termination::Unspecified,
            _ => return None,
        })
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<Event>,
    pub end: Termination,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

impl TraceParseError {
    fn new(line: usize, message: String) -> Self {
        TraceParseError { line, message }
    }
}

impl Trace {
    pub fn new() -> Self {
        Trace {
            events: Vec::new(),
            end: Termination::Unspecified,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_text(&self, schema: &StateSchema) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_line(schema));
            out.push('\n');
        }
        out.push_str("# end ");
        out.push_str(self.end.as_str());
        out.push('\n');
        out
    }

    pub fn parse(text: &str, schema: &StateSchema) -> Result<Trace, TraceParseError> {
        let mut trace = Trace::new();
        for (n, line) in text.lines().enumerate() {
            let lineno = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(reason) = rest.trim().strip_prefix("end ") {
                    trace.end = Termination::parse(reason.trim()).ok_or_else(|| {
                        TraceParseError::new(lineno, format!("unknown end reason {reason:?}"))
                    })?;
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 7 {
                return Err(TraceParseError::new(
                    lineno,
                    format!("expected 7 tab-separated fields, found {}", fields.len()),
                ));
            }
            let step = fields[0]
                .parse()
                .map_err(|_| TraceParseError::new(lineno, format!("bad step {:?}", fields[0])))?;
            let args = if fields[3].is_empty() {
                Vec::new()
            } else {
                fields[3].split(',').map(str::to_owned).collect()
            };
            let layer = match fields[4] {
                "-" => None,
                l => Some(
                    l.parse()
                        .map_err(|_| TraceParseError::new(lineno, format!("bad layer {l:?}")))?,
                ),
            };
            let outcome = fields[5]
                .parse()
                .map_err(|e: TraceParseError| TraceParseError::new(lineno, e.message))?;
            let update = StateUpdate::parse(schema, fields[6])
                .map_err(|e| TraceParseError::new(lineno, e.to_string()))?;
            trace.events.push(Event {
                step,
                actor: fields[1].to_owned(),
                op: fields[2].to_owned(),
                args,
                layer,
                outcome,
                update,
            });
        }
        Ok(trace)
    }
}

impl Default for Trace {
    fn default() -> Self {
        Trace::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Domain;

    #[test]
    fn text_form_parses_back() {
        let schema = StateSchema::new([
            ("status(A)", Domain::symbols(["free", "occupied"])),
            ("status(B)", Domain::symbols(["free", "occupied"])),
        ])
        .unwrap();
        let a = schema.var("status(A)").unwrap();
        let b = schema.var("status(B)").unwrap();
        let trace = Trace {
            events: vec![
                Event {
                    step: 0,
                    actor: "MovingOnRoute".into(),
                    op: "MovingOnRoute".into(),
                    args: vec!["t1".into(), "A".into()],
                    layer: None,
                    outcome: Outcome::Applied,
                    update: StateUpdate::new().set(a, 0).set(b, 1),
                },
                Event {
                    step: 1,
                    actor: EI_ACTOR.into(),
                    op: "fake".into(),
                    args: vec![],
                    layer: None,
                    outcome: Outcome::Applied,
                    update: StateUpdate::new().set(b, 0),
                },
                Event {
                    step: 2,
                    actor: "RouteReserving".into(),
                    op: "RouteReserving".into(),
                    args: vec!["t1".into(), "R".into()],
                    layer: Some(1),
                    outcome: Outcome::Blocked,
                    update: StateUpdate::new(),
                },
            ],
            end: Termination::DepthReached,
        };
        let text = trace.to_text(&schema);
        assert!(text.starts_with("0\tMovingOnRoute\tMovingOnRoute\tt1,A\t-\tapplied\tstatus(A):=free;status(B):=occupied\n"));
        assert_eq!(Trace::parse(&text, &schema).unwrap(), trace);
    }

    #[test]
    fn malformed_lines_report_their_position() {
        let schema = StateSchema::new([("x", Domain::range(0, 1))]).unwrap();
        let err = Trace::parse("0\tP\tP\t\t-\tapplied\tx:=1\n1\tP\n", &schema).unwrap_err();
        assert_eq!(err.line, 2);
        let err = Trace::parse("0\tP\tP\t\t-\tsideways\tx:=1\n", &schema).unwrap_err();
        assert_eq!(err.line, 1);
    }
}
