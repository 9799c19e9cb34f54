//! Finite state schemas and the states that live in them.
//!
//! A [`State`] stores one domain index per schema variable. Values are only
//! materialized (as [`Value`] or as a label string) when a caller asks for
//! them, so states stay small and cheap to hash during exploration.

use std::collections::HashMap;
use std::fmt;

use super::KernelError;

/// Largest number of values a single variable domain may hold.
pub const MAX_DOMAIN_SIZE: usize = u16::MAX as usize + 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Sym(s.to_owned())
    }
}

/// An enumerable set of values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Integers `lo..=hi`.
    Range { lo: i64, hi: i64 },
    /// Named symbols, indexed in declaration order.
    Symbols(Vec<String>),
}

impl Domain {
    pub fn range(lo: i64, hi: i64) -> Self {
        Domain::Range { lo, hi }
    }

    pub fn symbols<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Domain::Symbols(names.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Domain::Range { lo, hi } if hi >= lo => (hi - lo) as usize + 1,
            Domain::Range { .. } => 0,
            Domain::Symbols(names) => names.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, index: u16) -> Option<Value> {
        let i = index as usize;
        if i >= self.len() {
            return None;
        }
        Some(match self {
            Domain::Range { lo, .. } => Value::Int(lo + i as i64),
            Domain::Symbols(names) => Value::Sym(names[i].clone()),
        })
    }

    pub fn index_of(&self, value: &Value) -> Option<u16> {
        match (self, value) {
            (Domain::Range { lo, hi }, Value::Int(n)) if n >= lo && n <= hi => {
                Some((n - lo) as u16)
            }
            (Domain::Symbols(names), Value::Sym(s)) => {
                names.iter().position(|n| n == s).map(|i| i as u16)
            }
            _ => None,
        }
    }

    /// Looks a value up by its printed form.
    pub fn index_of_label(&self, label: &str) -> Option<u16> {
        match self {
            Domain::Range { .. } => label
                .trim()
                .parse::<i64>()
                .ok()
                .and_then(|n| self.index_of(&Value::Int(n))),
            Domain::Symbols(names) => names.iter().position(|n| n == label).map(|i| i as u16),
        }
    }

    pub fn label(&self, index: u16) -> String {
        match self.value(index) {
            Some(v) => v.to_string(),
            None => format!("#{index}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub domain: Domain,
}

/// Named variables over finite, non-empty domains.
#[derive(Debug, Clone)]
pub struct StateSchema {
    vars: Vec<Variable>,
    by_name: HashMap<String, VarId>,
}

impl StateSchema {
    pub fn new<I, S>(vars: I) -> Result<Self, KernelError>
    where
        I: IntoIterator<Item = (S, Domain)>,
        S: Into<String>,
    {
        let mut schema = StateSchema {
            vars: Vec::new(),
            by_name: HashMap::new(),
        };
        for (name, domain) in vars {
            let name = name.into();
            if domain.is_empty() {
                return Err(KernelError::Schema(format!("variable {name} has an empty domain")));
            }
            if domain.len() > MAX_DOMAIN_SIZE {
                return Err(KernelError::Schema(format!(
                    "variable {name} has {} values, more than the supported {MAX_DOMAIN_SIZE}",
                    domain.len()
                )));
            }
            let id = VarId(schema.vars.len() as u32);
            if schema.by_name.insert(name.clone(), id).is_some() {
                return Err(KernelError::Schema(format!("duplicate variable {name}")));
            }
            schema.vars.push(Variable { name, domain });
        }
        Ok(schema)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.vars[var.index()].name
    }

    pub fn domain(&self, var: VarId) -> &Domain {
        &self.vars[var.index()].domain
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    /// Number of distinct states, saturating at `u128::MAX`.
    pub fn state_count(&self) -> u128 {
        self.vars
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.domain.len() as u128))
    }

    /// Every state of the schema in odometer order (last variable fastest).
    pub fn states(&self) -> StateIter<'_> {
        StateIter {
            schema: self,
            next: Some(State::from_slots(vec![0; self.vars.len()])),
        }
    }

    pub fn check(&self, state: &State) -> Result<(), KernelError> {
        if state.slots.len() != self.vars.len() {
            return Err(KernelError::Schema(format!(
                "state has {} slots, schema declares {} variables",
                state.slots.len(),
                self.vars.len()
            )));
        }
        for (slot, var) in state.slots.iter().zip(&self.vars) {
            if *slot as usize >= var.domain.len() {
                return Err(KernelError::Schema(format!(
                    "value index {slot} outside the domain of {}",
                    var.name
                )));
            }
        }
        Ok(())
    }

    /// Builds a state from one value per variable, in declaration order.
    pub fn state_of(&self, values: &[Value]) -> Result<State, KernelError> {
        if values.len() != self.vars.len() {
            return Err(KernelError::Schema(format!(
                "expected {} values, got {}",
                self.vars.len(),
                values.len()
            )));
        }
        let slots = values
            .iter()
            .zip(&self.vars)
            .map(|(value, var)| {
                var.domain.index_of(value).ok_or_else(|| {
                    KernelError::Schema(format!("{value} is not in the domain of {}", var.name))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(State::from_slots(slots))
    }

    pub fn value(&self, state: &State, var: VarId) -> Value {
        self.domain(var)
            .value(state.get(var))
            .expect("state checked against schema")
    }

    pub fn label(&self, var: VarId, index: u16) -> String {
        self.domain(var).label(index)
    }

    /// `name=value, ...` rendering, mostly for diagnostics.
    pub fn describe(&self, state: &State) -> String {
        self.var_ids()
            .map(|v| format!("{}={}", self.name(v), self.label(v, state.get(v))))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

pub struct StateIter<'a> {
    schema: &'a StateSchema,
    next: Option<State>,
}

impl Iterator for StateIter<'_> {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.slots.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            let size = self.schema.vars[i].domain.len() as u32;
            let v = succ.slots[i] as u32 + 1;
            if v < size {
                succ.slots[i] = v as u16;
                self.next = Some(succ);
                break;
            }
            succ.slots[i] = 0;
        }
        Some(current)
    }
}

/// A total assignment of domain indices to schema variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    slots: Box<[u16]>,
}

impl State {
    pub fn from_slots(slots: Vec<u16>) -> Self {
        State {
            slots: slots.into_boxed_slice(),
        }
    }

    pub fn get(&self, var: VarId) -> u16 {
        self.slots[var.index()]
    }

    pub fn set(&mut self, var: VarId, value: u16) {
        self.slots[var.index()] = value;
    }

    pub fn slots(&self) -> &[u16] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> StateSchema {
        StateSchema::new([
            ("x", Domain::range(0, 2)),
            ("flag", Domain::symbols(["off", "on"])),
        ])
        .unwrap()
    }

    #[test]
    fn enumerates_every_state_once() {
        let schema = toy();
        let states: Vec<_> = schema.states().collect();
        assert_eq!(states.len() as u128, schema.state_count());
        assert_eq!(states.len(), 6);
        let mut dedup = states.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 6);
    }

    #[test]
    fn rejects_duplicate_and_empty_variables() {
        assert!(StateSchema::new([("x", Domain::range(0, 1)), ("x", Domain::range(0, 1))]).is_err());
        assert!(StateSchema::new([("y", Domain::range(3, 2))]).is_err());
        assert!(StateSchema::new([("z", Domain::Symbols(vec![]))]).is_err());
    }

    #[test]
    fn state_of_round_trips_values() {
        let schema = toy();
        let s = schema
            .state_of(&[Value::Int(2), Value::from("on")])
            .unwrap();
        assert_eq!(schema.value(&s, schema.var("x").unwrap()), Value::Int(2));
        assert_eq!(schema.describe(&s), "x=2, flag=on");
        assert!(schema.state_of(&[Value::Int(3), Value::from("on")]).is_err());
    }

    #[test]
    fn check_catches_out_of_domain_slots() {
        let schema = toy();
        assert!(schema.check(&State::from_slots(vec![2, 1])).is_ok());
        assert!(schema.check(&State::from_slots(vec![3, 0])).is_err());
        assert!(schema.check(&State::from_slots(vec![0])).is_err());
    }

    #[test]
    fn range_labels_parse_back() {
        let d = Domain::range(1, 12);
        assert_eq!(d.index_of_label("4"), Some(3));
        assert_eq!(d.label(3), "4");
        assert_eq!(d.index_of_label("13"), None);
    }
}
