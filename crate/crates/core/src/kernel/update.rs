use super::schema::{State, StateSchema, VarId};
use super::KernelError;

/// A single `var := value` write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub var: VarId,
    pub value: u16,
}

impl Assignment {
    pub fn new(var: VarId, value: u16) -> Self {
        Assignment { var, value }
    }

    pub fn describe(&self, schema: &StateSchema) -> String {
        format!(
            "{}:={}",
            schema.name(self.var),
            schema.label(self.var, self.value)
        )
    }

    /// Parses `name:=value` against the schema.
    pub fn parse(schema: &StateSchema, text: &str) -> Result<Self, KernelError> {
        let (name, value) = text
            .split_once(":=")
            .ok_or_else(|| KernelError::Schema(format!("expected var:=value, got {text:?}")))?;
        let var = schema
            .var(name.trim())
            .ok_or_else(|| KernelError::Schema(format!("unknown variable {}", name.trim())))?;
        let value = schema
            .domain(var)
            .index_of_label(value.trim())
            .ok_or_else(|| {
                KernelError::Schema(format!("{} is not in the domain of {}", value.trim(), name.trim()))
            })?;
        Ok(Assignment { var, value })
    }
}

/// An ordered list of writes applied atomically, left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct StateUpdate {
    assignments: Vec<Assignment>,
}

impl StateUpdate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, var: VarId, value: u16) -> Self {
        self.push(Assignment::new(var, value));
        self
    }

    pub fn push(&mut self, assignment: Assignment) {
        self.assignments.push(assignment);
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn apply(&self, schema: &StateSchema, state: &State) -> Result<State, KernelError> {
        let mut next = state.clone();
        for a in &self.assignments {
            if a.var.index() >= schema.len() {
                return Err(KernelError::Schema(format!(
                    "update writes unknown variable #{}",
                    a.var.index()
                )));
            }
            if a.value as usize >= schema.domain(a.var).len() {
                return Err(KernelError::Schema(format!(
                    "update writes index {} outside the domain of {}",
                    a.value,
                    schema.name(a.var)
                )));
            }
            next.set(a.var, a.value);
        }
        Ok(next)
    }

    /// `var:=value;var:=value` rendering used in traces.
    pub fn describe(&self, schema: &StateSchema) -> String {
        self.assignments
            .iter()
            .map(|a| a.describe(schema))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(schema: &StateSchema, text: &str) -> Result<Self, KernelError> {
        let assignments = text
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| Assignment::parse(schema, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StateUpdate { assignments })
    }
}

impl FromIterator<Assignment> for StateUpdate {
    fn from_iter<I: IntoIterator<Item = Assignment>>(iter: I) -> Self {
        StateUpdate {
            assignments: iter.into_iter().collect(),
        }
    }
}

impl Extend<Assignment> for StateUpdate {
    fn extend<I: IntoIterator<Item = Assignment>>(&mut self, iter: I) {
        self.assignments.extend(iter);
    }
}
