use std::fmt;
use std::sync::Arc;

use super::schema::{State, StateSchema};
use super::KernelError;

type StateFn = dyn Fn(&State, &[u16]) -> bool + Send + Sync;
type TransitionFn = dyn Fn(&State, &State, &[u16]) -> bool + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    /// Judges a single state.
    OneState,
    /// Judges a `(before, after)` pair. In the barred notation the unbarred
    /// names are the `before` values and the barred names the `after` values.
    TwoState,
}

#[derive(Clone)]
enum Body {
    One(Arc<StateFn>),
    Two(Arc<TransitionFn>),
}

/// A named, total, deterministic boolean function over states.
///
/// Predicates may also read operation arguments (as domain indices). Predicates
/// built without arguments simply ignore them.
#[derive(Clone)]
pub struct Predicate {
    name: Arc<str>,
    body: Body,
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Predicate")
            .field("name", &self.name)
            .field("arity", &self.arity())
            .finish()
    }
}

impl Predicate {
    pub fn state(name: &str, f: impl Fn(&State) -> bool + Send + Sync + 'static) -> Self {
        Predicate {
            name: name.into(),
            body: Body::One(Arc::new(move |s, _| f(s))),
        }
    }

    pub fn state_with_args(
        name: &str,
        f: impl Fn(&State, &[u16]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Predicate {
            name: name.into(),
            body: Body::One(Arc::new(f)),
        }
    }

    pub fn transition(
        name: &str,
        f: impl Fn(&State, &State) -> bool + Send + Sync + 'static,
    ) -> Self {
        Predicate {
            name: name.into(),
            body: Body::Two(Arc::new(move |b, a, _| f(b, a))),
        }
    }

    pub fn transition_with_args(
        name: &str,
        f: impl Fn(&State, &State, &[u16]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Predicate {
            name: name.into(),
            body: Body::Two(Arc::new(f)),
        }
    }

    pub fn constant(name: &str, value: bool) -> Self {
        Predicate::state(name, move |_| value)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: &str) -> Self {
        Predicate {
            name: name.into(),
            body: self.body.clone(),
        }
    }

    pub fn arity(&self) -> Arity {
        match self.body {
            Body::One(_) => Arity::OneState,
            Body::Two(_) => Arity::TwoState,
        }
    }

    /// Evaluates against `before` and, for two-state predicates, `after`.
    ///
    /// A one-state predicate judges the most recent state: `after` when it is
    /// given, `before` otherwise.
    pub fn eval(
        &self,
        before: &State,
        after: Option<&State>,
        args: &[u16],
    ) -> Result<bool, KernelError> {
        match (&self.body, after) {
            (Body::One(f), Some(a)) => Ok(f(a, args)),
            (Body::One(f), None) => Ok(f(before, args)),
            (Body::Two(f), Some(a)) => Ok(f(before, a, args)),
            (Body::Two(_), None) => Err(KernelError::Arity {
                predicate: self.name.to_string(),
            }),
        }
    }

    /// Gate used when an operation is about to run in `state`. A two-state
    /// rely is judged on the stuttering step `(state, state)`.
    pub fn holds_at(&self, state: &State, args: &[u16]) -> bool {
        match &self.body {
            Body::One(f) => f(state, args),
            Body::Two(f) => f(state, state, args),
        }
    }

    /// Whether the environment step `before -> after` respects this predicate.
    ///
    /// Two-state predicates are evaluated directly. A one-state predicate is
    /// respected when the step preserves it: if it held before it still holds.
    pub fn respected_by(&self, before: &State, after: &State, args: &[u16]) -> bool {
        match &self.body {
            Body::One(f) => !f(before, args) || f(after, args),
            Body::Two(f) => f(before, after, args),
        }
    }
}

/// Evaluates a rely condition, checking both states against the schema.
pub fn evaluate_rely(
    pred: &Predicate,
    schema: &StateSchema,
    before: &State,
    after: Option<&State>,
) -> Result<bool, KernelError> {
    schema.check(before)?;
    if let Some(a) = after {
        schema.check(a)?;
    }
    pred.eval(before, after, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Domain;

    fn schema() -> StateSchema {
        StateSchema::new([("x", Domain::range(0, 3))]).unwrap()
    }

    #[test]
    fn two_state_needs_both_states() {
        let p = Predicate::transition("unchanged", |b, a| b == a);
        let s = State::from_slots(vec![1]);
        assert!(matches!(
            evaluate_rely(&p, &schema(), &s, None),
            Err(KernelError::Arity { .. })
        ));
        assert!(evaluate_rely(&p, &schema(), &s, Some(&s)).unwrap());
    }

    #[test]
    fn schema_mismatch_is_reported() {
        let p = Predicate::constant("true", true);
        let bad = State::from_slots(vec![9]);
        assert!(matches!(
            evaluate_rely(&p, &schema(), &bad, None),
            Err(KernelError::Schema(_))
        ));
    }

    #[test]
    fn one_state_judges_latest_state() {
        let schema = schema();
        let x = schema.var("x").unwrap();
        let p = Predicate::state("x is zero", move |s| s.get(x) == 0);
        let zero = State::from_slots(vec![0]);
        let two = State::from_slots(vec![2]);
        assert!(p.eval(&zero, None, &[]).unwrap());
        assert!(!p.eval(&zero, Some(&two), &[]).unwrap());
        assert!(!p.respected_by(&zero, &two, &[]));
        assert!(p.respected_by(&two, &zero, &[]));
    }
}
