//! Two small reference systems: minimum-of-a-set under a pre/post contract,
//! and two processes computing a GCD by interleaved subtraction.

use super::operation::RGOperation;
use super::predicate::Predicate;
use super::schema::{Domain, State, StateSchema, VarId};
use super::update::StateUpdate;
use super::KernelError;

/// Precondition of [`find_min`].
pub const MIN_PRECONDITION: &str = "P(S): S ≠ ∅";

/// Smallest element of a non-empty set of naturals. Duplicates are ignored.
pub fn find_min(set: &[u64]) -> Result<u64, KernelError> {
    let mut iter = set.iter().copied();
    let first = iter.next().ok_or_else(|| KernelError::Precondition {
        op: "find_min".into(),
        message: MIN_PRECONDITION.into(),
    })?;
    Ok(iter.fold(first, |m, e| if e < m { e } else { m }))
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.abs()
}

/// The two-process GCD system over variables `a` and `b`.
#[derive(Debug, Clone)]
pub struct GcdSystem {
    pub schema: StateSchema,
    pub initial: State,
    pub a: VarId,
    pub b: VarId,
    /// `while (a <> b) if (a > b) a := a - b`
    pub p1: RGOperation,
    /// `while (a <> b) if (b > a) b := b - a`
    pub p2: RGOperation,
}

impl GcdSystem {
    pub fn state(&self, a: i64, b: i64) -> Result<State, KernelError> {
        self.schema.state_of(&[a.into(), b.into()])
    }

    pub fn values(&self, state: &State) -> (i64, i64) {
        (self.int(state, self.a), self.int(state, self.b))
    }

    fn int(&self, state: &State, var: VarId) -> i64 {
        match self.schema.value(state, var) {
            super::Value::Int(n) => n,
            super::Value::Sym(_) => unreachable!("gcd variables are integers"),
        }
    }

    pub fn r1(&self) -> Predicate {
        rely_p1(self.a, self.b)
    }

    pub fn g1(&self) -> Predicate {
        guarantee_p1(self.a, self.b)
    }

    pub fn r2(&self) -> Predicate {
        self.g1().renamed("R2")
    }

    pub fn g2(&self) -> Predicate {
        self.r1().renamed("G2")
    }
}

// Domains start at 1, so index i holds the natural i + 1.
fn nat(state: &State, var: VarId) -> i64 {
    state.get(var) as i64 + 1
}

fn idx(n: i64) -> u16 {
    (n - 1) as u16
}

/// R1: `a = ā ∧ (a ≥ b ⇒ b = b̄) ∧ GCD(a,b) = GCD(ā,b̄)`, with the unbarred
/// names read in the state before the environment step and the barred ones
/// after it.
fn rely_p1(a: VarId, b: VarId) -> Predicate {
    Predicate::transition("R1", move |before, after| {
        let (a0, b0) = (nat(before, a), nat(before, b));
        let (a1, b1) = (nat(after, a), nat(after, b));
        a1 == a0 && (a0 < b0 || b1 == b0) && gcd(a0, b0) == gcd(a1, b1)
    })
}

/// G1: `b = b̄ ∧ (a ≤ b ⇒ a = ā) ∧ GCD(a,b) = GCD(ā,b̄)`.
fn guarantee_p1(a: VarId, b: VarId) -> Predicate {
    Predicate::transition("G1", move |before, after| {
        let (a0, b0) = (nat(before, a), nat(before, b));
        let (a1, b1) = (nat(after, a), nat(after, b));
        b1 == b0 && (a0 > b0 || a1 == a0) && gcd(a0, b0) == gcd(a1, b1)
    })
}

/// Builds the GCD system starting from `(a0, b0)`. Both variables range over
/// `1..=max(a0, b0)`, which is closed under the two subtractions.
pub fn build_gcd_system(a0: u64, b0: u64) -> Result<GcdSystem, KernelError> {
    if a0 == 0 || b0 == 0 {
        return Err(KernelError::Domain(format!(
            "gcd inputs must be positive, got ({a0}, {b0})"
        )));
    }
    let hi = a0.max(b0);
    if hi as usize > super::schema::MAX_DOMAIN_SIZE {
        return Err(KernelError::Domain(format!("gcd input {hi} is too large")));
    }
    let hi = hi as i64;
    let schema = StateSchema::new([("a", Domain::range(1, hi)), ("b", Domain::range(1, hi))])?;
    let a = schema.var("a").expect("declared");
    let b = schema.var("b").expect("declared");
    let initial = schema.state_of(&[(a0 as i64).into(), (b0 as i64).into()])?;

    let p1 = RGOperation::new("P1", vec![], rely_p1(a, b), move |s, _| {
        let (x, y) = (nat(s, a), nat(s, b));
        if x > y {
            StateUpdate::new().set(a, idx(x - y))
        } else {
            StateUpdate::new()
        }
    });
    let p2 = RGOperation::new("P2", vec![], guarantee_p1(a, b).renamed("R2"), move |s, _| {
        let (x, y) = (nat(s, a), nat(s, b));
        if y > x {
            StateUpdate::new().set(b, idx(y - x))
        } else {
            StateUpdate::new()
        }
    });

    Ok(GcdSystem {
        schema,
        initial,
        a,
        b,
        p1,
        p2,
    })
}
