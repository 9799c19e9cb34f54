//! Exhaustive checks over a finite schema: layer weakening and rely/guarantee
//! compatibility.

use super::operation::{arg_tuples, LayeredOperation, Proposal, RGOperation};
use super::schema::{State, StateSchema};
use super::KernelError;

/// Default bound on the number of (state, argument) combinations a check may
/// enumerate.
pub const DEFAULT_CHECK_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check<W> {
    Holds { checked: u64 },
    Refuted(W),
}

impl<W> Check<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Check::Holds { .. } => None,
            Check::Refuted(w) => Some(w),
        }
    }
}

/// A state where layer `stronger` admits the step but layer `weaker` does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakeningWitness {
    pub state: State,
    pub args: Vec<u16>,
    pub stronger: usize,
    pub weaker: usize,
}

/// A step by `actor` that breaks `victim`'s rely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub actor: String,
    pub victim: String,
    pub before: State,
    pub after: State,
    pub actor_args: Vec<u16>,
    pub victim_args: Vec<u16>,
}

fn ensure_within_cap(schema: &StateSchema, per_state: u128, cap: u64) -> Result<(), KernelError> {
    let size = schema.state_count().saturating_mul(per_state.max(1));
    if size > cap as u128 {
        return Err(KernelError::Explosion { size, cap });
    }
    Ok(())
}

/// Checks that every layer's rely implies the relies of all later layers, on
/// every state of `schema` and every argument tuple of the operation.
pub fn check_layer_weakening(
    lop: &LayeredOperation,
    schema: &StateSchema,
    cap: u64,
) -> Result<Check<WeakeningWitness>, KernelError> {
    let tuples = arg_tuples(lop.params());
    ensure_within_cap(schema, tuples.len() as u128, cap)?;
    let layers = lop.layers();
    let mut checked = 0u64;
    for state in schema.states() {
        for args in &tuples {
            checked += 1;
            let admitted: Vec<bool> = layers.iter().map(|l| l.rely.holds_at(&state, args)).collect();
            for i in 0..admitted.len() {
                if !admitted[i] {
                    continue;
                }
                if let Some(j) = (i + 1..admitted.len()).find(|&j| !admitted[j]) {
                    return Ok(Check::Refuted(WeakeningWitness {
                        state,
                        args: args.clone(),
                        stronger: i,
                        weaker: j,
                    }));
                }
            }
        }
    }
    Ok(Check::Holds { checked })
}

/// Checks that each operation's guarantee, taken from any state where its rely
/// holds, is a step every other operation's rely tolerates.
///
/// One-state relies count as tolerated when the step preserves them.
/// Precondition failures and blocked proposals realize no transition.
pub fn check_rg_compatibility(
    ops: &[RGOperation],
    schema: &StateSchema,
    cap: u64,
) -> Result<Check<CompatibilityWitness>, KernelError> {
    if ops.len() < 2 {
        return Ok(Check::Holds { checked: 0 });
    }
    let tuples: Vec<Vec<Vec<u16>>> = ops.iter().map(|op| arg_tuples(op.params())).collect();
    let per_state: u128 = tuples.iter().map(|t| t.len() as u128).sum();
    ensure_within_cap(schema, per_state, cap)?;
    let mut checked = 0u64;
    for before in schema.states() {
        for (i, actor) in ops.iter().enumerate() {
            for actor_args in &tuples[i] {
                let update = match actor.propose(&before, actor_args) {
                    Ok(Proposal::Fire { update, .. }) => update,
                    Ok(Proposal::Blocked) | Err(KernelError::Precondition { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let after = update.apply(schema, &before)?;
                for (j, victim) in ops.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    for victim_args in &tuples[j] {
                        checked += 1;
                        if !victim.rely().respected_by(&before, &after, victim_args) {
                            return Ok(Check::Refuted(CompatibilityWitness {
                                actor: actor.name().to_owned(),
                                victim: victim.name().to_owned(),
                                before,
                                after,
                                actor_args: actor_args.clone(),
                                victim_args: victim_args.clone(),
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(Check::Holds { checked })
}
