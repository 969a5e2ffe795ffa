//! Exact verification of validity, envy-freeness and approximate
//! envy-freeness.
//!
//! Every comparison here is an exact integer (or cross-multiplied
//! rational) comparison; the verifier is the ground truth the solvers
//! are checked against.

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Setting};
use crate::numerics::Rational;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub kind: String,
    pub agents: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VerificationReport {
    pub valid: bool,
    pub envy_free: bool,
    pub eps_envy_free: bool,
    pub violations: Vec<Violation>,
}

/// Validity: pairwise-disjoint bundles totaling exactly `p` vertices,
/// every induced subgraph connected (the empty bundle counts as
/// connected), and nonempty bundles in the mandatory setting.
pub fn is_valid(inst: &Instance, alloc: &Allocation) -> Result<(bool, Vec<Violation>)> {
    let bundles = alloc.to_indices(inst)?;
    let mut violations = Vec::new();

    let mut owner: Vec<Option<usize>> = vec![None; inst.vertex_count()];
    for (a, bundle) in bundles.iter().enumerate() {
        for &v in bundle {
            if let Some(prev) = owner[v] {
                violations.push(Violation {
                    kind: "disjointness".into(),
                    agents: vec![inst.agent_id(prev).into(), inst.agent_id(a).into()],
                    detail: format!("vertex `{}` allocated twice", inst.vertex_id(v)),
                });
            } else {
                owner[v] = Some(a);
            }
        }
    }

    let total: usize = bundles.iter().map(|b| b.len()).sum();
    if total != inst.p() {
        violations.push(Violation {
            kind: "total-size".into(),
            agents: vec![],
            detail: format!("{} vertices allocated, p = {}", total, inst.p()),
        });
    }

    for (a, bundle) in bundles.iter().enumerate() {
        if !inst.is_connected_subset(bundle) {
            violations.push(Violation {
                kind: "connectivity".into(),
                agents: vec![inst.agent_id(a).into()],
                detail: format!("bundle of `{}` induces a disconnected subgraph", inst.agent_id(a)),
            });
        }
    }

    if inst.setting() == Setting::Mandatory {
        for (a, bundle) in bundles.iter().enumerate() {
            if bundle.is_empty() {
                violations.push(Violation {
                    kind: "mandatory-nonempty".into(),
                    agents: vec![inst.agent_id(a).into()],
                    detail: "empty bundle in the mandatory setting".into(),
                });
            }
        }
    }

    Ok((violations.is_empty(), violations))
}

/// Exact envy-freeness: `u_i(pi_i) >= u_i(pi_j)` for all ordered pairs.
pub fn is_envy_free(inst: &Instance, alloc: &Allocation) -> Result<bool> {
    Ok(envy_violations(inst, alloc, None)?.is_empty())
}

/// `(1 + eps) * u_i(pi_i) >= u_i(pi_j)` for all ordered pairs, evaluated
/// with cross-multiplied integers. `eps = 0` coincides with plain
/// envy-freeness.
pub fn is_eps_envy_free(inst: &Instance, alloc: &Allocation, eps: &Rational) -> Result<bool> {
    if eps.is_negative() {
        return Err(Error::NonPositiveEps(eps.to_string()));
    }
    Ok(envy_violations(inst, alloc, Some(eps))?.is_empty())
}

fn envy_violations(
    inst: &Instance,
    alloc: &Allocation,
    eps: Option<&Rational>,
) -> Result<Vec<Violation>> {
    let bundles = alloc.to_indices(inst)?;
    let values: Vec<Vec<BigUint>> = (0..inst.agent_count())
        .map(|i| {
            bundles
                .iter()
                .map(|b| inst.bundle_value_indices(i, b))
                .collect()
        })
        .collect();
    let mut violations = Vec::new();
    for i in 0..inst.agent_count() {
        for j in 0..inst.agent_count() {
            if i == j {
                continue;
            }
            let envious = match eps {
                None => values[i][i] < values[i][j],
                Some(eps) => {
                    // (1 + a/b) * own >= other  <=>  (a + b) * own >= b * other
                    let a = eps.numer();
                    let b = eps.denom();
                    let lhs = (a + b) * BigInt::from(values[i][i].clone());
                    let rhs = b * BigInt::from(values[i][j].clone());
                    lhs < rhs
                }
            };
            if envious {
                violations.push(Violation {
                    kind: if eps.is_some() { "eps-envy" } else { "envy" }.into(),
                    agents: vec![inst.agent_id(i).into(), inst.agent_id(j).into()],
                    detail: format!(
                        "u_{0}(bundle of {0}) = {1} vs u_{0}(bundle of {2}) = {3}",
                        inst.agent_id(i),
                        values[i][i],
                        inst.agent_id(j),
                        values[i][j]
                    ),
                });
            }
        }
    }
    Ok(violations)
}

/// Full report: validity, envy-freeness and eps-envy-freeness in one
/// pass, with each violated clause listed.
pub fn verify(inst: &Instance, alloc: &Allocation, eps: &Rational) -> Result<VerificationReport> {
    if eps.is_negative() {
        return Err(Error::NonPositiveEps(eps.to_string()));
    }
    let (valid, mut violations) = is_valid(inst, alloc)?;
    let envy = envy_violations(inst, alloc, None)?;
    let envy_free = envy.is_empty();
    let eps_envy = envy_violations(inst, alloc, Some(eps))?;
    let eps_envy_free = eps_envy.is_empty();
    violations.extend(envy);
    violations.extend(eps_envy);
    debug_assert!(!envy_free || eps_envy_free);
    Ok(VerificationReport {
        valid,
        envy_free,
        eps_envy_free,
        violations,
    })
}
