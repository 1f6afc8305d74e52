//! Complete or incomplete: exact decision with checkable evidence.
//!
//! [`classify`] runs cheap sufficient conditions first and falls back to
//! [`find_cycles`], the exhaustive search of the lattice graph. Complete
//! verdicts carry a [`Certificate`]; incomplete ones carry a verified
//! [`Witness`].

mod certs;
mod lattice;
mod theory;
mod witness;

pub use certs::{
    alpha, cert_family, cert_group_element, cert_interval, cert_order_bound, reduce_t,
    signed_residue, Certificate, FamilyMatch, IncompleteRule, IncompleteTag,
};
pub use lattice::{cycle_search, find_cycles, lattice_size, CycleSearch};
pub use theory::{
    anchor_for, cert_power_of_two_cases, lemma56_threshold, theorem57_propagate, Anchor,
    PowerOfTwoReport, PowerResidue, Prediction, Propagation, small_power_residue,
};
pub use witness::{
    values_coprime_to_t, witness_from_digits, witness_verify, witness_violations, Witness,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modorder::is_prime;
use crate::params::{Budgets, PairParams};
use crate::serde_str;

/// Where an incompleteness witness came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all_fields = "camelCase")]
pub enum WitnessOrigin {
    /// Found by the lattice search over `nodes` points.
    Search { nodes: u64 },
    /// A witness for `divisor` scaled up to `t`.
    Lifted {
        #[serde(with = "serde_str::bigint")]
        divisor: BigInt,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all_fields = "camelCase")]
pub enum Verdict {
    Complete {
        certificate: Certificate,
    },
    Incomplete {
        witness: Witness,
        /// Any further cycles the search found, in the same canonical order.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        other_cycles: Vec<Witness>,
        origin: WitnessOrigin,
    },
    NotApplicable {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub params: PairParams,
    #[serde(with = "serde_str::bigint")]
    pub t: BigInt,
    pub verdict: Verdict,
}

impl Classification {
    pub fn kind(&self) -> &'static str {
        match self.verdict {
            Verdict::Complete { .. } => "Complete",
            Verdict::Incomplete { .. } => "Incomplete",
            Verdict::NotApplicable { .. } => "NotApplicable",
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.verdict, Verdict::Complete { .. })
    }

    pub fn is_incomplete(&self) -> bool {
        matches!(self.verdict, Verdict::Incomplete { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.verdict {
            Verdict::Complete { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Incomplete { witness, .. } => Some(witness),
            _ => None,
        }
    }

    /// The witness followed by every other cycle found.
    pub fn all_cycles(&self) -> Vec<&Witness> {
        match &self.verdict {
            Verdict::Incomplete {
                witness,
                other_cycles,
                ..
            } => std::iter::once(witness).chain(other_cycles).collect(),
            _ => Vec::new(),
        }
    }
}

/// Classifies `t` with the default budgets.
pub fn classify(params: &PairParams, t: impl Into<BigInt>) -> Result<Classification> {
    classify_with(params, &t.into(), &Budgets::default())
}

/// Classifies a rational scaling; anything outside `Z` is not applicable.
pub fn classify_rational(
    params: &PairParams,
    t: &BigRational,
    budgets: &Budgets,
) -> Result<Classification> {
    if !t.is_integer() {
        return Ok(Classification {
            params: params.clone(),
            t: t.numer().clone(),
            verdict: Verdict::NotApplicable {
                reason: format!("t = {t} is not an integer"),
            },
        });
    }
    classify_with(params, &t.to_integer(), budgets)
}

pub fn classify_with(params: &PairParams, t: &BigInt, budgets: &Budgets) -> Result<Classification> {
    let wrap = |verdict| Classification {
        params: params.clone(),
        t: t.clone(),
        verdict,
    };
    let n = BigInt::from(params.n());
    let g = t.gcd(&n);
    if !g.is_one() {
        return Ok(wrap(Verdict::NotApplicable {
            reason: format!("gcd(t, N) = {g}"),
        }));
    }
    let t_abs = t.abs();
    let t_red = reduce_t(params, &t_abs);
    let inner = classify_reduced(params, &t_red, budgets)?;
    let verdict = if t_red == t_abs {
        inner
    } else {
        let factor = &t_abs / &t_red;
        match inner {
            Verdict::Complete { certificate } => Verdict::Complete {
                certificate: Certificate::Reduction {
                    reduced: t_red,
                    inner: Box::new(certificate),
                },
            },
            Verdict::Incomplete {
                witness,
                other_cycles,
                ..
            } => Verdict::Incomplete {
                witness: witness.scaled(&factor),
                other_cycles: other_cycles.iter().map(|w| w.scaled(&factor)).collect(),
                origin: WitnessOrigin::Lifted {
                    divisor: t_red,
                    reason: "factors shared with b removed".to_string(),
                },
            },
            v => v,
        }
    };
    if let Verdict::Incomplete { witness, .. } = &verdict {
        let bad = witness_violations(params, witness);
        if !bad.is_empty() {
            return Err(Error::Internal(format!(
                "witness for t = {t} failed verification: {}",
                bad.join("; ")
            )));
        }
    }
    Ok(wrap(verdict))
}

fn incomplete_from_search(search: CycleSearch) -> Verdict {
    let mut cycles = search.cycles.into_iter();
    let witness = cycles.next().expect("nonempty cycle list");
    Verdict::Incomplete {
        witness,
        other_cycles: cycles.collect(),
        origin: WitnessOrigin::Search {
            nodes: search.nodes,
        },
    }
}

/// Classification of a `t` coprime to `b·N`.
fn classify_reduced(params: &PairParams, t: &BigInt, budgets: &Budgets) -> Result<Verdict> {
    let small = t.to_u64();
    match cert_family(params, t) {
        Some(FamilyMatch::Complete(certificate)) => return Ok(Verdict::Complete { certificate }),
        Some(FamilyMatch::Incomplete(tag)) => {
            if let Some(tu) = small {
                match find_cycles(params, tu, budgets) {
                    Ok(s) if !s.cycles.is_empty() => return Ok(incomplete_from_search(s)),
                    Ok(_) => {
                        return Err(Error::Internal(format!(
                            "t = {t} matches {:?} but the lattice has no cycle",
                            tag.rule
                        )))
                    }
                    Err(e) if e.is_resource_limit() => {}
                    Err(e) => return Err(e),
                }
            }
            let base = tag.divisor_witness(params)?;
            return Ok(Verdict::Incomplete {
                witness: base.scaled(&(t / &tag.divisor)),
                other_cycles: Vec::new(),
                origin: WitnessOrigin::Lifted {
                    divisor: tag.divisor.clone(),
                    reason: format!("{:?}", tag.rule),
                },
            });
        }
        None => {}
    }
    if let Some(certificate) = cert_interval(params, t) {
        return Ok(Verdict::Complete { certificate });
    }
    let Some(tu) = small else {
        return Err(Error::ResourceLimit {
            what: "lattice nodes",
            needed: format!("t = {t} exceeds 64 bits"),
            budget: budgets.lattice_nodes,
        });
    };
    if is_prime(tu) {
        match cert_order_bound(params, tu) {
            Ok(Some(certificate)) => return Ok(Verdict::Complete { certificate }),
            Ok(None) => {}
            Err(e) if e.is_resource_limit() => {}
            Err(e) => return Err(e),
        }
    }
    if let Some(certificate) = cert_group_element(params, tu, budgets.group_iterations) {
        return Ok(Verdict::Complete { certificate });
    }
    let search = find_cycles(params, tu, budgets)?;
    if search.cycles.is_empty() {
        Ok(Verdict::Complete {
            certificate: Certificate::ExhaustiveSearch {
                nodes: search.nodes,
            },
        })
    } else {
        Ok(incomplete_from_search(search))
    }
}
