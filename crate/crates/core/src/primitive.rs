//! Primitive complete and incomplete numbers, and the infinite families
//! built from them.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::classifier::{
    alpha, classify_with, find_cycles, witness_from_digits, witness_violations, Classification,
    IncompleteRule, IncompleteTag, Verdict, Witness, WitnessOrigin,
};
use crate::error::{Error, Result};
use crate::modorder::{factorize, is_prime, multiplicative_order};
use crate::params::{Budgets, PairParams};
use crate::serde_str;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all_fields = "camelCase")]
pub enum PrimitiveKind {
    PrimitiveComplete,
    PrimitiveIncomplete,
    NotPrimitive {
        /// An incomplete proper divisor, when that is the reason.
        #[serde(default, with = "serde_str::bigint_opt", skip_serializing_if = "Option::is_none")]
        witness_divisor: Option<BigInt>,
        reason: String,
    },
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrimitiveReport {
    #[serde(with = "serde_str::bigint")]
    pub t: BigInt,
    pub kind: PrimitiveKind,
    pub classification: Classification,
    /// Verdicts of the proper divisors examined, keyed by divisor. When an
    /// incomplete divisor is found the scan stops there.
    pub divisor_verdicts: BTreeMap<String, String>,
}

/// Shared classification cache keyed by `(params, t)`. Values are
/// deterministic, so concurrent writers racing on a key are harmless.
#[derive(Debug, Default)]
pub struct ClassificationCache {
    map: RwLock<HashMap<(PairParams, BigInt), Classification>>,
}

impl ClassificationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn classify(
        &self,
        params: &PairParams,
        t: &BigInt,
        budgets: &Budgets,
    ) -> Result<Classification> {
        let key = (params.clone(), t.clone());
        if let Some(hit) = self.map.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(hit);
        }
        let c = classify_with(params, t, budgets)?;
        if let Ok(mut m) = self.map.write() {
            m.insert(key, c.clone());
        }
        Ok(c)
    }
}

pub fn primitive_kind(params: &PairParams, t: &BigInt) -> Result<PrimitiveReport> {
    primitive_kind_cached(params, t, &Budgets::default(), &ClassificationCache::new())
}

/// Classifies `t` and its proper divisors (smallest first) and applies the
/// definitions. An incomplete proper divisor settles `t` as incomplete
/// without searching `t`'s own lattice.
pub fn primitive_kind_cached(
    params: &PairParams,
    t: &BigInt,
    budgets: &Budgets,
    cache: &ClassificationCache,
) -> Result<PrimitiveReport> {
    let t = t.abs();
    let mut divisor_verdicts = BTreeMap::new();
    if !params.admits(&t) {
        let classification = cache.classify(params, &t, budgets)?;
        return Ok(PrimitiveReport {
            t,
            kind: PrimitiveKind::NotApplicable,
            classification,
            divisor_verdicts,
        });
    }
    let b = BigInt::from(params.b());
    let coprime_to_b = t.gcd(&b).is_one();
    let tu = t
        .to_u128()
        .ok_or(Error::Overflow("primitive_kind needs t below 2^128"))?;
    let divisors = factorize(tu, budgets.rho_iterations)?.divisors();
    for d in divisors.iter().take(divisors.len().saturating_sub(1)) {
        let d = BigInt::from(*d);
        let c = cache.classify(params, &d, budgets)?;
        divisor_verdicts.insert(d.to_string(), c.kind().to_string());
        if let Some(w) = c.witness() {
            let lifted = w.scaled(&(&t / &d));
            let violations = witness_violations(params, &lifted);
            if !violations.is_empty() {
                return Err(Error::Internal(violations.join("; ")));
            }
            let classification = Classification {
                params: params.clone(),
                t: t.clone(),
                verdict: Verdict::Incomplete {
                    witness: lifted,
                    other_cycles: Vec::new(),
                    origin: WitnessOrigin::Lifted {
                        divisor: d.clone(),
                        reason: "incomplete proper divisor".to_string(),
                    },
                },
            };
            return Ok(PrimitiveReport {
                t,
                kind: PrimitiveKind::NotPrimitive {
                    witness_divisor: Some(d.clone()),
                    reason: format!("proper divisor {d} is incomplete"),
                },
                classification,
                divisor_verdicts,
            });
        }
    }
    let classification = cache.classify(params, &t, budgets)?;
    let kind = match (&classification.verdict, coprime_to_b) {
        (Verdict::Complete { .. }, true) => PrimitiveKind::PrimitiveComplete,
        (Verdict::Incomplete { .. }, true) => PrimitiveKind::PrimitiveIncomplete,
        (Verdict::NotApplicable { .. }, _) => PrimitiveKind::NotApplicable,
        (_, false) => PrimitiveKind::NotPrimitive {
            witness_divisor: None,
            reason: format!("gcd(t, b) = {}", t.gcd(&b)),
        },
    };
    Ok(PrimitiveReport {
        t,
        kind,
        classification,
        divisor_verdicts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlphaMember {
    pub k: u32,
    #[serde(with = "serde_str::bigint")]
    pub alpha: BigInt,
    pub witness: Witness,
    /// `true` if the witness came from the lattice search, `false` if it was
    /// built from the repunit digit string.
    pub searched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlphaFamily {
    pub members: Vec<AlphaMember>,
    /// Pairs `(k, l)` where `gcd(α_k, α_l) = 1` and `gcd(k, l) = 1` disagree.
    pub coprimality_failures: Vec<(u32, u32)>,
    pub pairs_checked: usize,
}

/// `α_k = 1 + b + ... + b^{k-1}` for `b ≤ k ≤ kmax`, each with a witness.
pub fn gen_alpha_family(params: &PairParams, kmax: u32, budgets: &Budgets) -> Result<AlphaFamily> {
    let b = params.b();
    if (kmax as i64) < b {
        return Err(Error::Domain(format!("kmax = {kmax} must be at least b = {b}")));
    }
    let mut members = Vec::new();
    for k in b as u32..=kmax {
        let a = alpha(b, k);
        let searched = a
            .to_u64()
            .map(|au| find_cycles(params, au, budgets))
            .transpose();
        let (witness, searched) = match searched {
            Ok(Some(s)) => match s.cycles.into_iter().next() {
                Some(w) => (w, true),
                None => {
                    return Err(Error::Internal(format!("α_{k} = {a} has no cycle")));
                }
            },
            Ok(None) => (repunit_witness(params, k)?, false),
            Err(e) if e.is_resource_limit() => (repunit_witness(params, k)?, false),
            Err(e) => return Err(e),
        };
        members.push(AlphaMember {
            k,
            alpha: a,
            witness,
            searched,
        });
    }
    let mut failures = Vec::new();
    let mut pairs = 0;
    for k in 1..=kmax {
        for l in k + 1..=kmax {
            pairs += 1;
            let lhs = alpha(b, k).gcd(&alpha(b, l)).is_one();
            let rhs = k.gcd(&l) == 1;
            if lhs != rhs {
                failures.push((k, l));
            }
        }
    }
    Ok(AlphaFamily {
        members,
        coprimality_failures: failures,
        pairs_checked: pairs,
    })
}

fn repunit_witness(params: &PairParams, k: u32) -> Result<Witness> {
    IncompleteTag {
        rule: IncompleteRule::Repunit { k },
        divisor: alpha(params.b(), k),
    }
    .divisor_witness(params)
}

/// Longest repunit period for which the full cycle is materialized.
const REPUNIT_WITNESS_PERIOD_LIMIT: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RepunitReport {
    pub n: u64,
    #[serde(with = "serde_str::bigint")]
    pub t: BigInt,
    /// `1 + b + ... + b^{b-2}`.
    #[serde(with = "serde_str::bigint")]
    pub digit_sum: BigInt,
    /// `t·digit_sum/(b^{n+1} - 1)`, equal to `digit_sum/(b-1)`.
    #[serde(with = "serde_str::bigint")]
    pub lattice_point: BigInt,
    pub identity_holds: bool,
    /// `(divisor, divides t)` for `b - 1` and each known primitive.
    pub divisibility: Vec<(u64, bool)>,
    pub witness: Option<Witness>,
}

/// An incomplete repunit divisible by none of `b - 1` and the given
/// primitive incomplete numbers.
pub fn gen_repunit_incomplete(params: &PairParams, known_primitives: &[u64]) -> Result<RepunitReport> {
    let b = params.b() as u64;
    for &ti in known_primitives {
        if ti < 2 || ti.gcd(&b) != 1 || (b - 1).is_multiple_of(ti) {
            return Err(Error::Domain(format!(
                "{ti} must be coprime to b and must not divide b - 1"
            )));
        }
    }
    let mut n = (b - 1)
        .checked_mul(multiplicative_order(b, (b - 1) * (b - 1))?)
        .ok_or(Error::Overflow("repunit length"))?;
    for &ti in known_primitives {
        n = n
            .checked_mul(multiplicative_order(b, ti)?)
            .ok_or(Error::Overflow("repunit length"))?;
    }
    let bb = BigInt::from(b);
    let big_n = usize::try_from(n + 1).map_err(|_| Error::Overflow("repunit length"))?;
    let den = num_traits::pow(bb.clone(), big_n) - 1;
    let t: BigInt = &den / (b - 1);
    let digit_sum = alpha(b as i64, (b - 1) as u32);
    let (lattice_point, r) = (&t * &digit_sum).div_rem(&den);
    let expected = &digit_sum / (b - 1);
    let identity_holds =
        r.is_zero() && (&digit_sum % (b - 1)).is_zero() && lattice_point == expected;
    let mut divisibility = vec![(b - 1, (&t % (b - 1)).is_zero())];
    for &ti in known_primitives {
        divisibility.push((ti, (&t % ti).is_zero()));
    }
    let witness = if n < REPUNIT_WITNESS_PERIOD_LIMIT {
        let mut digits = vec![0i64; n as usize + 1];
        digits[..(b - 1) as usize].iter_mut().for_each(|c| *c = 1);
        Some(witness_from_digits(params, &t, &digits)?)
    } else {
        None
    };
    Ok(RepunitReport {
        n,
        t,
        digit_sum,
        lattice_point,
        identity_holds,
        divisibility,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyMember {
    pub family: String,
    pub k: u32,
    #[serde(with = "serde_str::bigint")]
    pub t: BigInt,
    pub verdict: String,
    pub coprime_to_b: bool,
}

/// Which closed form yields infinitely many primitive complete numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompleteFamilyCase {
    /// `q` composite: `d·N·b^k + 1` for the least nontrivial divisor `d | q`.
    CompositeQ { d: i64 },
    /// `q` an odd prime and `N` odd: `b^k + 2`.
    OddPrimeQOddN,
    /// `q` an odd prime and `N` even: `(N/2)·q·b^k + 1`.
    OddPrimeQEvenN,
    /// `q = 2`: `N·b^k + 1`.
    QTwo,
    /// `q = 2`, `N = 2`: `N·b^k - 1`, since `N·b^k + 1` is then a multiple of 3.
    QTwoNTwo,
}

impl CompleteFamilyCase {
    pub fn select(params: &PairParams) -> Self {
        let (n, q) = (params.n(), params.q());
        if q == 2 {
            return if n == 2 { Self::QTwoNTwo } else { Self::QTwo };
        }
        if !is_prime(q as u64) {
            let d = (2..q).find(|d| q % d == 0).expect("composite q has a divisor");
            return Self::CompositeQ { d };
        }
        if n % 2 == 1 {
            Self::OddPrimeQOddN
        } else {
            Self::OddPrimeQEvenN
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CompositeQ { .. } => "dNb^k+1",
            Self::OddPrimeQOddN => "b^k+2",
            Self::OddPrimeQEvenN => "(N/2)qb^k+1",
            Self::QTwo => "Nb^k+1",
            Self::QTwoNTwo => "Nb^k-1",
        }
    }

    pub fn member(&self, params: &PairParams, k: u32) -> BigInt {
        let (n, q) = (params.n(), params.q());
        let bk = num_traits::pow(BigInt::from(params.b()), k as usize);
        match *self {
            Self::CompositeQ { d } => bk * (d * n) + 1,
            Self::OddPrimeQOddN => bk + 2,
            Self::OddPrimeQEvenN => bk * (n / 2 * q) + 1,
            Self::QTwo => bk * n + 1,
            Self::QTwoNTwo => bk * n - 1,
        }
    }
}

/// `t_1, .., t_kmax` of the primitive complete family for these parameters,
/// each classified.
pub fn gen_primitive_complete_family(
    params: &PairParams,
    kmax: u32,
    budgets: &Budgets,
) -> Result<Vec<FamilyMember>> {
    if kmax == 0 {
        return Err(Error::Domain("kmax must be positive".into()));
    }
    let case = CompleteFamilyCase::select(params);
    let b = BigInt::from(params.b());
    (1..=kmax)
        .map(|k| {
            let t = case.member(params, k);
            let c = classify_with(params, &t, budgets)?;
            Ok(FamilyMember {
                family: case.name().to_string(),
                k,
                coprime_to_b: t.gcd(&b).is_one(),
                t,
                verdict: c.kind().to_string(),
            })
        })
        .collect()
}

/// Family rows as CSV with columns `family,k,t,verdict`.
pub fn family_csv(rows: &[FamilyMember]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["family", "k", "t", "verdict"])
        .map_err(|e| Error::Internal(e.to_string()))?;
    for r in rows {
        w.write_record([&r.family, &r.k.to_string(), &r.t.to_string(), &r.verdict])
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}
