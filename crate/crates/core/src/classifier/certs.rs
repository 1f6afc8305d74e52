//! Fast sufficient conditions. Each fires only when its hypothesis is met in
//! exact arithmetic, and each certificate can be rechecked on its own.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::lattice::find_cycles;
use super::witness::{witness_from_digits, Witness};
use crate::error::Result;
use crate::modorder::{is_prime, multiplicative_order, pow_mod_u64};
use crate::params::{attractor_envelope, Budgets, PairParams};
use crate::serde_str;

/// Why a value is complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all_fields = "camelCase")]
pub enum Certificate {
    /// `t < bound = (b-1)/max C`: the envelope holds no nonzero integer.
    IntervalBound {
        #[serde(with = "serde_str::rational")]
        bound: BigRational,
    },
    /// `b^exponent ≡ element (mod t)` with `element` small enough to force
    /// every orbit to grow.
    GroupElement { element: i64, exponent: u64 },
    /// `O_b(p)·q^k(b-1) ≥ p(N-1) + N^k q^k (b-1)` for prime `p`.
    OrderBound { k: u32, order: u64 },
    /// `t = d·N·b^k ± 1` with `d | q`, `1 < d < q`.
    FamilyRule {
        rule: String,
        d: i64,
        k: u32,
        sign: i8,
    },
    /// `t` and `t` with all factors shared with `b` removed are classified alike.
    Reduction {
        #[serde(with = "serde_str::bigint")]
        reduced: BigInt,
        inner: Box<Certificate>,
    },
    /// The full lattice was searched and no cycle exists.
    ExhaustiveSearch { nodes: u64 },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::IntervalBound { .. } => "IntervalBound",
            Certificate::GroupElement { .. } => "GroupElement",
            Certificate::OrderBound { .. } => "OrderBound",
            Certificate::FamilyRule { .. } => "FamilyRule",
            Certificate::Reduction { .. } => "Reduction",
            Certificate::ExhaustiveSearch { .. } => "ExhaustiveSearch",
        }
    }

    /// The certificate after unwrapping any reductions.
    pub fn innermost(&self) -> &Certificate {
        match self {
            Certificate::Reduction { inner, .. } => inner.innermost(),
            c => c,
        }
    }

    /// Re-derives this certificate for `t` from scratch.
    pub fn recheck(&self, params: &PairParams, t: &BigInt, budgets: &Budgets) -> Result<bool> {
        let t = t.abs();
        Ok(match self {
            Certificate::IntervalBound { .. } => cert_interval(params, &t).as_ref() == Some(self),
            Certificate::GroupElement { element, exponent } => match t.to_u64() {
                Some(tu) if tu > 1 => {
                    let a = signed_residue(pow_mod_u64(params.b() as u64, *exponent, tu), tu);
                    a == *element && group_element_qualifies(params, tu, a)
                }
                _ => false,
            },
            Certificate::OrderBound { .. } => match t.to_u64() {
                Some(p) if is_prime(p) => cert_order_bound(params, p)?.as_ref() == Some(self),
                _ => false,
            },
            Certificate::FamilyRule { .. } => {
                matches!(cert_family(params, &t), Some(FamilyMatch::Complete(c)) if &c == self)
            }
            Certificate::Reduction { reduced, inner } => {
                params.admits(&t)
                    && &reduce_t(params, &t) == reduced
                    && inner.recheck(params, reduced, budgets)?
            }
            Certificate::ExhaustiveSearch { nodes } => match t.to_u64() {
                Some(tu) if params.admits(&t) => {
                    let s = find_cycles(params, tu, budgets)?;
                    s.cycles.is_empty() && s.nodes == *nodes
                }
                _ => false,
            },
        })
    }
}

/// Divides out `gcd(t, b)` until `t` is coprime to `b`.
pub fn reduce_t(params: &PairParams, t: &BigInt) -> BigInt {
    let b = BigInt::from(params.b());
    let mut t = t.abs();
    loop {
        let g = t.gcd(&b);
        if g.is_one() || t.is_zero() {
            return t;
        }
        t /= g;
    }
}

/// Fires when the envelope contains no nonzero integer, that is when
/// `t·max C < b - 1`. For even `N` the threshold is exactly `2(b-1)/N`.
pub fn cert_interval(params: &PairParams, t: &BigInt) -> Option<Certificate> {
    let t = t.abs();
    let env = attractor_envelope(params, t.clone()).ok()?;
    if !env.nonzero_lattice_count().is_zero() {
        return None;
    }
    Some(Certificate::IntervalBound {
        bound: BigRational::new(BigInt::from(params.b() - 1), BigInt::from(params.c_max())),
    })
}

/// Representative of `x mod t` in `(-t/2, t/2]`.
pub fn signed_residue(x: u64, t: u64) -> i64 {
    let r = x % t;
    if 2 * r as u128 > t as u128 {
        r as i64 - t as i64
    } else {
        r as i64
    }
}

fn group_element_qualifies(params: &PairParams, t: u64, a: i64) -> bool {
    // A multiple of b - 1 is never complete. Excluding it also covers the
    // boundary case N = q = 2, where a = -2 only yields a non-strict bound.
    if t.is_multiple_of(params.b() as u64 - 1) {
        return false;
    }
    let q = params.q();
    let m = a.abs();
    if q >= 3 {
        (2..=q - 1).contains(&m)
    } else {
        m == 2
    }
}

/// Walks `G(b, t) = {b^l mod t}` for at most `budget` steps looking for an
/// element whose size forces completeness.
pub fn cert_group_element(params: &PairParams, t: u64, budget: u64) -> Option<Certificate> {
    let b = params.b() as u64;
    if t < 2 || t.gcd(&b) != 1 {
        return None;
    }
    let mut x = 1u64;
    for l in 1..=budget {
        x = ((x as u128 * b as u128) % t as u128) as u64;
        if x == 1 {
            return None;
        }
        let a = signed_residue(x, t);
        if group_element_qualifies(params, t, a) {
            return Some(Certificate::GroupElement {
                element: a,
                exponent: l,
            });
        }
    }
    None
}

/// Order-versus-cardinality bound for a prime `p`: a primitive incomplete
/// prime needs at least `O_b(p)` lattice points, more than the envelope can
/// hold when the inequality holds for some `k`.
pub fn cert_order_bound(params: &PairParams, p: u64) -> Result<Option<Certificate>> {
    if !is_prime(p) {
        return Err(crate::Error::NotPrime(p.to_string()));
    }
    let (n, q, b) = (params.n(), params.q(), params.b());
    if (b as u64).is_multiple_of(p) {
        return Err(crate::Error::not_coprime(b, p));
    }
    let order = multiplicative_order(b as u64, p)?;
    let pb = BigInt::from(p);
    let o = BigInt::from(order);
    let kmax = ceil_log(n as u64, p) + 1;
    for k in 1..=kmax {
        let qk = num_traits::pow(BigInt::from(q), k as usize);
        let nk = num_traits::pow(BigInt::from(n), k as usize);
        let scale = &qk * (b - 1);
        let lhs = &o * &scale;
        let rhs = &pb * (n - 1) + &nk * &scale;
        if lhs >= rhs {
            return Ok(Some(Certificate::OrderBound { k, order }));
        }
    }
    Ok(None)
}

/// Smallest `k` with `base^k ≥ x`.
fn ceil_log(base: u64, x: u64) -> u32 {
    let mut k = 0;
    let mut v: u128 = 1;
    while v < x as u128 {
        v *= base as u128;
        k += 1;
    }
    k
}

/// Structural reasons a value is known incomplete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all_fields = "camelCase")]
pub enum IncompleteRule {
    /// `(b-1) | t`; the orbit of 1 is fixed.
    BaseMinusOne,
    /// `(b+1) | t` with `N ≥ 3`; the orbit `1, -1` alternates.
    BasePlusOne,
    /// `α_k = 1 + b + ... + b^{k-1}` divides `t` for some `k ≥ b`.
    Repunit { k: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IncompleteTag {
    #[serde(flatten)]
    pub rule: IncompleteRule,
    /// The incomplete divisor the rule names.
    #[serde(with = "serde_str::bigint")]
    pub divisor: BigInt,
}

impl IncompleteTag {
    /// Digit string whose periodic orbit witnesses the divisor.
    pub fn digits(&self, params: &PairParams) -> Vec<i64> {
        match self.rule {
            IncompleteRule::BaseMinusOne => vec![1],
            IncompleteRule::BasePlusOne => vec![-1, 1],
            IncompleteRule::Repunit { k } => {
                let b = params.b() as usize;
                (0..k as usize).map(|i| i64::from((1..b).contains(&i))).collect()
            }
        }
    }

    /// Algebraic witness for the tagged divisor, no search needed.
    pub fn divisor_witness(&self, params: &PairParams) -> Result<Witness> {
        witness_from_digits(params, &self.divisor, &self.digits(params))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyMatch {
    Complete(Certificate),
    Incomplete(IncompleteTag),
}

pub fn alpha(b: i64, k: u32) -> BigInt {
    let b = BigInt::from(b);
    (num_traits::pow(b.clone(), k as usize) - 1) / (b - 1)
}

/// Matches `t` against the closed-form families.
pub fn cert_family(params: &PairParams, t: &BigInt) -> Option<FamilyMatch> {
    let t = t.abs();
    if t.is_zero() {
        return None;
    }
    let (n, q, b) = (params.n(), params.q(), params.b());
    let tag = |rule, divisor| Some(FamilyMatch::Incomplete(IncompleteTag { rule, divisor }));
    let bm1 = BigInt::from(b - 1);
    if (&t % &bm1).is_zero() {
        return tag(IncompleteRule::BaseMinusOne, bm1);
    }
    let bp1 = BigInt::from(b + 1);
    if n >= 3 && (&t % &bp1).is_zero() {
        return tag(IncompleteRule::BasePlusOne, bp1);
    }
    let mut k = b as u32;
    loop {
        let a = alpha(b, k);
        if a > t {
            break;
        }
        if (&t % &a).is_zero() {
            return tag(IncompleteRule::Repunit { k }, a);
        }
        k += 1;
    }
    let bb = BigInt::from(b);
    for d in (2..q).filter(|d| q % d == 0) {
        let dn = BigInt::from(d * n);
        for sign in [1i8, -1] {
            let rest = &t - BigInt::from(sign);
            if rest.is_zero() || !(&rest % &dn).is_zero() {
                continue;
            }
            let mut m = rest / &dn;
            let mut k = 0u32;
            while (&m % &bb).is_zero() {
                m /= &bb;
                k += 1;
            }
            if m.is_one() && k >= 1 {
                let rule = if sign > 0 { "dNb^k+1" } else { "dNb^k-1" };
                return Some(FamilyMatch::Complete(Certificate::FamilyRule {
                    rule: rule.to_string(),
                    d,
                    k,
                    sign,
                }));
            }
        }
    }
    None
}
