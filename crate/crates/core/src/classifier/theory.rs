use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::certs::signed_residue;
use super::Classification;
use crate::error::{Error, Result};
use crate::modorder::{ell, is_prime, multiplicative_order};
use crate::params::{Budgets, PairParams};
use crate::serde_str;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    Complete,
    Incomplete,
}

/// `(2b² - 2Nb + b + 2N - 3 + Ns) / (q(b-1))`: once `O_b(st)/O_b(t)` reaches
/// this ratio, `st` cannot be primitive incomplete.
pub fn lemma56_threshold(params: &PairParams, s: &BigInt) -> BigRational {
    let (n, q, b) = (params.n(), params.q(), params.b());
    let num = BigInt::from(2 * b * b - 2 * n * b + b + 2 * n - 3) + s * n;
    BigRational::new(num, BigInt::from(q * (b - 1)))
}

/// The exponent vector whose completeness propagates to all prime powers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Anchor {
    pub primes: Vec<u64>,
    /// `ℓ_b(p_i)`.
    pub ells: Vec<u32>,
    /// Largest `l_i` with `p_i^{l_i} | lcm(O_b(p_1), ..)`.
    pub lifts: Vec<u32>,
    pub exponents: Vec<u32>,
    #[serde(with = "serde_str::bigint")]
    pub value: BigInt,
}

pub fn anchor_for(params: &PairParams, primes: &[u64]) -> Result<Anchor> {
    let b = params.b() as u64;
    let n = params.n() as u64;
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != primes.len() || primes.is_empty() {
        return Err(Error::Domain("primes must be distinct and nonempty".into()));
    }
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if b.is_multiple_of(p) {
            return Err(Error::not_coprime(b, p));
        }
        // The size condition is not needed when N = 2.
        if n != 2 && p < 2 * n + 1 {
            return Err(Error::Domain(format!("prime {p} is below 2N + 1 = {}", 2 * n + 1)));
        }
    }
    let mut lcm = 1u64;
    for &p in primes {
        lcm = lcm.lcm(&multiplicative_order(b, p)?);
    }
    let mut ells = Vec::new();
    let mut lifts = Vec::new();
    let mut exponents = Vec::new();
    let mut value = BigInt::from(1);
    for &p in primes {
        let l = ell(b, p)?;
        let mut lift = 0;
        let mut rest = lcm;
        while rest.is_multiple_of(p) {
            rest /= p;
            lift += 1;
        }
        ells.push(l);
        lifts.push(lift);
        exponents.push(l + lift);
        value *= num_traits::pow(BigInt::from(p), (l + lift) as usize);
    }
    Ok(Anchor {
        primes: primes.to_vec(),
        ells,
        lifts,
        exponents,
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Propagation {
    pub anchor: Anchor,
    /// `Some(Complete)` means every `p_1^{k_1}..p_m^{k_m}` is complete.
    pub prediction: Option<Prediction>,
}

/// Propagates a complete anchor to every exponent vector. An incomplete
/// anchor gives no prediction either way.
pub fn theorem57_propagate(
    params: &PairParams,
    primes: &[u64],
    anchor_verdict: &Classification,
) -> Result<Propagation> {
    let anchor = anchor_for(params, primes)?;
    if anchor_verdict.t != anchor.value || &anchor_verdict.params != params {
        return Err(Error::Domain(format!(
            "verdict is for t = {}, anchor is {}",
            anchor_verdict.t, anchor.value
        )));
    }
    let prediction = anchor_verdict.is_complete().then_some(Prediction::Complete);
    Ok(Propagation { anchor, prediction })
}

/// A power `(2^r)^i ≡ a (mod t)` meeting the small-element test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PowerResidue {
    pub exponent: u64,
    pub element: i64,
}

/// Both readings of the hypothesis for `p^n` at base `2^r`, and the
/// small-element test on `p^n` itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PowerOfTwoReport {
    pub r: u32,
    pub p: u64,
    pub n: u32,
    pub order_two: u64,
    /// `p = 2^r - 1`, which is incomplete outright.
    pub excluded: bool,
    /// `r·O_2(p)` even, or `r ∤ O_2(p)`. This is the form used for prediction.
    pub hypothesis: bool,
    /// `r·O_2(p)` even, or `r ∤ (p - 1)`.
    pub hypothesis_p_minus_one: bool,
    pub prediction: Option<Prediction>,
    pub small_power: Option<PowerResidue>,
}

/// Predicted verdict for `p^n` with `N = 2`, `q = 2^{r-1}`, `b = 2^r`.
pub fn cert_power_of_two_cases(r: u32, p: u64, n: u32) -> Result<PowerOfTwoReport> {
    if !(2..=62).contains(&r) {
        return Err(Error::Domain("r must lie in 2..=62".into()));
    }
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime(format!("{p} (odd prime required)")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let b = 1u64 << r;
    let o2 = multiplicative_order(2, p)?;
    let excluded = p == b - 1;
    let r64 = r as u64;
    let hypothesis = (r64 * o2).is_multiple_of(2) || o2 % r64 != 0;
    let hypothesis_p_minus_one = (r64 * o2).is_multiple_of(2) || !(p - 1).is_multiple_of(r64);
    let prediction = if excluded {
        Some(Prediction::Incomplete)
    } else if hypothesis {
        Some(Prediction::Complete)
    } else {
        None
    };
    let small_power = p
        .checked_pow(n)
        .and_then(|t| small_power_residue(r, t, Budgets::default().group_iterations));
    Ok(PowerOfTwoReport {
        r,
        p,
        n,
        order_two: o2,
        excluded,
        hypothesis,
        hypothesis_p_minus_one,
        prediction,
        small_power,
    })
}

/// Looks for `(2^r)^i ≡ a (mod t)` with `a = -1` or `2 ≤ |a| ≤ 2^{r-1}`.
///
/// Multiples of `2^r - 1` are skipped: they are incomplete, and for `r = 2`
/// the case `a = -2` is only a non-strict bound on them.
pub fn small_power_residue(r: u32, t: u64, budget: u64) -> Option<PowerResidue> {
    let b = 1u64 << r;
    if t < 3 || t.is_multiple_of(2) || t.is_multiple_of(b - 1) {
        return None;
    }
    let half = (b / 2) as i64;
    let mut x = 1u64;
    for i in 1..=budget {
        x = ((x as u128 * b as u128) % t as u128) as u64;
        if x == 1 {
            return None;
        }
        let a = signed_residue(x, t);
        if a == -1 || (2..=half).contains(&a.abs()) {
            return Some(PowerResidue {
                exponent: i,
                element: a,
            });
        }
    }
    None
}
