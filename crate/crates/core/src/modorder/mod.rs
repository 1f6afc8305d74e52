//! Multiplicative orders, the lifting exponent `ℓ_b(p)`, and the laws that
//! compose them across prime powers, products and powers of the base.

mod factor;

pub use factor::{factorize, is_prime, primality, Factorization, PrimeFactor, Primality};
pub(crate) use factor::pow_mod_u128;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Budgets;

/// Default rho budget used by the machine-word order helpers.
pub const DEFAULT_RHO_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderProfile {
    pub base: u64,
    pub modulus: u64,
    pub order: u64,
    pub carmichael: u64,
    pub factorization: Factorization,
}

/// `a^e mod m` on arbitrary-precision inputs; the result lies in `[0, m)`.
pub fn pow_mod(a: &BigInt, e: &BigUint, m: &BigUint) -> BigUint {
    if m.is_one() {
        return BigUint::zero();
    }
    let mi = BigInt::from(m.clone());
    let base = a.mod_floor(&mi).magnitude().clone();
    base.modpow(e, m)
}

/// `a^e mod m` for machine words. `m` must be positive.
pub fn pow_mod_u64(a: u64, e: u64, m: u64) -> u64 {
    assert!(m > 0, "modulus must be positive");
    pow_mod_u128(a as u128, e as u128, m as u128) as u64
}

/// Carmichael function λ(n) from a factorization, returned factored.
pub fn carmichael_factored(f: &Factorization) -> Result<BTreeMap<u128, u32>> {
    let mut lam: BTreeMap<u128, u32> = BTreeMap::new();
    let mut merge = |p: u128, e: u32| {
        let slot = lam.entry(p).or_insert(0);
        *slot = (*slot).max(e);
    };
    for pf in &f.factors {
        let (p, k) = (pf.prime, pf.exponent);
        if p == 2 {
            match k {
                1 => {}
                2 => merge(2, 1),
                _ => merge(2, k - 2),
            }
            continue;
        }
        if k > 1 {
            merge(p, k - 1);
        }
        for q in factorize(p - 1, DEFAULT_RHO_BUDGET)?.factors {
            merge(q.prime, q.exponent);
        }
    }
    lam.retain(|_, e| *e > 0);
    Ok(lam)
}

pub fn carmichael(n: u64) -> Result<u64> {
    let f = factorize(n as u128, DEFAULT_RHO_BUDGET)?;
    Ok(expand(&carmichael_factored(&f)?) as u64)
}

fn expand(f: &BTreeMap<u128, u32>) -> u128 {
    f.iter().map(|(p, e)| p.pow(*e)).product()
}

/// Order of `b` modulo the value of `f`, by stripping primes from λ.
fn order_from_factorization(b: u64, f: &Factorization) -> Result<(u64, u64)> {
    let m = f.value;
    if m == 1 {
        return Ok((1, 1));
    }
    let lam_f = carmichael_factored(f)?;
    let lam = expand(&lam_f);
    let mut ord = lam;
    for (&p, &e) in &lam_f {
        for _ in 0..e {
            if pow_mod_u128(b as u128, ord / p, m) == 1 {
                ord /= p;
            } else {
                break;
            }
        }
    }
    Ok((ord as u64, lam as u64))
}

/// `O_b(t)`: the least `α ≥ 1` with `b^α ≡ 1 (mod t)`.
pub fn multiplicative_order(b: u64, t: u64) -> Result<u64> {
    multiplicative_order_with(b, t, &Budgets::default())
}

pub fn multiplicative_order_with(b: u64, t: u64, budgets: &Budgets) -> Result<u64> {
    Ok(order_profile_with(b, t, budgets)?.order)
}

pub fn order_profile(b: u64, t: u64) -> Result<OrderProfile> {
    order_profile_with(b, t, &Budgets::default())
}

pub fn order_profile_with(b: u64, t: u64, budgets: &Budgets) -> Result<OrderProfile> {
    if t == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if b.gcd(&t) != 1 {
        return Err(Error::not_coprime(b, t));
    }
    let f = factorize(t as u128, budgets.rho_iterations)?;
    let (order, carmichael) = order_from_factorization(b % t, &f)?;
    Ok(OrderProfile {
        base: b,
        modulus: t,
        order,
        carmichael,
        factorization: f,
    })
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// `ℓ_b(p)`: the largest `k` with `p^k | b^{O_b(p)} - 1`.
///
/// Each candidate power is tested with a modular exponentiation rather than
/// by dividing the (possibly enormous) integer `b^{O_b(p)} - 1`.
pub fn ell(b: u64, p: u64) -> Result<u32> {
    require_prime(p)?;
    if b.is_multiple_of(p) {
        return Err(Error::not_coprime(b, p));
    }
    let o = BigUint::from(multiplicative_order(b, p)?);
    let bb = BigUint::from(b);
    let pp = BigUint::from(p);
    let mut pk = &pp * &pp;
    let mut k = 1u32;
    while bb.modpow(&o, &pk).is_one() {
        k += 1;
        pk *= &pp;
    }
    Ok(k)
}

/// `O_b(p^k)`.
///
/// Odd primes use the lifting law `O_b(p^k) = p^{k-ℓ} O_b(p)` beyond `ℓ`.
/// That law can fail at `p = 2` (for `b ≡ 3 mod 4` the order jumps at `k = 2`
/// and then lifts from there), so powers of two are computed directly.
pub fn order_prime_power(b: u64, p: u64, k: u32) -> Result<u64> {
    require_prime(p)?;
    if k == 0 {
        return Err(Error::Domain("exponent must be positive".into()));
    }
    if b.is_multiple_of(p) {
        return Err(Error::not_coprime(b, p));
    }
    if p == 2 {
        let m = 2u64
            .checked_pow(k)
            .ok_or(Error::Overflow("2^k exceeds 64 bits"))?;
        return multiplicative_order(b, m);
    }
    let base = multiplicative_order(b, p)?;
    let l = ell(b, p)?;
    if k <= l {
        return Ok(base);
    }
    p.checked_pow(k - l)
        .and_then(|x| x.checked_mul(base))
        .ok_or(Error::Overflow("order of prime power"))
}

/// `O_b(n)` for `n` given factored, as `lcm` of the prime-power orders.
///
/// For odd primes this is the product-times-lcm law with the lifting
/// exponents `ℓ_b(p_i) + l_i`; the 2-part, if any, is folded in directly.
pub fn order_composite(b: u64, f: &Factorization) -> Result<u64> {
    if f.value > u64::MAX as u128 {
        return Err(Error::Overflow("modulus exceeds 64 bits"));
    }
    if (f.value % b as u128).is_zero() && f.value > 1 || (b as u128).gcd(&f.value) != 1 {
        return Err(Error::not_coprime(b, f.value as u64));
    }
    let odd: Vec<&PrimeFactor> = f.factors.iter().filter(|pf| pf.prime != 2).collect();
    let mut base_orders = Vec::with_capacity(odd.len());
    for pf in &odd {
        base_orders.push(multiplicative_order(b, pf.prime as u64)?);
    }
    let lcm_base = base_orders.iter().fold(1u64, |a, &o| a.lcm(&o));
    let mut product = 1u64;
    for pf in &odd {
        let p = pf.prime as u64;
        let l = ell(b, p)?;
        // l_i: the power of p already present in lcm(O_b(p_j)).
        let mut extra = 0u32;
        let mut rest = lcm_base;
        while rest % p == 0 {
            rest /= p;
            extra += 1;
        }
        let lift = pf.exponent.saturating_sub(l + extra);
        product = p
            .checked_pow(lift)
            .and_then(|x| x.checked_mul(product))
            .ok_or(Error::Overflow("composite order"))?;
    }
    let mut ord = product
        .checked_mul(lcm_base)
        .ok_or(Error::Overflow("composite order"))?;
    if let Some(two) = f.factors.iter().find(|pf| pf.prime == 2) {
        ord = ord.lcm(&order_prime_power(b, 2, two.exponent)?);
    }
    Ok(ord)
}

/// `O_{b^r}(t) = O_b(t) / gcd(O_b(t), r)`.
pub fn order_base_power(b: u64, r: u64, t: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::Domain("power must be positive".into()));
    }
    let o = multiplicative_order(b, t)?;
    Ok(o / o.gcd(&r))
}

/// `ℓ_{2^r}(p) = ℓ_2(p) + v_p(r)` for an odd prime `p`.
pub fn ell_base_power_two(r: u64, p: u64) -> Result<u32> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::Domain("p must be odd".into()));
    }
    if r == 0 {
        return Err(Error::Domain("power must be positive".into()));
    }
    let mut k = 0u32;
    let mut s = r;
    while s.is_multiple_of(p) {
        s /= p;
        k += 1;
    }
    Ok(ell(2, p)? + k)
}
