//! Integer factorization: trial division, Miller-Rabin, and Brent's variant
//! of Pollard rho with deterministic seeds.
//!
//! Primality is proven for values below 2^64 (the fixed witness set is
//! deterministic there). Larger factors pass a strong probable-prime battery
//! and are flagged `probable`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_str;

const TRIAL_BOUND: u128 = 10_000;

/// Witnesses making Miller-Rabin deterministic for every n < 2^64.
const DETERMINISTIC_BASES: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const EXTRA_BASES: [u128; 8] = [41, 43, 47, 53, 59, 61, 67, 71];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Primality {
    Composite,
    Prime,
    ProbablePrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrimeFactor {
    #[serde(with = "serde_str::display")]
    pub prime: u128,
    pub exponent: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub probable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Factorization {
    #[serde(with = "serde_str::display")]
    pub value: u128,
    pub factors: Vec<PrimeFactor>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Builds a factorization from `(prime, exponent)` pairs, checking each prime.
    pub fn from_pairs(pairs: &[(u128, u32)]) -> Result<Self> {
        let mut value: u128 = 1;
        let mut factors = Vec::with_capacity(pairs.len());
        for &(p, e) in pairs {
            let probable = match primality(p) {
                Primality::Composite => return Err(Error::NotPrime(p.to_string())),
                Primality::Prime => false,
                Primality::ProbablePrime => true,
            };
            let pe = p.checked_pow(e).ok_or(Error::Overflow("factorization value"))?;
            value = value
                .checked_mul(pe)
                .ok_or(Error::Overflow("factorization value"))?;
            if e > 0 {
                factors.push(PrimeFactor {
                    prime: p,
                    exponent: e,
                    probable,
                });
            }
        }
        factors.sort_by_key(|f| f.prime);
        for w in factors.windows(2) {
            if w[0].prime == w[1].prime {
                return Err(Error::Domain(format!("repeated prime {}", w[0].prime)));
            }
        }
        Ok(Factorization { value, factors })
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].exponent == 1
    }

    pub fn all_proven(&self) -> bool {
        self.factors.iter().all(|f| !f.probable)
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|f| f.prime)
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u128> {
        let mut divs = vec![1u128];
        for f in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (f.exponent as usize + 1));
            for &d in &divs {
                let mut pk = 1u128;
                for _ in 0..=f.exponent {
                    next.push(d * pk);
                    pk *= f.prime;
                }
            }
            divs = next;
        }
        divs.sort_unstable();
        divs
    }

    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|f| f.prime.pow(f.exponent))
            .product()
    }
}

#[inline]
pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    // Wide modulus: shift-and-add keeps every intermediate below 2m < 2^129
    // only if we reduce before doubling, so operate on residues.
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

pub(crate) fn pow_mod_u128(mut a: u128, mut e: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    a %= m;
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

fn strong_probable_prime(n: u128, base: u128) -> bool {
    let base = base % n;
    if base == 0 {
        return true;
    }
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    let mut x = pow_mod_u128(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality of `n`, proven below 2^64 and probable above.
pub fn primality(n: u128) -> Primality {
    if n < 2 {
        return Primality::Composite;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return Primality::Prime;
        }
        if n.is_multiple_of(p) {
            return Primality::Composite;
        }
    }
    if !DETERMINISTIC_BASES.iter().all(|&a| strong_probable_prime(n, a)) {
        return Primality::Composite;
    }
    if n <= u64::MAX as u128 {
        return Primality::Prime;
    }
    if EXTRA_BASES.iter().all(|&a| strong_probable_prime(n, a)) {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    }
}

pub fn is_prime(n: u64) -> bool {
    primality(n as u128) == Primality::Prime
}

/// Brent's cycle-finding rho for a composite `n` with no small factors.
/// Returns a nontrivial factor, spending at most `budget` iterations.
fn rho_split(n: u128, budget: u64) -> Option<u128> {
    const BATCH: u64 = 128;
    let mut spent = 0u64;
    for c in 1u128.. {
        if spent >= budget {
            return None;
        }
        let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut r, mut acc) = (2u128, 1u64, 1u128);
        let mut x = y;
        let mut ys = y;
        let mut g = 1u128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys = y;
                let steps = BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    acc = mul_mod(acc, x.abs_diff(y), n);
                }
                g = acc.gcd(&n);
                k += steps;
            }
            spent += r;
            r *= 2;
            if spent >= budget && g == 1 {
                return None;
            }
        }
        if g == n {
            // Batch overshot; retrace one step at a time.
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

/// Complete factorization of `n >= 1`.
///
/// Trial division removes factors below 10^4, then Brent-Pollard rho splits
/// the remaining cofactors with at most `rho_budget` iterations per split.
pub fn factorize(n: u128, rho_budget: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut primes: Vec<(u128, bool)> = Vec::new();
    let mut m = n;
    let mut d = 2u128;
    while d < TRIAL_BOUND && d * d <= m {
        while m.is_multiple_of(d) {
            primes.push((d, false));
            m /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = Vec::new();
    if m > 1 {
        stack.push(m);
    }
    while let Some(c) = stack.pop() {
        match primality(c) {
            Primality::Prime => primes.push((c, false)),
            Primality::ProbablePrime => primes.push((c, true)),
            Primality::Composite => {
                if let Some(r) = exact_square_root(c) {
                    stack.push(r);
                    stack.push(r);
                    continue;
                }
                let f = rho_split(c, rho_budget).ok_or_else(|| Error::FactorizationLimit {
                    n: c.to_string(),
                    budget: rho_budget,
                })?;
                stack.push(f);
                stack.push(c / f);
            }
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<PrimeFactor> = Vec::new();
    for (p, probable) in primes {
        match factors.last_mut() {
            Some(last) if last.prime == p => last.exponent += 1,
            _ => factors.push(PrimeFactor {
                prime: p,
                exponent: 1,
                probable,
            }),
        }
    }
    Ok(Factorization { value: n, factors })
}

fn exact_square_root(n: u128) -> Option<u128> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}
