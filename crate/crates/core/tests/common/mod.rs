//! Independent oracles shared by the integration tests. Nothing here calls
//! into the classifier; the arithmetic is done from first principles.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use complete_numbers::{make_params, PairParams};

pub const SIX_PAIRS: [(i64, i64); 6] = [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3)];

pub const GOLDEN_A: [i64; 11] = [
    2015, -525457, -613369, -628021, -630463, -630870, -105145, -543317, 435240, 72540, 12090,
];
pub const GOLDEN_A_DIGITS: [i64; 11] = [-1, -1, -1, -1, -1, 0, -1, 1, 0, 0, 0];
pub const GOLDEN_B: [i64; 7] = [311, 9383, 10895, 11147, 11189, 11196, 1866];
pub const GOLDEN_B_DIGITS: [i64; 7] = [1, 1, 1, 1, 1, 0, 0];

pub fn p(n: i64, q: i64) -> PairParams {
    make_params(n, q).unwrap()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `(-N/2, N/2] ∩ Z`.
pub fn balanced_digits(n: i64) -> Vec<i64> {
    (-n..=n).filter(|&c| 2 * c > -n && 2 * c <= n).collect()
}

/// Integer range of `[t·min C/(b-1), t·max C/(b-1)]`.
pub fn envelope(n: i64, q: i64, t: i64) -> (i64, i64) {
    let b = n * q;
    let c = balanced_digits(n);
    let (cmin, cmax) = (*c.first().unwrap(), *c.last().unwrap());
    (Integer::div_ceil(&(t * cmin), &(b - 1)), Integer::div_floor(&(t * cmax), &(b - 1)))
}

/// Smallest `k ≥ 1` with `b^k ≡ 1 (mod t)`, by stepping.
pub fn naive_order(b: u64, t: u64) -> u64 {
    assert_eq!(gcd(b, t), 1);
    if t == 1 {
        return 1;
    }
    let mut x = b % t;
    let mut k = 1;
    while x != 1 {
        x = x * b % t;
        k += 1;
    }
    k
}

/// A nonzero integer `x_0 = t(c_0 + b c_1 + ... + b^{n-1} c_{n-1})/(b^n - 1)`
/// with every `c_k ∈ C`, searched over every start in the envelope and every
/// period up to the number of envelope points. Returns `(n, x_0, digits)`.
pub fn periodic_oracle(n_: i64, q: i64, t: u64) -> Option<(usize, i64, Vec<i64>)> {
    let b = n_ * q;
    let cs = balanced_digits(n_);
    let (lo, hi) = envelope(n_, q, t as i64);
    let starts: Vec<i64> = (lo..=hi).filter(|&x| x != 0).collect();
    let bb = BigInt::from(b);
    let tt = BigInt::from(t);
    let mut bn = BigInt::one();
    let mut bn_mod = 1u128 % t as u128;
    for n in 1..=starts.len() {
        bn *= &bb;
        bn_mod = bn_mod * b as u128 % t as u128;
        let den_mod = (bn_mod + t as u128 - 1 % t as u128) % t as u128;
        let den = &bn - 1;
        for &x0 in &starts {
            let x_mod = (x0 as i128).rem_euclid(t as i128) as u128;
            if !(x_mod * den_mod).is_multiple_of(t as u128) {
                continue;
            }
            let s = (BigInt::from(x0) * &den) / &tt;
            if let Some(digits) = expand(&s, n, &bb, &cs) {
                return Some((n, x0, digits));
            }
        }
    }
    None
}

/// Writes `s = Σ_{k<n} b^k c_k` with `c_k ∈ cs` if possible.
fn expand(s: &BigInt, n: usize, b: &BigInt, cs: &[i64]) -> Option<Vec<i64>> {
    let mut s = s.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let r = s.mod_floor(b);
        let c = cs.iter().copied().find(|&c| (BigInt::from(c) - &r).is_multiple_of(b))?;
        out.push(c);
        s = (s - c) / b;
    }
    s.is_zero().then_some(out)
}

/// Nonzero points of `T(b, tC) ∩ Z`, as the greatest subset of the envelope
/// closed under the backward map `x ↦ bx - tc`.
pub fn attractor_points(n_: i64, q: i64, t: i64) -> Vec<i64> {
    let b = n_ * q;
    let cs = balanced_digits(n_);
    let (lo, hi) = envelope(n_, q, t);
    let mut alive = vec![true; (hi - lo + 1) as usize];
    loop {
        let mut changed = false;
        for x in lo..=hi {
            if !alive[(x - lo) as usize] {
                continue;
            }
            let keep = cs.iter().any(|&c| {
                let y = b * x - t * c;
                (lo..=hi).contains(&y) && alive[(y - lo) as usize]
            });
            if !keep {
                alive[(x - lo) as usize] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (lo..=hi).filter(|&x| x != 0 && alive[(x - lo) as usize]).collect()
}

/// Checks `b·x_{k+1} = x_k + t·c_k` around the cycle, from scratch.
pub fn cycle_holds(b: i64, t: &BigInt, values: &[BigInt], digits: &[i64]) -> bool {
    let n = values.len();
    n > 0
        && digits.len() == n
        && (0..n).all(|k| BigInt::from(b) * &values[(k + 1) % n] == &values[k] + t * digits[k])
}

pub fn sorted(v: &[i64]) -> Vec<i64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

pub fn sorted_big(v: &[BigInt]) -> Vec<BigInt> {
    let mut v = v.to_vec();
    v.sort();
    v
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Knuth's MMIX linear congruential generator.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}
