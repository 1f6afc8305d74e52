use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{attractor_envelope, PairParams};
use crate::serde_str;

/// A nonzero integer cycle `b·x_{k+1} = x_k + t·c_k`, the proof that `t` is
/// incomplete.
///
/// `digits[k]` carries `values[k]` to `values[k + 1]` (indices cyclic).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "serde_str::bigint")]
    pub t: BigInt,
    pub period: usize,
    #[serde(with = "serde_str::bigint_vec")]
    pub values: Vec<BigInt>,
    pub digits: Vec<i64>,
}

fn rotation_key(x: &BigInt) -> (BigInt, bool) {
    (x.abs(), x.is_negative())
}

impl Witness {
    /// Builds a witness from a cycle, rotating it into canonical position.
    pub fn from_cycle(t: BigInt, values: Vec<BigInt>, digits: Vec<i64>) -> Self {
        let mut w = Witness {
            t,
            period: values.len(),
            values,
            digits,
        };
        w.canonicalize();
        w
    }

    /// Rotates so the cycle starts at its smallest absolute value, the
    /// positive one winning a tie.
    pub fn canonicalize(&mut self) {
        let start = (0..self.values.len())
            .min_by_key(|&i| rotation_key(&self.values[i]))
            .unwrap_or(0);
        self.values.rotate_left(start);
        self.digits.rotate_left(start);
    }

    pub fn start(&self) -> &BigInt {
        &self.values[0]
    }

    /// The witness for `k·t` obtained by scaling every value by `k`.
    pub fn scaled(&self, k: &BigInt) -> Witness {
        let k = k.abs();
        Witness {
            t: &self.t * &k,
            period: self.period,
            values: self.values.iter().map(|x| x * &k).collect(),
            digits: self.digits.clone(),
        }
    }

    /// The cycle's values sorted, for order-free comparison.
    pub fn value_multiset(&self) -> Vec<BigInt> {
        let mut v = self.values.clone();
        v.sort();
        v
    }
}

/// Builds the periodic orbit generated by a repeating digit string.
///
/// Each value is `t·(c_j + c_{j+1} b + ...)/(b^n - 1)` read cyclically from
/// position `j`. Fails if any of these is not an integer or a digit lies
/// outside `C`. The result is reduced to its minimal period and rotated into
/// canonical position.
pub fn witness_from_digits(params: &PairParams, t: &BigInt, digits: &[i64]) -> Result<Witness> {
    let n = digits.len();
    if n == 0 {
        return Err(Error::Domain("empty digit string".into()));
    }
    if let Some(c) = digits.iter().find(|c| !params.contains_digit(**c)) {
        return Err(Error::Domain(format!("digit {c} is not in C")));
    }
    let n = minimal_period_of(digits);
    let digits = &digits[..n];
    let b = BigInt::from(params.b());
    let den = num_traits::pow(b.clone(), n) - 1;
    // Horner from the top gives c_0 + c_1 b + ... for the first value.
    let mut s = BigInt::zero();
    for &c in digits.iter().rev() {
        s = s * &b + c;
    }
    let mut values = Vec::with_capacity(n);
    let b_n = &den + 1;
    for (j, &dj) in digits.iter().enumerate() {
        let num = t * &s;
        let (x, r) = num.div_rem(&den);
        if !r.is_zero() {
            return Err(Error::Domain(format!(
                "closed form is not an integer at position {j}"
            )));
        }
        if x.is_zero() {
            return Err(Error::Domain("digit string yields the zero orbit".into()));
        }
        values.push(x);
        // Shift the window by one digit: drop c_j, append c_j at the top.
        let c = BigInt::from(dj);
        s = (&s - &c) / &b + &c * (&b_n / &b);
    }
    Ok(Witness::from_cycle(t.clone(), values, digits.to_vec()))
}

fn minimal_period_of<T: PartialEq>(xs: &[T]) -> usize {
    let n = xs.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (0..n).all(|i| xs[i] == xs[(i + d) % n]))
        .unwrap_or(n)
}

/// Every violated witness invariant, in a fixed order. Empty means valid.
pub fn witness_violations(params: &PairParams, w: &Witness) -> Vec<String> {
    let mut out = Vec::new();
    let n = w.period;
    if n == 0 {
        out.push("period must be positive".to_string());
        return out;
    }
    if w.values.len() != n || w.digits.len() != n {
        out.push(format!(
            "period {n} but {} values and {} digits",
            w.values.len(),
            w.digits.len()
        ));
        return out;
    }
    if !w.t.is_positive() {
        out.push("t must be positive".to_string());
        return out;
    }
    for (k, c) in w.digits.iter().enumerate() {
        if !params.contains_digit(*c) {
            out.push(format!("digit c_{k} = {c} is not in C"));
        }
    }
    let b = BigInt::from(params.b());
    for k in 0..n {
        let lhs = &b * &w.values[(k + 1) % n];
        let rhs = &w.values[k] + &w.t * w.digits[k];
        if lhs != rhs {
            out.push(format!("recurrence fails at k = {k}"));
        }
    }
    match attractor_envelope(params, w.t.clone()) {
        Ok(env) => {
            for (k, x) in w.values.iter().enumerate() {
                if x.is_zero() {
                    out.push(format!("value x_{k} is zero"));
                } else if !env.contains_int(x) {
                    out.push(format!("value x_{k} = {x} lies outside the envelope"));
                }
            }
        }
        Err(e) => out.push(e.to_string()),
    }
    let mut s = BigInt::zero();
    for &c in w.digits.iter().rev() {
        s = s * &b + c;
    }
    let den = num_traits::pow(b, n) - 1;
    let (x0, r) = (&w.t * s).div_rem(&den);
    if !r.is_zero() {
        out.push("closed form is not divisible by b^n - 1".to_string());
    } else if x0 != w.values[0] {
        out.push(format!("closed form gives {x0}, cycle starts at {}", w.values[0]));
    }
    if minimal_period_of(&w.values) != n {
        out.push(format!("period {n} is not minimal"));
    }
    let head = rotation_key(&w.values[0]);
    if w.values.iter().any(|x| rotation_key(x) < head) {
        out.push("cycle is not in canonical rotation".to_string());
    }
    out
}

/// `true` iff every witness invariant holds, checked in exact arithmetic.
pub fn witness_verify(params: &PairParams, w: &Witness) -> bool {
    witness_violations(params, w).is_empty()
}

/// `gcd(t, x_k) = 1` for every value of the cycle.
pub fn values_coprime_to_t(w: &Witness) -> bool {
    w.values.iter().all(|x| x.gcd(&w.t).is_one())
}
