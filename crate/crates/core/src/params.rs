//! Spectral-pair parameters and the exact envelope of the attractor `T(b, tC)`.
//!
//! For digit count `N` and cofactor `q` the base is `b = qN`, the measure
//! digits are `D = {0, .., N-1}` and the spectrum digits are the balanced
//! residues `C = (-N/2, N/2] ∩ Z`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_str;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairParams {
    #[serde(rename = "N")]
    n: i64,
    q: i64,
    b: i64,
    #[serde(rename = "digitsD")]
    digits_d: Vec<i64>,
    #[serde(rename = "digitsC")]
    digits_c: Vec<i64>,
}

/// Builds the parameter tuple for `(N, q)`; both must be at least 2.
pub fn make_params(n: i64, q: i64) -> Result<PairParams> {
    if n < 2 {
        return Err(Error::Domain(format!("digit count N = {n} must be at least 2")));
    }
    if q < 2 {
        return Err(Error::Domain(format!("cofactor q = {q} must be at least 2")));
    }
    let b = n
        .checked_mul(q)
        .filter(|b| *b < (1 << 31))
        .ok_or(Error::Overflow("base b = qN"))?;
    let c_min = -((n - 1) / 2);
    let c_max = n / 2;
    Ok(PairParams {
        n,
        q,
        b,
        digits_d: (0..n).collect(),
        digits_c: (c_min..=c_max).collect(),
    })
}

impl PairParams {
    pub fn new(n: i64, q: i64) -> Result<Self> {
        make_params(n, q)
    }

    #[inline]
    pub fn n(&self) -> i64 {
        self.n
    }

    #[inline]
    pub fn q(&self) -> i64 {
        self.q
    }

    #[inline]
    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn digits_d(&self) -> &[i64] {
        &self.digits_d
    }

    pub fn digits_c(&self) -> &[i64] {
        &self.digits_c
    }

    #[inline]
    pub fn c_min(&self) -> i64 {
        -((self.n - 1) / 2)
    }

    #[inline]
    pub fn c_max(&self) -> i64 {
        self.n / 2
    }

    pub fn contains_digit(&self, c: i64) -> bool {
        (self.c_min()..=self.c_max()).contains(&c)
    }

    /// The unique element of `C` congruent to `r` modulo `N`.
    #[inline]
    pub fn balanced_digit(&self, r: i64) -> i64 {
        let r = r.rem_euclid(self.n);
        if r > self.n / 2 {
            r - self.n
        } else {
            r
        }
    }

    /// `gcd(t, N) = 1`; the precondition for `t` to be complete at all.
    pub fn admits(&self, t: &BigInt) -> bool {
        !t.is_zero() && t.gcd(&BigInt::from(self.n)).is_one()
    }
}

/// A closed or half-open interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RationalInterval {
    #[serde(with = "serde_str::rational")]
    pub lo: BigRational,
    #[serde(with = "serde_str::rational")]
    pub hi: BigRational,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl RationalInterval {
    pub fn closed(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RationalInterval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = if self.lo_open { *x > self.lo } else { *x >= self.lo };
        let below = if self.hi_open { *x < self.hi } else { *x <= self.hi };
        above && below
    }

    pub fn contains_int(&self, x: &BigInt) -> bool {
        self.contains(&BigRational::from_integer(x.clone()))
    }

    /// Smallest and largest integers inside the interval, or `None` if it holds none.
    pub fn integer_bounds(&self) -> Option<(BigInt, BigInt)> {
        let mut lo = self.lo.ceil().to_integer();
        if self.lo_open && self.lo.is_integer() {
            lo += 1;
        }
        let mut hi = self.hi.floor().to_integer();
        if self.hi_open && self.hi.is_integer() {
            hi -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Number of nonzero integers inside the interval.
    pub fn nonzero_lattice_count(&self) -> BigInt {
        match self.integer_bounds() {
            None => BigInt::zero(),
            Some((lo, hi)) => {
                let total = &hi - &lo + 1;
                if lo <= BigInt::zero() && hi >= BigInt::zero() {
                    total - 1
                } else {
                    total
                }
            }
        }
    }

    pub fn scale(&self, k: &BigInt) -> RationalInterval {
        assert!(k.is_positive(), "scale factor must be positive");
        let k = BigRational::from_integer(k.clone());
        RationalInterval {
            lo: &self.lo * &k,
            hi: &self.hi * &k,
            lo_open: self.lo_open,
            hi_open: self.hi_open,
        }
    }
}

/// `[t·min(C)/(b-1), t·max(C)/(b-1)]`, the exact hull of `T(b, tC)`.
///
/// Both endpoints are attained by the constant digit sequences, so the
/// interval is closed.
pub fn attractor_envelope(params: &PairParams, t: impl Into<BigInt>) -> Result<RationalInterval> {
    let t = t.into();
    if !t.is_positive() {
        return Err(Error::Domain(format!("scaling t = {t} must be positive")));
    }
    let denom = BigInt::from(params.b - 1);
    let lo = BigRational::new(&t * params.c_min(), denom.clone());
    let hi = BigRational::new(&t * params.c_max(), denom);
    Ok(RationalInterval::closed(lo, hi))
}

/// Integer bounds `[lo, hi]` of the envelope for machine-sized `t`.
pub(crate) fn envelope_bounds_i64(params: &PairParams, t: i64) -> (i64, i64) {
    let d = params.b - 1;
    let lo = Integer::div_ceil(&(t as i128 * params.c_min() as i128), &(d as i128));
    let hi = Integer::div_floor(&(t as i128 * params.c_max() as i128), &(d as i128));
    (lo as i64, hi as i64)
}

/// Resource budgets shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Budgets {
    /// Maximum number of lattice nodes the exhaustive cycle search may visit.
    pub lattice_nodes: u64,
    /// Maximum number of powers walked by the group-element test.
    pub group_iterations: u64,
    /// Pollard rho iterations per cofactor.
    pub rho_iterations: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            lattice_nodes: 100_000_000,
            group_iterations: 1_000_000,
            rho_iterations: 10_000_000,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn smallest_case() {
        let p = make_params(2, 2).unwrap();
        assert_eq!(p.b(), 4);
        assert_eq!(p.digits_d(), &[0, 1]);
        assert_eq!(p.digits_c(), &[0, 1]);
    }

    #[test]
    fn golden_parameter_sets() {
        let p = make_params(3, 2).unwrap();
        assert_eq!((p.n(), p.q(), p.b()), (3, 2, 6));
        assert_eq!(p.digits_d(), &[0, 1, 2]);
        assert_eq!(p.digits_c(), &[-1, 0, 1]);

        let p = make_params(2, 3).unwrap();
        assert_eq!(p.b(), 6);
        assert_eq!(p.digits_c(), &[0, 1]);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(matches!(make_params(1, 5), Err(Error::Domain(_))));
        assert!(matches!(make_params(4, 1), Err(Error::Domain(_))));
        assert!(make_params(0, 0).is_err());
    }

    #[test]
    fn balanced_digits_cover_residues() {
        for n in 2..12 {
            let p = make_params(n, 2).unwrap();
            let c = p.digits_c();
            assert_eq!(c.len() as i64, n);
            assert!(c.contains(&0));
            assert_eq!(*c.first().unwrap(), -((n - 1) / 2));
            assert_eq!(*c.last().unwrap(), n / 2);
            let mut residues: Vec<i64> = c.iter().map(|x| x.rem_euclid(n)).collect();
            residues.sort();
            assert_eq!(residues, (0..n).collect::<Vec<_>>());
            for r in -3 * n..3 * n {
                let d = p.balanced_digit(r);
                assert!(p.contains_digit(d));
                assert_eq!((d - r).rem_euclid(n), 0);
            }
        }
    }

    #[test]
    fn envelope_examples() {
        let p = make_params(3, 2).unwrap();
        let e = attractor_envelope(&p, 3154757).unwrap();
        assert_eq!(e.lo, rat(-3154757, 5));
        assert_eq!(e.hi, rat(3154757, 5));

        let p = make_params(2, 3).unwrap();
        let e = attractor_envelope(&p, 55987).unwrap();
        assert_eq!(e.lo, rat(0, 1));
        assert_eq!(e.hi, rat(55987, 5));

        let p = make_params(2, 2).unwrap();
        let e = attractor_envelope(&p, 1).unwrap();
        assert_eq!(e.hi, rat(1, 3));
        assert_eq!(e.nonzero_lattice_count(), BigInt::zero());
    }

    #[test]
    fn envelope_requires_positive_t() {
        let p = make_params(2, 2).unwrap();
        assert!(attractor_envelope(&p, 0).is_err());
        assert!(attractor_envelope(&p, -4).is_err());
    }

    #[test]
    fn even_n_matches_tighter_region() {
        // For even N the hull is [-t(N-2)/(2(b-1)), tN/(2(b-1))].
        for (n, q) in [(2, 2), (4, 2), (6, 3)] {
            let p = make_params(n, q).unwrap();
            let t = 1001i64;
            let e = attractor_envelope(&p, t).unwrap();
            assert_eq!(e.lo, rat(-t * (n - 2), 2 * (p.b() - 1)));
            assert_eq!(e.hi, rat(t * n, 2 * (p.b() - 1)));
        }
    }

    #[test]
    fn i64_bounds_agree_with_rational() {
        for (n, q) in [(2, 2), (3, 2), (4, 3), (5, 2)] {
            let p = make_params(n, q).unwrap();
            for t in 1..300 {
                let e = attractor_envelope(&p, t).unwrap();
                let (lo, hi) = envelope_bounds_i64(&p, t);
                let (blo, bhi) = e.integer_bounds().unwrap();
                assert_eq!((BigInt::from(lo), BigInt::from(hi)), (blo, bhi));
            }
        }
    }

    #[test]
    fn json_uses_exact_rationals() {
        let p = make_params(3, 2).unwrap();
        let e = attractor_envelope(&p, 10).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"lo":"-2/1","hi":"2/1","loOpen":false,"hiOpen":false}"#);
        let back: RationalInterval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn envelope_scales_linearly(n in 2i64..9, q in 2i64..9, t in 1i64..100_000, k in 1i64..50) {
                let p = make_params(n, q).unwrap();
                let e = attractor_envelope(&p, t).unwrap();
                let ek = attractor_envelope(&p, t * k).unwrap();
                prop_assert_eq!(e.scale(&BigInt::from(k)), ek);
            }
        }
    }
}
