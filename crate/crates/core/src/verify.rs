//! Self-check suites run by `cnum verify`.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    cert_power_of_two_cases, classify, witness_verify, Prediction,
};
use crate::error::Result;
use crate::modorder::{
    factorize, multiplicative_order, order_base_power, order_composite, order_prime_power,
    DEFAULT_RHO_BUDGET,
};
use crate::params::{make_params, Budgets};
use crate::primitive::{gen_alpha_family, gen_primitive_complete_family, gen_repunit_incomplete};
use crate::survey::primes_up_to;

pub const SIX_PAIRS: [(i64, i64); 6] = [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Witness,
    Orders,
    Families,
    Section6,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Witness, Suite::Orders, Suite::Families, Suite::Section6];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Witness => "witness",
            Suite::Orders => "orders",
            Suite::Families => "families",
            Suite::Section6 => "section6",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

pub fn run(suite: Suite) -> Result<SuiteReport> {
    let mut c = Checks(Vec::new());
    match suite {
        Suite::Witness => witness_suite(&mut c)?,
        Suite::Orders => orders_suite(&mut c)?,
        Suite::Families => families_suite(&mut c)?,
        Suite::Section6 => section6_suite(&mut c)?,
    }
    Ok(SuiteReport { suite, checks: c.0 })
}

pub const GOLDEN_A: [i64; 11] = [
    2015, -525457, -613369, -628021, -630463, -630870, -105145, -543317, 435240, 72540, 12090,
];
pub const GOLDEN_B: [i64; 7] = [311, 9383, 10895, 11147, 11189, 11196, 1866];

fn sorted(v: &[i64]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    out.sort();
    out
}

fn witness_suite(c: &mut Checks) -> Result<()> {
    for (n, q, t, golden) in [(3, 2, 3154757i64, &GOLDEN_A[..]), (2, 3, 55987, &GOLDEN_B[..])] {
        let params = make_params(n, q)?;
        let cls = classify(&params, t)?;
        let want = sorted(golden);
        let hit = cls
            .all_cycles()
            .into_iter()
            .find(|w| w.value_multiset() == want);
        let ok = hit.is_some_and(|w| w.period == golden.len() && witness_verify(&params, w));
        c.add(
            format!("golden cycle N={n} q={q} t={t}"),
            ok && cls.all_cycles().iter().all(|w| witness_verify(&params, w)),
            format!("{} cycles found", cls.all_cycles().len()),
        );
    }
    let params = make_params(2, 2)?;
    let cls = classify(&params, 3)?;
    let ok = cls
        .witness()
        .is_some_and(|w| w.values == [BigInt::from(1)] && w.digits == [1]);
    c.add("fixed point for t = b - 1", ok, "");
    Ok(())
}

fn naive_order(b: u64, t: u64) -> u64 {
    let mut x = b % t;
    let mut n = 1;
    while x != 1 % t {
        x = x * b % t;
        n += 1;
    }
    n
}

fn orders_suite(c: &mut Checks) -> Result<()> {
    let mut bad = 0;
    for b in [4u64, 6, 8, 9] {
        for t in 1..=2000u64 {
            if b.gcd(&t) == 1 && multiplicative_order(b, t)? != naive_order(b, t) {
                bad += 1;
            }
        }
    }
    c.add("order agrees with naive loop", bad == 0, format!("{bad} disagreements"));

    let mut bad = 0;
    for b in [2u64, 3, 6, 10] {
        for t in 2..=3000u64 {
            if b.gcd(&t) != 1 {
                continue;
            }
            let f = factorize(t as u128, DEFAULT_RHO_BUDGET)?;
            let direct = naive_order(b, t);
            if order_composite(b, &f)? != direct {
                bad += 1;
            }
            if order_base_power(b, 2, t)? != naive_order(b * b, t) {
                bad += 1;
            }
        }
        for p in primes_up_to(200) {
            if b % p == 0 {
                continue;
            }
            for k in 1..=3u32 {
                if order_prime_power(b, p, k)? != naive_order(b, p.pow(k)) {
                    bad += 1;
                }
            }
        }
    }
    c.add("composition laws agree with direct orders", bad == 0, format!("{bad} disagreements"));

    let mut bad = 0;
    for t in 1..=300u64 {
        for b in [2u64, 6] {
            if b.gcd(&t) != 1 {
                continue;
            }
            let o = naive_order(b, t);
            let mut pow = 1u64;
            for n in 1..=50u64 {
                pow = pow * (b % t) % t;
                if (pow == 1 % t) != (n % o == 0) {
                    bad += 1;
                }
            }
        }
    }
    c.add("t | b^n - 1 iff O_b(t) | n", bad == 0, format!("{bad} disagreements"));
    Ok(())
}

fn families_suite(c: &mut Checks) -> Result<()> {
    let budgets = Budgets::default();
    for (n, q) in SIX_PAIRS {
        let params = make_params(n, q)?;
        let rows = gen_primitive_complete_family(&params, 4, &budgets)?;
        let ok = rows.iter().all(|r| r.verdict == "Complete" && r.coprime_to_b);
        let list: Vec<String> = rows.iter().map(|r| format!("{}:{}", r.t, r.verdict)).collect();
        c.add(format!("complete family N={n} q={q}"), ok, list.join(" "));
    }
    let params = make_params(2, 2)?;
    let fam = gen_alpha_family(&params, 8, &budgets)?;
    let ok = fam.members.iter().all(|m| witness_verify(&params, &m.witness))
        && fam.coprimality_failures.is_empty();
    c.add(
        "repunits α_k, 4 ≤ k ≤ 8, at b = 4",
        ok,
        format!("{} pairs checked", fam.pairs_checked),
    );
    let rep = gen_repunit_incomplete(&params, &[])?;
    let ok = rep.identity_holds
        && rep.divisibility.iter().all(|(_, divides)| !divides)
        && rep.witness.as_ref().is_some_and(|w| witness_verify(&params, w));
    c.add("long repunit at b = 4", ok, format!("n = {}, t = {}", rep.n, rep.t));
    Ok(())
}

fn section6_suite(c: &mut Checks) -> Result<()> {
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in 2..=5u32 {
        let params = make_params(2, 1 << (r - 1))?;
        for p in primes_up_to(50).into_iter().filter(|&p| p > 2) {
            for n in 1..=2u32 {
                let rep = cert_power_of_two_cases(r, p, n)?;
                let Some(pred) = rep.prediction else { continue };
                let cls = classify(&params, p.pow(n))?;
                checked += 1;
                let agrees = match pred {
                    Prediction::Complete => cls.is_complete(),
                    Prediction::Incomplete => cls.is_incomplete(),
                };
                if !agrees {
                    bad.push(format!("r={r} p={p} n={n}"));
                }
            }
        }
    }
    c.add(
        "power-of-two predictions match classification",
        bad.is_empty(),
        format!("{checked} predictions checked; mismatches: [{}]", bad.join(", ")),
    );
    Ok(())
}
