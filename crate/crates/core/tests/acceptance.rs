//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS or FAIL line; exits nonzero on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;

use common::*;
use complete_numbers::classifier::{classify, witness_verify};
use complete_numbers::fourier::{
    default_grid, incompleteness_evidence, orthogonality_check, q_lambda, TruncationSpec,
    EVIDENCE_LEVEL,
};
use complete_numbers::modorder::{
    factorize, is_prime, multiplicative_order, order_base_power, order_composite,
    order_prime_power, DEFAULT_RHO_BUDGET,
};
use complete_numbers::primitive::{
    gen_alpha_family, gen_primitive_complete_family, gen_repunit_incomplete, primitive_kind,
    PrimitiveKind,
};
use complete_numbers::survey::{
    density_report, dyadic_grid, euler_phi, scan, scan_csv_string, ScanOptions, ScanRow,
};
use complete_numbers::Budgets;

const SCAN_XMAX: u64 = 10_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Scan {
    n: i64,
    q: i64,
    rows: Vec<ScanRow>,
    csv: String,
    elapsed: Duration,
}

/// One scan per pair to `SCAN_XMAX` with 8 workers, shared by several criteria.
fn scans() -> &'static [Scan] {
    static SCANS: OnceLock<Vec<Scan>> = OnceLock::new();
    SCANS.get_or_init(|| {
        SIX_PAIRS
            .iter()
            .map(|&(n, q)| {
                let opts = ScanOptions { workers: 8, ..ScanOptions::default() };
                let start = Instant::now();
                let rows = scan(&p(n, q), SCAN_XMAX, &opts).expect("scan");
                let elapsed = start.elapsed();
                let csv = scan_csv_string(&rows).expect("csv");
                Scan { n, q, rows, csv, elapsed }
            })
            .collect()
    })
}

fn values(vals: &[BigInt]) -> Vec<i64> {
    vals.iter().map(|v| i64::try_from(v).unwrap()).collect()
}

fn c1_golden_a() -> Outcome {
    let start = Instant::now();
    let c = classify(&p(3, 2), 3154757).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let want = sorted(&GOLDEN_A);
    let hit = c
        .all_cycles()
        .into_iter()
        .find(|w| w.period == 11 && sorted(&values(&w.values)) == want);
    let ok = c.is_incomplete() && hit.is_some_and(|w| witness_verify(&p(3, 2), w)) && secs < 5.0;
    check(ok, format!("{} cycles, golden 11-cycle present: {}, {secs:.2} s", c.all_cycles().len(), hit.is_some()))
}

fn c2_golden_b() -> Outcome {
    let start = Instant::now();
    let c = classify(&p(2, 3), 55987).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let w = c.witness().ok_or("no witness")?;
    let ok = w.period == 7 && sorted(&values(&w.values)) == sorted(&GOLDEN_B) && secs < 1.0;
    check(ok, format!("witness {:?}, {secs:.3} s", values(&w.values)))
}

fn c3_exam_bundle() -> Outcome {
    let start = Instant::now();
    let ts = [23u64, 3154757, 72559411];
    let orders: Vec<u64> = ts.iter().map(|&t| multiplicative_order(6, t).unwrap()).collect();
    let naive: Vec<u64> = ts.iter().map(|&t| naive_order(6, t)).collect();
    let params = p(3, 2);
    let c = classify(&params, 72559411).map_err(|e| e.to_string())?;
    let prim = primitive_kind(&params, &BigInt::from(72559411)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let not_primitive = matches!(prim.kind, PrimitiveKind::NotPrimitive { .. });
    let ok = orders == [11, 11, 11]
        && naive == orders
        && c.is_incomplete()
        && c.witness().is_some_and(|w| witness_verify(&params, w))
        && not_primitive
        && secs < 60.0;
    check(
        ok,
        format!("orders {orders:?}, classify {}, primitive_kind {:?}, {secs:.2} s", c.kind(), prim.kind),
    )
}

fn c4_corollaries() -> Outcome {
    let mut violations = Vec::new();
    let mut multiples = 0u64;
    for s in scans() {
        let (n, q) = (s.n, s.q);
        let b = n * q;
        let params = p(n, q);
        let kind = |t: i64| classify(&params, t).unwrap().kind();
        if kind(b - 1) != "Incomplete" {
            violations.push(format!("({n},{q}) b-1"));
        }
        if n >= 3 && kind(b + 1) != "Incomplete" {
            violations.push(format!("({n},{q}) b+1"));
        }
        for t in (1..).take_while(|t| n * t < 2 * (b - 1)) {
            if t.gcd(&n) == 1 && kind(t) != "Complete" {
                violations.push(format!("({n},{q}) small t = {t}"));
            }
        }
        for r in s.rows.iter().filter(|r| r.verdict_label() == "Incomplete") {
            for kt in (2 * r.t..=SCAN_XMAX).step_by(r.t as usize) {
                if kt.gcd(&(n as u64)) != 1 {
                    continue;
                }
                multiples += 1;
                if s.rows[kt as usize - 1].verdict_label() != "Incomplete" {
                    violations.push(format!("({n},{q}) {kt} = k·{}", r.t));
                }
            }
        }
    }
    check(
        violations.is_empty(),
        format!("{multiples} multiples checked, violations: {violations:?}"),
    )
}

fn c5_periodic_oracle() -> Outcome {
    let start = Instant::now();
    let mut disagreements = Vec::new();
    let mut checked = 0;
    for (n, q) in SIX_PAIRS {
        let params = p(n, q);
        for t in 1..=500u64 {
            if gcd(t, n as u64) != 1 {
                continue;
            }
            checked += 1;
            let c = classify(&params, t as i64).map_err(|e| e.to_string())?;
            let oracle = periodic_oracle(n, q, t);
            if let Some((_, x0, digits)) = &oracle {
                let w = witness_from_oracle(n, q, t, *x0, digits);
                if !w {
                    disagreements.push(format!("({n},{q}) t = {t}: oracle cycle fails recurrence"));
                }
            }
            if c.is_incomplete() != oracle.is_some() {
                disagreements.push(format!("({n},{q}) t = {t}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        disagreements.is_empty() && secs < 600.0,
        format!("{checked} values, disagreements: {disagreements:?}, {secs:.1} s"),
    )
}

/// Rebuilds the orbit of `x0` under the oracle's digits and checks it closes.
fn witness_from_oracle(n: i64, q: i64, t: u64, x0: i64, digits: &[i64]) -> bool {
    let b = n * q;
    let t = t as i64;
    let mut x = x0;
    for &c in digits {
        let num = x + t * c;
        if num % b != 0 {
            return false;
        }
        x = num / b;
        if x == 0 {
            return false;
        }
    }
    x == x0
}

fn c6_primitive_period() -> Outcome {
    let mut violations = Vec::new();
    let mut found = 0;
    for s in scans() {
        let b = (s.n * s.q) as u64;
        let incomplete = |t: u64| s.rows[t as usize - 1].verdict_label() == "Incomplete";
        for r in &s.rows {
            let t = r.t;
            if !incomplete(t) || (1..t).any(|d| t % d == 0 && incomplete(d)) {
                continue;
            }
            found += 1;
            if gcd(t, b) != 1 {
                violations.push(format!("({},{}) t = {t} shares a factor with b", s.n, s.q));
                continue;
            }
            let order = naive_order(b, t) as usize;
            let c = r.classification().unwrap();
            for w in c.all_cycles() {
                let coprime = w.values.iter().all(|x| x.gcd(&BigInt::from(t)) == BigInt::from(1));
                if w.period != order || !coprime {
                    violations.push(format!("({},{}) t = {t}: period {} vs O = {order}", s.n, s.q, w.period));
                }
            }
        }
    }
    check(
        violations.is_empty() && found > 0,
        format!("{found} primitive incomplete values, violations: {violations:?}"),
    )
}

fn c7_orders() -> Outcome {
    let mut bad = Vec::new();
    for b in [2u64, 4, 6, 8, 9, 10] {
        for t in 1..=10_000u64 {
            if gcd(b, t) == 1 && multiplicative_order(b, t).unwrap() != naive_order(b, t) {
                bad.push(format!("O_{b}({t})"));
            }
        }
    }
    let mut rng = Lcg(0x5eed);
    let mut sampled = 0;
    while sampled < 1000 {
        let b = 2 + rng.below(19);
        let t = 1 + rng.below(200_000);
        if gcd(b, t) != 1 {
            continue;
        }
        sampled += 1;
        let f = factorize(t as u128, DEFAULT_RHO_BUDGET).unwrap();
        if order_composite(b, &f).unwrap() != naive_order(b, t) {
            bad.push(format!("order_composite({b}, {t})"));
        }
        let r = 1 + rng.below(12);
        let br = (0..r).fold(1u64, |acc, _| acc * b % t);
        if order_base_power(b, r, t).unwrap() != naive_order(br, t) {
            bad.push(format!("order_base_power({b}, {r}, {t})"));
        }
        let pr = loop {
            let c = 2 + rng.below(1000);
            if is_prime(c) && !b.is_multiple_of(c) {
                break c;
            }
        };
        let k = 1 + rng.below(3) as u32;
        let pk = pr.pow(k);
        if pk <= 2_000_000 && order_prime_power(b, pr, k).unwrap() != naive_order(b, pk) {
            bad.push(format!("order_prime_power({b}, {pr}, {k})"));
        }
    }
    let mut lemma = 0;
    for b in [4u64, 6, 8, 9] {
        for t in 1..=1000u64 {
            if gcd(b, t) != 1 {
                continue;
            }
            let o = multiplicative_order(b, t).unwrap();
            let mut bn = 1 % t;
            for n in 1..=50u64 {
                bn = bn * b % t;
                lemma += 1;
                if (bn == 1 % t) != (n % o == 0) {
                    bad.push(format!("lemma b = {b}, t = {t}, n = {n}"));
                }
            }
        }
    }
    check(
        bad.is_empty(),
        format!("naive sweep, {sampled} random composition checks, {lemma} divisibility cases; failures: {bad:?}"),
    )
}

fn c8_families() -> Outcome {
    let mut bad = Vec::new();
    for (n, q) in SIX_PAIRS {
        let rows = gen_primitive_complete_family(&p(n, q), 4, &Budgets::default()).unwrap();
        for r in rows {
            let coprime = r.t.gcd(&BigInt::from(n * q)) == BigInt::from(1);
            if r.verdict != "Complete" || !coprime || !r.coprime_to_b {
                bad.push(format!("({n},{q}) {} k = {} t = {}", r.family, r.k, r.t));
            }
        }
    }
    let params = p(2, 2);
    let fam = gen_alpha_family(&params, 8, &Budgets::default()).unwrap();
    for m in &fam.members {
        let inc = classify(&params, m.alpha.clone()).unwrap().is_incomplete();
        if !inc || !witness_verify(&params, &m.witness) {
            bad.push(format!("alpha_{} = {}", m.k, m.alpha));
        }
    }
    let mut pairs = 0;
    for k in 1..=8u32 {
        for l in k + 1..=8 {
            pairs += 1;
            let a = |k: u32| (4i64.pow(k) - 1) / 3;
            if (a(k).gcd(&a(l)) == 1) != (k.gcd(&l) == 1) {
                bad.push(format!("gcd(alpha_{k}, alpha_{l})"));
            }
        }
    }
    if !fam.coprimality_failures.is_empty() || fam.pairs_checked != pairs {
        bad.push(format!("library biconditional: {:?}", fam.coprimality_failures));
    }
    let rep = gen_repunit_incomplete(&params, &[]).unwrap();
    let big_b = BigInt::from(4).pow(rep.n as u32 + 1) - 1;
    let identity = &rep.t * &rep.digit_sum == &rep.lattice_point * &big_b
        && &rep.t * BigInt::from(3) == big_b;
    if rep.t != BigInt::from(349525) || !rep.identity_holds || !identity {
        bad.push(format!("repunit n = {}, t = {}", rep.n, rep.t));
    }
    check(
        bad.is_empty(),
        format!("{} alpha members, repunit t = {}; failures: {bad:?}", fam.members.len(), rep.t),
    )
}

fn c9_density() -> Outcome {
    let mut bad = Vec::new();
    let mut total = Duration::ZERO;
    for s in scans() {
        total += s.elapsed;
        let n = s.n as u64;
        let phi = euler_phi(n);
        let mut count = 0u64;
        for r in &s.rows {
            count += r.is_complete() as u64;
            if r.verdict_label() == "limit" {
                bad.push(format!("({},{}) limit at t = {}", s.n, s.q, r.t));
            }
            if n * count > phi * r.t + n * n {
                bad.push(format!("({},{}) x = {}", s.n, s.q, r.t));
            }
        }
        let report = density_report(&p(s.n, s.q), &s.rows, &dyadic_grid(SCAN_XMAX), 31).unwrap();
        if !report.envelope_violations().is_empty() {
            bad.push(format!("({},{}) report {:?}", s.n, s.q, report.envelope_violations()));
        }
        let opts = ScanOptions { workers: 3, block: 333, ..ScanOptions::default() };
        let again = scan_csv_string(&scan(&p(s.n, s.q), SCAN_XMAX, &opts).unwrap()).unwrap();
        if again != s.csv {
            bad.push(format!("({},{}) CSV differs across worker counts", s.n, s.q));
        }
    }
    let secs = total.as_secs_f64();
    check(
        bad.is_empty() && secs < 300.0,
        format!("six scans to {SCAN_XMAX} in {secs:.1} s with 8 workers; failures: {bad:?}"),
    )
}

fn c10_power_of_two() -> Outcome {
    let mut counter = Vec::new();
    let mut instances = 0;
    for r in 2..=5u32 {
        let b = 1u64 << r;
        for pr in (3..=50u64).filter(|&x| is_prime(x)) {
            if pr == b - 1 {
                continue;
            }
            let o = naive_order(2, pr);
            let hypothesis = (r as u64 * o).is_multiple_of(2) || !o.is_multiple_of(r as u64);
            if !hypothesis {
                continue;
            }
            for e in 1..=2u32 {
                instances += 1;
                let t = pr.pow(e);
                let c = classify(&p(2, 1 << (r - 1)), t as i64).unwrap();
                if !c.is_complete() {
                    counter.push(format!("r = {r}, p^n = {pr}^{e}"));
                }
            }
        }
    }
    check(
        counter.is_empty() && instances > 0,
        format!("{instances} instances, counterexamples: {counter:?}"),
    )
}

fn c11_fourier() -> Outcome {
    let mut bad = Vec::new();
    let mut rng = Lcg(11);
    let level = 4;
    let mut worst = f64::MIN;
    for (n, q) in SIX_PAIRS {
        let params = p(n, q);
        let mut taken = 0;
        while taken < 50 {
            let t = 1 + rng.below(100_000) as i64;
            if t.gcd(&n) != 1 || !orthogonality_check(&params, t, 3).unwrap() {
                continue;
            }
            taken += 1;
            let spec = TruncationSpec::adapted(&params, t as u64, level, default_grid()).unwrap();
            let max = q_lambda(&params, t, &spec)
                .unwrap()
                .iter()
                .map(|s| s.q_lambda)
                .fold(f64::MIN, f64::max);
            worst = worst.max(max);
            if max > 1.0 + 1e-9 {
                bad.push(format!("({n},{q}) t = {t}: Q = {max}"));
            }
        }
    }
    let mut flags = Vec::new();
    for (n, q, t, want) in [(3, 2, 3154757, true), (2, 3, 55987, true), (3, 2, 1, false), (2, 3, 1, false)] {
        let e = incompleteness_evidence(&p(n, q), t, EVIDENCE_LEVEL, default_grid()).unwrap();
        flags.push(format!("({n},{q},{t}) deficit {:.3e}", e.max_deficit));
        if e.flagged != want {
            bad.push(format!("({n},{q}) t = {t} flagged = {}", e.flagged));
        }
    }
    check(
        bad.is_empty(),
        format!("300 random t, max Q - 1 = {:.2e}; {}; failures: {bad:?}", worst - 1.0, flags.join(", ")),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("golden incomplete witness A", c1_golden_a),
        ("golden incomplete witness B", c2_golden_b),
        ("order 11 bundle and divisor shortcut", c3_exam_bundle),
        ("base-minus-one, base-plus-one, small t and multiples", c4_corollaries),
        ("classify agrees with the periodic digit-string oracle", c5_periodic_oracle),
        ("primitive incomplete period law", c6_primitive_period),
        ("order arithmetic", c7_orders),
        ("family generators", c8_families),
        ("density envelope and scan determinism", c9_density),
        ("power-of-two base consistency", c10_power_of_two),
        ("Fourier cross-check", c11_fourier),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {:>2}: {name} [{detail}] ({secs:.2} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} [{detail}] ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
