mod common;

use num_bigint::BigInt;
use num_rational::BigRational;

use common::*;
use complete_numbers::survey::*;
use complete_numbers::Budgets;

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn opts(workers: usize) -> ScanOptions {
    ScanOptions { workers, ..ScanOptions::default() }
}

/// Plain sieve of Eratosthenes over the whole range.
fn eratosthenes(x: usize) -> Vec<bool> {
    let mut is = vec![true; x + 1];
    is[0] = false;
    if x >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= x {
        if is[i] {
            (i * i..=x).step_by(i).for_each(|j| is[j] = false);
        }
        i += 1;
    }
    is
}

#[test]
fn small_scan_examples() {
    let rows = scan(&p(2, 2), 10, &opts(2)).unwrap();
    assert_eq!(rows.iter().map(|r| r.t).collect::<Vec<_>>(), (1..=10).collect::<Vec<_>>());
    let complete: Vec<u64> = rows.iter().filter(|r| r.is_complete()).map(|r| r.t).collect();
    assert!(complete.contains(&1));
    assert!(!complete.contains(&3) && !complete.contains(&9));
    assert!(complete.iter().all(|t| t % 2 == 1));

    for (n, q) in SIX_PAIRS {
        let rows = scan(&p(n, q), 1, &opts(1)).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].is_complete());
    }

    let rows = scan(&p(2, 3), 60, &opts(3)).unwrap();
    for t in [5, 25, 35, 55] {
        assert_eq!(rows[t - 1].verdict_label(), "Incomplete", "t = {t}");
    }
    let seven = rows[6].verdict_label();
    assert!(seven == "Complete" || seven == "Incomplete");
    assert_eq!(seven == "Incomplete", !attractor_points(2, 3, 7).is_empty());
}

#[test]
fn scan_is_independent_of_workers_and_blocks() {
    let params = p(3, 2);
    let base = scan_csv_string(&scan(&params, 700, &opts(1)).unwrap()).unwrap();
    for (workers, block) in [(2, 1024), (4, 7), (8, 1), (3, 100)] {
        let o = ScanOptions { workers, block, ..ScanOptions::default() };
        let csv = scan_csv_string(&scan(&params, 700, &o).unwrap()).unwrap();
        assert_eq!(csv, base, "workers = {workers}, block = {block}");
    }
}

#[test]
fn scan_csv_layout() {
    let csv = scan_csv_string(&scan(&p(2, 3), 5, &opts(1)).unwrap()).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,verdict,certificateKind,witnessPeriod,witnessStart,elapsedMicros");
    assert_eq!(lines[1], "1,Complete,IntervalBound,,,");
    assert_eq!(lines[2], "2,NotApplicable,,,,");
    assert_eq!(lines[5], "5,Incomplete,,1,1,");
}

#[test]
fn scan_records_limits_per_row() {
    let o = ScanOptions {
        budgets: Budgets { lattice_nodes: 3, ..Budgets::default() },
        ..opts(2)
    };
    let rows = scan(&p(2, 3), 200, &o).unwrap();
    let limited: Vec<&ScanRow> = rows.iter().filter(|r| r.verdict_label() == "limit").collect();
    assert!(!limited.is_empty());
    let csv = scan_csv_string(&rows).unwrap();
    assert!(csv.lines().any(|l| l.split(',').nth(1) == Some("limit")));
    let grid = dyadic_grid(200);
    assert!(density_report(&p(2, 3), &rows, &grid, 31).is_err());
}

#[test]
fn scan_timings_are_opt_in() {
    let rows = scan(&p(2, 2), 20, &opts(1)).unwrap();
    assert!(rows.iter().all(|r| r.elapsed_micros.is_none()));
    let o = ScanOptions { timings: true, ..opts(1) };
    let rows = scan(&p(2, 2), 20, &o).unwrap();
    assert!(rows.iter().all(|r| r.elapsed_micros.is_some()));
}

#[test]
fn scan_rejects_bad_options() {
    assert!(scan(&p(2, 2), 0, &opts(1)).is_err());
    assert!(scan(&p(2, 2), 10, &opts(0)).is_err());
    let o = ScanOptions { block: 0, ..opts(1) };
    assert!(scan(&p(2, 2), 10, &o).is_err());
}

#[test]
fn density_bounds() {
    let rows = scan(&p(2, 2), 2000, &opts(2)).unwrap();
    let grid = dyadic_grid(2000);
    let d = density_report(&p(2, 2), &rows, &grid, 7).unwrap();
    assert_eq!(d.euler_bound, rat(1, 2));
    assert_eq!(d.alpha_product_bound, rat(1, 2) * (rat(1, 1) - rat(1, 341)) * (rat(1, 1) - rat(1, 5461)));
    assert!(d.envelope_violations().is_empty());
    for (i, &x) in grid.iter().enumerate() {
        let count = rows[..x as usize].iter().filter(|r| r.is_complete()).count() as u64;
        assert_eq!(d.counts[i], count);
        assert_eq!(d.ratio_x[i], rat(count as i64, x as i64));
    }
    assert_eq!(d.ratio_pi[0], None);

    let rows3 = scan(&p(3, 2), 100, &opts(1)).unwrap();
    let d3 = density_report(&p(3, 2), &rows3, &[10, 100], 31).unwrap();
    assert_eq!(d3.euler_bound, rat(2, 3));
}

#[test]
fn density_validates_inputs() {
    let params = p(2, 2);
    let rows = scan(&params, 50, &opts(1)).unwrap();
    assert!(density_report(&params, &rows, &[10, 60], 31).is_err());
    assert!(density_report(&params, &rows, &[20, 10], 31).is_err());
    assert!(density_report(&params, &rows, &[0, 10], 31).is_err());
    assert!(density_report(&params, &rows[1..], &[10], 31).is_err());
}

#[test]
fn dyadic_grid_shape() {
    assert_eq!(dyadic_grid(10), vec![1, 2, 4, 8, 10]);
    assert_eq!(dyadic_grid(8), vec![1, 2, 4, 8]);
    assert_eq!(dyadic_grid(1), vec![1]);
}

#[test]
fn euler_phi_by_counting() {
    for n in 1..300u64 {
        let want = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
        assert_eq!(euler_phi(n), want, "n = {n}");
    }
}

#[test]
fn prime_counts() {
    assert_eq!(prime_pi(0), 0);
    assert_eq!(prime_pi(1), 0);
    assert_eq!(prime_pi(2), 1);
    assert_eq!(prime_pi(10), 4);
    assert_eq!(prime_pi(100), 25);
    assert_eq!(prime_pi(1_000_000), 78498);
    let reference = eratosthenes(1_000_000);
    let mut running = 0u64;
    let mut pi = vec![0u64; reference.len()];
    for (i, &is) in reference.iter().enumerate() {
        running += is as u64;
        pi[i] = running;
    }
    for x in [65535u64, 65536, 65537, 131072, 131073, 999_983, 1_000_000] {
        assert_eq!(prime_pi(x), pi[x as usize], "x = {x}");
    }
    let listed = primes_up_to(200_000);
    let want: Vec<u64> = (0..=200_000u64).filter(|&i| reference[i as usize]).collect();
    assert_eq!(listed, want);
    let mut seen = Vec::new();
    for_each_prime(100, |p| seen.push(p));
    assert_eq!(seen, primes_up_to(100));
}

#[test]
fn order_statistics_counts() {
    let stats = order_statistics(4, 1000, EpsilonRule::Constant { epsilon: 0.0 }).unwrap();
    let xs: Vec<u64> = stats.checkpoints.iter().map(|c| c.x).collect();
    assert_eq!(xs, dyadic_grid(1000));
    let sieve = eratosthenes(1000);
    for c in &stats.checkpoints {
        let ps: Vec<u64> = (3..=c.x).filter(|&p| sieve[p as usize]).collect();
        let hits = ps.iter().filter(|&&p| naive_order(4, p).pow(2) >= p).count() as u64;
        assert_eq!(c.primes, ps.len() as u64, "x = {}", c.x);
        assert_eq!(c.hits, hits, "x = {}", c.x);
        assert_eq!(c.fraction, (c.primes > 0).then(|| rat(hits as i64, c.primes as i64)));
    }

    let two = order_statistics(4, 2, EpsilonRule::Constant { epsilon: 0.0 }).unwrap();
    assert_eq!(two.checkpoints.last().unwrap().primes, 0);
    let two = order_statistics(3, 2, EpsilonRule::Constant { epsilon: 0.0 }).unwrap();
    assert_eq!(two.checkpoints.last().unwrap().primes, 1);

    let log = order_statistics(6, 10_000, EpsilonRule::LogP { q: 3 }).unwrap();
    let last = log.checkpoints.last().unwrap();
    assert_eq!(last.x, 10_000);
    assert_eq!(last.primes, prime_pi(10_000) - 2);
    assert!(last.hits <= last.primes && last.hits > 0);
}
