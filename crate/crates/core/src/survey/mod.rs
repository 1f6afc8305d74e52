//! Range scans, density tables and order statistics.

mod sieve;

pub use sieve::{for_each_prime, prime_pi, primes_up_to};

use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{alpha, classify_with, Classification, Verdict};
use crate::error::{Error, Result};
use crate::modorder::multiplicative_order;
use crate::params::{Budgets, PairParams};
use crate::serde_str;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    pub workers: usize,
    pub block: u64,
    pub budgets: Budgets,
    /// Record per-row wall time. Off by default so output is reproducible.
    pub timings: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            workers: 1,
            block: 1024,
            budgets: Budgets::default(),
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all_fields = "camelCase")]
pub enum ScanOutcome {
    Classified(Box<Classification>),
    Limit { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    pub t: u64,
    pub outcome: ScanOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_micros: Option<u64>,
}

impl ScanRow {
    pub fn classification(&self) -> Option<&Classification> {
        match &self.outcome {
            ScanOutcome::Classified(c) => Some(c),
            ScanOutcome::Limit { .. } => None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.classification().is_some_and(|c| c.is_complete())
    }

    pub fn verdict_label(&self) -> &'static str {
        match &self.outcome {
            ScanOutcome::Classified(c) => c.kind(),
            ScanOutcome::Limit { .. } => "limit",
        }
    }
}

fn classify_row(params: &PairParams, t: u64, opts: &ScanOptions) -> Result<ScanRow> {
    let start = opts.timings.then(Instant::now);
    let outcome = match classify_with(params, &BigInt::from(t), &opts.budgets) {
        Ok(c) => ScanOutcome::Classified(Box::new(c)),
        Err(e) if e.is_resource_limit() => ScanOutcome::Limit {
            message: e.to_string(),
        },
        Err(e) => return Err(e),
    };
    Ok(ScanRow {
        t,
        outcome,
        elapsed_micros: start.map(|s| s.elapsed().as_micros() as u64),
    })
}

/// Classifies every `t` in `[1, xmax]`, in parallel, returning rows in
/// increasing `t` whatever the worker count.
pub fn scan(params: &PairParams, xmax: u64, opts: &ScanOptions) -> Result<Vec<ScanRow>> {
    if xmax == 0 {
        return Err(Error::Domain("xmax must be positive".into()));
    }
    if opts.workers == 0 || opts.block == 0 {
        return Err(Error::Domain("workers and block size must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let blocks: Vec<(u64, u64)> = (0..xmax.div_ceil(opts.block))
        .map(|i| (i * opts.block + 1, ((i + 1) * opts.block).min(xmax)))
        .collect();
    let chunks: Vec<Vec<ScanRow>> = pool.install(|| {
        blocks
            .par_iter()
            .map(|&(lo, hi)| (lo..=hi).map(|t| classify_row(params, t, opts)).collect())
            .collect::<Result<_>>()
    })?;
    let mut rows: Vec<ScanRow> = chunks.into_iter().flatten().collect();
    rows.sort_by_key(|r| r.t);
    Ok(rows)
}

/// Writes scan rows as CSV:
/// `t,verdict,certificateKind,witnessPeriod,witnessStart,elapsedMicros`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record([
        "t",
        "verdict",
        "certificateKind",
        "witnessPeriod",
        "witnessStart",
        "elapsedMicros",
    ])
    .map_err(io)?;
    for r in rows {
        let (cert, period, start) = match r.classification().map(|c| &c.verdict) {
            Some(Verdict::Complete { certificate }) => {
                (certificate.kind().to_string(), String::new(), String::new())
            }
            Some(Verdict::Incomplete { witness, .. }) => (
                String::new(),
                witness.period.to_string(),
                witness.start().to_string(),
            ),
            _ => Default::default(),
        };
        let elapsed = r.elapsed_micros.map(|e| e.to_string()).unwrap_or_default();
        w.write_record([
            r.t.to_string(),
            r.verdict_label().to_string(),
            cert,
            period,
            start,
            elapsed,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Internal(e.to_string()))?;
    Ok(())
}

pub fn scan_csv_string(rows: &[ScanRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_scan_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityReport {
    pub params: PairParams,
    pub grid: Vec<u64>,
    pub counts: Vec<u64>,
    #[serde(with = "serde_str::rational_vec")]
    pub ratio_x: Vec<BigRational>,
    /// `None` where `π(x) = 0`.
    #[serde(with = "serde_str::rational_opt_vec")]
    pub ratio_pi: Vec<Option<BigRational>>,
    #[serde(with = "serde_str::rational")]
    pub euler_bound: BigRational,
    #[serde(with = "serde_str::rational")]
    pub alpha_product_bound: BigRational,
    pub p_max: u64,
}

impl DensityReport {
    /// Grid points where `counts/x ≤ φ(N)/N + N/x` fails.
    pub fn envelope_violations(&self) -> Vec<u64> {
        let n = self.params.n();
        self.grid
            .iter()
            .zip(&self.ratio_x)
            .filter(|(x, r)| {
                let slack = BigRational::new(BigInt::from(n), BigInt::from(**x));
                **r > &self.euler_bound + slack
            })
            .map(|(x, _)| *x)
            .collect()
    }
}

/// `φ(n)` by trial division.
pub fn euler_phi(n: u64) -> u64 {
    let (mut m, mut phi) = (n, n);
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

/// `φ(N)/N · ∏ (1 - 1/α_p)` over primes `b ≤ p ≤ p_max`.
pub fn alpha_product_bound(params: &PairParams, p_max: u64) -> BigRational {
    let n = params.n() as u64;
    let mut acc = BigRational::new(BigInt::from(euler_phi(n)), BigInt::from(n));
    for_each_prime(p_max, |p| {
        if p >= params.b() as u64 {
            let a = alpha(params.b(), p as u32);
            acc = &acc * (BigRational::one() - BigRational::new(BigInt::one(), a));
        }
    });
    acc
}

pub const DEFAULT_P_MAX: u64 = 31;

/// Tabulates `#(Γ ∩ [0, x])` and its ratios at each grid point.
pub fn density_report(
    params: &PairParams,
    rows: &[ScanRow],
    grid: &[u64],
    p_max: u64,
) -> Result<DensityReport> {
    let xmax = rows.iter().map(|r| r.t).max().unwrap_or(0);
    let covered = rows.len() as u64 == xmax && rows.iter().enumerate().all(|(i, r)| r.t == i as u64 + 1);
    if !covered {
        return Err(Error::Domain("scan rows must cover 1..=xmax in order".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    if let Some(&x) = grid.iter().find(|&&x| x == 0 || x > xmax) {
        return Err(Error::Domain(format!("grid point {x} outside [1, {xmax}]")));
    }
    if rows.iter().any(|r| matches!(r.outcome, ScanOutcome::Limit { .. })) {
        return Err(Error::Domain("scan contains rows that hit a resource limit".into()));
    }
    let mut prefix = Vec::with_capacity(rows.len() + 1);
    prefix.push(0u64);
    for r in rows {
        prefix.push(prefix.last().unwrap() + r.is_complete() as u64);
    }
    let primes = primes_up_to(grid.last().copied().unwrap_or(0));
    let mut counts = Vec::new();
    let mut ratio_x = Vec::new();
    let mut ratio_pi = Vec::new();
    for &x in grid {
        let c = prefix[x as usize];
        let pi = primes.partition_point(|&p| p <= x) as u64;
        counts.push(c);
        ratio_x.push(BigRational::new(BigInt::from(c), BigInt::from(x)));
        ratio_pi.push((pi > 0).then(|| BigRational::new(BigInt::from(c), BigInt::from(pi))));
    }
    let n = params.n() as u64;
    Ok(DensityReport {
        params: params.clone(),
        grid: grid.to_vec(),
        counts,
        ratio_x,
        ratio_pi,
        euler_bound: BigRational::new(BigInt::from(euler_phi(n)), BigInt::from(n)),
        alpha_product_bound: alpha_product_bound(params, p_max),
        p_max,
    })
}

/// Powers of two up to `xmax`, then `xmax` itself.
pub fn dyadic_grid(xmax: u64) -> Vec<u64> {
    let mut g: Vec<u64> = (0..64)
        .map(|k| 1u64 << k)
        .take_while(|&x| x <= xmax)
        .collect();
    if g.last() != Some(&xmax) && xmax > 0 {
        g.push(xmax);
    }
    g
}

/// The exponent slack `ε(p)` in `O_b(p) ≥ p^{1/(2+ε(p))}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all_fields = "camelCase")]
pub enum EpsilonRule {
    Constant { epsilon: f64 },
    /// `ε(p) = log_p q`.
    LogP { q: u64 },
}

impl EpsilonRule {
    fn epsilon(&self, p: u64) -> f64 {
        match *self {
            EpsilonRule::Constant { epsilon } => epsilon,
            EpsilonRule::LogP { q } => (q as f64).ln() / (p as f64).ln(),
        }
    }

    fn meets(&self, order: u64, p: u64) -> bool {
        if let EpsilonRule::Constant { epsilon } = *self {
            if epsilon == 0.0 {
                return (order as u128) * (order as u128) >= p as u128;
            }
        }
        let e = self.epsilon(p);
        (order as f64).ln() * (2.0 + e) >= (p as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderCheckpoint {
    pub x: u64,
    pub primes: u64,
    pub hits: u64,
    #[serde(with = "serde_str::rational_opt")]
    pub fraction: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderStatistics {
    pub base: u64,
    pub rule: EpsilonRule,
    pub checkpoints: Vec<OrderCheckpoint>,
}

/// Fraction of primes `p ≤ x` coprime to `b` with `O_b(p) ≥ p^{1/(2+ε(p))}`,
/// at each dyadic checkpoint up to `xmax`.
pub fn order_statistics(b: u64, xmax: u64, rule: EpsilonRule) -> Result<OrderStatistics> {
    if b < 2 {
        return Err(Error::Domain("base must be at least 2".into()));
    }
    let grid = dyadic_grid(xmax);
    let mut checkpoints = Vec::with_capacity(grid.len());
    let (mut primes, mut hits) = (0u64, 0u64);
    let mut gi = 0;
    let mut err = None;
    let flush = |upto: u64, primes: u64, hits: u64, gi: &mut usize, cps: &mut Vec<_>| {
        while *gi < grid.len() && grid[*gi] < upto {
            cps.push(OrderCheckpoint {
                x: grid[*gi],
                primes,
                hits,
                fraction: (primes > 0)
                    .then(|| BigRational::new(BigInt::from(hits), BigInt::from(primes))),
            });
            *gi += 1;
        }
    };
    for_each_prime(xmax, |p| {
        if err.is_some() {
            return;
        }
        flush(p, primes, hits, &mut gi, &mut checkpoints);
        if b.gcd(&p) != 1 {
            return;
        }
        match multiplicative_order(b, p) {
            Ok(o) => {
                primes += 1;
                hits += rule.meets(o, p) as u64;
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    flush(u64::MAX, primes, hits, &mut gi, &mut checkpoints);
    Ok(OrderStatistics {
        base: b,
        rule,
        checkpoints,
    })
}

/// Exact fraction as a float, for display.
pub fn approx(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
