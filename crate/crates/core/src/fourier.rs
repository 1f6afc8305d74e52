//! Truncated Fourier transform of the measure and the sums
//! `Q(ξ) = Σ_{λ ∈ tΛ} |μ̂(ξ + λ)|²`, used as independent numeric evidence.
//!
//! Floating point lives only here. Frequencies are split into an integer
//! part and a fraction so that phases `qλ/b^k` stay exact for large `λ`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PairParams;

/// Residues within this distance of an integer count as exact zeros of the mask.
const ZERO_SNAP: f64 = 1e-12;
/// Flag incompleteness evidence when `max(1 - Q)` exceeds this.
pub const EVIDENCE_THRESHOLD: f64 = 0.05;
/// Spectrum level at which the evidence flag is calibrated.
pub const EVIDENCE_LEVEL: u32 = 6;
/// Largest number of difference pairs `orthogonality_check` will enumerate.
pub const MAX_PAIRS: u128 = 10_000_000;
const TAIL_TARGET: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncationSpec {
    pub product_depth: u32,
    pub spectrum_level: u32,
    pub sample_grid: Vec<f64>,
}

impl TruncationSpec {
    pub fn new(product_depth: u32, spectrum_level: u32, sample_grid: Vec<f64>) -> Result<Self> {
        if product_depth < spectrum_level + 4 {
            return Err(Error::Domain(format!(
                "product depth {product_depth} must be at least spectrum level + 4 = {}",
                spectrum_level + 4
            )));
        }
        if sample_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("sample grid must be finite".into()));
        }
        Ok(TruncationSpec {
            product_depth,
            spectrum_level,
            sample_grid,
        })
    }

    /// Picks the product depth so the tail bound stays below 1e-12 for every
    /// `ξ + λ` with `λ ∈ tΛ_level` and `ξ` in the grid.
    pub fn adapted(params: &PairParams, t: u64, level: u32, grid: Vec<f64>) -> Result<Self> {
        let radius = max_frequency(params, t, level, &grid);
        let (n, q, b) = (params.n() as f64, params.q() as f64, params.b() as f64);
        let mut k1 = level + 4;
        while PI * (n - 1.0) * q * radius / (b.powi(k1 as i32) * (b - 1.0)) > TAIL_TARGET {
            k1 += 1;
        }
        TruncationSpec::new(k1, level, grid)
    }
}

fn max_frequency(params: &PairParams, t: u64, level: u32, grid: &[f64]) -> f64 {
    let span = params.c_max().max(-params.c_min()) as f64;
    let b = params.b() as f64;
    let lam = t as f64 * span * (b.powi(level as i32) - 1.0) / (b - 1.0);
    lam + grid.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `ξ_i = i/258` for `i = 1..=257`.
pub fn default_grid() -> Vec<f64> {
    (1..=257).map(|i| i as f64 / 258.0).collect()
}

/// `M(ξ) = (1/N) Σ_{d ∈ D} e^{-2πi·d·s·ξ}` with digit scale `s` (1 for `D`, `q` for `qD`).
pub fn mask(params: &PairParams, digit_scale: i64, xi: f64) -> Complex64 {
    let y = digit_scale as f64 * xi;
    mask_at_phase(params.n(), y - y.round())
}

/// Mask of `D` at phase `y`.
fn mask_at_phase(n: i64, y: f64) -> Complex64 {
    if snapped_zero(n, y) {
        return Complex64::zero();
    }
    let mut acc = Complex64::zero();
    for d in 0..n {
        acc += Complex64::from_polar(1.0, -2.0 * PI * d as f64 * y);
    }
    acc / n as f64
}

fn snapped_zero(n: i64, y: f64) -> bool {
    let ny = n as f64 * y;
    let r = ny.round();
    (ny - r).abs() < ZERO_SNAP && (r as i64).rem_euclid(n) != 0
}

/// `|M(y)|² = (sin(πNy) / (N sin(πy)))²`.
fn mask_sq_at_phase(n: i64, y: f64) -> f64 {
    if snapped_zero(n, y) {
        return 0.0;
    }
    let s = (PI * y).sin();
    if s.abs() < ZERO_SNAP {
        return 1.0;
    }
    let v = (PI * n as f64 * y).sin() / (n as f64 * s);
    v * v
}

/// Phase of `q(x + λ)/b^k` modulo 1, centred in `[-1/2, 1/2]` and exact in
/// `λ` while `b^k` fits in 128 bits. Centring keeps `sin(πy)` accurate where
/// the phase is close to an integer.
fn phase(q: i64, b: i64, k: u32, x: f64, lambda: i128) -> f64 {
    let cont = q as f64 * x / (b as f64).powi(k as i32);
    let disc = match (b as i128).checked_pow(k) {
        Some(bk) => {
            let mut r = (q as i128 * lambda).rem_euclid(bk);
            if 2 * r > bk {
                r -= bk;
            }
            r as f64 / bk as f64
        }
        None => q as f64 * lambda as f64 / (b as f64).powi(k as i32),
    };
    let y = disc + cont;
    y - y.round()
}

/// `Σ_{k > K1} π(N-1)·q|ξ|/b^k` turned into a bound on `|μ̂ - partial product|`.
pub fn tail_bound(params: &PairParams, xi_abs: f64, k1: u32) -> f64 {
    let (n, q, b) = (params.n() as f64, params.q() as f64, params.b() as f64);
    let s = PI * (n - 1.0) * q * xi_abs / (b.powi(k1 as i32) * (b - 1.0));
    s.exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MuHat {
    pub re: f64,
    pub im: f64,
    pub tail_bound: f64,
}

impl MuHat {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `μ̂(x + λ) ≈ ∏_{k=1}^{K1} M_D(q(x + λ)/b^k)`.
pub fn mu_hat_shifted(params: &PairParams, x: f64, lambda: i128, k1: u32) -> MuHat {
    let (n, q, b) = (params.n(), params.q(), params.b());
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 1..=k1 {
        acc *= mask_at_phase(n, phase(q, b, k, x, lambda));
        if acc.is_zero() {
            break;
        }
    }
    MuHat {
        re: acc.re,
        im: acc.im,
        tail_bound: tail_bound(params, (x + lambda as f64).abs(), k1),
    }
}

pub fn mu_hat(params: &PairParams, xi: f64, k1: u32) -> MuHat {
    let whole = xi.floor();
    mu_hat_shifted(params, xi - whole, whole as i128, k1)
}

fn mu_hat_sq_shifted(params: &PairParams, x: f64, lambda: i128, k1: u32) -> f64 {
    let (n, q, b) = (params.n(), params.q(), params.b());
    let mut acc = 1.0;
    for k in 1..=k1 {
        acc *= mask_sq_at_phase(n, phase(q, b, k, x, lambda));
        if acc == 0.0 {
            break;
        }
    }
    acc
}

/// `Λ_K = C + bC + ... + b^{K-1}C`.
pub fn spectrum_level(params: &PairParams, level: u32) -> Vec<i128> {
    let mut out = vec![0i128];
    let mut bk = 1i128;
    for _ in 0..level {
        out = out
            .iter()
            .flat_map(|&s| params.digits_c().iter().map(move |&c| s + bk * c as i128))
            .collect();
        bk *= params.b() as i128;
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QSample {
    pub xi: f64,
    pub q_lambda: f64,
    pub tail_bound: f64,
}

/// `Q(ξ)` over `tΛ_{K2}` at every grid point.
pub fn q_lambda(params: &PairParams, t: i64, spec: &TruncationSpec) -> Result<Vec<QSample>> {
    let tn = BigInt::from(t);
    if !params.admits(&tn) {
        return Err(Error::Domain(format!("gcd(t, N) must be 1, t = {t}")));
    }
    let lambdas: Vec<i128> = spectrum_level(params, spec.spectrum_level)
        .into_iter()
        .map(|l| l * t as i128)
        .collect();
    let k1 = spec.product_depth;
    Ok(spec
        .sample_grid
        .par_iter()
        .map(|&xi| {
            let whole = xi.floor();
            let x = xi - whole;
            let base = whole as i128;
            let mut q = 0.0;
            let mut worst = 0.0f64;
            for &l in &lambdas {
                q += mu_hat_sq_shifted(params, x, base + l, k1);
                worst = worst.max((xi + l as f64).abs());
            }
            QSample {
                xi,
                q_lambda: q,
                tail_bound: tail_bound(params, worst, k1),
            }
        })
        .collect())
}

/// Per-ξ CSV with columns `xi,qLambda,tailBound`.
pub fn q_lambda_csv(samples: &[QSample]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(["xi", "qLambda", "tailBound"]).map_err(io)?;
    for s in samples {
        w.write_record([
            format!("{}", s.xi),
            format!("{:.15e}", s.q_lambda),
            format!("{:.3e}", s.tail_bound),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Evidence {
    pub t: i64,
    pub spec: TruncationSpec,
    pub max_q: f64,
    pub max_deficit: f64,
    pub flagged: bool,
}

/// Numeric hint of incompleteness: `max(1 - Q) > 0.05` on the grid. Never a
/// verdict; the classifier decides.
pub fn incompleteness_evidence(params: &PairParams, t: i64, level: u32, grid: Vec<f64>) -> Result<Evidence> {
    let spec = TruncationSpec::adapted(params, t.unsigned_abs(), level, grid)?;
    let samples = q_lambda(params, t, &spec)?;
    let max_q = samples.iter().map(|s| s.q_lambda).fold(f64::MIN, f64::max);
    let max_deficit = samples.iter().map(|s| 1.0 - s.q_lambda).fold(f64::MIN, f64::max);
    Ok(Evidence {
        t,
        spec,
        max_q,
        max_deficit,
        flagged: max_deficit > EVIDENCE_THRESHOLD,
    })
}

/// `x ∈ ∪_k b^k(Z \ NZ)`, the integer zeros of `μ̂`.
pub fn zero_set_member(params: &PairParams, x: &BigInt) -> bool {
    if x.is_zero() {
        return false;
    }
    let b = BigInt::from(params.b());
    let n = BigInt::from(params.n());
    let mut m = x.abs();
    while m.is_multiple_of(&b) {
        m /= &b;
    }
    !m.is_multiple_of(&n)
}

/// Every nonzero difference of `tΛ_level` lies in the zero set.
pub fn orthogonality_check(params: &PairParams, t: i64, level: u32) -> Result<bool> {
    let size = (params.n() as u128).checked_pow(level).unwrap_or(u128::MAX);
    let pairs = size.saturating_mul(size.saturating_sub(1)) / 2;
    if pairs > MAX_PAIRS {
        return Err(Error::LevelTooLarge {
            level,
            pairs,
            limit: MAX_PAIRS,
        });
    }
    let pts = spectrum_level(params, level);
    let t = BigInt::from(t);
    for (i, a) in pts.iter().enumerate() {
        for c in &pts[i + 1..] {
            let d = BigInt::from(c - a) * &t;
            if !zero_set_member(params, &d) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
