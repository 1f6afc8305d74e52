//! Exhaustive search of the functional graph on the envelope's lattice.
//!
//! Every nonzero integer `x` of the envelope has at most one successor
//! `(x + tc)/b`: `c` is forced modulo `N` by `b | x + tc`, and `C` holds one
//! representative per residue. The envelope is forward invariant and the
//! successor is never 0, so the graph is a set of trees hanging off cycles,
//! and `t` is incomplete exactly when some cycle exists.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::witness::Witness;
use crate::error::{Error, Result};
use crate::params::{envelope_bounds_i64, Budgets, PairParams};

const WHITE: u8 = 0;
const GREY: u8 = 1;
const BLACK: u8 = 2;

/// Every cycle of the graph for one `t`, witnesses sorted by starting value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleSearch {
    pub nodes: u64,
    pub cycles: Vec<Witness>,
}

/// Number of nonzero lattice points the search would visit.
pub fn lattice_size(params: &PairParams, t: u64) -> Option<u64> {
    let t = i64::try_from(t).ok()?;
    t.checked_mul(params.n())?;
    let (lo, hi) = envelope_bounds_i64(params, t);
    Some((hi - lo) as u64)
}

fn inverse_mod(a: i64, m: i64) -> Option<i64> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// Finds all cycles for `t` coprime to `N`.
pub fn find_cycles(params: &PairParams, t: u64, budgets: &Budgets) -> Result<CycleSearch> {
    if t == 0 {
        return Err(Error::Domain("t must be positive".into()));
    }
    let n = params.n();
    let nodes = lattice_size(params, t).ok_or(Error::ResourceLimit {
        what: "lattice nodes",
        needed: format!("more than 2^63 (t = {t})"),
        budget: budgets.lattice_nodes,
    })?;
    if nodes > budgets.lattice_nodes {
        return Err(Error::ResourceLimit {
            what: "lattice nodes",
            needed: nodes.to_string(),
            budget: budgets.lattice_nodes,
        });
    }
    let ti = t as i64;
    let t_inv = inverse_mod(ti % n, n).ok_or_else(|| Error::not_coprime(t, n))?;
    let (lo, hi) = envelope_bounds_i64(params, ti);
    let b = params.b() as i128;
    let tt = ti as i128;

    let successor = |x: i64| -> Option<(i64, i64)> {
        let r = ((-x).rem_euclid(n) as i128 * t_inv as i128).rem_euclid(n as i128) as i64;
        let c = params.balanced_digit(r);
        let y = x as i128 + tt * c as i128;
        if y % b != 0 {
            return None;
        }
        let y = (y / b) as i64;
        debug_assert!(y != 0 && (lo..=hi).contains(&y));
        Some((y, c))
    };

    let idx = |x: i64| (x - lo) as usize;
    let mut colour = vec![WHITE; (hi - lo + 1) as usize];
    colour[idx(0)] = BLACK;
    let mut path: Vec<i64> = Vec::new();
    let mut cycles = Vec::new();

    for start in lo..=hi {
        if colour[idx(start)] != WHITE {
            continue;
        }
        path.clear();
        let mut x = start;
        loop {
            colour[idx(x)] = GREY;
            path.push(x);
            match successor(x) {
                Some((y, _)) if colour[idx(y)] == WHITE => x = y,
                Some((y, _)) if colour[idx(y)] == GREY => {
                    let from = path.iter().rposition(|&v| v == y).expect("grey node on path");
                    cycles.push(cycle_witness(&path[from..], ti, b as i64));
                    break;
                }
                _ => break,
            }
        }
        for &v in &path {
            colour[idx(v)] = BLACK;
        }
    }
    cycles.sort_by(|a: &Witness, b: &Witness| {
        let key = |w: &Witness| (w.start().magnitude().clone(), w.start() < &BigInt::from(0));
        key(a).cmp(&key(b))
    });
    Ok(CycleSearch { nodes, cycles })
}

fn cycle_witness(cycle: &[i64], t: i64, b: i64) -> Witness {
    let n = cycle.len();
    let digits = (0..n)
        .map(|k| {
            let num = b as i128 * cycle[(k + 1) % n] as i128 - cycle[k] as i128;
            (num / t as i128) as i64
        })
        .collect();
    let values = cycle.iter().map(|&v| BigInt::from(v)).collect();
    Witness::from_cycle(BigInt::from(t), values, digits)
}

/// A witness for `t` if one exists, with the default node budget.
///
/// When several cycles exist, the one through the smallest absolute lattice
/// value is returned; [`find_cycles`] lists them all.
pub fn cycle_search(params: &PairParams, t: u64) -> Result<Option<Witness>> {
    Ok(find_cycles(params, t, &Budgets::default())?
        .cycles
        .into_iter()
        .next())
}
