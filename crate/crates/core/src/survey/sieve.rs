//! Segmented sieve of Eratosthenes.

const SEGMENT: u64 = 1 << 16;

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Calls `f` on every prime `p ≤ x` in increasing order.
pub fn for_each_prime(x: u64, mut f: impl FnMut(u64)) {
    if x < 2 {
        return;
    }
    let root = x.isqrt();
    let base = small_primes(root);
    let mut marks = vec![false; SEGMENT as usize];
    let mut lo = 0u64;
    while lo <= x {
        let hi = (lo + SEGMENT - 1).min(x);
        let len = (hi - lo + 1) as usize;
        marks[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (lo.div_ceil(p) * p).max(p * p);
            while m <= hi {
                marks[(m - lo) as usize] = true;
                m += p;
            }
        }
        for (i, &marked) in marks[..len].iter().enumerate() {
            let n = lo + i as u64;
            if n >= 2 && !marked {
                f(n);
            }
        }
        if hi == x {
            break;
        }
        lo = hi + 1;
    }
}

pub fn primes_up_to(x: u64) -> Vec<u64> {
    let mut v = Vec::new();
    for_each_prime(x, |p| v.push(p));
    v
}

/// `π(x)`, the number of primes not exceeding `x`.
pub fn prime_pi(x: u64) -> u64 {
    let mut n = 0;
    for_each_prime(x, |_| n += 1);
    n
}
