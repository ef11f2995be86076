//! Exhaustive searches for the two conditional families: the small-side
//! triples `n = p^2 q r` with a non-geometric recurrence, and the large-side
//! pairs `n = p^4 q`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, to_bounded};
use crate::error::{contract, Result};
use crate::harness::in_pool;
use crate::oracle;

/// A prime triple `p < q < p^2 < r < pq` for which `p, q, p^2, r, pq` obeys
/// `U(p, q, a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct S7Triple {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    #[serde(with = "crate::harness::json_u64")]
    pub n: u64,
    pub a: i128,
    pub b: i128,
    pub oracle_confirmed: bool,
}

/// A prime pair `p^2 < q < p^3` meeting the divisibility conditions on
/// `p^5 - q^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct L5Pair {
    pub p: u64,
    pub q: u64,
    #[serde(with = "crate::harness::json_u64")]
    pub n: u64,
    pub oracle_confirmed: bool,
}

fn divides(d: i128, x: i128) -> bool {
    x == 0 || (d != 0 && x % d == 0)
}

/// Candidates for one `p`: every prime `q` in `(p, p^2)` with `q^2 > p^3`,
/// with `r` derived from the square-root condition.
fn s7_for_p(p: u64, primes: &[u64]) -> Result<Vec<S7Triple>> {
    let pi = p as i128;
    let p2 = pi * pi;
    let p3 = p2 * pi;
    let mut hits = Vec::new();
    for &q in primes.iter().filter(|&&q| q > p && (q as i128) < p2) {
        let qi = q as i128;
        let d = qi * qi - p3;
        if d <= 0 {
            continue;
        }
        let (root, exact) = arith::isqrt_exact((d * (p2 - qi)) as u128);
        if !exact {
            continue;
        }
        let ri = pi * qi - root as i128;
        if !(p2 < ri && ri < pi * qi) {
            continue;
        }
        if !divides(d, pi * qi - ri) || !divides(d, ri * qi - p2 * p2) {
            continue;
        }
        let r = ri as u64;
        if !arith::is_prime(r)? {
            continue;
        }
        let n = to_bounded(p2 as u128 * q as u128 * r as u128)?;
        hits.push(S7Triple {
            p,
            q,
            r,
            n,
            a: pi * (pi * qi - ri) / d,
            b: (ri * qi - p2 * p2) / d,
            oracle_confirmed: oracle::small_verdict(n)?.recurrent,
        });
    }
    Ok(hits)
}

/// All form-(S7) triples with `p <= p_max`, sorted by `(p, q, r)`.
pub fn search_s7(p_max: u64) -> Result<Vec<S7Triple>> {
    search_s7_jobs(p_max, rayon::current_num_threads())
}

pub fn search_s7_jobs(p_max: u64, jobs: usize) -> Result<Vec<S7Triple>> {
    if p_max < 2 {
        return Err(contract(format!("p_max must be at least 2, got {p_max}")));
    }
    let q_limit = (p_max as u128 * p_max as u128).min(u64::MAX as u128) as u64;
    let primes = arith::primes_up_to(q_limit);
    let ps: Vec<u64> = primes.iter().copied().take_while(|&p| p <= p_max).collect();
    let chunks: Vec<Vec<S7Triple>> = in_pool(jobs, || {
        ps.par_iter()
            .map(|&p| s7_for_p(p, &primes))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut out: Vec<S7Triple> = chunks.into_iter().flatten().collect();
    out.sort_by_key(|t| (t.p, t.q, t.r));
    Ok(out)
}

/// Range of `q` with `|p^5 - q^2| <= q - p^2`, intersected with
/// `(p^2, p^3)`.
///
/// A nonzero multiple of `p^5 - q^2` is at least that large in absolute
/// value, and `p^2 - q` is never zero, so every pair lies in this window.
pub(crate) fn large5_window(p: u64) -> (u128, u128) {
    let p = p as u128;
    let (p2, p3, p5) = (p * p, p * p * p, p.pow(5));
    // q - p^2 < p^3, so q^2 lies within p^3 of p^5.
    let lo = (p5 - p3).isqrt().max(p2 + 1);
    let hi = (p5 + p3).isqrt().saturating_add(1).min(p3 - 1);
    (lo, hi)
}

fn large5_for_p(p: u64) -> Result<Vec<L5Pair>> {
    let (lo, hi) = large5_window(p);
    let mut hits = Vec::new();
    for q in lo..=hi {
        let q = q as u64;
        if !crate::classify::large_form5_holds(p, q) || !arith::is_prime(q)? {
            continue;
        }
        let n = to_bounded((p as u128).pow(4) * q as u128)?;
        hits.push(L5Pair {
            p,
            q,
            n,
            oracle_confirmed: oracle::large_verdict(n)?.recurrent,
        });
    }
    Ok(hits)
}

/// All large form-5 pairs with `p <= p_max`, sorted by `(p, q)`.
pub fn search_large5(p_max: u64) -> Result<Vec<L5Pair>> {
    search_large5_jobs(p_max, rayon::current_num_threads())
}

pub fn search_large5_jobs(p_max: u64, jobs: usize) -> Result<Vec<L5Pair>> {
    if p_max < 2 {
        return Err(contract(format!("p_max must be at least 2, got {p_max}")));
    }
    let ps = arith::primes_up_to(p_max);
    let chunks: Vec<Vec<L5Pair>> = in_pool(jobs, || {
        ps.par_iter()
            .map(|&p| large5_for_p(p))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut out: Vec<L5Pair> = chunks.into_iter().flatten().collect();
    out.sort_by_key(|t| (t.p, t.q));
    Ok(out)
}

/// The recurrence parameters a `p^4 q` large set would need:
/// `a = pq (p^2 - q) / (p^5 - q^2)` and `b = pq (p^3 - q) / (p^5 - q^2)`,
/// when both are integers.
pub fn large5_derived_params(p: u64, q: u64) -> Option<(i128, i128)> {
    let (p, q) = (p as i128, q as i128);
    let d = p.pow(5) - q * q;
    if d == 0 {
        return None;
    }
    let (x, y) = (p * q * (p * p - q), p * q * (p.pow(3) - q));
    (x % d == 0 && y % d == 0).then(|| (x / d, y / d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::large_form5_holds;

    #[test]
    fn s7_contains_the_known_triple() {
        let hits = search_s7(5).unwrap();
        let t = hits.iter().find(|t| (t.p, t.q, t.r) == (2, 3, 5)).unwrap();
        assert_eq!((t.a, t.b), (2, -1));
        assert_eq!(t.n, 60);
        assert!(t.oracle_confirmed);
    }

    #[test]
    fn s7_p_max_two_examines_only_q3() {
        let primes = arith::primes_up_to(4);
        assert_eq!(s7_for_p(2, &primes).unwrap().len(), 1);
        assert_eq!(search_s7(2).unwrap().len(), 1);
        assert!(search_s7(1).is_err());
    }

    #[test]
    fn large5_small_primes_have_no_hits() {
        assert!(large5_for_p(2).unwrap().is_empty());
        assert!(large5_for_p(3).unwrap().is_empty());
        assert!(search_large5(1).is_err());
    }

    #[test]
    fn large5_window_is_exhaustive() {
        // Scan the whole (p^2, p^3) window naively and compare.
        for p in arith::primes_up_to(40) {
            let naive: Vec<u64> = (p * p + 1..p * p * p)
                .filter(|&q| arith::is_prime(q).unwrap() && large_form5_holds(p, q))
                .collect();
            let pruned: Vec<u64> = large5_for_p(p).unwrap().iter().map(|h| h.q).collect();
            assert_eq!(naive, pruned, "p = {p}");
        }
    }

    #[test]
    fn derived_params_agree_with_divisibility() {
        // gcd(pq, p^5 - q^2) = 1, so integrality of the derived parameters
        // is the same as the divisibility conditions.
        for p in arith::primes_up_to(60) {
            let (lo, hi) = (p * p + 1, p * p * p);
            for q in (lo..hi).filter(|&q| arith::is_prime(q).unwrap()) {
                assert_eq!(
                    large5_derived_params(p, q).is_some(),
                    large_form5_holds(p, q),
                    "p = {p}, q = {q}"
                );
            }
        }
    }
}
