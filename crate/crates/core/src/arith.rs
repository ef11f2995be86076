//! Exact integer primitives: primality, factorization, integer square roots
//! and divisor enumeration.
//!
//! Every input is a `u64` below an arithmetic bound (default `2^62`); all
//! intermediate products are carried in 128-bit integers so that products of
//! up to three divisors stay exact.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound (exclusive) on inputs to the arithmetic layer.
pub const DEFAULT_BOUND: u64 = 1 << 62;

/// Primes below this limit are removed by trial division before rho.
const TRIAL_LIMIT: u64 = 1 << 10;

pub(crate) fn check_bound(n: u64) -> Result<()> {
    if n >= DEFAULT_BOUND {
        Err(Error::Capacity {
            value: n as u128,
            bound: DEFAULT_BOUND,
        })
    } else {
        Ok(())
    }
}

/// Checked conversion of a 128-bit intermediate back into the input domain.
pub(crate) fn to_bounded(v: u128) -> Result<u64> {
    if v >= DEFAULT_BOUND as u128 {
        Err(Error::Capacity {
            value: v,
            bound: DEFAULT_BOUND,
        })
    } else {
        Ok(v as u64)
    }
}

/// A positive integer together with its prime factorization.
///
/// Primes are strictly increasing and every exponent is at least one; `n = 1`
/// has an empty factor list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from explicit `(prime, exponent)` pairs,
    /// checking every invariant.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut n: u128 = 1;
        let mut prev = 1;
        for &(p, e) in &factors {
            if p <= prev {
                return Err(crate::error::contract("primes must be strictly increasing"));
            }
            if e == 0 {
                return Err(crate::error::contract("exponents must be positive"));
            }
            if !is_prime(p)? {
                return Err(crate::error::contract(format!("{p} is not prime")));
            }
            for _ in 0..e {
                n = n.checked_mul(p as u128).ok_or(Error::Capacity {
                    value: u128::MAX,
                    bound: DEFAULT_BOUND,
                })?;
                to_bounded(n)?;
            }
            prev = p;
        }
        Ok(Self {
            n: n as u64,
            factors,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Exponent signature in increasing prime order.
    pub fn exponents(&self) -> Vec<u32> {
        self.factors.iter().map(|&(_, e)| e).collect()
    }

    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, _)| p).collect()
    }

    /// Recomputes `n` from the factor list.
    pub fn expand(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    pub fn tau(&self) -> u64 {
        tau(self)
    }

    pub fn divisors(&self) -> Vec<u64> {
        divisors_sorted(self)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// The first twelve primes are a deterministic witness set for every n < 3.3e24.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn miller_rabin(n: u64) -> bool {
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &WITNESSES {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime_unchecked(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    miller_rabin(n)
}

/// Deterministic primality test, exact for every input below the bound.
pub fn is_prime(n: u64) -> Result<bool> {
    check_bound(n)?;
    Ok(is_prime_unchecked(n))
}

/// `(floor(sqrt(n)), floor(sqrt(n))^2 == n)`.
pub fn isqrt_exact(n: u128) -> (u128, bool) {
    let root = n.isqrt();
    (root, root * root == n)
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// Sieve of Eratosthenes, inclusive of `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut ys = 0;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_unchecked(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn collect(mut primes: Vec<u64>, n: u64) -> Factorization {
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { n, factors }
}

/// Factors `n` by trial division over small primes, then Miller-Rabin and
/// Pollard rho on the remaining cofactor.
pub fn factorize(n: u64) -> Result<Factorization> {
    check_bound(n)?;
    if n == 0 {
        return Err(crate::error::contract("cannot factor 0"));
    }
    let mut rest = n;
    let mut primes = Vec::new();
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        while rest.is_multiple_of(p) {
            rest /= p;
            primes.push(p);
        }
    }
    if rest > 1 {
        if rest < TRIAL_LIMIT * TRIAL_LIMIT {
            primes.push(rest);
        } else {
            split_large(rest, &mut primes);
        }
    }
    Ok(collect(primes, n))
}

/// All divisors in strictly increasing order.
pub fn divisors_sorted(f: &Factorization) -> Vec<u64> {
    let mut divs = Vec::with_capacity(tau(f) as usize);
    divs.push(1u64);
    for &(p, e) in &f.factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// The divisor-counting function `prod(a_i + 1)`.
pub fn tau(f: &Factorization) -> u64 {
    f.factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Factors every integer of `[lo, hi]` with a segmented sieve.
///
/// Returned in increasing order of `n`; results are identical to calling
/// [`factorize`] on each value.
pub fn factorize_block(lo: u64, hi: u64) -> Result<Vec<Factorization>> {
    if lo == 0 || lo > hi {
        return Err(crate::error::contract(format!(
            "invalid block [{lo}, {hi}]"
        )));
    }
    check_bound(hi)?;
    let len = (hi - lo + 1) as usize;
    let mut rest: Vec<u64> = (lo..=hi).collect();
    let mut factors: Vec<Vec<(u64, u32)>> = vec![Vec::new(); len];
    let root = (hi as u128).isqrt() as u64;
    for p in primes_up_to(root) {
        let first = lo.div_ceil(p) * p;
        let mut m = first;
        while m <= hi {
            let i = (m - lo) as usize;
            let mut e = 0;
            while rest[i].is_multiple_of(p) {
                rest[i] /= p;
                e += 1;
            }
            factors[i].push((p, e));
            m += p;
        }
    }
    Ok(factors
        .into_iter()
        .zip(rest)
        .zip(lo..=hi)
        .map(|((mut fs, r), n)| {
            if r > 1 {
                fs.push((r, 1));
            }
            Factorization { n, factors: fs }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2).unwrap());
        assert!(!is_prime(1).unwrap());
        assert!(!is_prime(0).unwrap());
        assert!(!is_prime(2310).unwrap());
        assert!(!is_prime(561).unwrap());
        assert!(!is_prime(3_215_031_751).unwrap());
        assert!(is_prime(4_611_686_018_427_387_847).unwrap());
        assert!(matches!(is_prime(1 << 62), Err(Error::Capacity { .. })));
    }

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(100_000);
        let mut it = sieve.iter().peekable();
        for n in 0..=100_000u64 {
            let expected = it.peek().is_some_and(|&&p| p == n);
            if expected {
                it.next();
            }
            assert_eq!(is_prime(n).unwrap(), expected, "n = {n}");
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(60).unwrap().factors(), &[(2, 2), (3, 1), (5, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(512).unwrap().factors(), &[(2, 9)]);
        assert!(factorize(0).is_err());
        assert!(matches!(factorize(u64::MAX), Err(Error::Capacity { .. })));
    }

    #[test]
    fn factorize_large_semiprimes() {
        // (2^31 - 19) * (2^31 - 1): both prime, product just under 2^62.
        let p = 2_147_483_629u64;
        let q = 2_147_483_647u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);
        let f = factorize(1_000_003u64 * 1_000_003 * 1_000_033).unwrap();
        assert_eq!(f.factors(), &[(1_000_003, 2), (1_000_033, 1)]);
    }

    #[test]
    fn factorize_matches_trial_division() {
        for n in 1..20_000u64 {
            assert_eq!(
                factorize(n).unwrap().factors(),
                trial_division(n).as_slice()
            );
        }
    }

    #[test]
    fn block_matches_single() {
        let block = factorize_block(999_000, 1_001_000).unwrap();
        for f in block {
            assert_eq!(f, factorize(f.n()).unwrap());
        }
        let block = factorize_block(1, 5000).unwrap();
        for f in block {
            assert_eq!(f, factorize(f.n()).unwrap());
        }
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt_exact(1), (1, true));
        assert_eq!(isqrt_exact(3), (1, false));
        assert_eq!(isqrt_exact(48), (6, false));
        assert_eq!(isqrt_exact(0), (0, true));
        let big = (1u128 << 63) - 25;
        assert_eq!(isqrt_exact(big * big), (big, true));
        assert_eq!(isqrt_exact(big * big - 1), (big - 1, false));
    }

    #[test]
    fn divisor_examples() {
        let f = factorize(60).unwrap();
        assert_eq!(
            divisors_sorted(&f),
            vec![1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]
        );
        assert_eq!(tau(&f), 12);
        assert_eq!(divisors_sorted(&factorize(97).unwrap()), vec![1, 97]);
        assert_eq!(
            divisors_sorted(&factorize(100).unwrap()),
            vec![1, 2, 4, 5, 10, 20, 25, 50, 100]
        );
        assert_eq!(tau(&factorize(1).unwrap()), 1);
        // p^2 q r has twelve divisors.
        assert_eq!(tau(&factorize(4 * 3 * 5).unwrap()), 12);
        assert_eq!(tau(&factorize(9 * 5 * 7).unwrap()), 12);
    }

    #[test]
    fn from_factors_checks_invariants() {
        assert_eq!(
            Factorization::from_factors(vec![(2, 2), (3, 1)])
                .unwrap()
                .n(),
            12
        );
        assert!(Factorization::from_factors(vec![(3, 1), (2, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(4, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 0)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 62)]).is_err());
    }
}
