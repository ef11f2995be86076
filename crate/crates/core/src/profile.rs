//! The nontrivial small and large divisor sets of an integer.

use serde::{Deserialize, Serialize};

use crate::arith::{self, Factorization};
use crate::error::{contract, Result};

/// Sorted divisors of `n` split around `sqrt(n)`.
///
/// `small_strict` holds every divisor `d` with `1 < d < sqrt(n)` and
/// `large_strict` every divisor with `sqrt(n) < d < n`. A square root of `n`
/// belongs to neither.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorProfile {
    pub n: u64,
    pub factorization: Factorization,
    pub divisors: Vec<u64>,
    pub small_strict: Vec<u64>,
    pub large_strict: Vec<u64>,
    pub tau: u64,
    pub is_square: bool,
}

impl DivisorProfile {
    /// Builds the profile from an existing factorization of `n >= 2`.
    pub fn from_factorization(factorization: Factorization) -> Result<Self> {
        let n = factorization.n();
        if n < 2 {
            return Err(contract(format!("divisor profile needs n >= 2, got {n}")));
        }
        let divisors = arith::divisors_sorted(&factorization);
        let n128 = n as u128;
        let small_strict: Vec<u64> = divisors[1..]
            .iter()
            .copied()
            .take_while(|&d| (d as u128) * (d as u128) < n128)
            .collect();
        let is_square = arith::isqrt_exact(n128).1;
        // d -> n/d maps the small side onto the large side.
        let large_strict: Vec<u64> = small_strict.iter().rev().map(|&d| n / d).collect();
        Ok(Self {
            n,
            tau: divisors.len() as u64,
            factorization,
            divisors,
            small_strict,
            large_strict,
            is_square,
        })
    }

    /// The divisor set for one side of the split.
    pub fn side(&self, large: bool) -> &[u64] {
        if large {
            &self.large_strict
        } else {
            &self.small_strict
        }
    }

    /// `tau(n) = 2|S'| + 3` for squares and `2|S'| + 2` otherwise, with
    /// `tau` taken from the exponents rather than the divisor list.
    pub fn tau_identity_holds(&self) -> bool {
        let s = self.small_strict.len() as u64;
        let expected = if self.is_square { 2 * s + 3 } else { 2 * s + 2 };
        self.factorization.tau() == expected && self.tau == expected
    }
}

/// Factors `n` and builds its [`DivisorProfile`].
pub fn profile(n: u64) -> Result<DivisorProfile> {
    if n < 2 {
        return Err(contract(format!("divisor profile needs n >= 2, got {n}")));
    }
    DivisorProfile::from_factorization(arith::factorize(n)?)
}

/// Checks the divisor-count identity against the computed profile of `n`.
pub fn check_tau_identity(n: u64) -> Result<bool> {
    Ok(profile(n)?.tau_identity_holds())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_examples() {
        let p = profile(60).unwrap();
        assert_eq!(p.small_strict, vec![2, 3, 4, 5, 6]);
        assert_eq!(p.large_strict, vec![10, 12, 15, 20, 30]);
        assert!(!p.is_square);

        let p = profile(100).unwrap();
        assert_eq!(p.small_strict, vec![2, 4, 5]);
        assert_eq!(p.large_strict, vec![20, 25, 50]);
        assert!(p.is_square);
        assert_eq!(p.tau, 9);

        let p = profile(101).unwrap();
        assert!(p.small_strict.is_empty() && p.large_strict.is_empty());
    }

    #[test]
    fn large_side_matches_direct_filter() {
        for n in 2..5000u64 {
            let p = profile(n).unwrap();
            let direct: Vec<u64> = p
                .divisors
                .iter()
                .copied()
                .filter(|&d| d < n && (d as u128).pow(2) > n as u128)
                .collect();
            assert_eq!(p.large_strict, direct, "n = {n}");
        }
    }

    #[test]
    fn tau_identity_examples() {
        assert!(check_tau_identity(100).unwrap());
        assert!(check_tau_identity(60).unwrap());
        assert!(check_tau_identity(2).unwrap());
        assert!(check_tau_identity(1).is_err());
        assert!(check_tau_identity(0).is_err());
    }

    #[test]
    fn exact_near_the_bound() {
        // (2^31 - 1)^2 is a square just under 2^62.
        let p = 2_147_483_647u64;
        let prof = profile(p * p).unwrap();
        assert!(prof.is_square);
        assert!(prof.small_strict.is_empty());
        assert!(prof.tau_identity_holds());
    }
}
