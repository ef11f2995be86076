use divrec::arith::{self, factorize, is_prime};
use divrec::classify::{classify_large, classify_small};
use divrec::fit::{brute_force_fit, solve_fit, verify_params, FitVerdict};
use divrec::harness::check_single;
use divrec::profile::profile;
use proptest::prelude::*;

fn increasing(max_len: usize, max_entry: u64) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::btree_set(1..=max_entry, 0..=max_len)
        .prop_map(|s| s.into_iter().collect())
}

/// First terms of `U(u, v, a, b)` while they stay increasing and small.
fn recurrence_terms(u: u64, v: u64, a: i128, b: i128, len: usize) -> Vec<u64> {
    let mut s = vec![u as i128, v as i128];
    while s.len() < len {
        let k = s.len();
        let next = a * s[k - 1] + b * s[k - 2];
        if next <= s[k - 1] || next > 1 << 50 {
            break;
        }
        s.push(next);
    }
    s.into_iter().map(|x| x as u64).collect()
}

proptest! {
    #[test]
    fn solver_agrees_with_grid_scan(seq in increasing(7, 300)) {
        let v = solve_fit(&seq).unwrap();
        prop_assert_eq!(v.grid_members(25), brute_force_fit(&seq, 25).unwrap());
    }

    #[test]
    fn every_reported_member_verifies(seq in increasing(6, 10_000)) {
        let v = solve_fit(&seq).unwrap();
        for (a, b) in v.grid_members(1000) {
            prop_assert!(verify_params(&seq, a, b).unwrap());
        }
        if let FitVerdict::Point { a, b } = v {
            prop_assert!(verify_params(&seq, a, b).unwrap());
        }
    }

    #[test]
    fn generated_sequences_contain_their_parameters(
        u in 1u64..100,
        gap in 1u64..100,
        a in -3i128..10,
        b in -6i128..6,
        len in 3usize..10,
    ) {
        let seq = recurrence_terms(u, u + gap, a, b, len);
        let v = solve_fit(&seq).unwrap();
        prop_assert!(v.contains(a, b));
        if seq.len() >= 3 {
            prop_assert!(v.is_satisfiable());
        }
    }

    #[test]
    fn geometric_chains_fit_as_lines(first in 1u64..1000, ratio in 2u64..50, len in 3usize..8) {
        let mut seq = vec![first];
        while seq.len() < len && *seq.last().unwrap() < 1 << 40 {
            let next = seq.last().unwrap() * ratio;
            seq.push(next);
        }
        prop_assume!(seq.len() >= 3);
        let v = solve_fit(&seq).unwrap();
        let is_line = matches!(v, FitVerdict::Line { .. });
        prop_assert!(is_line, "{:?}", v);
        prop_assert!(v.contains(ratio as i128, 0));
    }

    #[test]
    fn longer_sequences_only_shrink_the_solution_set(seq in increasing(7, 500)) {
        let full = solve_fit(&seq).unwrap().grid_members(40);
        for k in 0..seq.len() {
            let prefix = solve_fit(&seq[..k]).unwrap().grid_members(40);
            prop_assert!(full.iter().all(|m| prefix.contains(m)));
        }
    }

    #[test]
    fn factorization_is_exact(n in 1u64..arith::DEFAULT_BOUND) {
        let f = factorize(n).unwrap();
        prop_assert_eq!(f.expand(), n as u128);
        for &(p, e) in f.factors() {
            prop_assert!(e >= 1 && is_prime(p).unwrap());
        }
    }

    #[test]
    fn smooth_numbers_keep_the_tau_identity(
        exps in proptest::collection::vec(0u32..4, 6),
    ) {
        // At most 30030^3, well inside the bound.
        let primes = [2u64, 3, 5, 7, 11, 13];
        let n: u128 = primes.iter().zip(&exps).map(|(&p, &e)| (p as u128).pow(e)).product();
        prop_assume!(n >= 2);
        let p = profile(n as u64).unwrap();
        let expected: u64 = exps.iter().map(|&e| e as u64 + 1).product();
        prop_assert_eq!(p.tau, expected);
        prop_assert!(p.tau_identity_holds());
        let mut image: Vec<u64> = p.large_strict.iter().map(|&d| p.n / d).collect();
        image.sort_unstable();
        prop_assert_eq!(image, p.small_strict.clone());
    }

    #[test]
    fn stated_recurrences_generate_their_sets(n in 2u64..5_000_000) {
        for m in classify_small(n).unwrap().into_iter().chain(classify_large(n).unwrap()) {
            if let (Some(set), Some(u)) = (&m.predicted_set, &m.predicted_u) {
                prop_assert!(u.generates(set).unwrap(), "n = {}, form {} {:?}", n, m.form_id, m.theorem);
            }
        }
    }

    #[test]
    fn single_check_matches_classifier(n in 2u64..5_000_000) {
        let rec = check_single(n).unwrap();
        let ids = |v: Vec<divrec::FormMatch>| v.into_iter().map(|m| m.form_id).collect::<Vec<_>>();
        prop_assert_eq!(rec.small_forms, ids(classify_small(n).unwrap()));
        prop_assert_eq!(rec.large_forms, ids(classify_large(n).unwrap()));
    }
}
