//! Order-two integral linear recurrences in the nontrivial divisors of an
//! integer.
//!
//! For `n > 1` let `S'(n)` be the divisors `d` with `1 < d < sqrt(n)` and
//! `L'(n)` those with `sqrt(n) < d < n`. This crate decides exactly whether
//! either set, listed in increasing order, satisfies some recurrence
//! `x_{i+2} = a x_{i+1} + b x_i` with integer `a, b`, classifies `n` against
//! the known closed-form families of such integers, and cross-checks the two
//! over ranges.
//!
//! * [`arith`]: primality, factorization, divisors.
//! * [`fit`]: exact solution sets of the recurrence constraints.
//! * [`profile`]: the divisor sets themselves.
//! * [`oracle`]: brute-force verdicts.
//! * [`classify`]: closed-form families.
//! * [`search`]: searches for the rare conditional families.
//! * [`harness`]: range validation, reports and the errata ledger.
//! * [`cli`]: the `divrec` command line.

pub mod arith;
pub mod classify;
pub mod cli;
pub mod error;
pub mod fit;
pub mod harness;
pub mod oracle;
pub mod profile;
pub mod search;

pub use arith::{divisors_sorted, factorize, is_prime, isqrt_exact, tau, Factorization};
pub use classify::{
    classify_large, classify_small, verify_prediction, FormMatch, FormParams, Recurrence, Theorem,
};
pub use error::{Error, Result};
pub use fit::{brute_force_fit, solve_fit, verify_params, FitVerdict};
pub use harness::{check_single, validate_range, ErrataEntry, ErrataKind, ValidationRecord};
pub use oracle::{large_verdict, small_verdict, RecurrenceVerdict};
pub use profile::{check_tau_identity, profile, DivisorProfile};
pub use search::{search_large5, search_s7, L5Pair, S7Triple};
