//! Matching `n` against the closed-form characterizations of small and
//! large recurrent integers.
//!
//! Each form is transcribed as stated: its shape (the exponent signature of
//! `n`), its side conditions, the divisor set it predicts and, where stated,
//! the recurrence `U(u, v, a, b)` that set satisfies. Throughout, `p < q < r`
//! name the distinct prime factors of `n` in increasing order.
//!
//! No form is adjusted to agree with the brute-force oracle; disagreements
//! are surfaced by the validation harness instead.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, Factorization};
use crate::error::{contract, Result};
use crate::fit;
use crate::profile::DivisorProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theorem {
    Small,
    Large,
}

impl Theorem {
    pub fn is_large(self) -> bool {
        self == Theorem::Large
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Small => "Small",
            Theorem::Large => "Large",
        })
    }
}

/// The primes and exponent a form is instantiated at.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u32>,
}

impl fmt::Display for FormParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sep = "";
        for (name, v) in [("p", self.p), ("q", self.q), ("r", self.r)] {
            if let Some(v) = v {
                write!(f, "{sep}{name}={v}")?;
                sep = ", ";
            }
        }
        if let Some(k) = self.k {
            write!(f, "{sep}k={k}")?;
        }
        Ok(())
    }
}

/// A recurrence `U(u, v, a, b)`: `n_1 = u`, `n_2 = v`,
/// `n_i = a n_{i-1} + b n_{i-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Recurrence {
    pub u: u64,
    pub v: u64,
    pub a: i128,
    pub b: i128,
}

impl Recurrence {
    pub fn new(u: u128, v: u128, a: i128, b: i128) -> Self {
        // Forms only ever name divisors of n (or n itself), which fit in u64.
        Self {
            u: u as u64,
            v: v as u64,
            a,
            b,
        }
    }

    /// Whether `set` is the enumeration of this recurrence.
    pub fn generates(&self, set: &[u64]) -> Result<bool> {
        let starts = match set {
            [] => true,
            [x] => *x == self.u,
            [x, y, ..] => *x == self.u && *y == self.v,
        };
        Ok(starts && fit::verify_params(set, self.a, self.b)?)
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({}, {}, {}, {})", self.u, self.v, self.a, self.b)
    }
}

/// One matched form together with what it predicts about `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormMatch {
    pub n: u64,
    pub theorem: Theorem,
    pub form_id: u8,
    pub params: FormParams,
    pub predicted_set: Option<Vec<u64>>,
    pub predicted_u: Option<Recurrence>,
}

fn pow(p: u64, k: u32) -> u128 {
    (p as u128).pow(k)
}

/// `|d|` divides `|x|`, with every integer dividing zero.
fn divides(d: i128, x: i128) -> bool {
    if x == 0 {
        return true;
    }
    d != 0 && x.unsigned_abs().is_multiple_of(d.unsigned_abs())
}

fn set_of(mut v: Vec<u128>) -> Vec<u64> {
    v.sort_unstable();
    v.into_iter().map(|x| x as u64).collect()
}

/// Terms of `U(u, v, a, b)` while they stay strictly below `sqrt(n)`.
fn terms_below_root(u: u128, v: u128, a: i128, b: i128, n: u64) -> Vec<u64> {
    let n = n as u128;
    let mut out = Vec::new();
    let (mut x, mut y) = (u as i128, v as i128);
    while x > 0 && (x as u128) * (x as u128) < n {
        out.push(x as u64);
        (x, y) = (y, a * y + b * x);
    }
    out
}

struct Builder {
    n: u64,
    theorem: Theorem,
    out: Vec<FormMatch>,
}

impl Builder {
    fn push(&mut self, form_id: u8, params: FormParams, set: Vec<u64>, u: Option<Recurrence>) {
        self.out.push(FormMatch {
            n: self.n,
            theorem: self.theorem,
            form_id,
            params,
            predicted_set: Some(set),
            predicted_u: u,
        });
    }

    fn finish(mut self) -> Vec<FormMatch> {
        self.out.sort_by_key(|m| m.form_id);
        self.out
    }
}

fn pk(p: u64, k: u32) -> FormParams {
    FormParams {
        p: Some(p),
        k: Some(k),
        ..Default::default()
    }
}

fn pq(p: u64, q: u64) -> FormParams {
    FormParams {
        p: Some(p),
        q: Some(q),
        ..Default::default()
    }
}

fn pqk(p: u64, q: u64, k: u32) -> FormParams {
    FormParams {
        k: Some(k),
        ..pq(p, q)
    }
}

fn pqr(p: u64, q: u64, r: u64) -> FormParams {
    FormParams {
        r: Some(r),
        ..pq(p, q)
    }
}

/// Form-10 data for `n = p^2 q r`: the recurrence parameters when every
/// side condition holds.
pub fn small_form10_params(p: u64, q: u64, r: u64) -> Option<(i128, i128)> {
    let (p, q, r) = (p as i128, q as i128, r as i128);
    if !(p < q && q < p * p && p * p < r && r < p * q) {
        return None;
    }
    let d = q * q - p.pow(3);
    // A nonpositive radicand leaves no real square root to subtract.
    if d <= 0 {
        return None;
    }
    let radicand = d * (p * p - q);
    let (root, exact) = arith::isqrt_exact(radicand as u128);
    if !exact || r != p * q - root as i128 {
        return None;
    }
    if !divides(d, p * q - r) || !divides(d, r * q - p.pow(4)) {
        return None;
    }
    Some((p * (p * q - r) / d, (r * q - p.pow(4)) / d))
}

/// Side conditions of large form 5 for `n = p^4 q`.
pub fn large_form5_holds(p: u64, q: u64) -> bool {
    let (p, q) = (p as i128, q as i128);
    if !(p * p < q && q < p.pow(3)) {
        return false;
    }
    let d = p.pow(5) - q * q;
    divides(d, p * p - q) && divides(d, p.pow(3) - q)
}

/// Every small-recurrent form `n` matches, sorted by form id.
pub fn classify_small_factored(f: &Factorization) -> Result<Vec<FormMatch>> {
    let n = f.n();
    if n < 2 {
        return Err(contract(format!("classification needs n >= 2, got {n}")));
    }
    let mut m = Builder {
        n,
        theorem: Theorem::Small,
        out: Vec::new(),
    };
    let primes = f.primes();
    match (primes.as_slice(), f.exponents().as_slice()) {
        (&[p], &[k]) => {
            let set: Vec<u64> = (1..=(k - 1) / 2).map(|i| pow(p, i) as u64).collect();
            let u = (!set.is_empty()).then(|| Recurrence::new(pow(p, 1), pow(p, 2), p as i128, 0));
            m.push(1, pk(p, k), set, u);
        }
        (&[p, q], &[a, b]) => {
            let (p1, q1) = (p as u128, q as u128);
            // Form 2: p^k q or p q^k with 1 <= k <= 3.
            if b == 1 && a <= 3 {
                let set = match a {
                    1 => Some(vec![p1]),
                    2 if q1 < p1 * p1 => Some(vec![p1, q1]),
                    2 => Some(vec![p1, p1 * p1]),
                    3 if q1 < p1 * p1 => Some(vec![p1, q1, p1 * p1]),
                    3 if q1 > pow(p, 3) => Some(vec![p1, p1 * p1, pow(p, 3)]),
                    _ => None,
                };
                if let Some(set) = set {
                    m.push(2, pqk(p, q, a), set_of(set), None);
                }
            }
            if a == 1 && (2..=3).contains(&b) {
                let set = if b == 2 {
                    vec![p1, q1]
                } else {
                    vec![p1, q1, p1 * q1]
                };
                m.push(2, pqk(p, q, b), set_of(set), None);
            }
            if b == 1 && a >= 4 && q1 > pow(p, a) {
                let set = set_of((1..=a).map(|i| pow(p, i)).collect());
                m.push(
                    3,
                    pqk(p, q, a),
                    set,
                    Some(Recurrence::new(p1, p1 * p1, p as i128, 0)),
                );
            }
            // sqrt(q) < p < q.
            if b == 1 && a >= 4 && q1 < p1 * p1 {
                let set = terms_below_root(p1, q1, 0, p as i128, n);
                m.push(
                    4,
                    pqk(p, q, a),
                    set,
                    Some(Recurrence::new(p1, q1, 0, p as i128)),
                );
            }
            if a == 1 && b >= 4 {
                let set = terms_below_root(p1, q1, 0, q as i128, n);
                m.push(
                    5,
                    pqk(p, q, b),
                    set,
                    Some(Recurrence::new(p1, q1, 0, q as i128)),
                );
            }
            if a == 2 && b == 2 && q1 < p1 * p1 {
                m.push(7, pq(p, q), vec![p, q, p * p], None);
            }
            // p^{3/2} < q < p^2.
            if a == 3 && b == 2 && pow(p, 3) < q1 * q1 && q1 < p1 * p1 {
                let set = set_of(vec![p1, q1, p1 * p1, p1 * q1, pow(p, 3)]);
                m.push(
                    9,
                    pq(p, q),
                    set,
                    Some(Recurrence::new(p1, q1, 0, p as i128)),
                );
            }
        }
        (&[p, q, r], &[a, b, c]) => {
            let (p1, q1, r1) = (p as u128, q as u128, r as u128);
            if a == 1 && b >= 2 && c == 1 && r1 > p1 * pow(q, b) {
                let mut set: Vec<u128> = (0..=b).map(|i| p1 * pow(q, i)).collect();
                set.extend((1..=b).map(|i| pow(q, i)));
                m.push(
                    6,
                    FormParams {
                        r: Some(r),
                        ..pqk(p, q, b)
                    },
                    set_of(set),
                    Some(Recurrence::new(p1, q1, 0, q as i128)),
                );
            }
            if (a, b, c) == (1, 1, 1) {
                let third = if r1 < p1 * q1 { r1 } else { p1 * q1 };
                m.push(8, pqr(p, q, r), set_of(vec![p1, q1, third]), None);
            }
            if (a, b, c) == (2, 1, 1) {
                if let Some((fa, fb)) = small_form10_params(p, q, r) {
                    let set = set_of(vec![p1, q1, p1 * p1, r1, p1 * q1]);
                    m.push(10, pqr(p, q, r), set, Some(Recurrence::new(p1, q1, fa, fb)));
                }
            }
        }
        _ => {}
    }
    Ok(m.finish())
}

/// Every large-recurrent form `n` matches, sorted by form id.
pub fn classify_large_factored(f: &Factorization) -> Result<Vec<FormMatch>> {
    let n = f.n();
    if n < 2 {
        return Err(contract(format!("classification needs n >= 2, got {n}")));
    }
    let mut m = Builder {
        n,
        theorem: Theorem::Large,
        out: Vec::new(),
    };
    let primes = f.primes();
    match (primes.as_slice(), f.exponents().as_slice()) {
        (&[p], &[k]) => {
            // ceil((k - 1) / 2) = floor(k / 2)
            let c = k / 2;
            let set: Vec<u64> = (c + 1..k).map(|i| pow(p, i) as u64).collect();
            let u = (!set.is_empty())
                .then(|| Recurrence::new(pow(p, c + 1), pow(p, c + 2), p as i128, 0));
            m.push(1, pk(p, k), set, u);
        }
        (&[p, q], &[a, b]) => {
            let (p1, q1) = (p as u128, q as u128);
            if b == 1 && q1 > pow(p, a) {
                let set = set_of((0..a).map(|i| pow(p, i) * q1).collect());
                m.push(
                    2,
                    pqk(p, q, a),
                    set,
                    Some(Recurrence::new(q1, p1 * q1, p as i128, 0)),
                );
            }
            if b == 1 && a >= 2 && pow(p, a - 1) < q1 && q1 < pow(p, a) {
                let mut set: Vec<u128> = (1..a).map(|i| pow(p, i) * q1).collect();
                set.push(pow(p, a));
                m.push(
                    3,
                    pqk(p, q, a),
                    set_of(set),
                    Some(Recurrence::new(pow(p, a), p1 * q1, p as i128, 0)),
                );
            }
            if b == 1 && a >= 3 && q1 < p1 * p1 {
                let mut set = Vec::new();
                let u = if a % 2 == 0 {
                    for j in a / 2..a {
                        set.push(pow(p, j + 1));
                        set.push(pow(p, j) * q1);
                    }
                    Recurrence::new(pow(p, a / 2 + 1), pow(p, a / 2) * q1, 0, p as i128)
                } else {
                    for j in (a - 1) / 2..a {
                        set.push(pow(p, j) * q1);
                        if j + 2 <= a {
                            set.push(pow(p, j + 2));
                        }
                    }
                    Recurrence::new(pow(p, (a - 1) / 2) * q1, pow(p, (a + 3) / 2), 0, p as i128)
                };
                m.push(4, pqk(p, q, a), set_of(set), Some(u));
            }
            if b == 1 && a == 4 && large_form5_holds(p, q) {
                let set = set_of(vec![p1 * q1, pow(p, 4), p1 * p1 * q1, pow(p, 3) * q1]);
                m.push(5, pq(p, q), set, None);
            }
            if a == 3 && b == 2 && q1 < p1 * p1 {
                let set = set_of(vec![
                    q1 * q1,
                    p1 * p1 * q1,
                    p1 * q1 * q1,
                    pow(p, 3) * q1,
                    p1 * p1 * q1 * q1,
                ]);
                m.push(
                    6,
                    pq(p, q),
                    set,
                    Some(Recurrence::new(q1 * q1, p1 * p1 * q1, 0, p as i128)),
                );
            }
            if a == 2 && b == 2 && q1 < p1 * p1 {
                let set = set_of(vec![q1 * q1, p1 * p1 * q1, p1 * q1 * q1]);
                m.push(7, pq(p, q), set, None);
            }
            if a == 1 && b >= 2 {
                let k = b;
                let mut set = Vec::new();
                let u = if k % 2 == 0 {
                    for j in k / 2..k {
                        set.push(p1 * pow(q, j));
                        set.push(pow(q, j + 1));
                    }
                    Recurrence::new(p1 * pow(q, k / 2), pow(q, k / 2 + 1), 0, q as i128)
                } else {
                    for j in k.div_ceil(2)..=k {
                        set.push(pow(q, j));
                        if j < k {
                            set.push(p1 * pow(q, j));
                        }
                    }
                    Recurrence::new(
                        pow(q, k.div_ceil(2)),
                        p1 * pow(q, k.div_ceil(2)),
                        0,
                        q as i128,
                    )
                };
                m.push(8, pqk(p, q, k), set_of(set), Some(u));
            }
        }
        (&[p, q, r], &[1, k, 1]) => {
            let (p1, r1) = (p as u128, r as u128);
            if r1 > p1 * pow(q, k) {
                let mut set: Vec<u128> = (0..=k).map(|i| pow(q, i) * r1).collect();
                set.extend((0..k).map(|i| p1 * pow(q, i) * r1));
                m.push(
                    9,
                    FormParams {
                        r: Some(r),
                        ..pqk(p, q, k)
                    },
                    set_of(set),
                    Some(Recurrence::new(r1, p1 * r1, 0, q as i128)),
                );
            }
        }
        _ => {}
    }
    Ok(m.finish())
}

pub fn classify_small(n: u64) -> Result<Vec<FormMatch>> {
    if n < 2 {
        return Err(contract(format!("classification needs n >= 2, got {n}")));
    }
    classify_small_factored(&arith::factorize(n)?)
}

pub fn classify_large(n: u64) -> Result<Vec<FormMatch>> {
    if n < 2 {
        return Err(contract(format!("classification needs n >= 2, got {n}")));
    }
    classify_large_factored(&arith::factorize(n)?)
}

pub fn classify(f: &Factorization, theorem: Theorem) -> Result<Vec<FormMatch>> {
    match theorem {
        Theorem::Small => classify_small_factored(f),
        Theorem::Large => classify_large_factored(f),
    }
}

/// Checks a match's predicted set and recurrence against the computed
/// divisor set of the same `n`.
pub fn verify_prediction(m: &FormMatch, profile: &DivisorProfile) -> Result<bool> {
    if m.n != profile.n {
        return Err(contract(format!(
            "match for n = {} checked against profile of {}",
            m.n, profile.n
        )));
    }
    let actual = profile.side(m.theorem.is_large());
    if let Some(set) = &m.predicted_set {
        if set.as_slice() != actual {
            return Ok(false);
        }
    }
    match &m.predicted_u {
        Some(u) => u.generates(actual),
        None => Ok(true),
    }
}
