//! Exact solution sets of order-two integral recurrences.
//!
//! A strictly increasing sequence `e_1 < e_2 < ... < e_m` satisfies
//! `U(e_1, e_2, a, b)` when `e_{i+2} = a e_{i+1} + b e_i` for every
//! `1 <= i <= m - 2`. [`solve_fit`] returns every integer pair `(a, b)` that
//! does so, as a point, a line, or nothing.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// The complete integer solution set of the recurrence constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "FitRepr", try_from = "FitRepr")]
pub enum FitVerdict {
    /// Fewer than three terms: no constraint at all.
    Vacuous,
    /// No integer pair satisfies every constraint.
    Empty,
    /// Exactly one pair.
    Point { a: i128, b: i128 },
    /// `base + t * dir` for every integer `t`. `dir` is primitive with a
    /// positive first nonzero coordinate; `base.1` lies in `[0, |dir.1|)`
    /// when `dir.1 != 0`.
    Line {
        base: (i128, i128),
        dir: (i128, i128),
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
enum FitKind {
    Vacuous,
    Empty,
    Point,
    Line,
}

/// Flat JSON form, `{"kind": "Point", "a": 2, "b": -1}`. An internally
/// tagged enum would buffer through serde's content type, which has no i128.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct FitRepr {
    kind: FitKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    a: Option<i128>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    b: Option<i128>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    base: Option<(i128, i128)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    dir: Option<(i128, i128)>,
}

impl From<FitVerdict> for FitRepr {
    fn from(v: FitVerdict) -> Self {
        let mut r = FitRepr {
            kind: FitKind::Vacuous,
            a: None,
            b: None,
            base: None,
            dir: None,
        };
        match v {
            FitVerdict::Vacuous => {}
            FitVerdict::Empty => r.kind = FitKind::Empty,
            FitVerdict::Point { a, b } => (r.kind, r.a, r.b) = (FitKind::Point, Some(a), Some(b)),
            FitVerdict::Line { base, dir } => {
                (r.kind, r.base, r.dir) = (FitKind::Line, Some(base), Some(dir))
            }
        }
        r
    }
}

impl TryFrom<FitRepr> for FitVerdict {
    type Error = String;

    fn try_from(r: FitRepr) -> std::result::Result<Self, String> {
        Ok(match (r.kind, r.a, r.b, r.base, r.dir) {
            (FitKind::Vacuous, None, None, None, None) => FitVerdict::Vacuous,
            (FitKind::Empty, None, None, None, None) => FitVerdict::Empty,
            (FitKind::Point, Some(a), Some(b), None, None) => FitVerdict::Point { a, b },
            (FitKind::Line, None, None, Some(base), Some(dir)) => FitVerdict::Line { base, dir },
            _ => return Err(format!("inconsistent fields for {:?} fit", r.kind)),
        })
    }
}

impl FitVerdict {
    /// Whether the set contains at least one pair (vacuous counts).
    pub fn is_satisfiable(&self) -> bool {
        !matches!(self, FitVerdict::Empty)
    }

    pub fn contains(&self, a: i128, b: i128) -> bool {
        match *self {
            FitVerdict::Vacuous => true,
            FitVerdict::Empty => false,
            FitVerdict::Point { a: pa, b: pb } => (pa, pb) == (a, b),
            FitVerdict::Line { base, dir } => {
                let (da, db) = (a - base.0, b - base.1);
                // (da, db) must be an integer multiple of the primitive dir.
                if da * dir.1 != db * dir.0 {
                    return false;
                }
                if dir.0 != 0 {
                    da % dir.0 == 0
                } else {
                    db % dir.1 == 0
                }
            }
        }
    }

    /// Members with `|a|, |b| <= bound`, sorted lexicographically.
    ///
    /// `Vacuous` yields the whole grid.
    pub fn grid_members(&self, bound: i128) -> Vec<(i128, i128)> {
        match *self {
            FitVerdict::Vacuous => (-bound..=bound)
                .flat_map(|a| (-bound..=bound).map(move |b| (a, b)))
                .collect(),
            FitVerdict::Empty => Vec::new(),
            FitVerdict::Point { a, b } => {
                if a.abs() <= bound && b.abs() <= bound {
                    vec![(a, b)]
                } else {
                    Vec::new()
                }
            }
            FitVerdict::Line { base, dir } => {
                let (mut lo, mut hi) = (i128::MIN, i128::MAX);
                for (c, d) in [(base.0, dir.0), (base.1, dir.1)] {
                    if d == 0 {
                        if c.abs() > bound {
                            return Vec::new();
                        }
                        continue;
                    }
                    // -bound <= c + t d <= bound
                    let (x, y) = ((-bound - c), (bound - c));
                    let (t0, t1) = if d > 0 {
                        (div_ceil(x, d), div_floor(y, d))
                    } else {
                        (div_ceil(y, d), div_floor(x, d))
                    };
                    lo = lo.max(t0);
                    hi = hi.min(t1);
                }
                if lo > hi {
                    return Vec::new();
                }
                // dir.0 >= 0, so increasing t keeps lexicographic order.
                (lo..=hi)
                    .map(|t| (base.0 + t * dir.0, base.1 + t * dir.1))
                    .collect()
            }
        }
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Returns `(x, y, g)` with `x a + y b = g = gcd(a, b) > 0`, for `a, b > 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_s, old_t, old_r)
}

pub(crate) fn check_sequence(seq: &[u64]) -> Result<()> {
    if seq.first() == Some(&0) {
        return Err(contract("sequence entries must be positive"));
    }
    if seq.windows(2).any(|w| w[0] >= w[1]) {
        return Err(contract("sequence must be strictly increasing"));
    }
    crate::arith::check_bound(seq.last().copied().unwrap_or(0))?;
    Ok(())
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("recurrence fit"))
}

fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow("recurrence fit"))
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("recurrence fit"))
}

/// Residual `e_{i+2} - a e_{i+1} - b e_i` of one constraint.
fn residual(w: &[u64], a: i128, b: i128) -> Result<i128> {
    let lhs = add(mul(a, w[1] as i128)?, mul(b, w[0] as i128)?)?;
    sub(w[2] as i128, lhs)
}

/// The exact integer solution set of `e_{i+2} = a e_{i+1} + b e_i`.
///
/// The first constraint is solved with the extended Euclidean algorithm into
/// a line `(a0, b0) + t (u, v)`; each later constraint then restricts `t` to
/// all of the integers, a single value, or nothing.
pub fn solve_fit(seq: &[u64]) -> Result<FitVerdict> {
    check_sequence(seq)?;
    if seq.len() <= 2 {
        return Ok(FitVerdict::Vacuous);
    }
    let (e1, e2, e3) = (seq[0] as i128, seq[1] as i128, seq[2] as i128);
    let (x, _, g) = ext_gcd(e2, e1);
    if e3 % g != 0 {
        return Ok(FitVerdict::Empty);
    }
    // a e2 + b e1 = e3; the homogeneous direction is (e1, -e2) / g.
    let (u, v) = (e1 / g, -e2 / g);
    // Reduce the particular solution so that b0 lies in [0, |v|).
    let a_part = (x.rem_euclid(u) * (e3 / g).rem_euclid(u)).rem_euclid(u);
    let b_part = (e3 - a_part * e2) / e1;
    let t = div_floor(b_part, -v);
    let (a0, b0) = (a_part + t * u, b_part + t * v);
    debug_assert_eq!(a0 * e2 + b0 * e1, e3);

    let mut verdict = FitVerdict::Line {
        base: (a0, b0),
        dir: (u, v),
    };
    for w in seq.windows(3).skip(1) {
        match verdict {
            FitVerdict::Line { base, dir } => {
                let coef = add(mul(dir.0, w[1] as i128)?, mul(dir.1, w[0] as i128)?)?;
                let rhs = residual(w, base.0, base.1)?;
                if coef == 0 {
                    if rhs != 0 {
                        return Ok(FitVerdict::Empty);
                    }
                } else {
                    if rhs % coef != 0 {
                        return Ok(FitVerdict::Empty);
                    }
                    let t = rhs / coef;
                    verdict = FitVerdict::Point {
                        a: add(base.0, mul(t, dir.0)?)?,
                        b: add(base.1, mul(t, dir.1)?)?,
                    };
                }
            }
            FitVerdict::Point { a, b } => {
                if residual(w, a, b)? != 0 {
                    return Ok(FitVerdict::Empty);
                }
            }
            FitVerdict::Vacuous | FitVerdict::Empty => unreachable!(),
        }
    }
    Ok(verdict)
}

/// Whether `(a, b)` satisfies every constraint of `seq`.
pub fn verify_params(seq: &[u64], a: i128, b: i128) -> Result<bool> {
    check_sequence(seq)?;
    for w in seq.windows(3) {
        match residual(w, a, b) {
            Ok(0) => {}
            Ok(_) | Err(Error::Overflow(_)) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Exhaustive scan of the grid `|a|, |b| <= bound`.
///
/// Independent of [`solve_fit`]; used as its test oracle.
pub fn brute_force_fit(seq: &[u64], bound: u64) -> Result<Vec<(i128, i128)>> {
    check_sequence(seq)?;
    if bound == 0 {
        return Err(contract("grid bound must be at least 1"));
    }
    let bound = bound as i128;
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            if seq
                .windows(3)
                .all(|w| a * w[1] as i128 + b * w[0] as i128 == w[2] as i128)
            {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape_round_trips() {
        let cases = [
            (FitVerdict::Vacuous, r#"{"kind":"Vacuous"}"#),
            (FitVerdict::Empty, r#"{"kind":"Empty"}"#),
            (
                FitVerdict::Point { a: 2, b: -1 },
                r#"{"kind":"Point","a":2,"b":-1}"#,
            ),
            (
                FitVerdict::Line {
                    base: (2, 0),
                    dir: (4, -5),
                },
                r#"{"kind":"Line","base":[2,0],"dir":[4,-5]}"#,
            ),
        ];
        for (v, text) in cases {
            assert_eq!(serde_json::to_string(&v).unwrap(), text);
            assert_eq!(serde_json::from_str::<FitVerdict>(text).unwrap(), v);
        }
        assert!(serde_json::from_str::<FitVerdict>(r#"{"kind":"Point","a":1}"#).is_err());
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve_fit(&[2, 3, 4, 5, 6]).unwrap(),
            FitVerdict::Point { a: 2, b: -1 }
        );
        assert_eq!(solve_fit(&[2, 4, 7]).unwrap(), FitVerdict::Empty);
        assert_eq!(
            solve_fit(&[2, 4, 8, 16]).unwrap(),
            FitVerdict::Line {
                base: (2, 0),
                dir: (1, -2)
            }
        );
        assert_eq!(
            solve_fit(&[2, 3, 5, 6, 7, 10, 11, 14, 15]).unwrap(),
            FitVerdict::Empty
        );
        assert_eq!(solve_fit(&[7]).unwrap(), FitVerdict::Vacuous);
        assert_eq!(solve_fit(&[]).unwrap(), FitVerdict::Vacuous);
        assert_eq!(solve_fit(&[3, 9]).unwrap(), FitVerdict::Vacuous);
    }

    #[test]
    fn three_terms_use_gcd_criterion() {
        // 25a + 20b = 50: 5 | 50.
        let v = solve_fit(&[20, 25, 50]).unwrap();
        assert!(v.contains(2, 0));
        assert_eq!(
            v,
            FitVerdict::Line {
                base: (2, 0),
                dir: (4, -5)
            }
        );
        // qr = a pr + b pq has no solution when p does not divide qr.
        assert_eq!(solve_fit(&[6, 10, 15]).unwrap(), FitVerdict::Empty);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(solve_fit(&[3, 3, 4]), Err(Error::Contract(_))));
        assert!(matches!(solve_fit(&[4, 3]), Err(Error::Contract(_))));
        assert!(matches!(solve_fit(&[0, 3, 4]), Err(Error::Contract(_))));
        assert!(matches!(
            solve_fit(&[1, 2, u64::MAX]),
            Err(Error::Capacity { .. })
        ));
        assert!(brute_force_fit(&[1, 2, 3], 0).is_err());
    }

    #[test]
    fn verify_examples() {
        assert!(verify_params(&[2, 3, 6, 9], 0, 3).unwrap());
        assert!(verify_params(&[2, 3, 4, 5, 6], 2, -1).unwrap());
        assert!(!verify_params(&[2, 3, 4, 5, 6], 1, 1).unwrap());
        assert!(verify_params(&[5, 9], 100, -7).unwrap());
        assert!(!verify_params(&[1, 2, 3], i128::MAX, i128::MAX).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_fit(&[2, 4, 7], 50).unwrap().is_empty());
        assert_eq!(
            brute_force_fit(&[2, 3, 4, 5, 6], 10).unwrap(),
            vec![(2, -1)]
        );
        assert_eq!(
            brute_force_fit(&[2, 4, 8], 3).unwrap(),
            vec![(1, 2), (2, 0), (3, -2)]
        );
    }

    #[test]
    fn grid_members_of_line() {
        let v = solve_fit(&[2, 4, 8]).unwrap();
        assert_eq!(v.grid_members(3), vec![(1, 2), (2, 0), (3, -2)]);
        assert_eq!(FitVerdict::Point { a: 4, b: 0 }.grid_members(3), vec![]);
        assert_eq!(FitVerdict::Vacuous.grid_members(1).len(), 9);
    }

    #[test]
    fn large_geometric_chain_stays_exact() {
        let p: u64 = 1_000_003;
        let seq = [p, p * p, p * p * p];
        let v = solve_fit(&seq).unwrap();
        assert!(v.contains(p as i128, 0));
        let seq = [2, 3, 1 << 61];
        let v = solve_fit(&seq).unwrap();
        let FitVerdict::Line { base, .. } = v else {
            panic!("expected a line, got {v:?}");
        };
        assert!(verify_params(&seq, base.0, base.1).unwrap());
    }
}
