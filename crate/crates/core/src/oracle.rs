//! Ground-truth recurrence verdicts computed directly from the divisor sets.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fit::{self, FitVerdict};
use crate::profile::{self, DivisorProfile};

/// Whether one divisor set satisfies an order-two integral recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceVerdict {
    pub recurrent: bool,
    pub vacuous: bool,
    pub fit: FitVerdict,
    /// A canonical member of the solution set; absent for vacuous and
    /// non-recurrent verdicts.
    pub witness: Option<(i128, i128)>,
}

impl RecurrenceVerdict {
    pub fn from_fit(fit: FitVerdict) -> Self {
        let witness = match fit {
            FitVerdict::Point { a, b } => Some((a, b)),
            FitVerdict::Line { base, dir } => Some(line_witness(base, dir)),
            FitVerdict::Vacuous | FitVerdict::Empty => None,
        };
        Self {
            recurrent: fit.is_satisfiable(),
            vacuous: fit == FitVerdict::Vacuous,
            fit,
            witness,
        }
    }
}

/// Line member minimizing `|a|`, then `|b|`, preferring `a >= 0` on ties.
fn line_witness(base: (i128, i128), dir: (i128, i128)) -> (i128, i128) {
    let at = |t: i128| (base.0 + t * dir.0, base.1 + t * dir.1);
    let key = |(a, b): (i128, i128)| (a.unsigned_abs(), b.unsigned_abs(), a < 0);
    let centre = if dir.0 == 0 {
        // a is constant along the line; minimize |b| instead.
        -base.1 / dir.1
    } else {
        -base.0 / dir.0
    };
    (centre - 2..=centre + 2)
        .map(at)
        .min_by_key(|&m| key(m))
        .expect("non-empty candidate range")
}

pub fn verdict_for(profile: &DivisorProfile, large: bool) -> Result<RecurrenceVerdict> {
    Ok(RecurrenceVerdict::from_fit(fit::solve_fit(
        profile.side(large),
    )?))
}

/// Is `n` small recurrent?
pub fn small_verdict(n: u64) -> Result<RecurrenceVerdict> {
    verdict_for(&profile::profile(n)?, false)
}

/// Is `n` large recurrent?
pub fn large_verdict(n: u64) -> Result<RecurrenceVerdict> {
    verdict_for(&profile::profile(n)?, true)
}
