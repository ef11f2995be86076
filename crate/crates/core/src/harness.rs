//! Range cross-validation of the brute-force oracle against the closed-form
//! classifier, with JSONL reports, a CSV summary and a persistent errata
//! ledger.
//!
//! The scan splits `[lo, hi]` into contiguous blocks of at least
//! [`MIN_BLOCK`] integers, factors each block with a segmented sieve and
//! checks every `n` independently. Blocks are merged in order of `n`, so the
//! output does not depend on the number of workers.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, Factorization};
use crate::classify::{self, FormMatch, Theorem};
use crate::error::{contract, Error, Result};
use crate::oracle::{self, RecurrenceVerdict};
use crate::profile::DivisorProfile;

/// Smallest block handed to a worker.
pub const MIN_BLOCK: u64 = 4096;

/// Integers above this are written as decimal strings in JSON.
const JSON_SAFE_INT: u64 = 1 << 53;

/// Serializes a `u64` as a JSON number when it is exactly representable as
/// a double and as a decimal string otherwise.
pub mod json_u64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        if *v > super::JSON_SAFE_INT {
            s.serialize_str(&v.to_string())
        } else {
            s.serialize_u64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

pub(crate) fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Err(contract("jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| contract(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Oracle and classifier outcomes for one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationRecord {
    #[serde(with = "json_u64")]
    pub n: u64,
    pub small_oracle: bool,
    pub small_forms: Vec<u8>,
    pub large_oracle: bool,
    pub large_forms: Vec<u8>,
    pub prediction_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ErrataKind {
    OracleYesClassifierNo,
    OracleNoClassifierYes,
    PredictionMismatch,
}

/// A disagreement between the oracle and the classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrataEntry {
    #[serde(with = "json_u64")]
    pub n: u64,
    pub theorem: Theorem,
    pub kind: ErrataKind,
    pub detail: String,
}

impl ErrataEntry {
    pub fn key(&self) -> (u64, Theorem) {
        (self.n, self.theorem)
    }
}

/// Counts over a validated range. Serializes to the summary CSV columns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub range_lo: u64,
    pub range_hi: u64,
    pub count_small_recurrent: u64,
    pub count_small_vacuous: u64,
    pub count_large_recurrent: u64,
    pub count_large_vacuous: u64,
    pub errata_small: u64,
    pub errata_large: u64,
    #[serde(skip)]
    pub count_small_classified: u64,
    #[serde(skip)]
    pub count_large_classified: u64,
}

impl Summary {
    fn add(
        &mut self,
        rec: &ValidationRecord,
        small: &RecurrenceVerdict,
        large: &RecurrenceVerdict,
    ) {
        self.count_small_recurrent += small.recurrent as u64;
        self.count_small_vacuous += small.vacuous as u64;
        self.count_large_recurrent += large.recurrent as u64;
        self.count_large_vacuous += large.vacuous as u64;
        self.count_small_classified += !rec.small_forms.is_empty() as u64;
        self.count_large_classified += !rec.large_forms.is_empty() as u64;
    }

    fn merge(&mut self, o: &Summary) {
        self.count_small_recurrent += o.count_small_recurrent;
        self.count_small_vacuous += o.count_small_vacuous;
        self.count_large_recurrent += o.count_large_recurrent;
        self.count_large_vacuous += o.count_large_vacuous;
        self.errata_small += o.errata_small;
        self.errata_large += o.errata_large;
        self.count_small_classified += o.count_small_classified;
        self.count_large_classified += o.count_large_classified;
    }
}

/// Full result of a range validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub summary: Summary,
    pub records: Vec<ValidationRecord>,
    pub ledger: Vec<ErrataEntry>,
}

/// Everything computed for one `n` on one side.
#[derive(Debug, Clone)]
pub struct SideCheck {
    pub verdict: RecurrenceVerdict,
    pub forms: Vec<FormMatch>,
    pub predictions_ok: bool,
    pub erratum: Option<ErrataEntry>,
}

fn fmt_list(v: &[u64]) -> String {
    let mut s = String::from("[");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{x}");
    }
    s.push(']');
    s
}

pub fn check_side(profile: &DivisorProfile, theorem: Theorem) -> Result<SideCheck> {
    let verdict = oracle::verdict_for(profile, theorem.is_large())?;
    let forms = classify::classify(&profile.factorization, theorem)?;
    let mut predictions_ok = true;
    for m in &forms {
        predictions_ok &= classify::verify_prediction(m, profile)?;
    }
    let kind = match (verdict.recurrent, forms.is_empty()) {
        (false, false) => Some(ErrataKind::OracleNoClassifierYes),
        (true, true) => Some(ErrataKind::OracleYesClassifierNo),
        _ if !predictions_ok => Some(ErrataKind::PredictionMismatch),
        _ => None,
    };
    let erratum = kind.map(|kind| {
        let set = profile.side(theorem.is_large());
        let label = if theorem.is_large() { "L'" } else { "S'" };
        let mut detail = format!("{label}={}", fmt_list(set));
        match verdict.witness {
            Some((a, b)) => {
                let _ = write!(detail, "; witness=U({}, {}, {a}, {b})", set[0], set[1]);
            }
            None if verdict.vacuous => detail.push_str("; vacuous"),
            None => detail.push_str("; no integral fit"),
        }
        let ids: Vec<u64> = forms.iter().map(|m| m.form_id as u64).collect();
        let _ = write!(detail, "; forms={}", fmt_list(&ids));
        for m in forms.iter() {
            if let Some(p) = &m.predicted_set {
                let _ = write!(detail, "; form {} predicts {}", m.form_id, fmt_list(p));
            }
        }
        ErrataEntry {
            n: profile.n,
            theorem,
            kind,
            detail,
        }
    });
    Ok(SideCheck {
        verdict,
        forms,
        predictions_ok,
        erratum,
    })
}

/// Both sides for a profiled `n`.
pub fn check_profile(profile: &DivisorProfile) -> Result<(ValidationRecord, SideCheck, SideCheck)> {
    let small = check_side(profile, Theorem::Small)?;
    let large = check_side(profile, Theorem::Large)?;
    let ids = |v: &[FormMatch]| v.iter().map(|m| m.form_id).collect::<Vec<_>>();
    let record = ValidationRecord {
        n: profile.n,
        small_oracle: small.verdict.recurrent,
        small_forms: ids(&small.forms),
        large_oracle: large.verdict.recurrent,
        large_forms: ids(&large.forms),
        prediction_ok: small.predictions_ok && large.predictions_ok,
    };
    Ok((record, small, large))
}

/// The validation record for a single `n >= 2`.
pub fn check_single(n: u64) -> Result<ValidationRecord> {
    Ok(check_profile(&crate::profile::profile(n)?)?.0)
}

/// Errata found for a single `n >= 2`.
pub fn errata_for(n: u64) -> Result<Vec<ErrataEntry>> {
    let (_, s, l) = check_profile(&crate::profile::profile(n)?)?;
    Ok(s.erratum.into_iter().chain(l.erratum).collect())
}

fn validate_block(lo: u64, hi: u64) -> Result<ValidationReport> {
    let mut out = ValidationReport {
        summary: Summary {
            range_lo: lo,
            range_hi: hi,
            ..Default::default()
        },
        records: Vec::with_capacity((hi - lo + 1) as usize),
        ledger: Vec::new(),
    };
    for f in arith::factorize_block(lo, hi)? {
        let profile = DivisorProfile::from_factorization(f)?;
        let (rec, small, large) = check_profile(&profile)?;
        out.summary.add(&rec, &small.verdict, &large.verdict);
        if let Some(e) = small.erratum {
            out.summary.errata_small += 1;
            out.ledger.push(e);
        }
        if let Some(e) = large.erratum {
            out.summary.errata_large += 1;
            out.ledger.push(e);
        }
        out.records.push(rec);
    }
    Ok(out)
}

fn blocks(lo: u64, hi: u64, jobs: usize) -> Vec<(u64, u64)> {
    let len = hi - lo + 1;
    // Several blocks per worker keeps the load balanced.
    let size = (len / (jobs as u64 * 8).max(1)).max(MIN_BLOCK);
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(size - 1));
        out.push((start, end));
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}

/// Validates every `n` in `[lo, hi]` on `jobs` workers.
pub fn validate_range(lo: u64, hi: u64, jobs: usize) -> Result<ValidationReport> {
    if lo < 2 || lo > hi {
        return Err(contract(format!("invalid range [{lo}, {hi}]")));
    }
    arith::check_bound(hi)?;
    let parts = in_pool(jobs, || {
        blocks(lo, hi, jobs)
            .into_par_iter()
            .map(|(a, b)| validate_block(a, b))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut report = ValidationReport {
        summary: Summary {
            range_lo: lo,
            range_hi: hi,
            ..Default::default()
        },
        ..Default::default()
    };
    for part in parts {
        report.summary.merge(&part.summary);
        report.records.extend(part.records);
        report.ledger.extend(part.ledger);
    }
    Ok(report)
}

/// Every `n` in `[lo, hi]` that violates the divisor-count identity.
pub fn tau_sweep(lo: u64, hi: u64, jobs: usize) -> Result<Vec<u64>> {
    if lo < 2 || lo > hi {
        return Err(contract(format!("invalid range [{lo}, {hi}]")));
    }
    arith::check_bound(hi)?;
    let parts = in_pool(jobs, || {
        blocks(lo, hi, jobs)
            .into_par_iter()
            .map(|(a, b)| -> Result<Vec<u64>> {
                let mut bad = Vec::new();
                for f in arith::factorize_block(a, b)? {
                    let p = DivisorProfile::from_factorization(f)?;
                    if !p.tau_identity_holds() {
                        bad.push(p.n);
                    }
                }
                Ok(bad)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(parts.into_iter().flatten().collect())
}

/// Writes one JSON document per line.
pub fn write_jsonl<T: Serialize, W: Write>(mut w: W, items: &[T]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>, R: BufRead>(r: R) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Writes the summary CSV (header plus one row).
pub fn write_summary_csv<W: Write>(w: W, summaries: &[Summary]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for s in summaries {
        wtr.serialize(s)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Appends entries whose `(n, theorem)` key is not yet in the ledger file.
/// Returns the number of entries written.
pub fn append_ledger(path: &Path, entries: &[ErrataEntry]) -> Result<usize> {
    let mut seen: BTreeSet<(u64, Theorem)> = BTreeSet::new();
    if path.exists() {
        let existing: Vec<ErrataEntry> = read_jsonl(BufReader::new(File::open(path)?))?;
        seen.extend(existing.iter().map(ErrataEntry::key));
    }
    let fresh: Vec<&ErrataEntry> = entries.iter().filter(|e| seen.insert(e.key())).collect();
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    write_jsonl(BufWriter::new(file), &fresh)?;
    Ok(fresh.len())
}

/// The bundled allowlist of confirmed discrepancies.
pub const DEFAULT_ALLOWLIST: &str = include_str!("../data/errata_allowlist.jsonl");

/// A family of integers described by its exponent signature and monomial
/// inequalities, e.g. `p^2 q^2 ; q > p^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    source: String,
    exponents: Vec<u32>,
    conditions: Vec<(Monomial, Cmp, Monomial)>,
}

/// Exponents of `p, q, r, s`.
type Monomial = [u32; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

const VARS: [char; 4] = ['p', 'q', 'r', 's'];

fn parse_monomial(s: &str) -> std::result::Result<Monomial, String> {
    let mut mono = [0u32; 4];
    let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
    if chars.peek().is_none() {
        return Err("empty monomial".into());
    }
    while let Some(c) = chars.next() {
        let idx = VARS
            .iter()
            .position(|&v| v == c)
            .ok_or_else(|| format!("unknown variable {c:?} in {s:?}"))?;
        let mut exp = 1;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            exp = digits
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
        }
        mono[idx] += exp;
    }
    Ok(mono)
}

impl Pattern {
    pub fn parse(src: &str) -> std::result::Result<Self, String> {
        let (shape, conds) = match src.split_once(';') {
            Some((a, b)) => (a, b),
            None => (src, ""),
        };
        let mut exponents = Vec::new();
        for (i, tok) in shape.split_whitespace().enumerate() {
            let mono = parse_monomial(tok)?;
            let nonzero: Vec<usize> = (0..4).filter(|&j| mono[j] > 0).collect();
            if nonzero != [i] {
                return Err(format!(
                    "shape token {tok:?} must be a power of {}",
                    VARS[i]
                ));
            }
            exponents.push(mono[i]);
        }
        if exponents.is_empty() {
            return Err("empty shape".into());
        }
        let mut conditions = Vec::new();
        for c in conds.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            let (op, cmp) = [
                ("<=", Cmp::Le),
                (">=", Cmp::Ge),
                ("<", Cmp::Lt),
                (">", Cmp::Gt),
            ]
            .into_iter()
            .find(|(op, _)| c.contains(op))
            .ok_or_else(|| format!("no comparison in {c:?}"))?;
            let (l, r) = c.split_once(op).expect("operator present");
            let (l, r) = (parse_monomial(l)?, parse_monomial(r)?);
            if l.iter()
                .chain(&r)
                .enumerate()
                .any(|(i, &e)| e > 0 && i % 4 >= exponents.len())
            {
                return Err(format!("condition {c:?} names a prime outside the shape"));
            }
            conditions.push((l, cmp, r));
        }
        Ok(Self {
            source: src.trim().to_string(),
            exponents,
            conditions,
        })
    }

    pub fn matches(&self, f: &Factorization) -> bool {
        if f.exponents() != self.exponents {
            return false;
        }
        let primes = f.primes();
        let eval = |m: &Monomial| -> Option<u128> {
            let mut acc: u128 = 1;
            for (i, &e) in m.iter().enumerate().filter(|(_, &e)| e > 0) {
                acc = acc.checked_mul((primes[i] as u128).checked_pow(e)?)?;
            }
            Some(acc)
        };
        self.conditions
            .iter()
            .all(|(l, cmp, r)| match (eval(l), eval(r)) {
                (Some(x), Some(y)) => match cmp {
                    Cmp::Lt => x < y,
                    Cmp::Le => x <= y,
                    Cmp::Gt => x > y,
                    Cmp::Ge => x >= y,
                },
                _ => false,
            })
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AllowlistLine {
    theorem: Theorem,
    kind: ErrataKind,
    pattern: String,
    justification: String,
}

#[derive(Debug, Clone)]
pub struct AllowlistEntry {
    pub theorem: Theorem,
    pub kind: ErrataKind,
    pub pattern: Pattern,
    pub justification: String,
}

/// Documented discrepancies between the closed forms and the oracle.
#[derive(Debug, Clone, Default)]
pub struct Allowlist {
    pub entries: Vec<AllowlistEntry>,
}

impl Allowlist {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let raw: AllowlistLine = serde_json::from_str(line).map_err(|e| Error::Allowlist {
                line: i + 1,
                msg: e.to_string(),
            })?;
            let pattern = Pattern::parse(&raw.pattern)
                .map_err(|msg| Error::Allowlist { line: i + 1, msg })?;
            entries.push(AllowlistEntry {
                theorem: raw.theorem,
                kind: raw.kind,
                pattern,
                justification: raw.justification,
            });
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_ALLOWLIST).expect("bundled allowlist parses")
    }

    /// The allowlist entry covering `e`, if any.
    pub fn covering(&self, e: &ErrataEntry) -> Result<Option<&AllowlistEntry>> {
        let f = arith::factorize(e.n)?;
        Ok(self
            .entries
            .iter()
            .find(|a| a.theorem == e.theorem && a.kind == e.kind && a.pattern.matches(&f)))
    }

    /// Ledger entries no allowlist entry covers.
    pub fn unexplained<'a>(&self, ledger: &'a [ErrataEntry]) -> Result<Vec<&'a ErrataEntry>> {
        let mut out = Vec::new();
        for e in ledger {
            if self.covering(e)?.is_none() {
                out.push(e);
            }
        }
        Ok(out)
    }
}
