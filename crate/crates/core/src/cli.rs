//! The `divrec` command line.
//!
//! Exit status: 0 on success, 1 on bad arguments or a contract violation,
//! 2 when `validate` records an erratum the allowlist does not cover or
//! `tau-check` finds a counterexample.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arith::Factorization;
use crate::classify::{FormMatch, Theorem};
use crate::error::{contract, Result};
use crate::fit::{self, FitVerdict};
use crate::harness::{self, json_u64, Allowlist, ErrataEntry, Summary};
use crate::oracle::{self, RecurrenceVerdict};
use crate::profile;
use crate::search;

/// Overrides the default worker count when `--jobs` is absent.
pub const JOBS_ENV: &str = "DIVREC_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "divrec",
    version,
    about = "Order-two recurrences in the nontrivial divisors of an integer"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Range {
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    /// Worker threads [default: $DIVREC_JOBS, else available parallelism].
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile n, run both oracles and match every closed form.
    Classify {
        n: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Exact recurrence verdicts for S'(n) and L'(n).
    Oracle {
        n: u64,
        /// Also list every (a, b) with |a|, |b| <= BOUND by direct grid scan.
        #[arg(long)]
        bound: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Cross-check oracle and classifier over a range.
    Validate {
        #[command(flatten)]
        range: Range,
        /// Report JSONL; the summary CSV and errata ledger go next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary format on standard output.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Errata allowlist JSONL [default: the bundled list].
        #[arg(long)]
        allowlist: Option<PathBuf>,
    },
    /// Search for p^2 q r with a non-geometric small-side recurrence.
    SearchS7 {
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Search for p^4 q meeting the large-side divisibility conditions.
    SearchLarge5 {
        #[arg(long, default_value_t = 50)]
        pmax: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Check tau(n) = 2|S'| + 2 (+1 for squares) over a range.
    TauCheck {
        #[command(flatten)]
        range: Range,
        #[command(flatten)]
        output: Output,
    },
}

/// Everything `classify` reports about one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    #[serde(with = "json_u64")]
    pub n: u64,
    pub factorization: Factorization,
    pub tau: u64,
    pub small_divisors: Vec<u64>,
    pub large_divisors: Vec<u64>,
    pub small_oracle: RecurrenceVerdict,
    pub large_oracle: RecurrenceVerdict,
    pub small_forms: Vec<FormMatch>,
    pub large_forms: Vec<FormMatch>,
    pub prediction_ok: bool,
}

impl ClassifyReport {
    pub fn new(n: u64) -> Result<Self> {
        let prof = profile::profile(n)?;
        let (record, small, large) = harness::check_profile(&prof)?;
        Ok(Self {
            n,
            tau: prof.tau,
            small_divisors: prof.small_strict,
            large_divisors: prof.large_strict,
            factorization: prof.factorization,
            small_oracle: small.verdict,
            large_oracle: large.verdict,
            small_forms: small.forms,
            large_forms: large.forms,
            prediction_ok: record.prediction_ok,
        })
    }
}

/// Exact and, optionally, grid-scanned verdicts for one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    #[serde(with = "json_u64")]
    pub n: u64,
    pub small_divisors: Vec<u64>,
    pub large_divisors: Vec<u64>,
    pub small: RecurrenceVerdict,
    pub large: RecurrenceVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub small_grid: Option<Vec<(i128, i128)>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub large_grid: Option<Vec<(i128, i128)>>,
}

impl OracleReport {
    pub fn new(n: u64, bound: Option<u64>) -> Result<Self> {
        let prof = profile::profile(n)?;
        let grid = |set: &[u64]| bound.map(|b| fit::brute_force_fit(set, b)).transpose();
        Ok(Self {
            n,
            small: oracle::verdict_for(&prof, false)?,
            large: oracle::verdict_for(&prof, true)?,
            bound,
            small_grid: grid(&prof.small_strict)?,
            large_grid: grid(&prof.large_strict)?,
            small_divisors: prof.small_strict,
            large_divisors: prof.large_strict,
        })
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match CliConfig::try_parse_from(args) {
        Ok(config) => run(config),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

/// Runs a parsed command and returns the process exit status.
pub fn run(config: CliConfig) -> i32 {
    match dispatch(config.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("divrec: {e}");
            1
        }
    }
}

fn default_jobs() -> Result<usize> {
    if let Ok(v) = std::env::var(JOBS_ENV) {
        return v
            .trim()
            .parse()
            .map_err(|_| contract(format!("{JOBS_ENV} must be a positive integer, got {v:?}")));
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn resolve_jobs(jobs: Option<usize>) -> Result<usize> {
    let jobs = match jobs {
        Some(j) => j,
        None => default_jobs()?,
    };
    if jobs == 0 {
        return Err(contract("jobs must be at least 1"));
    }
    Ok(jobs)
}

fn check_range(r: &Range) -> Result<()> {
    if r.from < 2 || r.from > r.to {
        return Err(contract(format!("invalid range [{}, {}]", r.from, r.to)));
    }
    Ok(())
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Classify { n, output } => {
            let report = ClassifyReport::new(n)?;
            let mut w = sink(output.out.as_deref())?;
            match output.format {
                Format::Json => writeln!(w, "{}", serde_json::to_string(&report)?)?,
                Format::Csv => classify_csv(&mut w, &report)?,
                Format::Text => classify_text(&mut w, &report)?,
            }
            w.flush()?;
            Ok(0)
        }
        Command::Oracle { n, bound, output } => {
            let report = OracleReport::new(n, bound)?;
            let mut w = sink(output.out.as_deref())?;
            match output.format {
                Format::Json => writeln!(w, "{}", serde_json::to_string(&report)?)?,
                Format::Csv => oracle_csv(&mut w, &report)?,
                Format::Text => oracle_text(&mut w, &report)?,
            }
            w.flush()?;
            Ok(0)
        }
        Command::Validate {
            range,
            out,
            format,
            allowlist,
        } => validate(&range, out.as_deref(), format, allowlist.as_deref()),
        Command::SearchS7 { pmax, jobs, output } => {
            let hits = search::search_s7_jobs(pmax, resolve_jobs(jobs)?)?;
            let mut w = sink(output.out.as_deref())?;
            emit_rows(&mut w, output.format, &hits, |t| {
                format!(
                    "p={} q={} r={} n={} U({}, {}, {}, {}) oracle={}",
                    t.p, t.q, t.r, t.n, t.p, t.q, t.a, t.b, t.oracle_confirmed
                )
            })?;
            w.flush()?;
            Ok(0)
        }
        Command::SearchLarge5 { pmax, jobs, output } => {
            let hits = search::search_large5_jobs(pmax, resolve_jobs(jobs)?)?;
            let mut w = sink(output.out.as_deref())?;
            emit_rows(&mut w, output.format, &hits, |t| {
                format!(
                    "p={} q={} n={} oracle={}",
                    t.p, t.q, t.n, t.oracle_confirmed
                )
            })?;
            if hits.is_empty() && output.format == Format::Text {
                writeln!(w, "no pairs with p <= {pmax}")?;
            }
            w.flush()?;
            Ok(0)
        }
        Command::TauCheck { range, output } => {
            check_range(&range)?;
            let bad = harness::tau_sweep(range.from, range.to, resolve_jobs(range.jobs)?)?;
            let mut w = sink(output.out.as_deref())?;
            match output.format {
                Format::Json => writeln!(
                    w,
                    "{}",
                    serde_json::json!({"from": range.from, "to": range.to, "failures": bad})
                )?,
                Format::Csv => {
                    writeln!(w, "from,to,failures")?;
                    writeln!(w, "{},{},{}", range.from, range.to, bad.len())?;
                }
                Format::Text => {
                    let checked = range.to - range.from + 1;
                    writeln!(w, "checked {checked} integers, {} failures", bad.len())?;
                    for n in &bad {
                        writeln!(w, "  {n}")?;
                    }
                }
            }
            w.flush()?;
            Ok(if bad.is_empty() { 0 } else { 2 })
        }
    }
}

fn emit_rows<T: Serialize>(
    w: &mut dyn Write,
    format: Format,
    rows: &[T],
    text: impl Fn(&T) -> String,
) -> Result<()> {
    match format {
        Format::Json => harness::write_jsonl(&mut *w, rows)?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut *w);
            for r in rows {
                c.serialize(r)?;
            }
            c.flush()?;
        }
        Format::Text => {
            for r in rows {
                writeln!(w, "{}", text(r))?;
            }
        }
    }
    Ok(())
}

/// `report.jsonl` -> `report.summary.csv` and `report.errata.jsonl`.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn validate(
    range: &Range,
    out: Option<&Path>,
    format: Format,
    allowlist: Option<&Path>,
) -> Result<i32> {
    check_range(range)?;
    let allow = match allowlist {
        Some(p) => Allowlist::load(p)?,
        None => Allowlist::bundled(),
    };
    let report = harness::validate_range(range.from, range.to, resolve_jobs(range.jobs)?)?;
    if let Some(out) = out {
        harness::write_jsonl(BufWriter::new(File::create(out)?), &report.records)?;
        harness::write_summary_csv(
            File::create(sibling(out, "summary.csv"))?,
            std::slice::from_ref(&report.summary),
        )?;
        harness::append_ledger(&sibling(out, "errata.jsonl"), &report.ledger)?;
    }
    let unexplained = allow.unexplained(&report.ledger)?;
    let mut w = sink(None)?;
    match format {
        Format::Json => {
            let s = &report.summary;
            writeln!(
                w,
                "{}",
                serde_json::json!({
                    "summary": s,
                    "classified_small": s.count_small_classified,
                    "classified_large": s.count_large_classified,
                    "ledger": report.ledger,
                    "unexplained": unexplained,
                })
            )?;
        }
        Format::Csv => harness::write_summary_csv(&mut w, std::slice::from_ref(&report.summary))?,
        Format::Text => validate_text(&mut w, &report.summary, &report.ledger, &unexplained)?,
    }
    w.flush()?;
    for e in &unexplained {
        eprintln!(
            "unexplained: n={} {} {:?}: {}",
            e.n, e.theorem, e.kind, e.detail
        );
    }
    Ok(if unexplained.is_empty() { 0 } else { 2 })
}

fn validate_text(
    w: &mut dyn Write,
    s: &Summary,
    ledger: &[ErrataEntry],
    unexplained: &[&ErrataEntry],
) -> Result<()> {
    writeln!(w, "range [{}, {}]", s.range_lo, s.range_hi)?;
    writeln!(
        w,
        "small: {} recurrent ({} vacuous), {} classified, {} errata",
        s.count_small_recurrent, s.count_small_vacuous, s.count_small_classified, s.errata_small
    )?;
    writeln!(
        w,
        "large: {} recurrent ({} vacuous), {} classified, {} errata",
        s.count_large_recurrent, s.count_large_vacuous, s.count_large_classified, s.errata_large
    )?;
    writeln!(
        w,
        "{} errata, {} outside the allowlist",
        ledger.len(),
        unexplained.len()
    )?;
    Ok(())
}

fn fmt_factorization(f: &Factorization) -> String {
    f.factors()
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

fn fmt_set(v: &[u64]) -> String {
    let items: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn fmt_verdict(set: &[u64], v: &RecurrenceVerdict) -> String {
    match (v.fit, v.witness) {
        (FitVerdict::Vacuous, _) => "vacuous".into(),
        (FitVerdict::Empty, _) => "no recurrence".into(),
        (FitVerdict::Line { dir, .. }, Some((a, b))) => format!(
            "U({}, {}, {a}, {b}) + t({}, {})",
            set[0], set[1], dir.0, dir.1
        ),
        (_, Some((a, b))) => format!("U({}, {}, {a}, {b})", set[0], set[1]),
        (_, None) => "recurrent".into(),
    }
}

fn forms_text(w: &mut dyn Write, theorem: Theorem, forms: &[FormMatch]) -> io::Result<()> {
    if forms.is_empty() {
        return writeln!(w, "  {theorem}: no form matches");
    }
    for m in forms {
        write!(w, "  {theorem} form {} ({})", m.form_id, m.params)?;
        if let Some(set) = &m.predicted_set {
            write!(w, ": {}", fmt_set(set))?;
        }
        if let Some(u) = &m.predicted_u {
            write!(w, " under {u}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn classify_text(w: &mut dyn Write, r: &ClassifyReport) -> Result<()> {
    writeln!(
        w,
        "n = {} = {}  tau = {}",
        r.n,
        fmt_factorization(&r.factorization),
        r.tau
    )?;
    writeln!(
        w,
        "S' = {}  {}",
        fmt_set(&r.small_divisors),
        fmt_verdict(&r.small_divisors, &r.small_oracle)
    )?;
    writeln!(
        w,
        "L' = {}  {}",
        fmt_set(&r.large_divisors),
        fmt_verdict(&r.large_divisors, &r.large_oracle)
    )?;
    writeln!(w, "forms:")?;
    forms_text(w, Theorem::Small, &r.small_forms)?;
    forms_text(w, Theorem::Large, &r.large_forms)?;
    if !r.prediction_ok {
        writeln!(w, "warning: a predicted set disagrees with the divisors")?;
    }
    Ok(())
}

fn classify_csv(w: &mut dyn Write, r: &ClassifyReport) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record([
        "n",
        "theorem",
        "oracle",
        "form_id",
        "predicted_set",
        "predicted_u",
    ])?;
    for (theorem, verdict, forms) in [
        (Theorem::Small, &r.small_oracle, &r.small_forms),
        (Theorem::Large, &r.large_oracle, &r.large_forms),
    ] {
        let n = r.n.to_string();
        let th = theorem.to_string();
        let oracle = verdict.recurrent.to_string();
        if forms.is_empty() {
            c.write_record([n.as_str(), &th, &oracle, "", "", ""])?;
        }
        for m in forms {
            let set = m.predicted_set.as_deref().map(fmt_set).unwrap_or_default();
            let u = m.predicted_u.map(|u| u.to_string()).unwrap_or_default();
            c.write_record([n.as_str(), &th, &oracle, &m.form_id.to_string(), &set, &u])?;
        }
    }
    c.flush()?;
    Ok(())
}

fn oracle_text(w: &mut dyn Write, r: &OracleReport) -> Result<()> {
    for (label, set, v, grid) in [
        ("S'", &r.small_divisors, &r.small, &r.small_grid),
        ("L'", &r.large_divisors, &r.large, &r.large_grid),
    ] {
        writeln!(w, "{label} = {}  {}", fmt_set(set), fmt_verdict(set, v))?;
        if let (Some(b), Some(grid)) = (r.bound, grid) {
            let pts: Vec<String> = grid.iter().map(|(a, b)| format!("({a}, {b})")).collect();
            writeln!(w, "  |a|, |b| <= {b}: {}", pts.join(" "))?;
        }
    }
    Ok(())
}

fn oracle_csv(w: &mut dyn Write, r: &OracleReport) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["n", "side", "recurrent", "vacuous", "a", "b"])?;
    for (side, v) in [("small", &r.small), ("large", &r.large)] {
        let (a, b) = v
            .witness
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .unwrap_or_default();
        c.write_record([
            r.n.to_string(),
            side.to_string(),
            v.recurrent.to_string(),
            v.vacuous.to_string(),
            a,
            b,
        ])?;
    }
    c.flush()?;
    Ok(())
}
