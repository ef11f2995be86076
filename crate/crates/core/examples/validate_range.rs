//! Cross-check the oracle against the classifier over a range and sort the
//! disagreements into documented and unexplained ones.
//!
//!     cargo run --release --example validate_range -- 2 1000000

use divrec::harness::{validate_range, Allowlist};

fn main() -> divrec::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|s| s.parse::<u64>().expect("integer bounds"));
    let lo = args.next().unwrap_or(2);
    let hi = args.next().unwrap_or(100_000);
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());

    let report = validate_range(lo, hi, jobs)?;
    let s = &report.summary;
    println!("[{lo}, {hi}] on {jobs} workers");
    println!(
        "  small recurrent {} (vacuous {}), large recurrent {} (vacuous {})",
        s.count_small_recurrent,
        s.count_small_vacuous,
        s.count_large_recurrent,
        s.count_large_vacuous
    );

    let allow = Allowlist::bundled();
    for a in &allow.entries {
        let covered = report
            .ledger
            .iter()
            .filter(|e| e.theorem == a.theorem && e.kind == a.kind)
            .filter(|e| {
                allow
                    .covering(e)
                    .ok()
                    .flatten()
                    .is_some_and(|c| c.pattern == a.pattern)
            })
            .count();
        println!(
            "  {} {:?} `{}`: {covered} entries",
            a.theorem, a.kind, a.pattern
        );
    }
    for e in allow.unexplained(&report.ledger)? {
        println!(
            "  unexplained: n = {} {} {:?}: {}",
            e.n, e.theorem, e.kind, e.detail
        );
    }
    Ok(())
}
