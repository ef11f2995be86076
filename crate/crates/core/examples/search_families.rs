//! Search the two conditional families: `p^2 q r` with a non-geometric
//! small-side recurrence, and `p^4 q` with the large-side divisibility
//! conditions.
//!
//!     cargo run --release --example search_families -- 300

use std::time::Instant;

use divrec::{search_large5, search_s7};

fn main() -> divrec::Result<()> {
    let p_max: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("p_max must be an integer >= 2"))
        .unwrap_or(100);

    let t = Instant::now();
    let triples = search_s7(p_max)?;
    println!(
        "p^2 q r, p <= {p_max}: {} hits in {:.2?}",
        triples.len(),
        t.elapsed()
    );
    for h in &triples {
        println!(
            "  (p, q, r) = ({}, {}, {}), n = {}, U({}, {}, {}, {}), oracle agrees: {}",
            h.p, h.q, h.r, h.n, h.p, h.q, h.a, h.b, h.oracle_confirmed
        );
    }

    let t = Instant::now();
    let pairs = search_large5(p_max.min(2000))?;
    println!(
        "p^4 q, p <= {}: {} hits in {:.2?}",
        p_max.min(2000),
        pairs.len(),
        t.elapsed()
    );
    for h in &pairs {
        println!(
            "  (p, q) = ({}, {}), n = {}, oracle agrees: {}",
            h.p, h.q, h.n, h.oracle_confirmed
        );
    }
    Ok(())
}
