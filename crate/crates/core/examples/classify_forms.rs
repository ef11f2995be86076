//! Match `n` against the closed-form families and check each prediction
//! against the actual divisor sets.
//!
//!     cargo run --example classify_forms -- 60 48 162 42

use divrec::{classify_large, classify_small, profile, verify_prediction};

fn main() -> divrec::Result<()> {
    let ns: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("arguments must be integers >= 2"))
        .collect();
    let ns = if ns.is_empty() {
        vec![60, 512, 48, 162, 42, 100, 675]
    } else {
        ns
    };
    for n in ns {
        let p = profile(n)?;
        println!(
            "n = {n}: S' = {:?}, L' = {:?}",
            p.small_strict, p.large_strict
        );
        let forms: Vec<_> = classify_small(n)?
            .into_iter()
            .chain(classify_large(n)?)
            .collect();
        if forms.is_empty() {
            println!("  no form matches");
        }
        for m in forms {
            let u = m
                .predicted_u
                .map(|u| format!(" under {u}"))
                .unwrap_or_default();
            println!(
                "  {} form {} ({}): {:?}{u}, prediction holds: {}",
                m.theorem,
                m.form_id,
                m.params,
                m.predicted_set.as_deref().unwrap_or_default(),
                verify_prediction(&m, &p)?
            );
        }
    }
    Ok(())
}
