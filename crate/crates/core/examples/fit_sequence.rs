//! Solve `x_{i+2} = a x_{i+1} + b x_i` exactly for a sequence.
//!
//!     cargo run --example fit_sequence -- 2 3 4 5 6
//!     cargo run --example fit_sequence -- 20 25 50

use divrec::{brute_force_fit, solve_fit, FitVerdict};

fn main() -> divrec::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("arguments must be positive integers"))
        .collect();
    let seqs = if args.is_empty() {
        vec![
            vec![2, 3, 4, 5, 6],
            vec![2, 4, 8, 16],
            vec![20, 25, 50],
            vec![10, 12, 15, 20, 30],
        ]
    } else {
        vec![args]
    };
    for seq in seqs {
        let verdict = solve_fit(&seq)?;
        let desc = match verdict {
            FitVerdict::Vacuous => "vacuous: fewer than three terms".to_string(),
            FitVerdict::Empty => "no integer (a, b)".to_string(),
            FitVerdict::Point { a, b } => format!("unique (a, b) = ({a}, {b})"),
            FitVerdict::Line { base, dir } => format!(
                "(a, b) = ({}, {}) + t ({}, {}) for every integer t",
                base.0, base.1, dir.0, dir.1
            ),
        };
        println!("{seq:?}: {desc}");
        let small = brute_force_fit(&seq, 10)?;
        assert_eq!(small, verdict.grid_members(10));
        println!("  members with |a|, |b| <= 10: {small:?}");
    }
    Ok(())
}
