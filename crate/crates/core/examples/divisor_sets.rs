//! Factor `n`, split its divisors around `sqrt(n)` and ask the oracle
//! whether each side is recurrent.
//!
//!     cargo run --example divisor_sets -- 100 4611686014132420609

use divrec::{factorize, large_verdict, profile, small_verdict};

fn main() -> divrec::Result<()> {
    let ns: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("arguments must be integers >= 2"))
        .collect();
    let ns = if ns.is_empty() {
        vec![60, 100, 512, 4_611_686_014_132_420_609]
    } else {
        ns
    };
    for n in ns {
        let f = factorize(n)?;
        let p = profile(n)?;
        println!("n = {n}, factors {:?}, tau = {}", f.factors(), p.tau);
        println!("  S' = {:?}", p.small_strict);
        println!("  L' = {:?}", p.large_strict);
        println!(
            "  tau = 2|S'| + {}: {}",
            if p.is_square { 3 } else { 2 },
            p.tau_identity_holds()
        );
        let (s, l) = (small_verdict(n)?, large_verdict(n)?);
        println!(
            "  small recurrent: {} (witness {:?})",
            s.recurrent, s.witness
        );
        println!(
            "  large recurrent: {} (witness {:?})",
            l.recurrent, l.witness
        );
    }
    Ok(())
}
