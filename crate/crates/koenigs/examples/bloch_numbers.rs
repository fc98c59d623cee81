//! Bracket the Bloch number b_f = inf { alpha : f has finite alpha-seminorm }
//! by bisecting converged/diverging verdicts over an alpha grid.
//!
//!     cargo run --example bloch_numbers

use koenigs::norms::{bloch_number, RefinementPolicy};
use koenigs::MapExpr;

fn main() {
    let policy = RefinementPolicy::default();

    let cases = [
        (
            "z",
            "entire, b_f = 0",
            (1..=8).map(|i| i as f64 * 0.25).collect::<Vec<_>>(),
        ),
        (
            "z/(1 - z)",
            "pole at 1, b_f = 2",
            (0..=32).map(|i| 1.5 + i as f64 / 32.0).collect(),
        ),
        (
            "log(1/(1 - z))",
            "log singularity, b_f = 1",
            (0..=32).map(|i| 0.5 + i as f64 / 32.0).collect(),
        ),
    ];

    for (source, comment, alphas) in cases {
        let f = MapExpr::parse(source).unwrap();
        let est = bloch_number(&f, &alphas, &policy).unwrap();
        println!("f(z) = {source}  ({comment})");
        println!(
            "  bracket [{}, {}] from {} verdicts over {} candidate alphas",
            est.lower,
            est.upper,
            est.evidence.len(),
            alphas.len()
        );
        for (alpha, verdict) in &est.evidence {
            println!("    alpha = {alpha:<8} {verdict}");
        }
        println!();
    }
}
