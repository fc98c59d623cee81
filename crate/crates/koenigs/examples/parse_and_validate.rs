//! Parse holomorphic map expressions, evaluate value/derivative jets, and
//! check the hypotheses that make a map eligible for the Königs
//! iteration.
//!
//!     cargo run --example parse_and_validate

use koenigs::{validate_self_map, DiskGrid, MapExpr};
use num_complex::Complex64;

fn main() {
    let grid = DiskGrid::standard(10);

    for source in [
        "0.5*z",
        "z/(2 - z)",
        "z^2",
        "(z + 0.5)/(1 + 0.5*z)",
        "exp(z) - 1",
    ] {
        let map = match MapExpr::parse(source) {
            Ok(map) => map,
            Err(e) => {
                println!("{source:>24}  -> {e}");
                continue;
            }
        };
        let jet = map.eval_jet(Complex64::new(0.3, 0.1)).unwrap();
        let report = validate_self_map(&map, &grid);
        println!(
            "{source:>24}  f(0.3+0.1i) = {:.6}+{:.6}i  f' = {:.6}+{:.6}i",
            jet.value.re, jet.value.im, jet.derivative.re, jet.derivative.im
        );
        println!(
            "{:>24}  admissible: {}  phi(0) = {:.2e}  phi'(0) = {:.4}  sup|phi| = {:.6}",
            "",
            report.is_schroder_admissible,
            report.phi_at_zero.norm(),
            report.phi_prime_at_zero.norm(),
            report.sup_abs_on_grid,
        );
        for failure in &report.failures {
            println!("{:>24}  reason: {failure}", "");
        }
    }

    // A malformed expression reports the offset of the problem.
    println!();
    match MapExpr::parse("z/(2 -") {
        Err(e) => println!("parse failure demo: {e}"),
        Ok(_) => unreachable!(),
    }

    // Branch-sensitive nodes carry their safety notes.
    let lens = koenigs::lens_map(0.5).unwrap();
    println!("\nbranch notes of {}:", lens.expr().name());
    for note in lens.expr().branch_notes() {
        println!("  [{:?}] {}", note.kind, note.note);
    }
}
