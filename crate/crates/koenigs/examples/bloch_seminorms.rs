//! Estimate Bloch-type seminorms, Lipschitz-type norms, and sup-norms on
//! the refining radial ladder, with the per-depth evidence that backs the
//! converged/diverging verdicts.
//!
//!     cargo run --example bloch_seminorms

use koenigs::norms::{bloch_seminorm, lipschitz_type_norm, sup_norm, RefinementPolicy};
use koenigs::MapExpr;

fn show_trace(label: &str, sups: &[f64]) {
    print!("  {label:>10}:");
    for (j, s) in sups.iter().enumerate() {
        if j % 3 == 0 || j + 1 == sups.len() {
            print!(" [{j}] {s:.5}");
        }
    }
    println!();
}

fn main() {
    let policy = RefinementPolicy::default();
    let cayley = MapExpr::parse("z/(1 - z)").unwrap();
    let identity = MapExpr::parse("z").unwrap();

    println!("f(z) = z/(1-z):");
    // At level 2 the weight (1-|z|^2)^2 exactly balances the |f'| blowup:
    // the estimate climbs to 4 along the positive real axis and settles.
    let est = bloch_seminorm(&cayley, 2.0, &policy).unwrap();
    println!(
        "  2-seminorm = {:.6} ({}) witness {}",
        est.value,
        est.verdict(),
        est.witness
    );
    show_trace("depths", &est.per_level_sups);

    // One level down the same function escapes: per-depth sups double.
    let est = bloch_seminorm(&cayley, 1.0, &policy).unwrap();
    println!("  1-seminorm = {:.3e} ({})", est.value, est.verdict());
    show_trace("depths", &est.per_level_sups);

    // The equivalent value-based norm above level 1.
    let est = lipschitz_type_norm(&cayley, 2.0, &policy).unwrap();
    println!(
        "  Lipschitz-type 2-norm = {:.6} ({})",
        est.value,
        est.verdict()
    );

    let est = sup_norm(&cayley, &policy).unwrap();
    println!(
        "  sup-norm estimate = {:.3e} ({})",
        est.value,
        est.verdict()
    );

    println!("\nf(z) = z:");
    let est = bloch_seminorm(&identity, 1.0, &policy).unwrap();
    println!(
        "  1-seminorm = {} ({}) witness {}",
        est.value,
        est.verdict(),
        est.witness
    );
    let est = sup_norm(&identity, &policy).unwrap();
    println!("  sup-norm estimate = {:.6} ({})", est.value, est.verdict());

    // Between clear convergence and clear divergence the verdict is
    // deliberately inconclusive: near the critical exponent of z/(1-z)
    // the per-depth growth factor sits under the divergence threshold.
    let est = bloch_seminorm(&cayley, 1.95, &policy).unwrap();
    println!(
        "\nnear the critical exponent: 1.95-seminorm = {:.4} ({})",
        est.value,
        est.verdict()
    );
}
