//! Lens maps: the closed-form hyperbolic derivative t cos(theta)/cos(t theta),
//! its agreement with the generic jet computation, and the iterate-shifted
//! hyperbolic bound they satisfy.
//!
//!     cargo run --example lens_maps

use koenigs::catalog::{lens_hyperbolic_derivative_closed_form, lens_map};
use koenigs::checks::check_condition_a;
use koenigs::norms::hyperbolic_alpha_derivative;
use koenigs::DiskGrid;
use num_complex::Complex64;

fn main() {
    let t = 0.5;
    let lens = lens_map(t).unwrap();
    println!("lens map t = {t}: phi(0) = 0, phi'(0) = t, image pinched at ±1\n");

    println!(
        "{:>8} {:>8} {:>14} {:>14} {:>12}",
        "re", "im", "generic", "closed form", "difference"
    );
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.6, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(-0.4, 0.3),
        Complex64::new(0.9, 0.0),
        Complex64::new(0.95, 0.2),
    ] {
        let generic = hyperbolic_alpha_derivative(lens.expr(), 1.0, z).unwrap();
        let closed = lens_hyperbolic_derivative_closed_form(t, z).unwrap();
        println!(
            "{:>8.2} {:>8.2} {:>14.10} {:>14.10} {:>12.3e}",
            z.re,
            z.im,
            generic,
            closed,
            (generic - closed).abs()
        );
    }

    // The hyperbolic derivative never exceeds t, with equality exactly on
    // the real axis.
    let grid = DiskGrid::standard(10).clip(0.999);
    let mut max_h: f64 = 0.0;
    for &z in grid.points() {
        max_h = max_h.max(hyperbolic_alpha_derivative(lens.expr(), 1.0, z).unwrap());
    }
    println!(
        "\nsup over {} grid points of |phi^(h)| = {max_h:.12} (t = {t})",
        grid.len()
    );

    let report = check_condition_a(lens.expr(), 1.0, 0, &grid).unwrap();
    println!(
        "iterate-shifted bound at (alpha = 1, m = 0): {} (worst margin {:.3e} at {})",
        report.verdict,
        report.worst_margin,
        report.witness.unwrap()
    );

    // Evaluation degenerates at the boundary contact points; beyond the
    // declared domain radius the map refuses rather than returning inf.
    let past = lens.expr().eval_value(Complex64::new(0.99995, 0.0));
    println!("\nevaluation at 0.99995 (past the domain radius): {past:?}");
}
