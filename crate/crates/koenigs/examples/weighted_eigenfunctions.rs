//! The weighted side: converge the principal eigenfunction v of
//! f ↦ u·(f∘phi) from the normalized partial products, verify the
//! weighted functional identity, and list the eigenvalue ladder of v·sigma^n.
//!
//!     cargo run --example weighted_eigenfunctions

use koenigs::engine::{
    eigenfunction_eval, koenigs_approx, weighted_principal, weighted_residual, KoenigsSettings,
};
use koenigs::{lens_map, DiskGrid, MapExpr};
use num_complex::Complex64;

fn main() {
    let map = lens_map(0.5).unwrap().into_expr();
    let weight = MapExpr::parse("1 + z/2").unwrap();
    let settings = KoenigsSettings::default();

    let sigma = koenigs_approx(&map, &settings).unwrap();
    let v = weighted_principal(&map, &weight, &settings).unwrap();
    println!(
        "map {}  weight {}  u(0) = {}  depth k* = {}  control gap = {:.3e}",
        map.name(),
        weight.name(),
        v.eigenvalue().re,
        v.depth(),
        v.cauchy_gap()
    );

    let at0 = v.eval(Complex64::new(0.0, 0.0)).unwrap();
    println!("normalization: v(0) = {} + {}i", at0.value.re, at0.value.im);

    let grid = DiskGrid::uniform(0.7, 10, 128);
    let residual = weighted_residual(&v, &grid);
    println!(
        "weighted defect sup |u(z) v(phi(z)) - u(0) v(z)| on |z| <= 0.7: {:.3e}",
        residual.sup
    );

    println!("\neigenfunctions v*sigma^n with eigenvalues u(0)*phi'(0)^n:");
    println!(
        "  {:>2} {:>26} {:>26} {:>10}",
        "n", "value at 0.4", "derivative at 0.4", "eigenvalue"
    );
    let z = Complex64::new(0.4, 0.0);
    for n in 0..=4 {
        let (jet, eigenvalue) = eigenfunction_eval(&sigma, Some(&v), n, z).unwrap();
        println!(
            "  {n:>2} {:>13.8}+{:>10.8}i {:>13.8}+{:>10.8}i {:>10.6}",
            jet.value.re, jet.value.im, jet.derivative.re, jet.derivative.im, eigenvalue.re
        );
    }

    // A weight with constant modulus one leaves nothing to balance:
    // v collapses to the constant 1 after a single factor.
    let unit = MapExpr::parse("1").unwrap();
    let trivial = weighted_principal(&map, &unit, &settings).unwrap();
    println!(
        "\nunit weight: v ≡ {} after {} factor(s)",
        trivial.eval(z).unwrap().value.re,
        trivial.depth()
    );
}
