//! Converge the Königs iterate sigma_k = phi_k / phi'(0)^k for the Möbius
//! model and compare against its closed-form limit z/(1-z).
//!
//!     cargo run --example koenigs_linearization

use koenigs::engine::{koenigs_approx, schroder_residual, KoenigsSettings};
use koenigs::{moebius_model, DiskGrid};
use num_complex::Complex64;

fn main() {
    let model = moebius_model(0.5).unwrap();
    let settings = KoenigsSettings::default().with_control_radius(0.8);
    let approx = koenigs_approx(model.expr(), &settings).unwrap();

    println!(
        "map {}  lambda = {}  depth k* = {}  control gap = {:.3e}",
        model.expr().name(),
        approx.lambda().re,
        approx.depth(),
        approx.cauchy_gap()
    );

    println!("\ncontrol-circle gap per iterate (geometric decay at ratio ~ lambda):");
    for (k, gap) in approx.gap_history().iter().enumerate() {
        if k % 5 == 0 || k + 1 == approx.gap_history().len() {
            println!("  k = {:3}  sup |sigma_(k+1) - sigma_k| = {gap:.3e}", k + 1);
        }
    }

    println!("\nnumeric limit vs closed form on the real axis:");
    println!(
        "  {:>6} {:>22} {:>22} {:>12}",
        "z", "sigma (numeric)", "z/(1-z)", "deviation"
    );
    for k in 0..8 {
        let z = Complex64::new(0.1 * k as f64, 0.0);
        let numeric = approx.eval(z).unwrap();
        let closed = model.known_koenigs().eval_value(z).unwrap();
        println!(
            "  {:>6.2} {:>22.15} {:>22.15} {:>12.3e}",
            z.re,
            numeric.value.re,
            closed.re,
            (numeric.value - closed).norm()
        );
    }

    let grid = DiskGrid::uniform(0.7, 10, 128);
    let residual = schroder_residual(&approx, &grid);
    println!(
        "\nSchröder defect sup |sigma(phi(z)) - lambda sigma(z)| on |z| <= 0.7: {:.3e} (witness {})",
        residual.sup, residual.witness
    );

    // Normalization of the limit: sigma(0) = 0, sigma'(0) = 1.
    let origin = approx.eval(Complex64::new(0.0, 0.0)).unwrap();
    println!(
        "normalization: sigma(0) = {:.3e}, sigma'(0) - 1 = {:.3e}",
        origin.value.norm(),
        (origin.derivative - Complex64::new(1.0, 0.0)).norm()
    );
}
