//! Radial probes: the growth conditions coupling M_r = sup_{|z|=r} |phi|
//! with the weight-derivative envelope a_r, and the search for an iterate
//! whose probe-circle sup drops strictly inside the disk.
//!
//!     cargo run --example iterate_probes

use koenigs::checks::{check_iterate_supnorm, check_th23, unit_weight, ConditionDetail};
use koenigs::{linear_map, moebius_model};

fn main() {
    let linear = linear_map(0.5).unwrap();

    println!(
        "growth conditions for {} with the unit weight:",
        linear.name()
    );
    let radii = [0.9, 0.99, 0.999, 0.9999, 1.0 - 1e-7, 1.0 - 1e-11];
    let report = check_th23(&linear, &unit_weight(), 1.0, &radii).unwrap();
    if let ConditionDetail::RadialSamples(samples) = &report.detail {
        println!(
            "  {:>12} {:>10} {:>8} {:>12} {:>12}",
            "r", "M_r", "a_r", "growth", "margin"
        );
        for s in samples {
            println!(
                "  {:>12.9} {:>10.6} {:>8.4} {:>12.4} {:>12.4}",
                s.r, s.m_r, s.a_r, s.growth, s.margin
            );
        }
    }
    println!(
        "  verdict: {} (growth must increase past the threshold)",
        report.verdict
    );

    println!("\niterate sup-norm probe (512 samples on |z| = r_probe):");
    for (map, k_max, r_probe) in [
        (linear_map(0.5).unwrap(), 8, 0.999),
        (moebius_model(0.9).unwrap().into_expr(), 10, 0.9999),
    ] {
        let report = check_iterate_supnorm(&map, k_max, r_probe).unwrap();
        if let ConditionDetail::IterateSups { sups, found } = &report.detail {
            print!("  {:>12} probe {r_probe}: sups", map.name());
            for (k, s) in sups.iter().enumerate().take(5) {
                print!(" k{}={s:.4}", k + 1);
            }
            match found {
                Some(f) => println!("  -> first inside at k = {} (sup {:.4})", f.k, f.sup),
                None => {
                    println!("  -> none within k_max = {k_max} (boundary fixed point holds on)")
                }
            }
        }
    }
    println!("\n  a fixed probe circle only lower-bounds the true sup-norm, so a hit is");
    println!("  evidence while a miss stays inconclusive.");
}
