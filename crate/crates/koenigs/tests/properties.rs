//! Property tests: parser/printer round trips, jet chain rule, and grid
//! determinism under randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use koenigs::catalog::{lens_map, linear_map, moebius_model};
use koenigs::expr::{MapExpr, Node};
use koenigs::grid::{DiskGrid, GridLevel};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random expression trees over the full grammar.
fn arb_node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (-2.0f64..2.0).prop_map(Node::real),
        (-2.0f64..2.0).prop_map(|im| Node::constant(c(0.0, im))),
        Just(Node::Var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::div(a, b)),
            (inner.clone(), 0i32..4).prop_map(|(a, n)| Node::pow_int(a, n)),
            (inner.clone(), 0.1f64..1.9).prop_map(|(a, t)| Node::pow_real(a, t)),
            inner.clone().prop_map(Node::exp),
            inner.prop_map(Node::log),
        ]
    })
}

fn sample_points() -> Vec<Complex64> {
    // Fixed fan of evaluation points inside the disk.
    (0..20)
        .map(|k| {
            let r = 0.04 + 0.04 * k as f64;
            let theta = 0.37 * k as f64;
            c(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

fn catalog_maps() -> Vec<MapExpr> {
    vec![
        linear_map(0.5).unwrap(),
        moebius_model(0.3).unwrap().into_expr(),
        moebius_model(0.7).unwrap().into_expr(),
        lens_map(0.25).unwrap().into_expr(),
        lens_map(0.5).unwrap().into_expr(),
        lens_map(0.75).unwrap().into_expr(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Printing and reparsing yields a tree that evaluates bit-for-bit
    /// identically (or fails identically) at every sample point.
    #[test]
    fn print_parse_round_trip(node in arb_node()) {
        let original = MapExpr::new("random", node);
        let printed = original.to_string();
        let reparsed = MapExpr::parse(&printed)
            .unwrap_or_else(|e| panic!("printed form must reparse: '{printed}': {e}"));
        for z in sample_points() {
            let a = original.eval_jet(z);
            let b = reparsed.eval_jet(z);
            match (a, b) {
                (Ok(x), Ok(y)) => {
                    prop_assert_eq!(x.value.re.to_bits(), y.value.re.to_bits());
                    prop_assert_eq!(x.value.im.to_bits(), y.value.im.to_bits());
                    prop_assert_eq!(x.derivative.re.to_bits(), y.derivative.re.to_bits());
                    prop_assert_eq!(x.derivative.im.to_bits(), y.derivative.im.to_bits());
                }
                (Err(ea), Err(eb)) => prop_assert_eq!(ea, eb),
                (a, b) => prop_assert!(false, "mismatch at {}: {:?} vs {:?}", z, a, b),
            }
        }
    }

    /// Chain rule across catalog compositions: evaluating f with the jet
    /// of g as variable equals f'(g(z))·g'(z).
    #[test]
    fn jet_chain_rule_on_catalog(
        fi in 0usize..6,
        gi in 0usize..6,
        r in 0.0f64..0.85,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let maps = catalog_maps();
        let (f, g) = (&maps[fi], &maps[gi]);
        let z = c(r * theta.cos(), r * theta.sin());
        let gj = g.eval_jet(z).unwrap();
        let composed = f.eval_jet_chained(gj).unwrap();
        let direct = f.eval_jet(gj.value).unwrap();
        let expected = direct.derivative * gj.derivative;
        let scale = expected.norm().max(1.0);
        prop_assert!(
            (composed.derivative - expected).norm() <= 1e-12 * scale,
            "chain mismatch for {} o {} at {}: {} vs {}",
            f.name(), g.name(), z, composed.derivative, expected
        );
        prop_assert_eq!(composed.value, direct.value);
    }

    /// Grids regenerate bit-identically from their level descriptions and
    /// never leave the open disk.
    #[test]
    fn grid_regeneration(r0 in 0.05f64..0.4, r1 in 0.5f64..0.95, n0 in 1usize..64, n1 in 1usize..64) {
        let levels = vec![
            GridLevel { radius: r0, angular: n0 },
            GridLevel { radius: r1, angular: n1 },
        ];
        let a = DiskGrid::from_levels(levels.clone());
        let b = DiskGrid::from_levels(levels);
        prop_assert_eq!(a.points(), b.points());
        prop_assert!(a.points().iter().all(|z| z.norm() < 1.0));
        prop_assert_eq!(a.len(), n0 + n1);
    }

    /// The hyperbolic derivative of every catalog self-map respects the
    /// Schwarz-Pick bound.
    #[test]
    fn schwarz_pick_bound(
        mi in 0usize..6,
        r in 0.0f64..0.95,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let maps = catalog_maps();
        let z = c(r * theta.cos(), r * theta.sin());
        let h = koenigs::norms::hyperbolic_alpha_derivative(&maps[mi], 1.0, z).unwrap();
        prop_assert!(h <= 1.0 + 1e-12, "{} at {}: {}", maps[mi].name(), z, h);
    }
}
