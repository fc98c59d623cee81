//! The Königs iteration engine.
//!
//! Computes iterates φ_k with jet derivatives, the normalized approximants
//! σ_k = φ_k/φ'(0)^k, weighted partial products v_k, and their converged
//! limits under an explicit Cauchy stopping rule. Convergence is judged on
//! a circle: σ_{k+1} − σ_k is holomorphic, so by the maximum principle a
//! small sup on the control circle bounds the gap on the whole enclosed
//! disk. Non-convergence is an explicit error carrying diagnostics, never
//! a silently degraded result.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::{validate_self_map, MapExpr};
use crate::grid::DiskGrid;
use crate::jet::{EvalError, Jet, JetEval};
use crate::tolerances::{
    CONTRACTION_MARGIN, CONTROL_POINTS, DEFAULT_CONTROL_RADIUS, DEFAULT_KOENIGS_TOL, DEFAULT_K_MAX,
    NORMALIZATION_TOL, ORIGIN_FIXED_TOL,
};

#[derive(Clone, Debug)]
pub enum EngineError {
    /// The map failed the local admissibility checks (origin fixed,
    /// 0 < |φ'(0)| < 1).
    NotAdmissible(String),
    /// The Cauchy gap never fell below tolerance; carries the final gap.
    NonConvergence {
        k_max: u32,
        final_gap: f64,
    },
    /// The weight vanishes at the origin, so no principal eigenfunction
    /// is defined.
    WeightZeroAtOrigin,
    /// The weight vanished (|u| < 1e−300) at an iterate of a control
    /// point.
    WeightVanishes {
        at: Complex64,
    },
    Eval(EvalError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::NotAdmissible(why) => write!(f, "map not admissible: {why}"),
            EngineError::NonConvergence { k_max, final_gap } => write!(
                f,
                "no convergence within {k_max} iterations (final gap {final_gap:.3e})"
            ),
            EngineError::WeightZeroAtOrigin => write!(f, "weight vanishes at the origin"),
            EngineError::WeightVanishes { at } => {
                write!(f, "weight vanishes at an iterate of {at}")
            }
            EngineError::Eval(e) => write!(f, "evaluation failed: {e}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl From<EvalError> for EngineError {
    fn from(e: EvalError) -> Self {
        EngineError::Eval(e)
    }
}

/// Stopping parameters for the iterations.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KoenigsSettings {
    pub tol: f64,
    pub k_max: u32,
    pub control_radius: f64,
    pub control_points: usize,
}

impl Default for KoenigsSettings {
    fn default() -> Self {
        KoenigsSettings {
            tol: DEFAULT_KOENIGS_TOL,
            k_max: DEFAULT_K_MAX,
            control_radius: DEFAULT_CONTROL_RADIUS,
            control_points: CONTROL_POINTS,
        }
    }
}

impl KoenigsSettings {
    pub fn with_control_radius(mut self, r: f64) -> Self {
        self.control_radius = r;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_k_max(mut self, k_max: u32) -> Self {
        self.k_max = k_max;
        self
    }
}

/// The k-th iterate φ_k as a jet: value φ_k(z), derivative φ_k'(z)
/// accumulated by the chain rule. k = 0 is the identity jet (z, 1).
pub fn iterate(map: &MapExpr, z: Complex64, k: u32) -> Result<Jet, EvalError> {
    let mut jet = Jet::variable(z);
    for _ in 0..k {
        jet = map.eval_jet_chained(jet)?;
    }
    Ok(jet)
}

/// Value-only iterate; cheaper inside sweeps.
pub fn iterate_value(map: &MapExpr, z: Complex64, k: u32) -> Result<Complex64, EvalError> {
    let mut w = z;
    for _ in 0..k {
        w = map.eval_value(w)?;
    }
    Ok(w)
}

fn check_admissible(map: &MapExpr) -> Result<Complex64, EngineError> {
    let jet0 = map.eval_jet(Complex64::new(0.0, 0.0))?;
    if jet0.value.norm() > ORIGIN_FIXED_TOL {
        return Err(EngineError::NotAdmissible(format!(
            "origin not fixed (|phi(0)| = {:.3e})",
            jet0.value.norm()
        )));
    }
    let lambda = jet0.derivative;
    let m = lambda.norm();
    if m == 0.0 {
        return Err(EngineError::NotAdmissible(
            "derivative at origin is zero".to_string(),
        ));
    }
    if m >= 1.0 - CONTRACTION_MARGIN {
        return Err(EngineError::NotAdmissible(format!(
            "derivative at origin not strictly contractive (|phi'(0)| = {m})"
        )));
    }
    Ok(lambda)
}

fn control_circle(radius: f64, n: usize) -> Vec<Complex64> {
    DiskGrid::circle(radius, n).points().to_vec()
}

/// A converged Königs approximant σ = σ_{k*}, normalized so σ(0) = 0 and
/// σ'(0) = 1.
#[derive(Clone, Debug)]
pub struct KoenigsApproximation {
    map: MapExpr,
    lambda: Complex64,
    depth: u32,
    cauchy_gap: f64,
    control_radius: f64,
    gap_history: Vec<f64>,
}

impl KoenigsApproximation {
    pub fn map(&self) -> &MapExpr {
        &self.map
    }

    /// λ = φ'(0), the principal eigenvalue.
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// The stopping depth k*: σ is evaluated as φ_{k*}/λ^{k*}.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// The final sup over the control circle of |σ_{k+1} − σ_k|.
    pub fn cauchy_gap(&self) -> f64 {
        self.cauchy_gap
    }

    pub fn control_radius(&self) -> f64 {
        self.control_radius
    }

    /// Per-step control gaps, index k holding sup |σ_{k+1} − σ_k|.
    pub fn gap_history(&self) -> &[f64] {
        &self.gap_history
    }

    /// σ and σ' at z, computed as φ_{k*}(z)·λ^{−k*} with the scaling
    /// accumulated multiplicatively alongside the iteration. Pairing the
    /// two factors keeps magnitudes O(|σ|); a separate λ^{−k*} powering
    /// could overflow while the product stays finite.
    pub fn eval(&self, z: Complex64) -> Result<Jet, EngineError> {
        let mut jet = Jet::variable(z);
        let mut scale = Complex64::new(1.0, 0.0);
        for _ in 0..self.depth {
            jet = self.map.eval_jet_chained(jet)?;
            scale /= self.lambda;
            if !scale.is_finite() {
                return Err(EngineError::Eval(EvalError::Overflow));
            }
        }
        let out = Jet::new(jet.value * scale, jet.derivative * scale);
        if !out.is_finite() {
            return Err(EngineError::Eval(EvalError::Overflow));
        }
        Ok(out)
    }
}

impl JetEval for KoenigsApproximation {
    fn jet_at(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.eval(z).map_err(|e| match e {
            EngineError::Eval(inner) => inner,
            _ => EvalError::Overflow,
        })
    }
}

/// Runs the Königs iteration until the control-circle gap falls below
/// `settings.tol`, keeping the least depth k* that achieves it.
pub fn koenigs_approx(
    map: &MapExpr,
    settings: &KoenigsSettings,
) -> Result<KoenigsApproximation, EngineError> {
    let lambda = check_admissible(map)?;
    assert!(
        settings.control_radius > 0.0 && settings.control_radius < 1.0,
        "control radius must lie in (0, 1)"
    );
    assert!(settings.tol > 0.0, "tolerance must be positive");

    let points = control_circle(settings.control_radius, settings.control_points);
    // State per control point: the current iterate value; sigma_k is the
    // iterate times the running inverse-lambda power.
    let mut iterates = points.clone();
    let mut scale = Complex64::new(1.0, 0.0);
    // sigma_1 values.
    for w in iterates.iter_mut() {
        *w = map.eval_value(*w)?;
    }
    scale /= lambda;
    let mut sigma_prev: Vec<Complex64> = iterates.iter().map(|w| w * scale).collect();

    let mut gap_history = Vec::new();
    for k in 1..=settings.k_max {
        for w in iterates.iter_mut() {
            *w = map.eval_value(*w)?;
        }
        scale /= lambda;
        if !scale.is_finite() {
            return Err(EngineError::Eval(EvalError::Overflow));
        }
        let mut gap: f64 = 0.0;
        for (w, prev) in iterates.iter().zip(sigma_prev.iter_mut()) {
            let sigma_next = w * scale;
            gap = gap.max((sigma_next - *prev).norm());
            *prev = sigma_next;
        }
        gap_history.push(gap);
        if gap <= settings.tol {
            let approx = KoenigsApproximation {
                map: map.clone(),
                lambda,
                depth: k,
                cauchy_gap: gap,
                control_radius: settings.control_radius,
                gap_history,
            };
            approx.check_normalization()?;
            return Ok(approx);
        }
    }
    Err(EngineError::NonConvergence {
        k_max: settings.k_max,
        final_gap: gap_history.last().copied().unwrap_or(f64::INFINITY),
    })
}

impl KoenigsApproximation {
    fn check_normalization(&self) -> Result<(), EngineError> {
        let j = self.eval(Complex64::new(0.0, 0.0))?;
        if j.value.norm() > NORMALIZATION_TOL
            || (j.derivative - Complex64::new(1.0, 0.0)).norm() > NORMALIZATION_TOL
        {
            return Err(EngineError::NotAdmissible(format!(
                "normalization drift: sigma(0) = {}, sigma'(0) = {}",
                j.value, j.derivative
            )));
        }
        Ok(())
    }
}

/// A converged weighted principal eigenfunction v = v_{k*}, normalized so
/// v(0) = 1, with eigenvalue u(0).
#[derive(Clone, Debug)]
pub struct WeightedKoenigs {
    map: MapExpr,
    weight: MapExpr,
    eigenvalue: Complex64,
    depth: u32,
    cauchy_gap: f64,
    control_radius: f64,
    gap_history: Vec<f64>,
}

impl WeightedKoenigs {
    pub fn map(&self) -> &MapExpr {
        &self.map
    }

    pub fn weight(&self) -> &MapExpr {
        &self.weight
    }

    /// u(0), the principal eigenvalue of the weighted operator.
    pub fn eigenvalue(&self) -> Complex64 {
        self.eigenvalue
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cauchy_gap(&self) -> f64 {
        self.cauchy_gap
    }

    pub fn control_radius(&self) -> f64 {
        self.control_radius
    }

    pub fn gap_history(&self) -> &[f64] {
        &self.gap_history
    }

    /// v and v' at z: the product of u(φ_j(z))/u(0) jets for
    /// j = 0..k*, derivatives accumulated by the product and chain rules.
    pub fn eval(&self, z: Complex64) -> Result<Jet, EngineError> {
        let u0 = Jet::constant(self.eigenvalue);
        let mut acc = Jet::constant(Complex64::new(1.0, 0.0));
        let mut w = Jet::variable(z);
        for _ in 0..self.depth {
            let factor = self.weight.eval_jet_chained(w)?;
            acc = acc * factor.checked_div(u0)?;
            if !acc.is_finite() {
                return Err(EngineError::Eval(EvalError::Overflow));
            }
            w = self.map.eval_jet_chained(w)?;
        }
        Ok(acc)
    }
}

impl JetEval for WeightedKoenigs {
    fn jet_at(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.eval(z).map_err(|e| match e {
            EngineError::Eval(inner) => inner,
            _ => EvalError::Overflow,
        })
    }
}

/// Runs the weighted partial-product iteration with the same Cauchy
/// stopping rule as [`koenigs_approx`]. Requires u(0) ≠ 0.
pub fn weighted_principal(
    map: &MapExpr,
    weight: &MapExpr,
    settings: &KoenigsSettings,
) -> Result<WeightedKoenigs, EngineError> {
    check_admissible(map)?;
    let u0 = weight.eval_value(Complex64::new(0.0, 0.0))?;
    if u0.norm() <= 1e-12 {
        return Err(EngineError::WeightZeroAtOrigin);
    }

    let points = control_circle(settings.control_radius, settings.control_points);
    let mut iterates = points.clone();
    let mut products: Vec<Complex64> = Vec::with_capacity(points.len());
    // v_1 = u(z)/u(0).
    for w in iterates.iter_mut() {
        let u = weight.eval_value(*w)?;
        if u.norm() < crate::tolerances::TINY_DENOMINATOR {
            return Err(EngineError::WeightVanishes { at: *w });
        }
        products.push(u / u0);
        *w = map.eval_value(*w)?;
    }

    let mut gap_history = Vec::new();
    for k in 1..=settings.k_max {
        let mut gap: f64 = 0.0;
        for (w, p) in iterates.iter_mut().zip(products.iter_mut()) {
            let u = weight.eval_value(*w)?;
            if u.norm() < crate::tolerances::TINY_DENOMINATOR {
                return Err(EngineError::WeightVanishes { at: *w });
            }
            let next = *p * (u / u0);
            gap = gap.max((next - *p).norm());
            *p = next;
            *w = map.eval_value(*w)?;
        }
        gap_history.push(gap);
        if gap <= settings.tol {
            let wk = WeightedKoenigs {
                map: map.clone(),
                weight: weight.clone(),
                eigenvalue: u0,
                depth: k,
                cauchy_gap: gap,
                control_radius: settings.control_radius,
                gap_history,
            };
            let at0 = wk.eval(Complex64::new(0.0, 0.0))?;
            if (at0.value - Complex64::new(1.0, 0.0)).norm() > NORMALIZATION_TOL {
                return Err(EngineError::NotAdmissible(format!(
                    "normalization drift: v(0) = {}",
                    at0.value
                )));
            }
            return Ok(wk);
        }
    }
    Err(EngineError::NonConvergence {
        k_max: settings.k_max,
        final_gap: gap_history.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// An eigenfunction v·σ^n (v ≡ 1 when no weight is attached), evaluated
/// by the product and power rules on jets.
#[derive(Clone, Copy, Debug)]
pub struct Eigenfunction<'a> {
    pub sigma: &'a KoenigsApproximation,
    pub weight_part: Option<&'a WeightedKoenigs>,
    pub power: u32,
}

impl Eigenfunction<'_> {
    /// The associated eigenvalue u(0)·φ'(0)^n (u(0) = 1 when unweighted).
    pub fn eigenvalue(&self) -> Complex64 {
        let u0 = self
            .weight_part
            .map(|w| w.eigenvalue())
            .unwrap_or(Complex64::new(1.0, 0.0));
        u0 * self.sigma.lambda().powu(self.power)
    }

    pub fn eval(&self, z: Complex64) -> Result<Jet, EngineError> {
        let mut acc = match self.weight_part {
            Some(w) => w.eval(z)?,
            None => Jet::constant(Complex64::new(1.0, 0.0)),
        };
        if self.power > 0 {
            let sigma = self.sigma.eval(z)?;
            for _ in 0..self.power {
                acc = acc * sigma;
            }
        }
        Ok(acc)
    }
}

impl JetEval for Eigenfunction<'_> {
    fn jet_at(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.eval(z).map_err(|e| match e {
            EngineError::Eval(inner) => inner,
            _ => EvalError::Overflow,
        })
    }
}

/// Value, derivative, and eigenvalue of v·σ^n at a point.
pub fn eigenfunction_eval(
    approx: &KoenigsApproximation,
    weighted: Option<&WeightedKoenigs>,
    n: u32,
    z: Complex64,
) -> Result<(Jet, Complex64), EngineError> {
    let f = Eigenfunction {
        sigma: approx,
        weight_part: weighted,
        power: n,
    };
    Ok((f.eval(z)?, f.eigenvalue()))
}

/// Grid supremum of a pointwise residual, with the argmax witness and the
/// fraction of points that evaluated.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualReport {
    pub sup: f64,
    pub witness: Complex64,
    pub coverage: f64,
}

fn residual_sweep<E>(
    grid: &DiskGrid,
    mut point_residual: impl FnMut(Complex64) -> Result<f64, E>,
) -> ResidualReport {
    let mut sup: f64 = 0.0;
    let mut witness = Complex64::new(0.0, 0.0);
    let mut ok = 0usize;
    for &z in grid.points() {
        if let Ok(r) = point_residual(z) {
            ok += 1;
            if r > sup {
                sup = r;
                witness = z;
            }
        }
    }
    ResidualReport {
        sup,
        witness,
        coverage: if grid.is_empty() {
            0.0
        } else {
            ok as f64 / grid.len() as f64
        },
    }
}

/// sup over the grid of |σ(φ(z)) − λ·σ(z)|, the defect in the Schröder
/// equation for the converged approximant.
pub fn schroder_residual(approx: &KoenigsApproximation, grid: &DiskGrid) -> ResidualReport {
    residual_sweep(grid, |z| -> Result<f64, EngineError> {
        let phi_z = approx.map().eval_value(z)?;
        let lhs = approx.eval(phi_z)?.value;
        let rhs = approx.lambda() * approx.eval(z)?.value;
        Ok((lhs - rhs).norm())
    })
}

/// sup over the grid of |u(z)·v(φ(z)) − u(0)·v(z)|, the defect in the
/// weighted Schröder equation.
pub fn weighted_residual(wk: &WeightedKoenigs, grid: &DiskGrid) -> ResidualReport {
    residual_sweep(grid, |z| -> Result<f64, EngineError> {
        let phi_z = wk.map().eval_value(z)?;
        let u_z = wk.weight().eval_value(z)?;
        let lhs = u_z * wk.eval(phi_z)?.value;
        let rhs = wk.eigenvalue() * wk.eval(z)?.value;
        Ok((lhs - rhs).norm())
    })
}

/// Convenience: validate on the grid, then converge. Norm estimators and
/// checkers built on the result can trust it is a genuine limit.
pub fn converged_koenigs(
    map: &MapExpr,
    grid: &DiskGrid,
    settings: &KoenigsSettings,
) -> Result<KoenigsApproximation, EngineError> {
    let report = validate_self_map(map, grid);
    if !report.is_schroder_admissible {
        let reasons: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
        return Err(EngineError::NotAdmissible(reasons.join("; ")));
    }
    koenigs_approx(map, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lens_map, linear_map, moebius_model};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn iterate_linear_closed_form() {
        let map = linear_map(0.5).unwrap();
        let j = iterate(&map, c(0.8, 0.0), 3).unwrap();
        assert!((j.value - c(0.1, 0.0)).norm() < 1e-15);
        assert!((j.derivative - c(0.125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn iterate_zero_is_identity() {
        let map = lens_map(0.5).unwrap().into_expr();
        let z = c(0.3, -0.2);
        let j = iterate(&map, z, 0).unwrap();
        assert_eq!(j.value, z);
        assert_eq!(j.derivative, c(1.0, 0.0));
    }

    #[test]
    fn iterate_moebius_second_is_algebraic_composition() {
        // phi(z) = z/(2−z) composed with itself is z/(4−3z).
        let map = moebius_model(0.5).unwrap().into_expr();
        for z in [c(0.3, 0.1), c(-0.5, 0.4), c(0.7, 0.0)] {
            let j = iterate(&map, z, 2).unwrap();
            let expected = z / (c(4.0, 0.0) - c(3.0, 0.0) * z);
            assert!((j.value - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn linear_koenigs_is_identity_at_depth_one() {
        let map = linear_map(0.5).unwrap();
        let approx = koenigs_approx(&map, &KoenigsSettings::default()).unwrap();
        assert_eq!(approx.depth(), 1);
        assert_eq!(approx.cauchy_gap(), 0.0);
        let j = approx.eval(c(0.37, 0.11)).unwrap();
        assert!((j.value - c(0.37, 0.11)).norm() < 1e-15);
        assert!((j.derivative - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn koenigs_normalization() {
        for map in [
            moebius_model(0.5).unwrap().into_expr(),
            lens_map(0.5).unwrap().into_expr(),
        ] {
            let approx = koenigs_approx(&map, &KoenigsSettings::default()).unwrap();
            let j = approx.eval(c(0.0, 0.0)).unwrap();
            assert!(j.value.norm() <= 1e-10);
            assert!((j.derivative - c(1.0, 0.0)).norm() <= 1e-10);
        }
    }

    #[test]
    fn moebius_matches_closed_form_koenigs() {
        let model = moebius_model(0.5).unwrap();
        let approx = koenigs_approx(
            model.expr(),
            &KoenigsSettings::default().with_control_radius(0.8),
        )
        .unwrap();
        // sigma(0.5) = 1, sigma'(0.5) = 1/(1-z)^2 = 4.
        let j = approx.eval(c(0.5, 0.0)).unwrap();
        assert!((j.value - c(1.0, 0.0)).norm() < 1e-8);
        assert!((j.derivative - c(4.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn non_convergence_is_reported() {
        let map = moebius_model(0.5).unwrap().into_expr();
        let tight = KoenigsSettings::default().with_k_max(3);
        match koenigs_approx(&map, &tight) {
            Err(EngineError::NonConvergence {
                k_max: 3,
                final_gap,
            }) => {
                assert!(final_gap > 0.0)
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn inadmissible_maps_rejected() {
        let square = MapExpr::parse("z^2").unwrap();
        assert!(matches!(
            koenigs_approx(&square, &KoenigsSettings::default()),
            Err(EngineError::NotAdmissible(_))
        ));
        let shifted = MapExpr::parse("(z + 0.5)/(1 + 0.5*z)").unwrap();
        assert!(matches!(
            koenigs_approx(&shifted, &KoenigsSettings::default()),
            Err(EngineError::NotAdmissible(_))
        ));
    }

    #[test]
    fn gap_decay_ratio_is_geometric() {
        // Asymptotically gap_{k+1}/gap_k ≈ |lambda|; empirical window
        // [|lambda|/2, (1+|lambda|)/2] for k ≥ 10.
        let approx = koenigs_approx(
            &moebius_model(0.5).unwrap().into_expr(),
            &KoenigsSettings::default(),
        )
        .unwrap();
        let gaps = approx.gap_history();
        assert!(gaps.len() > 12, "need a tail to test: {}", gaps.len());
        let lam = approx.lambda().norm();
        for k in 10..gaps.len() - 1 {
            let ratio = gaps[k + 1] / gaps[k];
            assert!(
                ratio >= lam / 2.0 && ratio <= (1.0 + lam) / 2.0,
                "k = {k}: ratio {ratio} outside [{}, {}]",
                lam / 2.0,
                (1.0 + lam) / 2.0
            );
        }
    }

    #[test]
    fn gap_decay_ratio_odd_symmetric_map() {
        // phi_t(−z) = −phi_t(z) kills the first-order correction of the
        // lens iteration, so its gaps contract at ratio t², one full
        // order faster than the generic |lambda| rate.
        let approx = koenigs_approx(
            &lens_map(0.5).unwrap().into_expr(),
            &KoenigsSettings::default(),
        )
        .unwrap();
        let gaps = approx.gap_history();
        assert!(gaps.len() > 12);
        let t_sq = 0.25;
        let mut checked = 0;
        for k in 6..gaps.len() - 1 {
            // Below ~1e-9 the gaps sit on the cancellation noise floor of
            // evaluating the lens formula at tiny iterates.
            if gaps[k + 1] < 1e-9 {
                break;
            }
            let ratio = gaps[k + 1] / gaps[k];
            assert!(
                (ratio - t_sq).abs() <= 0.05,
                "k = {k}: ratio {ratio} not near {t_sq}"
            );
            checked += 1;
        }
        assert!(checked >= 4);
    }

    #[test]
    fn schroder_residual_small_after_convergence() {
        let grid = DiskGrid::uniform(0.7, 8, 64);
        for map in [
            linear_map(0.5).unwrap(),
            moebius_model(0.5).unwrap().into_expr(),
            lens_map(0.5).unwrap().into_expr(),
        ] {
            let approx = koenigs_approx(&map, &KoenigsSettings::default()).unwrap();
            let r = schroder_residual(&approx, &grid);
            assert!(r.sup <= 1e-8, "{}: residual {:.3e}", map.name(), r.sup);
            assert_eq!(r.coverage, 1.0);
        }
    }

    #[test]
    fn constant_weight_gives_trivial_v() {
        let map = linear_map(0.5).unwrap();
        let weight = MapExpr::parse("2.5").unwrap();
        let wk = weighted_principal(&map, &weight, &KoenigsSettings::default()).unwrap();
        assert_eq!(wk.depth(), 1);
        let j = wk.eval(c(0.3, 0.4)).unwrap();
        assert_eq!(j.value, c(1.0, 0.0));
        assert_eq!(j.derivative, c(0.0, 0.0));
    }

    #[test]
    fn weighted_product_matches_truncated_oracle() {
        // u = 1 + z/2 with the dilation: v(z) = prod_j (1 + 0.5^j z/2).
        let map = linear_map(0.5).unwrap();
        let weight = MapExpr::parse("1 + z/2").unwrap();
        let wk = weighted_principal(&map, &weight, &KoenigsSettings::default()).unwrap();
        let z = c(0.4, 0.0);
        let mut oracle = Complex64::new(1.0, 0.0);
        for j in 0..60 {
            oracle *= Complex64::new(1.0, 0.0) + 0.5f64.powi(j) * z / 2.0;
        }
        let v = wk.eval(z).unwrap().value;
        assert!((v - oracle).norm() < 1e-10, "v = {v}, oracle = {oracle}");
    }

    #[test]
    fn weighted_identity_residual() {
        let grid = DiskGrid::uniform(0.7, 8, 64);
        let weight = MapExpr::parse("1 + z/2").unwrap();
        for map in [linear_map(0.5).unwrap(), lens_map(0.5).unwrap().into_expr()] {
            let wk = weighted_principal(&map, &weight, &KoenigsSettings::default()).unwrap();
            let r = weighted_residual(&wk, &grid);
            assert!(r.sup <= 1e-8, "{}: {:.3e}", map.name(), r.sup);
            let v0 = wk.eval(c(0.0, 0.0)).unwrap().value;
            assert!((v0 - c(1.0, 0.0)).norm() <= 1e-10);
        }
    }

    #[test]
    fn weight_vanishing_at_iterate_detected() {
        // The control circle contains z = 0.7 exactly; phi(0.7) = 0.35
        // zeroes the weight there while u(0) = -0.35 stays fine.
        let map = linear_map(0.5).unwrap();
        let weight = MapExpr::parse("z - 0.35").unwrap();
        match weighted_principal(&map, &weight, &KoenigsSettings::default()) {
            Err(EngineError::WeightVanishes { at }) => {
                assert!((at - c(0.35, 0.0)).norm() < 1e-12, "at {at}");
            }
            other => panic!("expected vanishing weight, got {other:?}"),
        }
    }

    #[test]
    fn weight_vanishing_at_origin_rejected() {
        let map = linear_map(0.5).unwrap();
        let weight = MapExpr::parse("z").unwrap();
        assert!(matches!(
            weighted_principal(&map, &weight, &KoenigsSettings::default()),
            Err(EngineError::WeightZeroAtOrigin)
        ));
    }

    #[test]
    fn eigenfunction_power_rules() {
        let model = moebius_model(0.5).unwrap();
        let approx = koenigs_approx(
            model.expr(),
            &KoenigsSettings::default().with_control_radius(0.8),
        )
        .unwrap();
        // n = 0: constant 1.
        let (j0, ev0) = eigenfunction_eval(&approx, None, 0, c(0.3, 0.0)).unwrap();
        assert_eq!(j0.value, c(1.0, 0.0));
        assert_eq!(j0.derivative, c(0.0, 0.0));
        assert!((ev0 - c(1.0, 0.0)).norm() < 1e-15);
        // n = 1 at 0.5: (1, 4); n = 2: (1, 2*sigma*sigma' = 8).
        let (j1, ev1) = eigenfunction_eval(&approx, None, 1, c(0.5, 0.0)).unwrap();
        assert!((j1.value - c(1.0, 0.0)).norm() < 1e-8);
        assert!((j1.derivative - c(4.0, 0.0)).norm() < 1e-6);
        assert!((ev1 - c(0.5, 0.0)).norm() < 1e-12);
        let (j2, ev2) = eigenfunction_eval(&approx, None, 2, c(0.5, 0.0)).unwrap();
        assert!((j2.value - c(1.0, 0.0)).norm() < 1e-7);
        assert!((j2.derivative - c(8.0, 0.0)).norm() < 1e-5);
        assert!((ev2 - c(0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigen_relation_for_powers() {
        // |sigma^n(phi z) − lambda^n sigma^n(z)| stays within
        // n·R·max(1,|sigma|)^{n−1} of the base residual R.
        let model = moebius_model(0.5).unwrap();
        let approx = koenigs_approx(model.expr(), &KoenigsSettings::default()).unwrap();
        let grid = DiskGrid::uniform(0.7, 6, 32);
        let base = schroder_residual(&approx, &grid).sup.max(1e-12);
        for n in 1..=5u32 {
            for &z in grid.points() {
                let phi_z = model.expr().eval_value(z).unwrap();
                let s_phi = approx.eval(phi_z).unwrap().value;
                let s_z = approx.eval(z).unwrap().value;
                let lhs = (s_phi.powu(n) - approx.lambda().powu(n) * s_z.powu(n)).norm();
                let bound =
                    n as f64 * base * s_z.norm().max(s_phi.norm()).max(1.0).powi(n as i32 - 1);
                assert!(
                    lhs <= bound * (1.0 + 1e-9) + 1e-12,
                    "n = {n}, z = {z}: {lhs:.3e} > {bound:.3e}"
                );
            }
        }
    }

    #[test]
    fn converged_koenigs_rejects_grid_escapers() {
        // Locally admissible (phi'(0) = 0.5) but not a self-map.
        let map = MapExpr::parse("0.5*z + 0.9*z^7").unwrap();
        let grid = DiskGrid::standard(8);
        match converged_koenigs(&map, &grid, &KoenigsSettings::default()) {
            Err(EngineError::NotAdmissible(why)) => assert!(why.contains("escapes")),
            other => panic!("expected rejection, got {other:?}"),
        }
        let fine = converged_koenigs(
            &moebius_model(0.5).unwrap().into_expr(),
            &grid,
            &KoenigsSettings::default(),
        );
        assert!(fine.is_ok());
    }

    #[test]
    fn unit_weight_gives_exactly_one() {
        let map = lens_map(0.5).unwrap().into_expr();
        let weight = MapExpr::parse("1").unwrap();
        let wk = weighted_principal(&map, &weight, &KoenigsSettings::default()).unwrap();
        for &z in DiskGrid::uniform(0.7, 4, 16).points() {
            let j = wk.eval(z).unwrap();
            assert_eq!(j.value, c(1.0, 0.0));
            assert_eq!(j.derivative, c(0.0, 0.0));
        }
    }
}
