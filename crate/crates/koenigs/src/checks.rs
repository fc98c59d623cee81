//! Grid verdicts for the hypotheses behind the eigenfunction theory.
//!
//! Every check here evaluates a displayed inequality or limit literally,
//! point by point, and reports a three-state verdict: holds-on-grid,
//! violated, or inconclusive. A grid can never certify an open condition
//! over the whole disk, so "holds" is always grid evidence; a violation,
//! however, is an exact witness that reproduces as a one-point
//! re-evaluation.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::engine::iterate_value;
use crate::expr::{MapExpr, Node};
use crate::grid::DiskGrid;
use crate::jet::{EvalError, JetEval};
use crate::norms::{refine_sup, NormError, RefinementPolicy, SeminormEstimate};
use crate::tolerances::{
    CIRCLE_SAMPLES, COMPACTNESS_DEPTH, ITERATE_SUP_MARGIN, MIN_COVERAGE, POINT_TOL,
    RADIAL_DIVERGENCE_THRESHOLD, TINY_DENOMINATOR, TREND_ZERO_LEVEL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    HoldsOnGrid,
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::HoldsOnGrid => write!(f, "holds-on-grid"),
            Verdict::Violated => write!(f, "violated"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Parameters echoed into a report, when applicable.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct CheckParams {
    pub alpha: Option<f64>,
    pub m: Option<u32>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
}

/// Verdict plus evidence for one hypothesis check.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub params: CheckParams,
    pub verdict: Verdict,
    /// Max over evaluated points of LHS − RHS (for supremum-style checks,
    /// the largest estimated supremum instead).
    pub worst_margin: f64,
    /// Point attaining the worst margin.
    pub witness: Option<Complex64>,
    /// Fraction of grid points that evaluated.
    pub coverage: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub detail: ConditionDetail,
}

#[derive(Clone, Debug, Serialize)]
pub enum ConditionDetail {
    None,
    /// Supremum estimates, one per displayed quantity.
    Quantities(Vec<QuantityEstimate>),
    /// Per-radius rows for circle-based checks.
    RadialSamples(Vec<RadialSample>),
    /// Per-iterate circle sups for the iterate sup-norm probe.
    IterateSups {
        sups: Vec<f64>,
        found: Option<FoundIterate>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantityEstimate {
    pub id: String,
    pub estimate: SeminormEstimate,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RadialSample {
    pub r: f64,
    pub m_r: f64,
    pub a_r: f64,
    /// log(1−r)·log M_r, the growth product whose divergence is probed.
    pub growth: f64,
    pub log_a_r: f64,
    /// ε·log(1−r)·log M_r.
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FoundIterate {
    pub k: u32,
    pub sup: f64,
}

#[derive(Clone, Debug)]
pub enum CheckError {
    Eval(EvalError),
    Norm(NormError),
    /// ε·log‖φ‖∞ must exceed −1.
    EpsilonConstraint {
        epsilon: f64,
        phi_sup_norm: f64,
    },
    WeightZeroAtOrigin,
    BadParameter(&'static str),
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::Eval(e) => write!(f, "evaluation failed: {e}"),
            CheckError::Norm(e) => write!(f, "estimate failed: {e}"),
            CheckError::EpsilonConstraint {
                epsilon,
                phi_sup_norm,
            } => write!(
                f,
                "epsilon constraint violated: {epsilon}*log({phi_sup_norm}) <= -1"
            ),
            CheckError::WeightZeroAtOrigin => write!(f, "weight vanishes at the origin"),
            CheckError::BadParameter(what) => write!(f, "bad parameter: {what}"),
        }
    }
}

impl std::error::Error for CheckError {}

impl From<EvalError> for CheckError {
    fn from(e: EvalError) -> Self {
        CheckError::Eval(e)
    }
}

impl From<NormError> for CheckError {
    fn from(e: NormError) -> Self {
        CheckError::Norm(e)
    }
}

/// The constant weight 1, the default for unweighted composition
/// operators.
pub fn unit_weight() -> MapExpr {
    MapExpr::new("1", Node::real(1.0))
}

// ---------------------------------------------------------------------------
// Pointwise inequality checks
// ---------------------------------------------------------------------------

fn pointwise_check<E>(
    condition: &str,
    params: CheckParams,
    grid: &DiskGrid,
    mut margin_at: impl FnMut(Complex64) -> Result<f64, E>,
) -> ConditionReport {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut ok = 0usize;
    for &z in grid.points() {
        if let Ok(m) = margin_at(z) {
            ok += 1;
            if m > worst {
                worst = m;
                witness = Some(z);
            }
        }
    }
    let coverage = if grid.is_empty() {
        0.0
    } else {
        ok as f64 / grid.len() as f64
    };
    let verdict = if worst > POINT_TOL {
        Verdict::Violated
    } else if ok > 0 && coverage >= MIN_COVERAGE {
        Verdict::HoldsOnGrid
    } else {
        Verdict::Inconclusive
    };
    ConditionReport {
        condition: condition.to_string(),
        params,
        verdict,
        worst_margin: if ok > 0 { worst } else { f64::NAN },
        witness,
        coverage,
        note: None,
        detail: ConditionDetail::None,
    }
}

fn lambda_of(map: &MapExpr) -> Result<Complex64, EvalError> {
    Ok(map.eval_jet(Complex64::new(0.0, 0.0))?.derivative)
}

/// Margin of the iterate-shifted hyperbolic bound at one point:
/// |φ^(h_α)(φ_m(z))| − |φ'(0)|.
pub fn condition_a_margin_at(
    map: &MapExpr,
    alpha: f64,
    m: u32,
    z: Complex64,
) -> Result<f64, EvalError> {
    let lambda = lambda_of(map)?;
    let w = iterate_value(map, z, m)?;
    let h = crate::norms::hyperbolic_alpha_derivative(map, alpha, w)?;
    Ok(h - lambda.norm())
}

/// Checks |φ^(h_α)(φ_m(z))| ≤ |φ'(0)| over the grid: the hyperbolic
/// α-derivative evaluated at the m-th iterate of every point. If this
/// holds for some m it holds for every larger m, since the extra iterates
/// only shrink the sample set.
pub fn check_condition_a(
    map: &MapExpr,
    alpha: f64,
    m: u32,
    grid: &DiskGrid,
) -> Result<ConditionReport, CheckError> {
    let lambda = lambda_of(map)?;
    let rhs = lambda.norm();
    Ok(pointwise_check(
        "condition_a",
        CheckParams {
            alpha: Some(alpha),
            m: Some(m),
            ..CheckParams::default()
        },
        grid,
        |z| -> Result<f64, EvalError> {
            let w = iterate_value(map, z, m)?;
            let h = crate::norms::hyperbolic_alpha_derivative(map, alpha, w)?;
            Ok(h - rhs)
        },
    ))
}

fn log_weight(modulus: f64) -> f64 {
    (2.0 / (1.0 - modulus)).ln()
}

/// Margin of the log-weighted hyperbolic bound at one point:
/// (1−|z|²)/(1−|φ|²) · log(2/(1−|z|))/log(2/(1−|φ|)) · |φ'(z)| − |φ'(0)|.
pub fn eq12_margin_at(map: &MapExpr, z: Complex64) -> Result<f64, EvalError> {
    let lambda = lambda_of(map)?;
    let j = map.eval_jet(z)?;
    let phi_abs = j.value.norm();
    if phi_abs >= 1.0 {
        return Err(EvalError::OutsideDisk);
    }
    let ratio = (1.0 - z.norm_sqr()) / (1.0 - j.value.norm_sqr());
    let logs = log_weight(z.norm()) / log_weight(phi_abs);
    Ok(ratio * logs * j.derivative.norm() - lambda.norm())
}

/// Checks the log-weighted hyperbolic bound pointwise on the grid.
pub fn check_eq12(map: &MapExpr, grid: &DiskGrid) -> Result<ConditionReport, CheckError> {
    lambda_of(map)?;
    Ok(pointwise_check("eq12", CheckParams::default(), grid, |z| {
        eq12_margin_at(map, z)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightedBetaVariant {
    Plain,
    LogWeighted,
}

/// Margin of the weighted β-ratio hypothesis at one point. `Plain` checks
/// |u(z)|·[(1−|z|²)/(1−|φ(z)|²)]^β ≤ |u(0)|; `LogWeighted` additionally
/// weights by log(2/(1−|z|)^β)/log(2/(1−|φ(z)|)^β), and the reported
/// margin is the worse of that and of the log-weighted hyperbolic bound.
pub fn weighted_beta_margin_at(
    map: &MapExpr,
    weight: &MapExpr,
    beta: f64,
    variant: WeightedBetaVariant,
    z: Complex64,
) -> Result<f64, EvalError> {
    let u0 = weight.eval_value(Complex64::new(0.0, 0.0))?.norm();
    let u = weight.eval_value(z)?.norm();
    let phi = map.eval_value(z)?;
    if phi.norm() >= 1.0 {
        return Err(EvalError::OutsideDisk);
    }
    let ratio = ((1.0 - z.norm_sqr()) / (1.0 - phi.norm_sqr())).powf(beta);
    match variant {
        WeightedBetaVariant::Plain => Ok(u * ratio - u0),
        WeightedBetaVariant::LogWeighted => {
            // log(2/(1−r)^β) taken literally as log 2 − β·log(1−r).
            let lw = |modulus: f64| 2f64.ln() - beta * (1.0 - modulus).ln();
            let first = u * ratio * lw(z.norm()) / lw(phi.norm()) - u0;
            let second = eq12_margin_at(map, z)?;
            Ok(first.max(second))
        }
    }
}

/// Checks the weighted β-ratio hypothesis pointwise on the grid.
pub fn check_weighted_beta(
    map: &MapExpr,
    weight: &MapExpr,
    beta: f64,
    variant: WeightedBetaVariant,
    grid: &DiskGrid,
) -> Result<ConditionReport, CheckError> {
    if !(beta > 0.0) {
        return Err(CheckError::BadParameter("beta must be positive"));
    }
    let u0 = weight.eval_value(Complex64::new(0.0, 0.0))?.norm();
    if u0 <= 0.0 {
        return Err(CheckError::WeightZeroAtOrigin);
    }
    let condition = match variant {
        WeightedBetaVariant::Plain => "weighted_beta_plain",
        WeightedBetaVariant::LogWeighted => "weighted_beta_log",
    };
    let mut report = pointwise_check(
        condition,
        CheckParams {
            beta: Some(beta),
            ..CheckParams::default()
        },
        grid,
        |z| weighted_beta_margin_at(map, weight, beta, variant, z),
    );
    if variant == WeightedBetaVariant::LogWeighted {
        // The log-weighted hypothesis is usually stated for integer beta;
        // this check accepts any real beta > 0.
        report.note = Some(format!(
            "log-weighted variant evaluated at real beta = {beta}; \
             the hypothesis is conventionally stated for integer beta"
        ));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Boundedness quantities (supremum estimates)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AlphaCase {
    SubUnit,
    Unit,
    SuperUnit,
}

fn alpha_case(alpha: f64) -> AlphaCase {
    if (alpha - 1.0).abs() <= 1e-12 {
        AlphaCase::Unit
    } else if alpha < 1.0 {
        AlphaCase::SubUnit
    } else {
        AlphaCase::SuperUnit
    }
}

type QuantityFn<'a> = Box<dyn Fn(Complex64) -> Result<f64, EvalError> + 'a>;

/// The displayed boundedness quantities for the weighted composition
/// operator at level α, as (id, pointwise value) pairs.
fn boundedness_quantities<'a>(
    map: &'a MapExpr,
    weight: &'a MapExpr,
    alpha: f64,
) -> Vec<(String, QuantityFn<'a>)> {
    let weighted_hyperbolic = move |z: Complex64| -> Result<f64, EvalError> {
        let u = weight.eval_value(z)?.norm();
        let j = map.eval_jet(z)?;
        if j.value.norm() >= 1.0 {
            return Err(EvalError::OutsideDisk);
        }
        Ok(u * (1.0 - z.norm_sqr()).powf(alpha) * j.derivative.norm()
            / (1.0 - j.value.norm_sqr()).powf(alpha))
    };
    match alpha_case(alpha) {
        AlphaCase::SubUnit => vec![
            (
                "u_bloch_seminorm".to_string(),
                Box::new(move |z: Complex64| {
                    let ju = weight.eval_jet(z)?;
                    Ok((1.0 - z.norm_sqr()).powf(alpha) * ju.derivative.norm())
                }) as QuantityFn<'a>,
            ),
            (
                "weighted_hyperbolic".to_string(),
                Box::new(weighted_hyperbolic),
            ),
        ],
        AlphaCase::Unit => vec![
            (
                "u_prime_log".to_string(),
                Box::new(move |z: Complex64| {
                    let ju = weight.eval_jet(z)?;
                    let phi = map.eval_value(z)?;
                    if phi.norm() >= 1.0 {
                        return Err(EvalError::OutsideDisk);
                    }
                    Ok(ju.derivative.norm()
                        * (1.0 - z.norm_sqr())
                        * (1.0 / (1.0 - phi.norm_sqr())).ln())
                }),
            ),
            (
                "weighted_hyperbolic".to_string(),
                Box::new(weighted_hyperbolic),
            ),
        ],
        AlphaCase::SuperUnit => vec![
            (
                "u_prime_ratio".to_string(),
                Box::new(move |z: Complex64| {
                    let ju = weight.eval_jet(z)?;
                    let phi = map.eval_value(z)?;
                    if phi.norm() >= 1.0 {
                        return Err(EvalError::OutsideDisk);
                    }
                    Ok(ju.derivative.norm() * (1.0 - z.norm_sqr()).powf(alpha)
                        / (1.0 - phi.norm_sqr()).powf(alpha - 1.0))
                }),
            ),
            (
                "weighted_hyperbolic".to_string(),
                Box::new(weighted_hyperbolic),
            ),
        ],
    }
}

/// Estimates every displayed boundedness supremum for uC_φ at level α
/// with the refinement policy. Bounded evidence = all estimates
/// converged (verdict holds-on-grid); unbounded evidence = any estimate
/// diverging (verdict violated); anything else is inconclusive. The
/// reported margin is the largest estimated supremum.
pub fn check_zh21(
    map: &MapExpr,
    weight: Option<&MapExpr>,
    alpha: f64,
    policy: &RefinementPolicy,
) -> Result<ConditionReport, CheckError> {
    if !(alpha > 0.0) {
        return Err(CheckError::BadParameter("alpha must be positive"));
    }
    let unit;
    let weight = match weight {
        Some(w) => w,
        None => {
            unit = unit_weight();
            &unit
        }
    };
    let mut quantities = Vec::new();
    for (id, quantity) in boundedness_quantities(map, weight, alpha) {
        let estimate = refine_sup(alpha, policy, &*quantity)?;
        quantities.push(QuantityEstimate { id, estimate });
    }
    let all_converged = quantities.iter().all(|q| q.estimate.converged);
    let any_diverging = quantities.iter().any(|q| q.estimate.diverging);
    let verdict = if any_diverging {
        Verdict::Violated
    } else if all_converged {
        Verdict::HoldsOnGrid
    } else {
        Verdict::Inconclusive
    };
    let (worst_margin, witness, coverage) = quantities
        .iter()
        .max_by(|a, b| a.estimate.value.total_cmp(&b.estimate.value))
        .map(|q| {
            (
                q.estimate.value,
                Some(q.estimate.witness),
                q.estimate.coverage,
            )
        })
        .unwrap_or((f64::NAN, None, 0.0));
    Ok(ConditionReport {
        condition: "zh21".to_string(),
        params: CheckParams {
            alpha: Some(alpha),
            ..CheckParams::default()
        },
        verdict,
        worst_margin,
        witness,
        coverage,
        note: None,
        detail: ConditionDetail::Quantities(quantities),
    })
}

// ---------------------------------------------------------------------------
// Compactness diagnostics
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Trend {
    ToZero,
    BoundedAway,
    Inconclusive,
    Vacuous,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trend::ToZero => write!(f, "to-zero"),
            Trend::BoundedAway => write!(f, "bounded-away"),
            Trend::Inconclusive => write!(f, "inconclusive"),
            Trend::Vacuous => write!(f, "vacuous"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompactnessQuantity {
    pub id: String,
    /// Max of the quantity over each shell |φ(z)| > 1 − δ; None marks an
    /// empty shell.
    pub shell_maxima: Vec<Option<f64>>,
    /// (|φ(z)|, quantity) pairs ascending in |φ(z)|, truncated to the
    /// closest boundary approaches.
    pub samples: Vec<(f64, f64)>,
    pub trend: Trend,
}

/// The compactness limit "quantity → 0 as |φ(z)| → 1" operationalized as
/// shell maxima with a trend classification. The limit runs along a
/// filter that may be empty: when no grid point pushes |φ| past the
/// outermost shell the verdict is vacuous, consistent with compactness
/// when ‖φ‖∞ < 1.
#[derive(Clone, Debug, Serialize)]
pub struct CompactnessReport {
    pub alpha: f64,
    pub delta_levels: Vec<f64>,
    pub quantities: Vec<CompactnessQuantity>,
    pub overall: Trend,
    pub coverage: f64,
}

impl CompactnessReport {
    pub fn quantity(&self, id: &str) -> Option<&CompactnessQuantity> {
        self.quantities.iter().find(|q| q.id == id)
    }

    /// The deepest nonempty shell maximum of a quantity, the plateau
    /// value a non-compact operator settles at.
    pub fn plateau(&self, id: &str) -> Option<f64> {
        self.quantity(id)?
            .shell_maxima
            .iter()
            .rev()
            .find_map(|m| *m)
    }
}

const SAMPLE_KEEP: usize = 512;

fn classify_trend(maxima: &[Option<f64>]) -> Trend {
    let vals: Vec<f64> = maxima.iter().filter_map(|m| *m).collect();
    if vals.is_empty() {
        return Trend::Vacuous;
    }
    let first = vals[0];
    let last = *vals.last().unwrap();
    let zero_level = TREND_ZERO_LEVEL.max(0.05 * first);
    if last <= zero_level {
        if vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)) {
            return Trend::ToZero;
        }
        return Trend::Inconclusive;
    }
    if last >= 0.5 * first {
        return Trend::BoundedAway;
    }
    Trend::Inconclusive
}

/// Scans the boundedness quantities over δ-shells of a deep radial
/// ladder. δ levels must descend toward 0.
pub fn check_compactness(
    map: &MapExpr,
    weight: Option<&MapExpr>,
    alpha: f64,
    delta_levels: &[f64],
) -> Result<CompactnessReport, CheckError> {
    if delta_levels.is_empty()
        || delta_levels.windows(2).any(|w| w[0] <= w[1])
        || delta_levels.iter().any(|&d| !(d > 0.0 && d < 1.0))
    {
        return Err(CheckError::BadParameter(
            "delta levels must descend within (0, 1)",
        ));
    }
    let unit;
    let weight = match weight {
        Some(w) => w,
        None => {
            unit = unit_weight();
            &unit
        }
    };
    let grid = DiskGrid::standard(COMPACTNESS_DEPTH);
    let quantities = boundedness_quantities(map, weight, alpha);

    let mut per_quantity: Vec<Vec<(f64, f64)>> = vec![Vec::new(); quantities.len()];
    let mut ok = 0usize;
    for &z in grid.points() {
        let Ok(phi) = map.eval_value(z) else { continue };
        let phi_abs = phi.norm();
        if phi_abs >= 1.0 {
            continue;
        }
        let mut all_ok = true;
        let mut row = Vec::with_capacity(quantities.len());
        for (_, quantity) in &quantities {
            match quantity(z) {
                Ok(v) => row.push(v),
                Err(_) => {
                    all_ok = false;
                    break;
                }
            }
        }
        if !all_ok {
            continue;
        }
        ok += 1;
        for (bucket, v) in per_quantity.iter_mut().zip(row) {
            bucket.push((phi_abs, v));
        }
    }
    let coverage = ok as f64 / grid.len() as f64;

    let outer_delta = delta_levels[0];
    let mut out = Vec::new();
    for ((id, _), mut observations) in quantities.into_iter().zip(per_quantity) {
        observations.sort_by(|a, b| a.0.total_cmp(&b.0));
        let shell_maxima: Vec<Option<f64>> = delta_levels
            .iter()
            .map(|&delta| {
                observations
                    .iter()
                    .filter(|(phi_abs, _)| *phi_abs > 1.0 - delta)
                    .map(|(_, v)| *v)
                    .fold(None, |acc: Option<f64>, v| {
                        Some(acc.map_or(v, |a| a.max(v)))
                    })
            })
            .collect();
        let trend = classify_trend(&shell_maxima);
        let boundary: Vec<(f64, f64)> = observations
            .iter()
            .filter(|(phi_abs, _)| *phi_abs > 1.0 - outer_delta)
            .copied()
            .collect();
        let start = boundary.len().saturating_sub(SAMPLE_KEEP);
        out.push(CompactnessQuantity {
            id,
            shell_maxima,
            samples: boundary[start..].to_vec(),
            trend,
        });
    }

    let overall = if out.iter().all(|q| q.trend == Trend::Vacuous) {
        Trend::Vacuous
    } else if out.iter().any(|q| q.trend == Trend::BoundedAway) {
        Trend::BoundedAway
    } else if out
        .iter()
        .all(|q| matches!(q.trend, Trend::ToZero | Trend::Vacuous))
    {
        Trend::ToZero
    } else {
        Trend::Inconclusive
    };

    Ok(CompactnessReport {
        alpha,
        delta_levels: delta_levels.to_vec(),
        quantities: out,
        overall,
        coverage,
    })
}

// ---------------------------------------------------------------------------
// Radial growth conditions
// ---------------------------------------------------------------------------

fn circle_max<E>(
    r: f64,
    samples: usize,
    mut value_at: impl FnMut(Complex64) -> Result<f64, E>,
) -> Result<f64, E> {
    let mut max = f64::NEG_INFINITY;
    for m in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * (m as f64) / (samples as f64);
        let z = Complex64::new(r * theta.cos(), r * theta.sin());
        max = max.max(value_at(z)?);
    }
    Ok(max)
}

/// Probes the growth conditions coupling M_r(φ) = sup_{|z|=r} |φ(z)| and
/// a_r = sup_{|z|=r} (|u'(z)φ(z)| + |u(z)φ'(z)|):
///
/// - (i) log(1−r)·log M_r should diverge to +∞ as r → 1, taken as a
///   strict increase across the samples with the last value above the
///   divergence threshold;
/// - (ii) log a_r < ε·log(1−r)·log M_r at every sample radius.
///
/// Requires ε > 0 with ε·log‖φ‖∞ > −1, the sup-norm estimated on the
/// refinement ladder.
pub fn check_th23(
    map: &MapExpr,
    weight: &MapExpr,
    epsilon: f64,
    r_samples: &[f64],
) -> Result<ConditionReport, CheckError> {
    if r_samples.is_empty()
        || r_samples.windows(2).any(|w| w[0] >= w[1])
        || r_samples.iter().any(|&r| !(r > 0.0 && r < 1.0))
    {
        return Err(CheckError::BadParameter(
            "radii must strictly increase within (0, 1)",
        ));
    }
    if !(epsilon > 0.0) {
        return Err(CheckError::BadParameter("epsilon must be positive"));
    }
    let phi_sup = crate::norms::sup_norm(map, &RefinementPolicy::default())?.value;
    if epsilon * phi_sup.ln() <= -1.0 {
        return Err(CheckError::EpsilonConstraint {
            epsilon,
            phi_sup_norm: phi_sup,
        });
    }

    let mut samples = Vec::with_capacity(r_samples.len());
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for &r in r_samples {
        let m_r = circle_max(r, CIRCLE_SAMPLES, |z| map.eval_value(z).map(|w| w.norm()))?;
        let a_r = circle_max(r, CIRCLE_SAMPLES, |z| -> Result<f64, EvalError> {
            let ju = weight.eval_jet(z)?;
            let jphi = map.eval_jet(z)?;
            Ok((ju.derivative * jphi.value).norm() + (ju.value * jphi.derivative).norm())
        })?;
        let growth = (1.0 - r).ln() * m_r.ln();
        let log_a_r = a_r.max(TINY_DENOMINATOR).ln();
        let bound = epsilon * growth;
        let margin = log_a_r - bound;
        if margin > worst {
            worst = margin;
            witness = Some(Complex64::new(r, 0.0));
        }
        samples.push(RadialSample {
            r,
            m_r,
            a_r,
            growth,
            log_a_r,
            bound,
            margin,
        });
    }

    let growth_diverges = samples.windows(2).all(|w| w[1].growth > w[0].growth)
        && samples
            .last()
            .map(|s| s.growth > RADIAL_DIVERGENCE_THRESHOLD)
            == Some(true);
    let verdict = if worst > POINT_TOL {
        Verdict::Violated
    } else if growth_diverges {
        Verdict::HoldsOnGrid
    } else {
        // The growth proxy did not certify divergence; the pointwise
        // comparisons hold but the limit condition stays open.
        Verdict::Inconclusive
    };

    Ok(ConditionReport {
        condition: "th23".to_string(),
        params: CheckParams {
            epsilon: Some(epsilon),
            ..CheckParams::default()
        },
        verdict,
        worst_margin: worst,
        witness,
        coverage: 1.0,
        note: None,
        detail: ConditionDetail::RadialSamples(samples),
    })
}

/// Searches for the least k with sup_{|z|=r_probe} |φ_k(z)| ≤ 1 − margin.
/// A hit is grid evidence that some iterate pulls the probe circle
/// strictly inside the disk; no hit is inconclusive, since a fixed probe
/// circle only ever gives a lower bound for ‖φ_k‖∞.
pub fn check_iterate_supnorm(
    map: &MapExpr,
    k_max: u32,
    r_probe: f64,
) -> Result<ConditionReport, CheckError> {
    if !(r_probe > 0.0 && r_probe < 1.0) {
        return Err(CheckError::BadParameter("probe radius must lie in (0, 1)"));
    }
    let circle = DiskGrid::circle(r_probe, CIRCLE_SAMPLES);
    let mut iterates: Vec<Complex64> = circle.points().to_vec();
    let mut sups = Vec::with_capacity(k_max as usize);
    let mut found = None;
    let mut ok_points = iterates.len();
    for k in 1..=k_max {
        let mut sup: f64 = 0.0;
        let mut alive = 0usize;
        for w in iterates.iter_mut() {
            if !w.is_finite() {
                continue;
            }
            match map.eval_value(*w) {
                Ok(next) => {
                    alive += 1;
                    *w = next;
                    sup = sup.max(next.norm());
                }
                Err(_) => *w = Complex64::new(f64::NAN, f64::NAN),
            }
        }
        ok_points = ok_points.min(alive);
        if alive == 0 {
            break;
        }
        sups.push(sup);
        if found.is_none() && sup <= 1.0 - ITERATE_SUP_MARGIN {
            found = Some(FoundIterate { k, sup });
        }
    }
    let best = sups.iter().copied().fold(f64::INFINITY, f64::min);
    let verdict = if found.is_some() {
        Verdict::HoldsOnGrid
    } else {
        Verdict::Inconclusive
    };
    Ok(ConditionReport {
        condition: "iterate_supnorm".to_string(),
        params: CheckParams::default(),
        verdict,
        worst_margin: best - (1.0 - ITERATE_SUP_MARGIN),
        witness: Some(Complex64::new(r_probe, 0.0)),
        coverage: ok_points as f64 / CIRCLE_SAMPLES as f64,
        note: Some(
            "a fixed probe circle lower-bounds the iterate sup-norm; a miss is inconclusive"
                .to_string(),
        ),
        detail: ConditionDetail::IterateSups { sups, found },
    })
}

// ---------------------------------------------------------------------------
// Growth-bound margins for converged limits
// ---------------------------------------------------------------------------

/// Margin of the derivative growth bound
/// |f'(z)| ≤ 4/((1−|z|²)·log(2/(1−|z|))) that the log-weighted
/// hyperbolic bound forces on the Königs limit.
pub fn sigma_derivative_bound_margin(
    f: &(impl JetEval + ?Sized),
    z: Complex64,
) -> Result<f64, EvalError> {
    let j = f.jet_at(z)?;
    let bound = 4.0 / ((1.0 - z.norm_sqr()) * log_weight(z.norm()));
    Ok(j.derivative.norm() - bound)
}

/// Margin of the integrated growth bound
/// |f(z)| ≤ 4·(log log(2/(1−|z|)) − log(log 2)).
pub fn sigma_growth_bound_margin(
    f: &(impl JetEval + ?Sized),
    z: Complex64,
) -> Result<f64, EvalError> {
    let v = f.value_at(z)?;
    let bound = 4.0 * (log_weight(z.norm()).ln() - 2f64.ln().ln());
    Ok(v.norm() - bound)
}

/// Margin of the weighted-limit growth bound
/// (1−|z|²)^β·|v(z)| ≤ 2^(β+1)/log(2/(1−|z|)).
pub fn weighted_value_bound_margin(
    v: &(impl JetEval + ?Sized),
    beta: f64,
    z: Complex64,
) -> Result<f64, EvalError> {
    let val = v.value_at(z)?;
    let bound = 2f64.powf(beta + 1.0) / log_weight(z.norm());
    Ok((1.0 - z.norm_sqr()).powf(beta) * val.norm() - bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lens_map, linear_map, moebius_model};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> DiskGrid {
        DiskGrid::standard(8)
    }

    #[test]
    fn condition_a_linear_holds_with_zero_margin_at_origin() {
        let map = linear_map(0.5).unwrap();
        let report = check_condition_a(&map, 1.0, 0, &grid()).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
        assert!(
            report.worst_margin.abs() <= 1e-12,
            "{}",
            report.worst_margin
        );
        assert_eq!(report.witness, Some(c(0.0, 0.0)));
        assert_eq!(report.coverage, 1.0);
    }

    #[test]
    fn condition_a_lens_holds_with_supremum_on_real_axis() {
        let map = lens_map(0.5).unwrap().into_expr();
        let report = check_condition_a(&map, 1.0, 0, &grid()).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
        // Equality along the real axis: worst margin ≈ 0 from below.
        assert!(
            report.worst_margin.abs() <= 1e-11,
            "{}",
            report.worst_margin
        );
        let w = report.witness.unwrap();
        assert!(w.im.abs() < 1e-12);
    }

    #[test]
    fn condition_a_monotone_in_m() {
        let map = linear_map(0.5).unwrap();
        let at_zero = check_condition_a(&map, 1.0, 0, &grid()).unwrap();
        let at_one = check_condition_a(&map, 1.0, 1, &grid()).unwrap();
        assert_eq!(at_zero.verdict, Verdict::HoldsOnGrid);
        assert_eq!(at_one.verdict, Verdict::HoldsOnGrid);
        assert!(at_one.worst_margin <= at_zero.worst_margin + 1e-12);
    }

    #[test]
    fn condition_a_violated_for_expanding_hyperbolic_ratio() {
        // z/(2−z) has hyperbolic derivative (1+r)/2 → 1 > 1/2 on the real
        // axis, so the bound fails away from the origin.
        let map = moebius_model(0.5).unwrap().into_expr();
        let report = check_condition_a(&map, 1.0, 0, &grid()).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let w = report.witness.unwrap();
        let again = condition_a_margin_at(&map, 1.0, 0, w).unwrap();
        assert!((again - report.worst_margin).abs() < 1e-12);
    }

    #[test]
    fn low_coverage_softens_verdict_to_inconclusive() {
        // Levels beyond the lens domain radius fail to evaluate; the
        // excluded points pull coverage below the threshold and the bound
        // still holds at every evaluated point.
        let map = lens_map(0.5).unwrap().into_expr();
        let deep = DiskGrid::standard(16);
        let report = check_condition_a(&map, 1.0, 0, &deep).unwrap();
        assert!(
            report.coverage < MIN_COVERAGE,
            "coverage {}",
            report.coverage
        );
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.worst_margin <= POINT_TOL);
    }

    #[test]
    fn eq12_margin_zero_at_origin() {
        for map in [
            linear_map(0.5).unwrap(),
            moebius_model(0.5).unwrap().into_expr(),
        ] {
            let m = eq12_margin_at(&map, c(0.0, 0.0)).unwrap();
            assert!(m.abs() < 1e-14, "{m}");
        }
    }

    #[test]
    fn eq12_linear_violated_at_half() {
        // 0.5·0.8·(log 4 / log(8/3)) ≈ 0.5654, margin ≈ 0.0654.
        let map = linear_map(0.5).unwrap();
        let margin = eq12_margin_at(&map, c(0.5, 0.0)).unwrap();
        let expected = 0.5 * 0.8 * (4f64.ln() / (8.0 / 3.0f64).ln()) - 0.5;
        assert!((margin - expected).abs() < 1e-12);
        assert!((margin - 0.065).abs() < 0.005);
        let report = check_eq12(&map, &grid()).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert!((report.worst_margin - expected).abs() < 1e-12);
        assert!((report.witness.unwrap() - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eq12_lens_verdict_stable_under_grid_refinement() {
        let map = lens_map(0.5).unwrap().into_expr();
        let coarse = check_eq12(&map, &DiskGrid::standard(6)).unwrap();
        let dense = check_eq12(&map, &DiskGrid::standard(8)).unwrap();
        assert_eq!(coarse.verdict, dense.verdict);
        assert_eq!(coarse.verdict, Verdict::Violated);
        // The violation reproduces at the stored witness.
        let again = eq12_margin_at(&map, coarse.witness.unwrap()).unwrap();
        assert!((again - coarse.worst_margin).abs() < 1e-12);
    }

    #[test]
    fn zh21_linear_unit_alpha_bounded() {
        let map = linear_map(0.5).unwrap();
        let report = check_zh21(&map, None, 1.0, &RefinementPolicy::default()).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
        let detail = match &report.detail {
            ConditionDetail::Quantities(q) => q,
            other => panic!("unexpected detail {other:?}"),
        };
        let u_prime = detail.iter().find(|q| q.id == "u_prime_log").unwrap();
        assert_eq!(u_prime.estimate.value, 0.0);
        let hyperbolic = detail
            .iter()
            .find(|q| q.id == "weighted_hyperbolic")
            .unwrap();
        assert!((hyperbolic.estimate.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zh21_lens_unit_alpha_bounded_at_t() {
        let map = lens_map(0.5).unwrap().into_expr();
        let report = check_zh21(&map, None, 1.0, &RefinementPolicy::default()).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
        assert!((report.worst_margin - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zh21_sub_unit_alpha_with_weight() {
        let map = linear_map(0.5).unwrap();
        let weight = MapExpr::parse("1 + z/2").unwrap();
        let report = check_zh21(&map, Some(&weight), 0.5, &RefinementPolicy::default()).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
    }

    #[test]
    fn compactness_linear_vacuous() {
        let map = linear_map(0.5).unwrap();
        let report =
            check_compactness(&map, None, 1.0, &crate::tolerances::DEFAULT_DELTA_LEVELS).unwrap();
        assert_eq!(report.overall, Trend::Vacuous);
    }

    #[test]
    fn compactness_lens_bounded_away_at_t() {
        let map = lens_map(0.5).unwrap().into_expr();
        let report =
            check_compactness(&map, None, 1.0, &crate::tolerances::DEFAULT_DELTA_LEVELS).unwrap();
        assert_eq!(report.overall, Trend::BoundedAway);
        let plateau = report.plateau("weighted_hyperbolic").unwrap();
        assert!((plateau - 0.5).abs() <= 0.01, "plateau {plateau}");
    }

    #[test]
    fn compactness_decaying_weight_to_zero() {
        // u = 1 − z crushes the quantity near the only boundary approach
        // of the Möbius model, so the diagnostics read compact-type decay.
        let map = moebius_model(0.5).unwrap().into_expr();
        let weight = MapExpr::parse("1 - z").unwrap();
        let report = check_compactness(
            &map,
            Some(&weight),
            1.0,
            &crate::tolerances::DEFAULT_DELTA_LEVELS,
        )
        .unwrap();
        assert_eq!(report.overall, Trend::ToZero, "{report:?}");
    }

    #[test]
    fn th23_linear_sample_rows_match_scalar_arithmetic() {
        let map = linear_map(0.5).unwrap();
        let weight = unit_weight();
        let radii = [0.9, 0.99, 0.999, 0.9999];
        let report = check_th23(&map, &weight, 1.0, &radii).unwrap();
        let rows = match &report.detail {
            ConditionDetail::RadialSamples(rows) => rows,
            other => panic!("unexpected detail {other:?}"),
        };
        for (row, &r) in rows.iter().zip(radii.iter()) {
            assert!((row.m_r - 0.5 * r).abs() < 1e-12, "M_r off at {r}");
            assert!((row.a_r - 0.5).abs() < 1e-12, "a_r off at {r}");
            let growth = (1.0 - r).ln() * (0.5 * r).ln();
            assert!((row.growth - growth).abs() < 1e-9);
        }
        // Strictly increasing but still below the divergence threshold at
        // these four radii, so the trend stays uncertified.
        assert!(rows.windows(2).all(|w| w[1].growth > w[0].growth));
        assert!(rows.last().unwrap().growth < RADIAL_DIVERGENCE_THRESHOLD);
        assert_eq!(report.verdict, Verdict::Inconclusive);
        // The pointwise comparison itself holds everywhere.
        assert!(report.worst_margin < 0.0);
    }

    #[test]
    fn th23_deep_radii_certify_divergence() {
        let map = linear_map(0.5).unwrap();
        let weight = unit_weight();
        let radii = [0.9, 0.99, 0.999, 0.9999, 1.0 - 1e-7, 1.0 - 1e-11];
        let report = check_th23(&map, &weight, 1.0, &radii).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
    }

    #[test]
    fn th23_epsilon_constraint_enforced() {
        let map = linear_map(0.5).unwrap();
        let weight = unit_weight();
        match check_th23(&map, &weight, 2.0, &[0.9, 0.99]) {
            Err(CheckError::EpsilonConstraint { .. }) => {}
            other => panic!("expected epsilon constraint error, got {other:?}"),
        }
    }

    #[test]
    fn iterate_supnorm_linear_found_immediately() {
        let map = linear_map(0.5).unwrap();
        let report = check_iterate_supnorm(&map, 8, 0.999).unwrap();
        let found = match &report.detail {
            ConditionDetail::IterateSups { found, .. } => found.unwrap(),
            other => panic!("unexpected detail {other:?}"),
        };
        assert_eq!(found.k, 1);
        assert!((found.sup - 0.4995).abs() < 1e-12);
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
    }

    #[test]
    fn iterate_supnorm_probe_limitation_on_boundary_contact() {
        // The lens map fixes ±1, so no iterate has sup-norm below 1; the
        // probe circle still reads below the cutoff at k = 1 because one
        // application already pulls r = 0.999 far inside. The verdict is
        // only ever grid evidence.
        let map = lens_map(0.5).unwrap().into_expr();
        let report = check_iterate_supnorm(&map, 4, 0.999).unwrap();
        match &report.detail {
            ConditionDetail::IterateSups { sups, found } => {
                assert!((sups[0] - 0.9562).abs() < 1e-3, "sup {:.6}", sups[0]);
                assert_eq!(found.unwrap().k, 1);
            }
            other => panic!("unexpected detail {other:?}"),
        }
    }

    #[test]
    fn iterate_supnorm_slow_escape_not_found() {
        // A strong boundary fixed point keeps the probe circle near the
        // boundary for many iterates.
        let map = moebius_model(0.9).unwrap().into_expr();
        let report = check_iterate_supnorm(&map, 10, 0.9999).unwrap();
        match &report.detail {
            ConditionDetail::IterateSups { found, sups } => {
                assert!(found.is_none(), "unexpected {found:?} with sups {sups:?}");
            }
            other => panic!("unexpected detail {other:?}"),
        }
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.worst_margin > 0.0);
    }

    #[test]
    fn weighted_beta_plain_unit_weight_holds() {
        let map = linear_map(0.5).unwrap();
        let report = check_weighted_beta(
            &map,
            &unit_weight(),
            1.0,
            WeightedBetaVariant::Plain,
            &grid(),
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnGrid);
        assert!(report.worst_margin.abs() <= 1e-12);
    }

    #[test]
    fn weighted_beta_plain_violation_matches_scalar_arithmetic() {
        // u = 1 + z/2 at z = 0.2: 1.1·(0.96/0.99) ≈ 1.0667 > 1.
        let map = linear_map(0.5).unwrap();
        let weight = MapExpr::parse("1 + z/2").unwrap();
        let margin =
            weighted_beta_margin_at(&map, &weight, 1.0, WeightedBetaVariant::Plain, c(0.2, 0.0))
                .unwrap();
        assert!((margin - (1.1 * 0.96 / 0.99 - 1.0)).abs() < 1e-12);
        // On a grid that samples the violation region the check reports a
        // reproducible witness.
        let fine = DiskGrid::uniform(0.95, 19, 64);
        let report =
            check_weighted_beta(&map, &weight, 1.0, WeightedBetaVariant::Plain, &fine).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let w = report.witness.unwrap();
        let again =
            weighted_beta_margin_at(&map, &weight, 1.0, WeightedBetaVariant::Plain, w).unwrap();
        assert!((again - report.worst_margin).abs() < 1e-12);
    }

    #[test]
    fn weighted_beta_log_variant_is_stricter() {
        let map = linear_map(0.5).unwrap();
        let report = check_weighted_beta(
            &map,
            &unit_weight(),
            1.0,
            WeightedBetaVariant::LogWeighted,
            &grid(),
        )
        .unwrap();
        // The log weighting pushes the ratio above 1 away from the origin
        // even for the unit weight.
        assert_eq!(report.verdict, Verdict::Violated);
    }

    #[test]
    fn weighted_beta_zero_weight_rejected() {
        let map = linear_map(0.5).unwrap();
        let weight = MapExpr::parse("z").unwrap();
        assert!(matches!(
            check_weighted_beta(&map, &weight, 1.0, WeightedBetaVariant::Plain, &grid()),
            Err(CheckError::WeightZeroAtOrigin)
        ));
    }

    #[test]
    fn growth_bounds_hold_for_identity_koenigs() {
        // sigma = z for the dilation; both displayed bounds hold with
        // room everywhere on the grid.
        let map = linear_map(0.5).unwrap();
        let sigma = crate::engine::koenigs_approx(&map, &crate::engine::KoenigsSettings::default())
            .unwrap();
        for &z in grid().points() {
            let d = sigma_derivative_bound_margin(&sigma, z).unwrap();
            assert!(d <= 1e-6, "derivative bound fails at {z}: {d}");
            let g = sigma_growth_bound_margin(&sigma, z).unwrap();
            assert!(g <= 1e-6, "growth bound fails at {z}: {g}");
        }
    }

    #[test]
    fn weighted_value_bound_holds_for_unit_weight() {
        let map = linear_map(0.5).unwrap();
        let wk = crate::engine::weighted_principal(
            &map,
            &unit_weight(),
            &crate::engine::KoenigsSettings::default(),
        )
        .unwrap();
        for &z in grid().points() {
            let m = weighted_value_bound_margin(&wk, 1.0, z).unwrap();
            assert!(m <= 1e-6, "bound fails at {z}: {m}");
        }
    }
}
