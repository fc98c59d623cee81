//! Declarative experiment driver.
//!
//! An [`ExperimentConfig`] names a map (catalog name or expression), an
//! optional weight, and a list of operations with parameters; [`run`]
//! executes them and produces a [`ReportBundle`] of JSON results plus CSV
//! tables of grid values. Runs are seedless and reduce in point-index
//! order, so rerunning the same config reproduces every artifact
//! byte-identically.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::{known_koenigs_for, resolve_map};
use crate::checks::{self, WeightedBetaVariant};
use crate::engine::{
    self, Eigenfunction, EngineError, KoenigsApproximation, KoenigsSettings, WeightedKoenigs,
};
use crate::expr::{validate_self_map, MapExpr};
use crate::grid::DiskGrid;
use crate::jet::{EvalError, Jet, JetEval};
use crate::norms::{self, RefinementPolicy};
use crate::parse::ParseError;
use crate::tolerances::DEFAULT_DELTA_LEVELS;

fn default_true() -> bool {
    true
}

fn default_grid_depth() -> usize {
    10
}

/// One operation request. The flat shape mirrors the CLI flags; which
/// fields apply depends on `op`, and unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpSpec {
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_probe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

impl OpSpec {
    pub fn named(op: &str) -> Self {
        OpSpec {
            op: op.to_string(),
            alpha: None,
            m: None,
            beta: None,
            epsilon: None,
            n: None,
            tol: None,
            k_max: None,
            control_radius: None,
            radius: None,
            r_probe: None,
            target: None,
            variant: None,
            alphas: None,
            deltas: None,
            radii: None,
        }
    }
}

/// A declarative experiment: map, optional weight, operations, and
/// output policy. Serialization round-trips bit-identically and unknown
/// keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Catalog name (`lens(t)`, `moebius(lambda)`, `linear(lambda)`) or a
    /// raw expression in z. Norm operations also accept function targets
    /// `koenigs:<map>`, `eigen:<map>:<n>`, `weighted:<map>:<weight>:<n>`.
    pub map: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    pub ops: Vec<OpSpec>,
    #[serde(default)]
    pub fail_on_violation: bool,
    /// Always true; runs are seedless by construction.
    #[serde(default = "default_true")]
    pub deterministic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Refinement ladder parameters for norm estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementPolicy>,
    /// Depth of the standard grid used by pointwise checks.
    #[serde(default = "default_grid_depth")]
    pub grid_depth: usize,
}

impl ExperimentConfig {
    pub fn single(map: &str, op: OpSpec) -> Self {
        ExperimentConfig {
            map: map.to_string(),
            weight: None,
            ops: vec![op],
            fail_on_violation: false,
            deterministic: true,
            output_dir: None,
            refinement: None,
            grid_depth: default_grid_depth(),
        }
    }

    pub fn with_weight(mut self, weight: &str) -> Self {
        self.weight = Some(weight.to_string());
        self
    }
}

#[derive(Clone, Debug)]
pub enum ConfigError {
    Json(String),
    UnknownOp(String),
    MissingParam { op: String, param: &'static str },
    BadParam { op: String, what: String },
    Map(ParseError),
    DeterminismRequired,
    Io(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Json(e) => write!(f, "config parse error: {e}"),
            ConfigError::UnknownOp(op) => write!(f, "unknown op '{op}'"),
            ConfigError::MissingParam { op, param } => {
                write!(f, "op '{op}' requires parameter '{param}'")
            }
            ConfigError::BadParam { op, what } => write!(f, "op '{op}': {what}"),
            ConfigError::Map(e) => write!(f, "map spec: {e}"),
            ConfigError::DeterminismRequired => {
                write!(f, "only deterministic runs are supported")
            }
            ConfigError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<ParseError> for ConfigError {
    fn from(e: ParseError) -> Self {
        ConfigError::Map(e)
    }
}

/// Per-operation outcome category, also driving the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpStatus {
    Ok,
    Violated,
    NonConvergence,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpResult {
    pub op: String,
    pub status: OpStatus,
    pub payload: Value,
    /// CSV tables written for this op, relative to the output directory.
    pub csv_files: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub config_hash: String,
    pub map: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    pub reduction_order: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportBundle {
    pub metadata: RunMetadata,
    pub results: Vec<OpResult>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunSummary {
    pub violations: usize,
    pub non_convergences: usize,
    pub errors: usize,
}

impl RunSummary {
    /// Exit-code contract: 0 completed, 2 violation with
    /// fail-on-violation, 3 non-convergence, 4 config/usage error.
    pub fn exit_code(&self, fail_on_violation: bool) -> i32 {
        if self.errors > 0 {
            4
        } else if fail_on_violation && self.violations > 0 {
            2
        } else if self.non_convergences > 0 {
            3
        } else {
            0
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Canonical cell formatting: 17 significant digits, or the literal tag
/// "domain-error" for points that failed to evaluate.
pub fn csv_cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "domain-error".to_string()
    }
}

// ---------------------------------------------------------------------------
// Function targets
// ---------------------------------------------------------------------------

/// A function addressable by the norm operations: a raw map expression,
/// a Königs limit, an eigenfunction power, or a weighted eigenfunction.
pub enum BuiltTarget {
    Raw(MapExpr),
    Koenigs(Box<KoenigsApproximation>),
    Eigen(Box<KoenigsApproximation>, u32),
    WeightedEigen(Box<KoenigsApproximation>, Box<WeightedKoenigs>, u32),
}

impl BuiltTarget {
    pub fn describe(&self) -> String {
        match self {
            BuiltTarget::Raw(m) => m.name().to_string(),
            BuiltTarget::Koenigs(k) => format!("koenigs of {}", k.map().name()),
            BuiltTarget::Eigen(k, n) => format!("sigma^{n} of {}", k.map().name()),
            BuiltTarget::WeightedEigen(k, w, n) => format!(
                "v*sigma^{n} of {} with weight {}",
                k.map().name(),
                w.weight().name()
            ),
        }
    }
}

impl JetEval for BuiltTarget {
    fn jet_at(&self, z: Complex64) -> Result<Jet, EvalError> {
        match self {
            BuiltTarget::Raw(m) => m.jet_at(z),
            BuiltTarget::Koenigs(k) => k.jet_at(z),
            BuiltTarget::Eigen(k, n) => Eigenfunction {
                sigma: k,
                weight_part: None,
                power: *n,
            }
            .jet_at(z),
            BuiltTarget::WeightedEigen(k, w, n) => Eigenfunction {
                sigma: k,
                weight_part: Some(w),
                power: *n,
            }
            .jet_at(z),
        }
    }
}

/// Parses `koenigs:<map>`, `eigen:<map>:<n>`, `weighted:<map>:<weight>:<n>`,
/// a catalog name, or a raw expression, and converges whatever the target
/// needs. Schröder-dependent targets are validated on the grid first.
pub fn build_target(
    spec: &str,
    settings: &KoenigsSettings,
    grid: &DiskGrid,
) -> Result<BuiltTarget, ConfigError> {
    let op = "target";
    let engine_err = |e: EngineError| ConfigError::BadParam {
        op: op.to_string(),
        what: e.to_string(),
    };
    if let Some(rest) = spec.strip_prefix("koenigs:") {
        let map = resolve_map(rest)?;
        let approx = engine::converged_koenigs(&map, grid, settings).map_err(engine_err)?;
        return Ok(BuiltTarget::Koenigs(Box::new(approx)));
    }
    if let Some(rest) = spec.strip_prefix("eigen:") {
        let (map_spec, n) = rest.rsplit_once(':').ok_or_else(|| ConfigError::BadParam {
            op: op.to_string(),
            what: "eigen target needs 'eigen:<map>:<n>'".to_string(),
        })?;
        let n: u32 = n.trim().parse().map_err(|_| ConfigError::BadParam {
            op: op.to_string(),
            what: format!("bad eigen power '{n}'"),
        })?;
        let map = resolve_map(map_spec)?;
        let approx = engine::converged_koenigs(&map, grid, settings).map_err(engine_err)?;
        return Ok(BuiltTarget::Eigen(Box::new(approx), n));
    }
    if let Some(rest) = spec.strip_prefix("weighted:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError::BadParam {
                op: op.to_string(),
                what: "weighted target needs 'weighted:<map>:<weight>:<n>'".to_string(),
            });
        }
        let n: u32 = parts[2].trim().parse().map_err(|_| ConfigError::BadParam {
            op: op.to_string(),
            what: format!("bad eigen power '{}'", parts[2]),
        })?;
        let map = resolve_map(parts[0])?;
        let weight = resolve_map(parts[1])?;
        let approx = engine::converged_koenigs(&map, grid, settings).map_err(engine_err)?;
        let wk = engine::weighted_principal(&map, &weight, settings).map_err(engine_err)?;
        return Ok(BuiltTarget::WeightedEigen(
            Box::new(approx),
            Box::new(wk),
            n,
        ));
    }
    Ok(BuiltTarget::Raw(resolve_map(spec)?))
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

struct RunContext<'a> {
    config: &'a ExperimentConfig,
    policy: RefinementPolicy,
    out_dir: Option<PathBuf>,
}

impl RunContext<'_> {
    fn plain_map(&self) -> Result<MapExpr, ConfigError> {
        Ok(resolve_map(&self.config.map)?)
    }

    /// The map with its admissibility certified on the check grid;
    /// operations that build Schröder limits require this.
    fn validated_map(&self) -> Result<MapExpr, EngineError> {
        let map =
            resolve_map(&self.config.map).map_err(|e| EngineError::NotAdmissible(e.to_string()))?;
        let report = validate_self_map(&map, &self.check_grid());
        if !report.is_schroder_admissible {
            let reasons: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
            return Err(EngineError::NotAdmissible(reasons.join("; ")));
        }
        Ok(map)
    }

    fn weight(&self) -> Result<Option<MapExpr>, ConfigError> {
        match &self.config.weight {
            Some(w) => Ok(Some(resolve_map(w)?)),
            None => Ok(None),
        }
    }

    fn required_weight(&self, op: &str) -> Result<MapExpr, ConfigError> {
        self.weight()?.ok_or(ConfigError::MissingParam {
            op: op.to_string(),
            param: "weight",
        })
    }

    fn check_grid(&self) -> DiskGrid {
        DiskGrid::standard(self.config.grid_depth)
    }

    fn settings(&self, op: &OpSpec) -> KoenigsSettings {
        let mut s = KoenigsSettings::default();
        if let Some(tol) = op.tol {
            s.tol = tol;
        }
        if let Some(k_max) = op.k_max {
            s.k_max = k_max;
        }
        if let Some(cr) = op.control_radius {
            s.control_radius = cr;
        }
        s
    }

    fn write_csv(
        &self,
        index: usize,
        op: &str,
        header: &str,
        rows: Vec<Vec<String>>,
    ) -> Result<Vec<String>, ConfigError> {
        let Some(dir) = &self.out_dir else {
            return Ok(Vec::new());
        };
        let name = format!("{index:02}_{op}.csv");
        let mut body = String::with_capacity(rows.len() * 40 + header.len() + 1);
        body.push_str(header);
        body.push('\n');
        for row in rows {
            body.push_str(&row.join(","));
            body.push('\n');
        }
        fs::create_dir_all(dir).map_err(|e| ConfigError::Io(e.to_string()))?;
        fs::write(dir.join(&name), body).map_err(|e| ConfigError::Io(e.to_string()))?;
        Ok(vec![name])
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn engine_status(e: &EngineError) -> (OpStatus, Value) {
    match e {
        EngineError::NonConvergence { k_max, final_gap } => (
            OpStatus::NonConvergence,
            json!({ "message": e.to_string(), "k_max": k_max, "final_gap": final_gap }),
        ),
        _ => (OpStatus::Error, json!({ "message": e.to_string() })),
    }
}

/// Executes every requested operation, writing CSV tables when the config
/// names an output directory; per-op failures are reported in the bundle
/// and the run continues.
pub fn run(config: &ExperimentConfig) -> Result<(ReportBundle, RunSummary), ConfigError> {
    if !config.deterministic {
        return Err(ConfigError::DeterminismRequired);
    }
    let ctx = RunContext {
        config,
        policy: config.refinement.unwrap_or_default(),
        out_dir: config.output_dir.as_ref().map(PathBuf::from),
    };

    let mut results = Vec::new();
    let mut summary = RunSummary::default();
    for (index, op) in config.ops.iter().enumerate() {
        let result = execute_op(&ctx, index, op)?;
        match result.status {
            OpStatus::Violated => summary.violations += 1,
            OpStatus::NonConvergence => summary.non_convergences += 1,
            OpStatus::Error => summary.errors += 1,
            OpStatus::Ok => {}
        }
        results.push(result);
    }

    // Hash the experiment content only; where the artifacts land must not
    // change what they say.
    let mut hashable = config.clone();
    hashable.output_dir = None;
    let config_json =
        serde_json::to_string(&hashable).map_err(|e| ConfigError::Json(e.to_string()))?;
    let bundle = ReportBundle {
        metadata: RunMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: format!("fnv1a64:{:016x}", fnv1a64(config_json.as_bytes())),
            map: config.map.clone(),
            weight: config.weight.clone(),
            reduction_order: crate::REDUCTION_ORDER.to_string(),
        },
        results,
    };

    if let Some(dir) = &ctx.out_dir {
        fs::create_dir_all(dir).map_err(|e| ConfigError::Io(e.to_string()))?;
        let text =
            serde_json::to_string_pretty(&bundle).map_err(|e| ConfigError::Json(e.to_string()))?;
        fs::write(dir.join("report.json"), text + "\n")
            .map_err(|e| ConfigError::Io(e.to_string()))?;
    }
    Ok((bundle, summary))
}

/// Loads a config from a JSON file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Json(e.to_string()))
}

fn execute_op(ctx: &RunContext<'_>, index: usize, op: &OpSpec) -> Result<OpResult, ConfigError> {
    let require = |param: Option<f64>, name: &'static str| {
        param.ok_or(ConfigError::MissingParam {
            op: op.op.clone(),
            param: name,
        })
    };

    match op.op.as_str() {
        "validate" => {
            let map = ctx.plain_map()?;
            let report = validate_self_map(&map, &ctx.check_grid());
            let status = if report.is_schroder_admissible {
                OpStatus::Ok
            } else {
                OpStatus::Violated
            };
            let failures: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
            let payload = json!({
                "map": map.name(),
                "phi_at_zero": complex_json(report.phi_at_zero),
                "phi_prime_at_zero": complex_json(report.phi_prime_at_zero),
                "sup_abs_on_grid": report.sup_abs_on_grid,
                "is_schroder_admissible": report.is_schroder_admissible,
                "grid_evidence_only": report.grid_evidence_only,
                "coverage": report.coverage,
                "failures": failures,
            });
            Ok(OpResult {
                op: op.op.clone(),
                status,
                payload,
                csv_files: Vec::new(),
            })
        }
        "koenigs" => {
            let map = match ctx.validated_map() {
                Ok(map) => map,
                Err(e) => {
                    let (status, payload) = engine_status(&e);
                    return Ok(OpResult {
                        op: op.op.clone(),
                        status,
                        payload,
                        csv_files: Vec::new(),
                    });
                }
            };
            match engine::koenigs_approx(&map, &ctx.settings(op)) {
                Ok(approx) => {
                    let rows = approx
                        .gap_history()
                        .iter()
                        .enumerate()
                        .map(|(k, g)| vec![format!("{}", k + 1), csv_cell(*g)])
                        .collect();
                    let csv_files = ctx.write_csv(index, "koenigs_gaps", "k,cauchy_gap", rows)?;
                    Ok(OpResult {
                        op: op.op.clone(),
                        status: OpStatus::Ok,
                        payload: json!({
                            "lambda": complex_json(approx.lambda()),
                            "depth": approx.depth(),
                            "cauchy_gap": approx.cauchy_gap(),
                            "control_radius": approx.control_radius(),
                        }),
                        csv_files,
                    })
                }
                Err(e) => {
                    let (status, payload) = engine_status(&e);
                    Ok(OpResult {
                        op: op.op.clone(),
                        status,
                        payload,
                        csv_files: Vec::new(),
                    })
                }
            }
        }
        "weighted" => {
            let weight = ctx.required_weight(&op.op)?;
            let map = match ctx.validated_map() {
                Ok(map) => map,
                Err(e) => {
                    let (status, payload) = engine_status(&e);
                    return Ok(OpResult {
                        op: op.op.clone(),
                        status,
                        payload,
                        csv_files: Vec::new(),
                    });
                }
            };
            match engine::weighted_principal(&map, &weight, &ctx.settings(op)) {
                Ok(wk) => Ok(OpResult {
                    op: op.op.clone(),
                    status: OpStatus::Ok,
                    payload: json!({
                        "eigenvalue": complex_json(wk.eigenvalue()),
                        "depth": wk.depth(),
                        "cauchy_gap": wk.cauchy_gap(),
                        "control_radius": wk.control_radius(),
                    }),
                    csv_files: Vec::new(),
                }),
                Err(e) => {
                    let (status, payload) = engine_status(&e);
                    Ok(OpResult {
                        op: op.op.clone(),
                        status,
                        payload,
                        csv_files: Vec::new(),
                    })
                }
            }
        }
        "schroder-residual" | "weighted-residual" | "compare-known-koenigs" => {
            residual_op(ctx, index, op)
        }
        "seminorm" | "lipnorm" | "supnorm" => norm_op(ctx, index, op),
        "bloch-number" => {
            let target_spec = op.target.clone().unwrap_or_else(|| ctx.config.map.clone());
            let target = build_target(&target_spec, &ctx.settings(op), &ctx.check_grid())?;
            let alphas = op.alphas.clone().ok_or(ConfigError::MissingParam {
                op: op.op.clone(),
                param: "alphas",
            })?;
            match norms::bloch_number(&target, &alphas, &ctx.policy) {
                Ok(estimate) => {
                    let rows = estimate
                        .evidence
                        .iter()
                        .map(|(a, v)| vec![csv_cell(*a), v.to_string()])
                        .collect();
                    let csv_files =
                        ctx.write_csv(index, "bloch_number_evidence", "alpha,verdict", rows)?;
                    Ok(OpResult {
                        op: op.op.clone(),
                        status: OpStatus::Ok,
                        payload: json!({
                            "target": target.describe(),
                            "estimate": serde_json::to_value(&estimate)
                                .map_err(|e| ConfigError::Json(e.to_string()))?,
                        }),
                        csv_files,
                    })
                }
                Err(e) => Ok(OpResult {
                    op: op.op.clone(),
                    status: OpStatus::Error,
                    payload: json!({ "message": e.to_string() }),
                    csv_files: Vec::new(),
                }),
            }
        }
        "condition-a" | "check-a" => {
            let map = ctx.plain_map()?;
            let alpha = require(op.alpha, "alpha")?;
            let m = op.m.unwrap_or(0);
            let grid = ctx.check_grid();
            let report = checks::check_condition_a(&map, alpha, m, &grid).map_err(|e| {
                ConfigError::BadParam {
                    op: op.op.clone(),
                    what: e.to_string(),
                }
            })?;
            condition_result(ctx, index, op, &grid, report, |z| {
                checks::condition_a_margin_at(&map, alpha, m, z)
            })
        }
        "eq12" | "check-eq12" => {
            let map = ctx.plain_map()?;
            let grid = ctx.check_grid();
            let report = checks::check_eq12(&map, &grid).map_err(|e| ConfigError::BadParam {
                op: op.op.clone(),
                what: e.to_string(),
            })?;
            condition_result(ctx, index, op, &grid, report, |z| {
                checks::eq12_margin_at(&map, z)
            })
        }
        "zh21" | "check-zh21" => {
            let map = ctx.plain_map()?;
            let weight = ctx.weight()?;
            let alpha = require(op.alpha, "alpha")?;
            let report =
                checks::check_zh21(&map, weight.as_ref(), alpha, &ctx.policy).map_err(|e| {
                    ConfigError::BadParam {
                        op: op.op.clone(),
                        what: e.to_string(),
                    }
                })?;
            let mut rows = Vec::new();
            if let checks::ConditionDetail::Quantities(quantities) = &report.detail {
                for q in quantities {
                    for (level, sup) in q.estimate.per_level_sups.iter().enumerate() {
                        rows.push(vec![q.id.clone(), format!("{level}"), csv_cell(*sup)]);
                    }
                }
            }
            let csv_files = ctx.write_csv(index, "zh21_levels", "quantity,level,sup", rows)?;
            let status = verdict_status(report.verdict);
            Ok(OpResult {
                op: op.op.clone(),
                status,
                payload: serde_json::to_value(&report)
                    .map_err(|e| ConfigError::Json(e.to_string()))?,
                csv_files,
            })
        }
        "compactness" | "check-compact" => {
            let map = ctx.plain_map()?;
            let weight = ctx.weight()?;
            let alpha = require(op.alpha, "alpha")?;
            let deltas = op
                .deltas
                .clone()
                .unwrap_or_else(|| DEFAULT_DELTA_LEVELS.to_vec());
            let report =
                checks::check_compactness(&map, weight.as_ref(), alpha, &deltas).map_err(|e| {
                    ConfigError::BadParam {
                        op: op.op.clone(),
                        what: e.to_string(),
                    }
                })?;
            let mut rows = Vec::new();
            for q in &report.quantities {
                for (phi_abs, value) in &q.samples {
                    rows.push(vec![q.id.clone(), csv_cell(*phi_abs), csv_cell(*value)]);
                }
            }
            let csv_files =
                ctx.write_csv(index, "compactness_samples", "quantity,phi_abs,value", rows)?;
            Ok(OpResult {
                op: op.op.clone(),
                status: OpStatus::Ok,
                payload: serde_json::to_value(&report)
                    .map_err(|e| ConfigError::Json(e.to_string()))?,
                csv_files,
            })
        }
        "th23" | "check-th23" => {
            let map = ctx.plain_map()?;
            let weight = ctx.weight()?.unwrap_or_else(checks::unit_weight);
            let epsilon = require(op.epsilon, "epsilon")?;
            let radii = op
                .radii
                .clone()
                .unwrap_or_else(|| vec![0.9, 0.99, 0.999, 0.9999]);
            match checks::check_th23(&map, &weight, epsilon, &radii) {
                Ok(report) => {
                    let mut rows = Vec::new();
                    if let checks::ConditionDetail::RadialSamples(samples) = &report.detail {
                        for s in samples {
                            rows.push(vec![
                                csv_cell(s.r),
                                csv_cell(s.m_r),
                                csv_cell(s.a_r),
                                csv_cell(s.growth),
                                csv_cell(s.log_a_r),
                                csv_cell(s.bound),
                                csv_cell(s.margin),
                            ]);
                        }
                    }
                    let csv_files = ctx.write_csv(
                        index,
                        "th23_samples",
                        "r,m_r,a_r,growth,log_a_r,bound,margin",
                        rows,
                    )?;
                    let status = verdict_status(report.verdict);
                    Ok(OpResult {
                        op: op.op.clone(),
                        status,
                        payload: serde_json::to_value(&report)
                            .map_err(|e| ConfigError::Json(e.to_string()))?,
                        csv_files,
                    })
                }
                Err(e) => Ok(OpResult {
                    op: op.op.clone(),
                    status: OpStatus::Error,
                    payload: json!({ "message": e.to_string() }),
                    csv_files: Vec::new(),
                }),
            }
        }
        "iterate-supnorm" | "check-itsup" => {
            let map = ctx.plain_map()?;
            let k_max = op.k_max.unwrap_or(32);
            let r_probe = op.r_probe.unwrap_or(0.999);
            let report = checks::check_iterate_supnorm(&map, k_max, r_probe).map_err(|e| {
                ConfigError::BadParam {
                    op: op.op.clone(),
                    what: e.to_string(),
                }
            })?;
            let mut rows = Vec::new();
            if let checks::ConditionDetail::IterateSups { sups, .. } = &report.detail {
                for (k, sup) in sups.iter().enumerate() {
                    rows.push(vec![format!("{}", k + 1), csv_cell(*sup)]);
                }
            }
            let csv_files = ctx.write_csv(index, "iterate_sups", "k,sup", rows)?;
            Ok(OpResult {
                op: op.op.clone(),
                status: OpStatus::Ok,
                payload: serde_json::to_value(&report)
                    .map_err(|e| ConfigError::Json(e.to_string()))?,
                csv_files,
            })
        }
        "weighted-beta" | "check-wbeta" => {
            let map = ctx.plain_map()?;
            let weight = ctx.weight()?.unwrap_or_else(checks::unit_weight);
            let beta = require(op.beta, "beta")?;
            let variant = match op.variant.as_deref() {
                None | Some("plain") => WeightedBetaVariant::Plain,
                Some("log-weighted") => WeightedBetaVariant::LogWeighted,
                Some(other) => {
                    return Err(ConfigError::BadParam {
                        op: op.op.clone(),
                        what: format!("unknown variant '{other}'"),
                    })
                }
            };
            let grid = ctx.check_grid();
            let report =
                checks::check_weighted_beta(&map, &weight, beta, variant, &grid).map_err(|e| {
                    ConfigError::BadParam {
                        op: op.op.clone(),
                        what: e.to_string(),
                    }
                })?;
            condition_result(ctx, index, op, &grid, report, |z| {
                checks::weighted_beta_margin_at(&map, &weight, beta, variant, z)
            })
        }
        other => Err(ConfigError::UnknownOp(other.to_string())),
    }
}

fn verdict_status(verdict: checks::Verdict) -> OpStatus {
    match verdict {
        checks::Verdict::Violated => OpStatus::Violated,
        _ => OpStatus::Ok,
    }
}

/// Serializes a pointwise condition report plus a per-point margin CSV.
fn condition_result(
    ctx: &RunContext<'_>,
    index: usize,
    op: &OpSpec,
    grid: &DiskGrid,
    report: checks::ConditionReport,
    mut margin_at: impl FnMut(Complex64) -> Result<f64, EvalError>,
) -> Result<OpResult, ConfigError> {
    let rows = grid
        .points()
        .iter()
        .map(|&z| {
            let margin = margin_at(z).map(csv_cell);
            vec![
                csv_cell(z.re),
                csv_cell(z.im),
                margin.unwrap_or_else(|_| "domain-error".to_string()),
            ]
        })
        .collect();
    let csv_files = ctx.write_csv(
        index,
        &format!("{}_margins", report.condition),
        "re,im,margin",
        rows,
    )?;
    let status = verdict_status(report.verdict);
    Ok(OpResult {
        op: op.op.clone(),
        status,
        payload: serde_json::to_value(&report).map_err(|e| ConfigError::Json(e.to_string()))?,
        csv_files,
    })
}

type ResidualRows = Vec<(Complex64, Option<f64>)>;

fn residual_op(ctx: &RunContext<'_>, index: usize, op: &OpSpec) -> Result<OpResult, ConfigError> {
    let map = match ctx.validated_map() {
        Ok(map) => map,
        Err(e) => {
            let (status, payload) = engine_status(&e);
            return Ok(OpResult {
                op: op.op.clone(),
                status,
                payload,
                csv_files: Vec::new(),
            });
        }
    };
    let radius = op.radius.unwrap_or(0.7);
    if !(radius > 0.0 && radius < 1.0) {
        return Err(ConfigError::BadParam {
            op: op.op.clone(),
            what: format!("radius {radius} outside (0, 1)"),
        });
    }
    // The Cauchy control circle must enclose the residual grid for the
    // maximum principle to transfer the gap bound.
    let mut settings = ctx.settings(op);
    settings.control_radius = settings.control_radius.max(radius);
    let grid = DiskGrid::uniform(radius, 10, 128);

    let outcome: Result<(Value, ResidualRows), EngineError> = match op.op.as_str() {
        "schroder-residual" => engine::koenigs_approx(&map, &settings).map(|approx| {
            let report = engine::schroder_residual(&approx, &grid);
            let per_point = grid
                .points()
                .iter()
                .map(|&z| {
                    let r = map.eval_value(z).ok().and_then(|phi_z| {
                        let lhs = approx.eval(phi_z).ok()?.value;
                        let rhs = approx.lambda() * approx.eval(z).ok()?.value;
                        Some((lhs - rhs).norm())
                    });
                    (z, r)
                })
                .collect();
            (
                json!({
                    "sup": report.sup,
                    "witness": complex_json(report.witness),
                    "coverage": report.coverage,
                    "depth": approx.depth(),
                }),
                per_point,
            )
        }),
        "weighted-residual" => {
            let weight = ctx.required_weight(&op.op)?;
            engine::weighted_principal(&map, &weight, &settings).map(|wk| {
                let report = engine::weighted_residual(&wk, &grid);
                let per_point = grid
                    .points()
                    .iter()
                    .map(|&z| {
                        let r = (|| {
                            let phi_z = map.eval_value(z).ok()?;
                            let u_z = weight.eval_value(z).ok()?;
                            let lhs = u_z * wk.eval(phi_z).ok()?.value;
                            let rhs = wk.eigenvalue() * wk.eval(z).ok()?.value;
                            Some((lhs - rhs).norm())
                        })();
                        (z, r)
                    })
                    .collect();
                (
                    json!({
                        "sup": report.sup,
                        "witness": complex_json(report.witness),
                        "coverage": report.coverage,
                        "depth": wk.depth(),
                    }),
                    per_point,
                )
            })
        }
        "compare-known-koenigs" => {
            let Some(known) = known_koenigs_for(&ctx.config.map) else {
                return Err(ConfigError::BadParam {
                    op: op.op.clone(),
                    what: format!("no closed-form limit known for '{}'", ctx.config.map),
                });
            };
            engine::koenigs_approx(&map, &settings).map(|approx| {
                let mut sup: f64 = 0.0;
                let mut witness = Complex64::new(0.0, 0.0);
                let mut per_point = Vec::with_capacity(grid.len());
                for &z in grid.points() {
                    let d = (|| {
                        let numeric = approx.eval(z).ok()?.value;
                        let closed = known.eval_value(z).ok()?;
                        Some((numeric - closed).norm())
                    })();
                    if let Some(d) = d {
                        if d > sup {
                            sup = d;
                            witness = z;
                        }
                    }
                    per_point.push((z, d));
                }
                (
                    json!({
                        "max_deviation": sup,
                        "witness": complex_json(witness),
                        "depth": approx.depth(),
                    }),
                    per_point,
                )
            })
        }
        _ => unreachable!(),
    };

    match outcome {
        Ok((payload, per_point)) => {
            let rows = per_point
                .into_iter()
                .map(|(z, r)| {
                    vec![
                        csv_cell(z.re),
                        csv_cell(z.im),
                        r.map(csv_cell)
                            .unwrap_or_else(|| "domain-error".to_string()),
                    ]
                })
                .collect();
            let csv_files =
                ctx.write_csv(index, &format!("{}_points", op.op), "re,im,residual", rows)?;
            Ok(OpResult {
                op: op.op.clone(),
                status: OpStatus::Ok,
                payload,
                csv_files,
            })
        }
        Err(e) => {
            let (status, payload) = engine_status(&e);
            Ok(OpResult {
                op: op.op.clone(),
                status,
                payload,
                csv_files: Vec::new(),
            })
        }
    }
}

fn norm_op(ctx: &RunContext<'_>, index: usize, op: &OpSpec) -> Result<OpResult, ConfigError> {
    let target_spec = op.target.clone().unwrap_or_else(|| ctx.config.map.clone());
    let target = build_target(&target_spec, &ctx.settings(op), &ctx.check_grid())?;
    let estimate = match op.op.as_str() {
        "seminorm" => {
            let alpha = op.alpha.ok_or(ConfigError::MissingParam {
                op: op.op.clone(),
                param: "alpha",
            })?;
            norms::bloch_seminorm(&target, alpha, &ctx.policy)
        }
        "lipnorm" => {
            let alpha = op.alpha.ok_or(ConfigError::MissingParam {
                op: op.op.clone(),
                param: "alpha",
            })?;
            norms::lipschitz_type_norm(&target, alpha, &ctx.policy)
        }
        "supnorm" => norms::sup_norm(&target, &ctx.policy),
        _ => unreachable!(),
    };
    match estimate {
        Ok(estimate) => {
            // Grid values of the integrand on the refinement ladder.
            let mut rows = Vec::new();
            if ctx.out_dir.is_some() {
                let alpha = op.alpha.unwrap_or(0.0);
                for (level, grid_level) in (0..=ctx.policy.max_depth)
                    .map(crate::grid::standard_level)
                    .enumerate()
                {
                    for m in 0..grid_level.angular {
                        let theta =
                            2.0 * std::f64::consts::PI * (m as f64) / (grid_level.angular as f64);
                        let z = Complex64::new(
                            grid_level.radius * theta.cos(),
                            grid_level.radius * theta.sin(),
                        );
                        let integrand = match op.op.as_str() {
                            "seminorm" => target
                                .jet_at(z)
                                .map(|j| (1.0 - z.norm_sqr()).powf(alpha) * j.derivative.norm()),
                            "lipnorm" => target
                                .value_at(z)
                                .map(|v| (1.0 - z.norm_sqr()).powf(alpha - 1.0) * v.norm()),
                            _ => target.value_at(z).map(|v| v.norm()),
                        };
                        rows.push(vec![
                            format!("{level}"),
                            csv_cell(z.re),
                            csv_cell(z.im),
                            integrand
                                .map(csv_cell)
                                .unwrap_or_else(|_| "domain-error".to_string()),
                        ]);
                    }
                }
            }
            let csv_files = ctx.write_csv(
                index,
                &format!("{}_integrand", op.op),
                "level,re,im,integrand",
                rows,
            )?;
            let norm_value = if op.op == "seminorm" {
                target
                    .value_at(Complex64::new(0.0, 0.0))
                    .ok()
                    .map(|v| v.norm() + estimate.value)
            } else {
                None
            };
            let mut payload = json!({
                "target": target.describe(),
                "estimate": serde_json::to_value(&estimate)
                    .map_err(|e| ConfigError::Json(e.to_string()))?,
            });
            if let Some(norm_value) = norm_value {
                payload["bloch_norm"] = json!(norm_value);
            }
            Ok(OpResult {
                op: op.op.clone(),
                status: OpStatus::Ok,
                payload,
                csv_files,
            })
        }
        Err(e) => Ok(OpResult {
            op: op.op.clone(),
            status: OpStatus::Error,
            payload: json!({ "message": e.to_string() }),
            csv_files: Vec::new(),
        }),
    }
}
