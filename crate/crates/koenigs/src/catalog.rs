//! Built-in map families with closed-form auxiliaries.
//!
//! Lens maps φ_t conjugate the half-plane power w ↦ w^t by the Cayley map
//! γ(z) = (1+z)/(1−z); they fix the origin with φ_t'(0) = t and their
//! hyperbolic derivative has the closed form t·cosθ/cos(tθ) with
//! θ = arg γ(z). The Möbius family φ(z) = λz/(1−(1−λ)z) has the known
//! Königs function σ(z) = z/(1−z), which makes both families exact
//! oracles for the iteration engine.

use num_complex::Complex64;

use crate::expr::{MapExpr, Node};
use crate::parse::{ParseError, ParseErrorKind};
use crate::tolerances::LENS_DOMAIN_RADIUS;

/// γ(z)^t is branch-safe on the disk: γ maps into the open right
/// half-plane, where the principal log has no cut.
const LENS_POWER_NOTE: &str =
    "base is (1+z)/(1-z), which lies in the open right half-plane for |z| < 1; \
     the principal branch is singularity-free there";

const LENS_DIV_NOTE: &str =
    "denominator g^t + 1 has positive real part on the disk, so it cannot vanish";

/// A lens map φ_t(z) = (γ(z)^t − 1)/(γ(z)^t + 1) for t in (0, 1).
#[derive(Clone, Debug)]
pub struct LensMap {
    t: f64,
    expr: MapExpr,
}

/// A Möbius self-map φ(z) = λz/(1 − (1−λ)z) for λ in (0, 1), together
/// with its closed-form Königs function z/(1−z).
#[derive(Clone, Debug)]
pub struct MoebiusModel {
    lambda: f64,
    expr: MapExpr,
    known_koenigs: MapExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterError {
    pub name: &'static str,
    pub value: f64,
}

impl std::fmt::Display for ParameterError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "parameter {} = {} out of range (0, 1)",
            self.name, self.value
        )
    }
}

impl std::error::Error for ParameterError {}

/// Builds the lens map for the given exponent.
pub fn lens_map(t: f64) -> Result<LensMap, ParameterError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(ParameterError {
            name: "t",
            value: t,
        });
    }
    let gamma = || {
        Node::div(
            Node::add(Node::real(1.0), Node::Var),
            Node::sub(Node::real(1.0), Node::Var),
        )
    };
    let gt = || Node::pow_real_noted(gamma(), t, LENS_POWER_NOTE);
    let root = Node::div_noted(
        Node::sub(gt(), Node::real(1.0)),
        Node::add(gt(), Node::real(1.0)),
        LENS_DIV_NOTE,
    );
    let expr = MapExpr::new(format!("lens({t})"), root)
        .with_asserted_univalent(true)
        .with_domain_radius(LENS_DOMAIN_RADIUS);
    Ok(LensMap { t, expr })
}

impl LensMap {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn expr(&self) -> &MapExpr {
        &self.expr
    }

    pub fn into_expr(self) -> MapExpr {
        self.expr
    }
}

/// Closed form of the lens map's hyperbolic derivative: t·cosθ/cos(tθ)
/// with θ = arg γ(z), extracted by the two-argument arctangent. Agrees
/// with the generic (1−|z|²)|φ'|/(1−|φ|²) to roundoff away from ±1.
pub fn lens_hyperbolic_derivative_closed_form(t: f64, z: Complex64) -> Result<f64, ParameterError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(ParameterError {
            name: "t",
            value: t,
        });
    }
    let gamma = (Complex64::new(1.0, 0.0) + z) / (Complex64::new(1.0, 0.0) - z);
    let theta = gamma.im.atan2(gamma.re);
    Ok(t * theta.cos() / (t * theta).cos())
}

/// Builds the Möbius model with contraction factor λ.
pub fn moebius_model(lambda: f64) -> Result<MoebiusModel, ParameterError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(ParameterError {
            name: "lambda",
            value: lambda,
        });
    }
    let root = Node::div(
        Node::mul(Node::real(lambda), Node::Var),
        Node::sub(
            Node::real(1.0),
            Node::mul(Node::real(1.0 - lambda), Node::Var),
        ),
    );
    let expr = MapExpr::new(format!("moebius({lambda})"), root).with_asserted_univalent(true);
    let known_koenigs = MapExpr::new(
        "z/(1 - z)",
        Node::div(Node::Var, Node::sub(Node::real(1.0), Node::Var)),
    );
    Ok(MoebiusModel {
        lambda,
        expr,
        known_koenigs,
    })
}

impl MoebiusModel {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn expr(&self) -> &MapExpr {
        &self.expr
    }

    /// The closed-form Königs function z/(1−z); satisfies
    /// σ(φ(z)) = λ·σ(z) identically.
    pub fn known_koenigs(&self) -> &MapExpr {
        &self.known_koenigs
    }

    pub fn into_expr(self) -> MapExpr {
        self.expr
    }
}

/// The dilation z ↦ λz.
pub fn linear_map(lambda: f64) -> Result<MapExpr, ParameterError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(ParameterError {
            name: "lambda",
            value: lambda,
        });
    }
    Ok(MapExpr::new(
        format!("linear({lambda})"),
        Node::mul(Node::real(lambda), Node::Var),
    )
    .with_asserted_univalent(true))
}

/// Resolves a catalog name: `lens(t)`, `moebius(lambda)`, or
/// `linear(lambda)`. Returns `Ok(None)` when the string is not a catalog
/// name at all (so callers can fall back to expression parsing).
pub fn from_catalog_name(spec: &str) -> Result<Option<MapExpr>, ParseError> {
    let trimmed = spec.trim();
    let Some(open) = trimmed.find('(') else {
        return Ok(None);
    };
    let name = trimmed[..open].trim();
    if !matches!(name, "lens" | "moebius" | "linear") {
        return Ok(None);
    }
    if !trimmed.ends_with(')') {
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedEnd { expected: "')'" },
            offset: trimmed.len(),
        });
    }
    let inner = &trimmed[open + 1..trimmed.len() - 1];
    let args: Vec<&str> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').collect()
    };
    if args.len() != 1 {
        return Err(ParseError {
            kind: ParseErrorKind::ArityMismatch {
                name: name.to_string(),
                expected: 1,
                got: args.len(),
            },
            offset: open,
        });
    }
    let value: f64 = args[0].trim().parse().map_err(|_| ParseError {
        kind: ParseErrorKind::InvalidNumber(args[0].trim().to_string()),
        offset: open + 1,
    })?;
    let bad_param = |_: ParameterError| ParseError {
        kind: ParseErrorKind::InvalidNumber(format!("{value} (must lie in (0, 1))")),
        offset: open + 1,
    };
    let expr = match name {
        "lens" => lens_map(value).map_err(bad_param)?.into_expr(),
        "moebius" => moebius_model(value).map_err(bad_param)?.into_expr(),
        "linear" => linear_map(value).map_err(bad_param)?,
        _ => unreachable!(),
    };
    Ok(Some(expr))
}

/// Resolves a map specification: catalog name first, raw expression
/// otherwise.
pub fn resolve_map(spec: &str) -> Result<MapExpr, ParseError> {
    match from_catalog_name(spec)? {
        Some(expr) => Ok(expr),
        None => MapExpr::parse(spec),
    }
}

/// The closed-form Königs function for catalog members that have one:
/// z/(1−z) for `moebius(λ)` and the identity for `linear(λ)`.
pub fn known_koenigs_for(spec: &str) -> Option<MapExpr> {
    let trimmed = spec.trim();
    if trimmed.starts_with("moebius(") {
        return Some(MapExpr::new(
            "z/(1 - z)",
            Node::div(Node::Var, Node::sub(Node::real(1.0), Node::Var)),
        ));
    }
    if trimmed.starts_with("linear(") {
        return Some(MapExpr::new("z", Node::Var));
    }
    None
}
