//! Holomorphic map expressions on the unit disk.
//!
//! A [`MapExpr`] is a finite immutable tree over one variable `z` with
//! complex constants, the four arithmetic operations, integer powers,
//! real powers via the principal branch, `exp`, and `log` (principal).
//! Evaluation produces [`Jet`]s, so first derivatives are exact to
//! roundoff. Evaluation at the same point is deterministic and
//! side-effect free; everything here is safe for unrestricted concurrent
//! use.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::grid::DiskGrid;
use crate::jet::{EvalError, Jet, JetEval};
use crate::tolerances::{CONTRACTION_MARGIN, ORIGIN_FIXED_TOL};

pub const DIV_NOTE: &str = "denominator must stay away from 0 on the evaluation domain";
pub const LOG_NOTE: &str = "argument must avoid the branch cut through 0";
pub const POW_REAL_NOTE: &str =
    "computed as exp(t*log w) with the principal log; base must avoid the branch cut through 0";

/// Expression tree node. Division, principal-branch log, and real-power
/// nodes each carry a branch-safety note describing the precondition
/// under which they are singularity-free.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div {
        num: Box<Node>,
        den: Box<Node>,
        note: String,
    },
    PowInt(Box<Node>, i32),
    PowReal {
        base: Box<Node>,
        exponent: f64,
        note: String,
    },
    Exp(Box<Node>),
    Log {
        arg: Box<Node>,
        note: String,
    },
}

#[allow(clippy::should_implement_trait)] // constructors, not operator impls
impl Node {
    pub fn constant(c: impl Into<Complex64>) -> Node {
        Node::Const(c.into())
    }

    pub fn real(x: f64) -> Node {
        Node::Const(Complex64::new(x, 0.0))
    }

    pub fn add(a: Node, b: Node) -> Node {
        Node::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Node, b: Node) -> Node {
        Node::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Node, b: Node) -> Node {
        Node::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(num: Node, den: Node) -> Node {
        Node::div_noted(num, den, DIV_NOTE)
    }

    pub fn div_noted(num: Node, den: Node, note: impl Into<String>) -> Node {
        Node::Div {
            num: Box::new(num),
            den: Box::new(den),
            note: note.into(),
        }
    }

    pub fn pow_int(base: Node, n: i32) -> Node {
        Node::PowInt(Box::new(base), n)
    }

    pub fn pow_real(base: Node, t: f64) -> Node {
        Node::pow_real_noted(base, t, POW_REAL_NOTE)
    }

    pub fn pow_real_noted(base: Node, t: f64, note: impl Into<String>) -> Node {
        Node::PowReal {
            base: Box::new(base),
            exponent: t,
            note: note.into(),
        }
    }

    pub fn exp(arg: Node) -> Node {
        Node::Exp(Box::new(arg))
    }

    pub fn log(arg: Node) -> Node {
        Node::Log {
            arg: Box::new(arg),
            note: LOG_NOTE.to_string(),
        }
    }
}

/// A branch-safety note attached to a division, log, or real-power node.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchNote {
    pub kind: BranchNodeKind,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchNodeKind {
    Division,
    Log,
    RealPower,
}

/// An immutable holomorphic map expression with display metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct MapExpr {
    root: Node,
    name: String,
    asserted_univalent: bool,
    domain_radius: Option<f64>,
}

impl MapExpr {
    pub fn new(name: impl Into<String>, root: Node) -> Self {
        MapExpr {
            root,
            name: name.into(),
            asserted_univalent: false,
            domain_radius: None,
        }
    }

    /// Parses an expression string; see [`crate::parse`] for the grammar.
    pub fn parse(source: &str) -> Result<Self, crate::parse::ParseError> {
        crate::parse::parse_map(source)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Univalence is user-asserted metadata, never verified here.
    pub fn asserted_univalent(&self) -> bool {
        self.asserted_univalent
    }

    pub fn with_asserted_univalent(mut self, flag: bool) -> Self {
        self.asserted_univalent = flag;
        self
    }

    /// Radius beyond which evaluation refuses with a domain error, for
    /// maps whose defining formula degenerates at the boundary.
    pub fn domain_radius(&self) -> Option<f64> {
        self.domain_radius
    }

    pub fn with_domain_radius(mut self, radius: f64) -> Self {
        self.domain_radius = Some(radius);
        self
    }

    /// Collects the branch-safety notes of every division, log, and
    /// real-power node, in evaluation order.
    pub fn branch_notes(&self) -> Vec<BranchNote> {
        let mut notes = Vec::new();
        collect_notes(&self.root, &mut notes);
        notes
    }

    /// Evaluates value and derivative at `z`.
    pub fn eval_jet(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.eval_jet_chained(Jet::variable(z))
    }

    /// Evaluates with an incoming jet as the variable, so composing maps
    /// accumulates derivatives by the chain rule.
    pub fn eval_jet_chained(&self, var: Jet) -> Result<Jet, EvalError> {
        if let Some(r) = self.domain_radius {
            if var.value.norm() > r {
                return Err(EvalError::DomainRadiusExceeded);
            }
        }
        eval_node(&self.root, var)
    }

    /// Value-only evaluation; cheaper inside iteration loops.
    pub fn eval_value(&self, z: Complex64) -> Result<Complex64, EvalError> {
        if let Some(r) = self.domain_radius {
            if z.norm() > r {
                return Err(EvalError::DomainRadiusExceeded);
            }
        }
        eval_value_node(&self.root, z)
    }
}

impl JetEval for MapExpr {
    fn jet_at(&self, z: Complex64) -> Result<Jet, EvalError> {
        self.eval_jet(z)
    }

    fn value_at(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.eval_value(z)
    }
}

fn collect_notes(node: &Node, out: &mut Vec<BranchNote>) {
    match node {
        Node::Const(_) | Node::Var => {}
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
            collect_notes(a, out);
            collect_notes(b, out);
        }
        Node::Div { num, den, note } => {
            collect_notes(num, out);
            collect_notes(den, out);
            out.push(BranchNote {
                kind: BranchNodeKind::Division,
                note: note.clone(),
            });
        }
        Node::PowInt(base, _) => collect_notes(base, out),
        Node::PowReal { base, note, .. } => {
            collect_notes(base, out);
            out.push(BranchNote {
                kind: BranchNodeKind::RealPower,
                note: note.clone(),
            });
        }
        Node::Exp(arg) => collect_notes(arg, out),
        Node::Log { arg, note } => {
            collect_notes(arg, out);
            out.push(BranchNote {
                kind: BranchNodeKind::Log,
                note: note.clone(),
            });
        }
    }
}

fn eval_node(node: &Node, var: Jet) -> Result<Jet, EvalError> {
    match node {
        Node::Const(c) => Ok(Jet::constant(*c)),
        Node::Var => Ok(var),
        Node::Add(a, b) => Ok(eval_node(a, var)? + eval_node(b, var)?),
        Node::Sub(a, b) => Ok(eval_node(a, var)? - eval_node(b, var)?),
        Node::Mul(a, b) => Ok(eval_node(a, var)? * eval_node(b, var)?),
        Node::Div { num, den, .. } => eval_node(num, var)?.checked_div(eval_node(den, var)?),
        Node::PowInt(base, n) => eval_node(base, var)?.powi(*n),
        Node::PowReal { base, exponent, .. } => eval_node(base, var)?.powf(*exponent),
        Node::Exp(arg) => Ok(eval_node(arg, var)?.exp()),
        Node::Log { arg, .. } => eval_node(arg, var)?.log(),
    }
}

fn eval_value_node(node: &Node, z: Complex64) -> Result<Complex64, EvalError> {
    // Mirrors eval_node on values alone; the checks are identical so a
    // point fails here iff it fails the jet path.
    match node {
        Node::Const(c) => Ok(*c),
        Node::Var => Ok(z),
        Node::Add(a, b) => Ok(eval_value_node(a, z)? + eval_value_node(b, z)?),
        Node::Sub(a, b) => Ok(eval_value_node(a, z)? - eval_value_node(b, z)?),
        Node::Mul(a, b) => Ok(eval_value_node(a, z)? * eval_value_node(b, z)?),
        Node::Div { num, den, .. } => {
            let d = eval_value_node(den, z)?;
            if d.norm() < crate::tolerances::TINY_DENOMINATOR {
                return Err(EvalError::DivisionByNearZero);
            }
            Ok(eval_value_node(num, z)? / d)
        }
        Node::PowInt(base, n) => {
            let b = eval_value_node(base, z)?;
            if *n < 0 && b.norm() < crate::tolerances::TINY_DENOMINATOR {
                return Err(EvalError::DivisionByNearZero);
            }
            Ok(b.powi(*n))
        }
        Node::PowReal { base, exponent, .. } => {
            let b = eval_value_node(base, z)?;
            check_off_cut_value(b)?;
            Ok((Complex64::new(*exponent, 0.0) * b.ln()).exp())
        }
        Node::Exp(arg) => Ok(eval_value_node(arg, z)?.exp()),
        Node::Log { arg, .. } => {
            let a = eval_value_node(arg, z)?;
            check_off_cut_value(a)?;
            Ok(a.ln())
        }
    }
}

fn check_off_cut_value(w: Complex64) -> Result<(), EvalError> {
    if w.norm() < crate::tolerances::TINY_DENOMINATOR {
        return Err(EvalError::DivisionByNearZero);
    }
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(EvalError::BranchCut);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, 0)
    }
}

// Precedence: 1 additive, 2 multiplicative, 3 power, 4 atom.
fn prec(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div { .. } => 2,
        Node::PowInt(..) | Node::PowReal { .. } => 3,
        // Composite constants print self-delimited, so they are atoms too.
        Node::Const(_) | Node::Var | Node::Exp(_) | Node::Log { .. } => 4,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, min_prec: u8) -> fmt::Result {
    let p = prec(node);
    let parens = p < min_prec;
    if parens {
        write!(f, "(")?;
    }
    match node {
        Node::Const(c) => write_const(f, *c)?,
        Node::Var => write!(f, "z")?,
        Node::Add(a, b) => {
            write_node(f, a, 1)?;
            write!(f, " + ")?;
            write_node(f, b, 2)?;
        }
        Node::Sub(a, b) => {
            write_node(f, a, 1)?;
            write!(f, " - ")?;
            write_node(f, b, 2)?;
        }
        Node::Mul(a, b) => {
            write_node(f, a, 2)?;
            write!(f, "*")?;
            write_node(f, b, 3)?;
        }
        Node::Div { num, den, .. } => {
            write_node(f, num, 2)?;
            write!(f, "/")?;
            write_node(f, den, 3)?;
        }
        Node::PowInt(base, n) => {
            write_node(f, base, 4)?;
            write!(f, "^{n}")?;
        }
        Node::PowReal { base, exponent, .. } => {
            // {:?} keeps a trailing .0 on integral exponents so the
            // reparse stays a real power.
            write_node(f, base, 4)?;
            write!(f, "^{exponent:?}")?;
        }
        Node::Exp(arg) => {
            write!(f, "exp(")?;
            write_node(f, arg, 0)?;
            write!(f, ")")?;
        }
        Node::Log { arg, .. } => {
            write!(f, "log(")?;
            write_node(f, arg, 0)?;
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    let re = if c.re == 0.0 { 0.0 } else { c.re };
    let im = if c.im == 0.0 { 0.0 } else { c.im };
    if im == 0.0 && re >= 0.0 {
        return write!(f, "{re}");
    }
    // Composite constants are emitted self-delimited; the grammar has no
    // unary minus, so negatives print as subtraction from zero.
    write!(f, "(")?;
    if re >= 0.0 {
        write!(f, "{re}")?;
    } else {
        write!(f, "0 - {}", -re)?;
    }
    if im > 0.0 {
        write!(f, " + {im}*i")?;
    } else if im < 0.0 {
        write!(f, " - {}*i", -im)?;
    }
    write!(f, ")")
}

// ---------------------------------------------------------------------------
// Self-map validation
// ---------------------------------------------------------------------------

/// Grid evidence about whether a map fixes the origin, contracts there,
/// and stays inside the disk. A grid cannot certify the open condition
/// "maps into the disk", so the report is flagged as grid evidence only;
/// violations, however, are exact witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub phi_at_zero: Complex64,
    pub phi_prime_at_zero: Complex64,
    pub sup_abs_on_grid: f64,
    pub is_schroder_admissible: bool,
    pub failures: Vec<ValidationFailure>,
    /// Always true: sup_abs_on_grid < 1 is necessary, not sufficient.
    pub grid_evidence_only: bool,
    /// Fraction of grid points that evaluated.
    pub coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ValidationFailure {
    OriginNotFixed {
        modulus: f64,
    },
    DerivativeAtOriginZero,
    DerivativeNotContractive {
        modulus: f64,
    },
    EscapesDisk {
        modulus: f64,
        at: Complex64,
    },
    EvalFailure {
        at: Complex64,
        error: EvalError,
        count: usize,
    },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::OriginNotFixed { modulus } => {
                write!(f, "origin not fixed (|phi(0)| = {modulus:.3e})")
            }
            ValidationFailure::DerivativeAtOriginZero => {
                write!(f, "derivative at origin is zero")
            }
            ValidationFailure::DerivativeNotContractive { modulus } => {
                write!(
                    f,
                    "derivative at origin not strictly contractive (|phi'(0)| = {modulus})"
                )
            }
            ValidationFailure::EscapesDisk { modulus, at } => {
                write!(f, "grid point escapes the disk (|phi({at})| = {modulus})")
            }
            ValidationFailure::EvalFailure { at, error, count } => {
                write!(
                    f,
                    "{count} grid evaluation failure(s), first at {at}: {error}"
                )
            }
        }
    }
}

/// Checks the hypotheses that make a map eligible for the Königs
/// iteration: fixes the origin, 0 < |φ'(0)| < 1, and maps the grid inside
/// the disk. Evaluation failures are recorded as failure codes rather
/// than aborting.
pub fn validate_self_map(expr: &MapExpr, grid: &DiskGrid) -> ValidationReport {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut failures = Vec::new();

    let (phi0, phi_prime0) = match expr.eval_jet(Complex64::new(0.0, 0.0)) {
        Ok(j) => (j.value, j.derivative),
        Err(e) => {
            failures.push(ValidationFailure::EvalFailure {
                at: Complex64::new(0.0, 0.0),
                error: e,
                count: 1,
            });
            (nan, nan)
        }
    };

    let mut sup_abs: f64 = 0.0;
    let mut sup_at = Complex64::new(0.0, 0.0);
    let mut first_err: Option<(Complex64, EvalError)> = None;
    let mut err_count = 0usize;
    let mut ok_count = 0usize;
    for &z in grid.points() {
        match expr.eval_value(z) {
            Ok(w) => {
                ok_count += 1;
                let m = w.norm();
                if m > sup_abs {
                    sup_abs = m;
                    sup_at = z;
                }
            }
            Err(e) => {
                err_count += 1;
                if first_err.is_none() {
                    first_err = Some((z, e));
                }
            }
        }
    }
    if let Some((at, error)) = first_err {
        failures.push(ValidationFailure::EvalFailure {
            at,
            error,
            count: err_count,
        });
    }

    let origin_fixed = phi0.norm() <= ORIGIN_FIXED_TOL;
    if !origin_fixed {
        failures.push(ValidationFailure::OriginNotFixed {
            modulus: phi0.norm(),
        });
    }
    let d = phi_prime0.norm();
    if !(d > 0.0) {
        failures.push(ValidationFailure::DerivativeAtOriginZero);
    } else if !(d < 1.0 - CONTRACTION_MARGIN) {
        failures.push(ValidationFailure::DerivativeNotContractive { modulus: d });
    }
    let inside = sup_abs < 1.0;
    if !inside && ok_count > 0 {
        failures.push(ValidationFailure::EscapesDisk {
            modulus: sup_abs,
            at: sup_at,
        });
    }

    let is_schroder_admissible =
        origin_fixed && d > 0.0 && d < 1.0 - CONTRACTION_MARGIN && inside && ok_count > 0;

    ValidationReport {
        phi_at_zero: phi0,
        phi_prime_at_zero: phi_prime0,
        sup_abs_on_grid: sup_abs,
        is_schroder_admissible,
        failures,
        grid_evidence_only: true,
        coverage: if grid.is_empty() {
            0.0
        } else {
            ok_count as f64 / grid.len() as f64
        },
    }
}
