//! Value/derivative jets: forward-mode differentiation over ℂ.
//!
//! A [`Jet`] carries f(z) and f'(z) together; arithmetic on jets obeys the
//! product, quotient, and chain rules exactly in exact arithmetic, so
//! derivatives come out exact to roundoff with no finite differencing.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::tolerances::TINY_DENOMINATOR;

/// A first-order jet: value and derivative of a holomorphic function at a
/// point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl Jet {
    pub fn new(value: Complex64, derivative: Complex64) -> Self {
        Jet { value, derivative }
    }

    /// The identity jet at `z`: value z, derivative 1.
    pub fn variable(z: Complex64) -> Self {
        Jet::new(z, Complex64::new(1.0, 0.0))
    }

    /// A constant jet: derivative 0.
    pub fn constant(c: Complex64) -> Self {
        Jet::new(c, Complex64::new(0.0, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.derivative.is_finite()
    }

    /// Integer power by the monomial rule: d(w^n) = n·w^{n−1}·w'.
    ///
    /// Negative exponents require the value to stay away from zero.
    pub fn powi(self, n: i32) -> Result<Jet, EvalError> {
        if n == 0 {
            return Ok(Jet::constant(Complex64::new(1.0, 0.0)));
        }
        if n < 0 && self.value.norm() < TINY_DENOMINATOR {
            return Err(EvalError::DivisionByNearZero);
        }
        let value = self.value.powi(n);
        let derivative =
            Complex64::new(f64::from(n), 0.0) * self.value.powi(n - 1) * self.derivative;
        Ok(Jet::new(value, derivative))
    }

    /// Real power via the principal branch: w^t = exp(t·Log w).
    ///
    /// Errors when the value sits on the branch cut through 0 (the
    /// non-positive real axis) or is vanishingly small.
    pub fn powf(self, t: f64) -> Result<Jet, EvalError> {
        self.check_off_cut()?;
        let value = (Complex64::new(t, 0.0) * self.value.ln()).exp();
        // d(w^t) = t·w^t/w·w'; the cut check above guarantees w ≠ 0.
        let derivative = Complex64::new(t, 0.0) * value / self.value * self.derivative;
        Ok(Jet::new(value, derivative))
    }

    pub fn exp(self) -> Jet {
        let value = self.value.exp();
        Jet::new(value, value * self.derivative)
    }

    /// Principal-branch logarithm; errors on the cut through 0.
    pub fn log(self) -> Result<Jet, EvalError> {
        self.check_off_cut()?;
        Ok(Jet::new(self.value.ln(), self.derivative / self.value))
    }

    /// Quotient rule with an explicit near-zero denominator guard.
    pub fn checked_div(self, den: Jet) -> Result<Jet, EvalError> {
        if den.value.norm() < TINY_DENOMINATOR {
            return Err(EvalError::DivisionByNearZero);
        }
        Ok(self / den)
    }

    fn check_off_cut(&self) -> Result<(), EvalError> {
        let w = self.value;
        if w.norm() < TINY_DENOMINATOR {
            return Err(EvalError::DivisionByNearZero);
        }
        if w.im == 0.0 && w.re <= 0.0 {
            return Err(EvalError::BranchCut);
        }
        Ok(())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet::new(self.value + rhs.value, self.derivative + rhs.derivative)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet::new(self.value - rhs.value, self.derivative - rhs.derivative)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet::new(
            self.value * rhs.value,
            self.value * rhs.derivative + self.derivative * rhs.value,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let value = self.value / rhs.value;
        let derivative =
            (self.derivative * rhs.value - self.value * rhs.derivative) / (rhs.value * rhs.value);
        Jet::new(value, derivative)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.value, -self.derivative)
    }
}

/// Pointwise evaluation failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum EvalError {
    /// log or real power of a value on the branch cut through 0.
    BranchCut,
    /// |denominator| < 1e−300 (or a near-zero base raised to a negative
    /// power).
    DivisionByNearZero,
    /// The map declares a domain radius and the point lies beyond it.
    DomainRadiusExceeded,
    /// A scaling factor left the representable range; raised instead of
    /// returning inf.
    Overflow,
    /// The point must lie strictly inside the unit disk.
    OutsideDisk,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::BranchCut => write!(f, "value on the branch cut through 0"),
            EvalError::DivisionByNearZero => write!(f, "division by near-zero denominator"),
            EvalError::DomainRadiusExceeded => {
                write!(f, "point beyond the map's declared domain radius")
            }
            EvalError::Overflow => write!(f, "scaling overflow"),
            EvalError::OutsideDisk => write!(f, "point outside the open unit disk"),
        }
    }
}

impl std::error::Error for EvalError {}

/// Anything that produces (f(z), f'(z)) jets on the disk: parsed map
/// expressions, converged Königs limits, weighted principal
/// eigenfunctions, eigenfunction powers, or plain closures in tests.
pub trait JetEval {
    fn jet_at(&self, z: Complex64) -> Result<Jet, EvalError>;

    /// Value-only path; the default just drops the derivative.
    fn value_at(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.jet_at(z).map(|j| j.value)
    }
}

impl<F> JetEval for F
where
    F: Fn(Complex64) -> Result<Jet, EvalError>,
{
    fn jet_at(&self, z: Complex64) -> Result<Jet, EvalError> {
        self(z)
    }
}
