//! Centralized numeric tolerances and defaults.
//!
//! Every threshold used by evaluators, the Königs engine, the norm
//! estimators, and the hypothesis checkers lives here, with a short note
//! on where it comes from. No magic numbers at call sites.

/// Maximum |φ(0)| allowed for a map to count as fixing the origin.
///
/// Double-precision headroom: closed-form catalog maps hit 0 exactly,
/// parsed expressions may carry a few ulps of rounding.
pub const ORIGIN_FIXED_TOL: f64 = 1e-12;

/// A map is strictly contractive at the origin when |φ'(0)| < 1 minus this
/// margin. Keeps |φ'(0)| = 1 − 1e-12 style near-rotations out without
/// rejecting legitimate symbols.
pub const CONTRACTION_MARGIN: f64 = 1e-9;

/// Point tolerance on inequality margins in hypothesis checks.
///
/// One order above jet-evaluation error, so equality cases (margin 0 in
/// exact arithmetic) never flip to "violated" from rounding alone.
pub const POINT_TOL: f64 = 1e-9;

/// Denominator magnitudes below this raise a division error instead of
/// producing inf.
pub const TINY_DENOMINATOR: f64 = 1e-300;

/// Default Cauchy-gap tolerance for the Königs and weighted iterations.
pub const DEFAULT_KOENIGS_TOL: f64 = 1e-10;

/// Default iteration cap. |λ|^k ≤ 0.9^200 ≈ 7e-10 covers the worst
/// admissible contraction at the margin.
pub const DEFAULT_K_MAX: u32 = 200;

/// Default radius of the convergence-control circle.
pub const DEFAULT_CONTROL_RADIUS: f64 = 0.7;

/// Number of sample points on the convergence-control circle.
pub const CONTROL_POINTS: usize = 256;

/// Relative tolerance between the last two refinement levels for a
/// supremum estimate to be flagged converged.
pub const REFINE_REL_TOL: f64 = 1e-3;

/// Per-level growth factor: the last three refinement levels must each
/// grow by at least this factor for a "diverging" flag. Between this and
/// `REFINE_REL_TOL` the verdict is inconclusive; supremum estimation near
/// a critical exponent is genuinely ambiguous.
pub const DIVERGENCE_FACTOR: f64 = 1.05;

/// Minimum fraction of grid points that must evaluate for a supremum
/// sweep to report a value at all.
pub const MIN_COVERAGE: f64 = 0.99;

/// Default maximum refinement depth J; radial levels are r_j = 1 − 2^−j.
pub const DEFAULT_MAX_DEPTH: usize = 12;

/// Angular sample count at level j is ANGULAR_BASE · 2^⌈j/2⌉, capped.
pub const ANGULAR_BASE: usize = 64;
pub const ANGULAR_CAP: usize = 8192;

/// Lens maps degenerate at z = ±1; evaluation is refused beyond this
/// radius rather than returning inf.
pub const LENS_DOMAIN_RADIUS: f64 = 0.9999;

/// Margin for the iterate sup-norm probe: an iterate counts as pulling
/// the probe circle strictly inside when its sup is ≤ 1 minus this.
pub const ITERATE_SUP_MARGIN: f64 = 1e-3;

/// Divergence proxy for radial trend checks: strictly increasing across
/// the sample radii with the last value above this threshold.
pub const RADIAL_DIVERGENCE_THRESHOLD: f64 = 10.0;

/// Angular samples per circle for radial sweeps (M_r, a_r, iterate sups).
pub const CIRCLE_SAMPLES: usize = 512;

/// Default boundary shells for compactness scans: points with
/// |φ(z)| > 1 − δ for each δ here, outermost first.
pub const DEFAULT_DELTA_LEVELS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

/// Radial ladder depth for compactness scans. Deeper than the default
/// refinement ladder because the shells chase |φ(z)| → 1.
pub const COMPACTNESS_DEPTH: usize = 20;

/// A shell plateau below this is treated as decaying to zero.
pub const TREND_ZERO_LEVEL: f64 = 1e-3;

/// Normalization checks on converged limits: |σ(0)|, |σ'(0) − 1|,
/// |v(0) − 1| must all be below this.
pub const NORMALIZATION_TOL: f64 = 1e-10;
