//! Deterministic sample grids on the open unit disk.
//!
//! "For all z in the disk" hypotheses are checked on these grids. The
//! standard grid is a geometric radial ladder r_j = 1 − 2^−j: the
//! critical quantities in this domain vary on the scale of −log(1−r), so
//! dyadic radii refine exactly where the action is. Circles are the right
//! sample set for suprema by the maximum principle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tolerances::{ANGULAR_BASE, ANGULAR_CAP};

/// One circle of samples: a radius and how many equispaced angles it
/// carries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridLevel {
    pub radius: f64,
    pub angular: usize,
}

/// An immutable grid of points in the open disk, stored level-major with
/// angles in index order. Rebuilding from the (radius, count) pairs is
/// bit-identical.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskGrid {
    levels: Vec<GridLevel>,
    points: Vec<Complex64>,
}

impl DiskGrid {
    /// Builds a grid from explicit levels. Radii must be strictly
    /// increasing and inside [0, 1).
    pub fn from_levels(levels: Vec<GridLevel>) -> Self {
        assert!(!levels.is_empty(), "grid must have at least one level");
        for w in levels.windows(2) {
            assert!(w[0].radius < w[1].radius, "radii must strictly increase");
        }
        for level in &levels {
            assert!(
                level.radius >= 0.0 && level.radius < 1.0,
                "radius must lie in [0, 1)"
            );
            assert!(level.angular > 0, "empty level");
        }
        let mut points = Vec::with_capacity(levels.iter().map(|l| l.angular).sum());
        for level in &levels {
            for m in 0..level.angular {
                let theta = 2.0 * std::f64::consts::PI * (m as f64) / (level.angular as f64);
                points.push(Complex64::new(
                    level.radius * theta.cos(),
                    level.radius * theta.sin(),
                ));
            }
        }
        DiskGrid { levels, points }
    }

    /// The standard ladder: levels j = 0..=depth with r_j = 1 − 2^−j
    /// (so r_0 = 0, a single center point) and angular counts
    /// 64·2^⌈j/2⌉ capped at 8192.
    pub fn standard(depth: usize) -> Self {
        let levels = (0..=depth).map(standard_level).collect();
        DiskGrid::from_levels(levels)
    }

    /// A single circle.
    pub fn circle(radius: f64, angular: usize) -> Self {
        DiskGrid::from_levels(vec![GridLevel { radius, angular }])
    }

    /// Uniform radial fill of the disk of the given radius: circles at
    /// r_max·i/n for i = 0..=n, each with the same angular count.
    pub fn uniform(r_max: f64, radial: usize, angular: usize) -> Self {
        assert!(radial > 0);
        let levels = (0..=radial)
            .map(|i| GridLevel {
                radius: r_max * (i as f64) / (radial as f64),
                angular: if i == 0 { 1 } else { angular },
            })
            .collect();
        DiskGrid::from_levels(levels)
    }

    /// Keeps only the levels with radius ≤ r_max.
    pub fn clip(&self, r_max: f64) -> Self {
        let levels: Vec<GridLevel> = self
            .levels
            .iter()
            .copied()
            .filter(|l| l.radius <= r_max)
            .collect();
        DiskGrid::from_levels(levels)
    }

    pub fn levels(&self) -> &[GridLevel] {
        &self.levels
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_radius(&self) -> f64 {
        self.levels.last().map(|l| l.radius).unwrap_or(0.0)
    }

    /// The points of one level, in angle-index order.
    pub fn level_points(&self, j: usize) -> &[Complex64] {
        let start: usize = self.levels[..j].iter().map(|l| l.angular).sum();
        &self.points[start..start + self.levels[j].angular]
    }
}

/// The standard level description at depth j.
pub fn standard_level(j: usize) -> GridLevel {
    if j == 0 {
        return GridLevel {
            radius: 0.0,
            angular: 1,
        };
    }
    let radius = 1.0 - 0.5f64.powi(j as i32);
    let angular = ANGULAR_BASE
        .saturating_mul(1usize << (j).div_ceil(2).min(20))
        .min(ANGULAR_CAP);
    GridLevel { radius, angular }
}
