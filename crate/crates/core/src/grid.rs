//! Radial discretisation of `[0, R]` carrying the measure `r dr`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_INTERVALS: usize = 16;

/// Node placement rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Spacing {
    Uniform,
    /// `r(ξ) = R (e^{βξ} − 1)/(e^β − 1)` for `ξ = i/N`, refining towards `r = 0`.
    Geometric {
        beta: f64,
    },
    /// Nodes supplied explicitly (e.g. read from a file).
    Explicit,
}

/// Nodes `0 = r₀ < r₁ < … < r_N = R` with lumped weights for `∫₀ᴿ (·) r dr`.
///
/// Node `i` carries the exact measure of its dual cell
/// `[r_{i−½}, r_{i+½}] ∩ [0, R]`, so the weights sum to `R²/2` and the origin
/// node has the positive weight `r_{½}²/2`. On uniform grids the interior
/// weights coincide with the trapezoid rule `r_i h`.
#[derive(Clone, Debug)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    spacing: Spacing,
}

impl RadialGrid {
    pub fn uniform(radius: f64, intervals: usize) -> Result<Self> {
        check_size(intervals)?;
        let h = radius / intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals).map(|i| i as f64 * h).collect();
        nodes[intervals] = radius;
        Self::build(nodes, Spacing::Uniform)
    }

    pub fn geometric(radius: f64, intervals: usize, beta: f64) -> Result<Self> {
        check_size(intervals)?;
        if beta.abs() < 1e-12 {
            return Self::uniform(radius, intervals);
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidGrid(format!(
                "grading exponent must be >= 0, got {beta}"
            )));
        }
        let denom = beta.exp_m1();
        let mut nodes: Vec<f64> = (0..=intervals)
            .map(|i| radius * (beta * i as f64 / intervals as f64).exp_m1() / denom)
            .collect();
        nodes[intervals] = radius;
        Self::build(nodes, Spacing::Geometric { beta })
    }

    /// Geometric grading whose first interior node sits at `first`
    /// (uniform if the uniform spacing already satisfies that).
    pub fn with_first_node(radius: f64, intervals: usize, first: f64) -> Result<Self> {
        check_size(intervals)?;
        let n = intervals as f64;
        if radius / n <= first {
            return Self::uniform(radius, intervals);
        }
        // r₁/R = (e^{β/N} − 1)/(e^β − 1) decreases in β; bisect.
        let ratio = |beta: f64| (beta / n).exp_m1() / beta.exp_m1();
        let target = first / radius;
        let (mut lo, mut hi) = (1e-9, 1.0);
        while ratio(hi) > target {
            hi *= 2.0;
            if hi > 700.0 {
                return Err(Error::InvalidGrid(format!(
                    "cannot place the first node at {first} with {intervals} intervals"
                )));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::geometric(radius, intervals, 0.5 * (lo + hi))
    }

    /// Default grid for index `k`: uniform for `|k| = 1`, otherwise graded so
    /// that the first interior node is near `R·10⁻³`.
    pub fn default_for(k: i32, radius: f64, intervals: usize) -> Result<Self> {
        if k.unsigned_abs() <= 1 {
            Self::uniform(radius, intervals)
        } else {
            Self::with_first_node(radius, intervals, 1e-3 * radius)
        }
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < MIN_INTERVALS + 1 {
            return Err(Error::GridTooSmall {
                nodes: nodes.len().saturating_sub(1),
                min: MIN_INTERVALS,
            });
        }
        Self::build(nodes, Spacing::Explicit)
    }

    fn build(nodes: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "first node must be 0, got {}",
                nodes[0]
            )));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(
                "nodes must be strictly increasing".into(),
            ));
        }
        let n = nodes.len() - 1;
        let mid = |i: usize| 0.5 * (nodes[i] + nodes[i + 1]);
        let weights = (0..=n)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { mid(i - 1) };
                let hi = if i == n { nodes[n] } else { mid(i) };
                0.5 * (hi - lo) * (hi + lo)
            })
            .collect();
        Ok(RadialGrid {
            nodes,
            weights,
            spacing,
        })
    }

    /// Number of intervals `N` (there are `N + 1` nodes).
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn r(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Length of interval `[r_e, r_{e+1}]`.
    pub fn h(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    /// `∫_{r_e}^{r_{e+1}} r dr`.
    pub fn edge_mass(&self, e: usize) -> f64 {
        0.5 * self.h(e) * (self.nodes[e] + self.nodes[e + 1])
    }

    /// Quadrature of `∫₀ᴿ f r dr` from nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    /// True when both grids have identical nodes.
    pub fn same_nodes(&self, other: &RadialGrid) -> bool {
        self.nodes == other.nodes
    }
}

/// Grids compare by their nodes; the weights follow from them and the
/// spacing tag is descriptive only.
impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

fn check_size(intervals: usize) -> Result<()> {
    if intervals < MIN_INTERVALS {
        Err(Error::GridTooSmall {
            nodes: intervals,
            min: MIN_INTERVALS,
        })
    } else {
        Ok(())
    }
}
