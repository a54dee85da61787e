//! Full two-dimensional Q-tensor fields on a polar grid over the disk.
//!
//! Radial derivatives use the same P1 edges and lumped weights as the reduced
//! energy; angular derivatives are spectral on each ring. With this pairing
//! the energy of a lifted profile is exactly `2π` times its reduced energy.

mod spectral;
pub mod variation;

pub use spectral::RingFft;
pub use variation::{
    coercivity, energy_gap, random_perturbation, sample_perturbations, second_variation,
    CoercivityReport, EnergyGap, PerturbationKind, SecondVariation,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fd::Stencil3;
use crate::grid::RadialGrid;
use crate::params::ModelParams;
use crate::qtensor::{ansatz, bulk_energy, QTensor};
use crate::reduced::Profile;

pub const MIN_ANGULAR: usize = 64;

/// Tensor product of a radial grid with `M` uniform angles in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    radial: RadialGrid,
    m: usize,
}

impl PolarGrid {
    pub fn new(radial: RadialGrid, m: usize) -> Result<Self> {
        if m < MIN_ANGULAR || !m.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "angular node count must be even and at least {MIN_ANGULAR}, got {m}"
            )));
        }
        Ok(PolarGrid { radial, m })
    }

    pub fn uniform(radius: f64, n: usize, m: usize) -> Result<Self> {
        Self::new(RadialGrid::uniform(radius, n)?, m)
    }

    pub fn radial(&self) -> &RadialGrid {
        &self.radial
    }

    /// Number of angular nodes `M`.
    pub fn angular(&self) -> usize {
        self.m
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        self.dphi() * j as f64
    }

    /// Total number of nodes `(N + 1) M`.
    pub fn len(&self) -> usize {
        self.radial.len() * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }
}

/// One tensor per polar node, stored ring by ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    pub grid: PolarGrid,
    pub values: Vec<QTensor>,
}

impl Field2D {
    pub fn new(grid: PolarGrid, values: Vec<QTensor>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} polar nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field2D { grid, values })
    }

    pub fn zeros(grid: &PolarGrid) -> Self {
        Field2D {
            grid: grid.clone(),
            values: vec![QTensor::ZERO; grid.len()],
        }
    }

    /// Samples `f(r, φ)` at every node.
    pub fn from_sampler<F: Fn(f64, f64) -> QTensor>(grid: &PolarGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &r in grid.radial.nodes() {
            for j in 0..grid.m {
                values.push(f(r, grid.phi(j)));
            }
        }
        Field2D {
            grid: grid.clone(),
            values,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> QTensor {
        self.values[self.grid.index(i, j)]
    }

    pub fn ring(&self, i: usize) -> &[QTensor] {
        let m = self.grid.m;
        &self.values[i * m..(i + 1) * m]
    }

    fn zip_with(
        &self,
        other: &Field2D,
        f: impl Fn(QTensor, QTensor) -> QTensor,
    ) -> Result<Field2D> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "fields live on different polar grids".into(),
            ));
        }
        Ok(Field2D {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Field2D {
        Field2D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|q| *q * s).collect(),
        }
    }

    /// Largest entry on the boundary ring.
    pub fn boundary_max_abs(&self) -> f64 {
        let n = self.grid.radial.intervals();
        self.ring(n)
            .iter()
            .map(QTensor::max_abs)
            .fold(0.0, f64::max)
    }

    /// Quadrature of `∫ g(Q) dx` for a pointwise density `g`.
    pub fn integrate(&self, g: impl Fn(usize, &QTensor) -> f64) -> f64 {
        let w = self.grid.radial.weights();
        let dphi = self.grid.dphi();
        let m = self.grid.m;
        let mut total = 0.0;
        for (i, wi) in w.iter().enumerate() {
            let ring: f64 = (0..m).map(|j| g(i, &self.values[i * m + j])).sum();
            total += wi * dphi * ring;
        }
        total
    }

    /// `∫ |Q|² dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.integrate(|_, q| q.norm_sq())
    }
}

/// `Y(rᵢ, φⱼ) = u(rᵢ) F_n(φⱼ) + v(rᵢ) F_3`.
pub fn lift(p: &Profile, k: i32, grid: &PolarGrid) -> Result<Field2D> {
    p.check_lengths()?;
    if !p.grid.same_nodes(&grid.radial) {
        return Err(Error::GridMismatch(
            "profile nodes differ from the polar grid's radial nodes".into(),
        ));
    }
    let m = grid.m;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..p.len() {
        for j in 0..m {
            values.push(ansatz(p.u[i], p.v[i], grid.phi(j), k));
        }
    }
    Ok(Field2D {
        grid: grid.clone(),
        values,
    })
}

/// Applies a ring operator to each of the five components on every ring.
fn ring_map(f: &Field2D, op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<QTensor> {
    let m = f.grid.m;
    let mut out = vec![QTensor::ZERO; f.values.len()];
    let mut comp = vec![0.0; m];
    for i in 0..f.grid.radial.len() {
        let ring = f.ring(i);
        let mut parts = Vec::with_capacity(5);
        for c in 0..5 {
            for (j, q) in ring.iter().enumerate() {
                comp[j] = q.to_array()[c];
            }
            parts.push(op(&comp));
        }
        for j in 0..m {
            out[i * m + j] = QTensor::from_array([
                parts[0][j],
                parts[1][j],
                parts[2][j],
                parts[3][j],
                parts[4][j],
            ]);
        }
    }
    out
}

/// Parts of `½∫|∇Q|²`: radial `½∫|∂_r Q|²` and angular `½∫|∂_φ Q|²/r²`.
pub fn dirichlet_parts(f: &Field2D) -> (f64, f64) {
    let g = &f.grid.radial;
    let m = f.grid.m;
    let dphi = f.grid.dphi();
    let mut radial = 0.0;
    for e in 0..g.intervals() {
        let h = g.h(e);
        let kappa = g.edge_mass(e) / (h * h);
        let s: f64 = (0..m)
            .map(|j| (f.values[(e + 1) * m + j] - f.values[e * m + j]).norm_sq())
            .sum();
        radial += 0.5 * kappa * dphi * s;
    }
    let fft = RingFft::new(m);
    let d1 = ring_map(f, |x| fft.d1(x));
    let mut angular = 0.0;
    for i in 1..g.len() {
        let r = g.r(i);
        let s: f64 = d1[i * m..(i + 1) * m].iter().map(QTensor::norm_sq).sum();
        angular += g.weights()[i] * dphi * 0.5 * s / (r * r);
    }
    (radial, angular)
}

/// `½∫|∇Q|² dx`.
pub fn dirichlet_energy(f: &Field2D) -> f64 {
    let (a, b) = dirichlet_parts(f);
    a + b
}

/// `(1/L)∫ f(Q) dx`.
pub fn potential_energy(f: &Field2D, params: &ModelParams) -> Result<f64> {
    params.require_finite_l()?;
    Ok(f.integrate(|_, q| bulk_energy(q, params)) / params.l)
}

/// Landau-de Gennes energy `∫ ½|∇Q|² + f(Q)/L dx`.
pub fn ldg_energy_2d(f: &Field2D, params: &ModelParams) -> Result<f64> {
    Ok(dirichlet_energy(f) + potential_energy(f, params)?)
}

/// Pointwise residual of the Euler-Lagrange system on the interior rings.
#[derive(Clone, Debug)]
pub struct ElResidual {
    /// Ring-major, zero on the centre and boundary rings.
    pub values: Vec<QTensor>,
    pub max: f64,
    /// `(∫ |res|² dx)^{1/2}` over the interior rings.
    pub l2: f64,
}

/// `LΔQ + a²Q + b²(Q² − |Q|²I/3) − c²|Q|²Q` with a three-point radial stencil
/// and spectral angular derivatives.
pub fn el_residual_2d(f: &Field2D, params: &ModelParams) -> Result<ElResidual> {
    params.require_finite_l()?;
    let g = &f.grid.radial;
    let n = g.intervals();
    let m = f.grid.m;
    let fft = RingFft::new(m);
    let d2 = ring_map(f, |x| fft.d2(x));
    let mut values = vec![QTensor::ZERO; f.values.len()];
    let mut max: f64 = 0.0;
    let mut l2 = 0.0;
    for i in 1..n {
        let s = Stencil3::at(g.nodes(), i);
        let r = g.r(i);
        for j in 0..m {
            let (a, q, b) = (f.at(i - 1, j), f.at(i, j), f.at(i + 1, j));
            let radial = a * (s.d2[0] + s.d1[0] / r)
                + q * (s.d2[1] + s.d1[1] / r)
                + b * (s.d2[2] + s.d1[2] / r);
            let lap = radial + d2[i * m + j] * (1.0 / (r * r));
            let n2 = q.norm_sq();
            let res = lap * params.l + q * params.a2 + q.square_traceless() * params.b2
                - q * (params.c2 * n2);
            max = max.max(res.max_abs());
            l2 += g.weights()[i] * f.grid.dphi() * res.norm_sq();
            values[i * m + j] = res;
        }
    }
    Ok(ElResidual {
        values,
        max,
        l2: l2.sqrt(),
    })
}
