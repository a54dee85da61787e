//! The reduced radial energy for the profile pair `(u, v)`.
//!
//! Discretisation: P1 elements on the radial grid for the gradient terms
//! (`Σ_e ½ m_e (Δu² + Δv²)/h_e²` with `m_e = ∫_e r dr`) and dual-cell lumped
//! quadrature for the zero-order terms. Unknowns are `u₁..u_{N−1}` and
//! `v₀..v_{N−1}`; `u₀ = 0` and the values at `R` are fixed. On a uniform grid
//! the nodal `L²(r dr)` gradient equals minus the three-point ODE residual.

mod solver;

pub use solver::{
    continuation_in_b2, continuation_records, minimize, BranchPoint, Init, SignStructure,
    SolveReport, SolverOptions,
};

use crate::error::{Error, Result};
use crate::fd::{one_sided_start, Stencil3};
use crate::grid::{RadialGrid, MIN_INTERVALS};
use crate::params::ModelParams;

const SQRT6: f64 = 2.449_489_742_783_178;

/// Samples of `u` and `v` on a radial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Profile {
    pub fn new(grid: RadialGrid, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let p = Profile { grid, u, v };
        p.check_lengths()?;
        Ok(p)
    }

    /// `u` linear from 0 to `u(R)`, `v` constant at `v(R)`.
    pub fn linear(params: &ModelParams, grid: &RadialGrid) -> Self {
        let (ub, vb) = params.boundary_uv();
        let big_r = grid.radius();
        let u = grid.nodes().iter().map(|r| ub * r / big_r).collect();
        let v = vec![vb; grid.len()];
        Profile {
            grid: grid.clone(),
            u,
            v,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn check_lengths(&self) -> Result<()> {
        let n = self.grid.len();
        if self.u.len() != n || self.v.len() != n {
            return Err(Error::GridMismatch(format!(
                "profile has {} u and {} v samples for {} nodes",
                self.u.len(),
                self.v.len(),
                n
            )));
        }
        Ok(())
    }

    /// Largest deviation from `u(0) = 0`, `u(R) = s₊/√2`, `v(R) = −s₊/√6`.
    pub fn boundary_defect(&self, params: &ModelParams) -> f64 {
        let n = self.len() - 1;
        let (ub, vb) = params.boundary_uv();
        self.u[0]
            .abs()
            .max((self.u[n] - ub).abs())
            .max((self.v[n] - vb).abs())
    }

    /// Overwrites the Dirichlet values with those implied by `params`.
    pub fn impose_boundary(&mut self, params: &ModelParams) {
        let n = self.len() - 1;
        let (ub, vb) = params.boundary_uv();
        self.u[0] = 0.0;
        self.u[n] = ub;
        self.v[n] = vb;
    }

    /// Nodal `u² + v²`.
    pub fn norm_sq(&self) -> Vec<f64> {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(u, v)| u * u + v * v)
            .collect()
    }
}

/// The bulk potential in the `(u, v)` variables and its derivatives.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Potential {
    a2: f64,
    b2: f64,
    c2: f64,
}

impl Potential {
    pub(crate) fn new(params: &ModelParams) -> Self {
        Potential {
            a2: params.a2,
            b2: params.b2,
            c2: params.c2,
        }
    }

    pub(crate) fn value(&self, u: f64, v: f64) -> f64 {
        let rho = u * u + v * v;
        -0.5 * self.a2 * rho + 0.25 * self.c2 * rho * rho
            - self.b2 / (3.0 * SQRT6) * v * (v * v - 3.0 * u * u)
    }

    pub(crate) fn grad(&self, u: f64, v: f64) -> (f64, f64) {
        let rho = u * u + v * v;
        let pu = -self.a2 * u + self.c2 * rho * u + 2.0 * self.b2 / SQRT6 * u * v;
        let pv = -self.a2 * v + self.c2 * rho * v - self.b2 / SQRT6 * (v * v - u * u);
        (pu, pv)
    }

    /// `[[P_uu, P_uv], [P_uv, P_vv]]`.
    pub(crate) fn hessian(&self, u: f64, v: f64) -> [[f64; 2]; 2] {
        let rho = u * u + v * v;
        let g = 2.0 * self.b2 / SQRT6;
        let uu = -self.a2 + self.c2 * (rho + 2.0 * u * u) + g * v;
        let uv = 2.0 * self.c2 * u * v + g * u;
        let vv = -self.a2 + self.c2 * (rho + 2.0 * v * v) - g * v;
        [[uu, uv], [uv, vv]]
    }
}

/// The three contributions to the reduced energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParts {
    /// `∫ ½(u'² + v'²) r dr`
    pub gradient: f64,
    /// `∫ ½ k² u²/r² r dr`
    pub angular: f64,
    /// `(1/L) ∫ P(u, v) r dr`
    pub potential: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.gradient + self.angular + self.potential
    }

    /// The Dirichlet part `∫ ½(u'² + v'² + k²u²/r²) r dr`.
    pub fn dirichlet(&self) -> f64 {
        self.gradient + self.angular
    }
}

/// Dirichlet-type parts only (no `L` needed).
pub(crate) fn elastic_parts(p: &Profile, k: f64) -> (f64, f64) {
    let g = &p.grid;
    let mut grad = 0.0;
    for e in 0..g.intervals() {
        let h = g.h(e);
        let du = p.u[e + 1] - p.u[e];
        let dv = p.v[e + 1] - p.v[e];
        grad += 0.5 * g.edge_mass(e) * (du * du + dv * dv) / (h * h);
    }
    let mut ang = 0.0;
    for i in 1..g.len() {
        let r = g.r(i);
        ang += g.weights()[i] * 0.5 * k * k * p.u[i] * p.u[i] / (r * r);
    }
    (grad, ang)
}

pub fn energy_parts(p: &Profile, params: &ModelParams) -> Result<EnergyParts> {
    p.check_lengths()?;
    params.require_finite_l()?;
    let (gradient, angular) = elastic_parts(p, params.abs_k());
    let pot = Potential::new(params);
    let w = p.grid.weights();
    let potential = (0..p.len())
        .map(|i| w[i] * pot.value(p.u[i], p.v[i]))
        .sum::<f64>()
        / params.l;
    Ok(EnergyParts {
        gradient,
        angular,
        potential,
    })
}

/// Discrete reduced energy `E(u, v)`.
pub fn reduced_energy(p: &Profile, params: &ModelParams) -> Result<f64> {
    Ok(energy_parts(p, params)?.total())
}

/// Nodal `L²(r dr)` gradient split into its elastic and potential parts.
/// Components at Dirichlet nodes (`u₀`, `u_N`, `v_N`) are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientParts {
    pub elastic_u: Vec<f64>,
    pub elastic_v: Vec<f64>,
    pub potential_u: Vec<f64>,
    pub potential_v: Vec<f64>,
}

impl GradientParts {
    pub fn total(&self) -> (Vec<f64>, Vec<f64>) {
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        (
            add(&self.elastic_u, &self.potential_u),
            add(&self.elastic_v, &self.potential_v),
        )
    }
}

/// Raw partial derivatives `∂E/∂u_i`, `∂E/∂v_i` (not divided by the weights),
/// Dirichlet entries zeroed.
pub(crate) fn raw_partials(p: &Profile, params: &ModelParams) -> (Vec<f64>, Vec<f64>) {
    let (eu, ev, pu, pv) = raw_partials_split(p, params);
    (
        eu.iter().zip(&pu).map(|(a, b)| a + b).collect(),
        ev.iter().zip(&pv).map(|(a, b)| a + b).collect(),
    )
}

type Split = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn raw_partials_split(p: &Profile, params: &ModelParams) -> Split {
    let g = &p.grid;
    let n = g.intervals();
    let k2 = params.abs_k().powi(2);
    let mut eu = vec![0.0; n + 1];
    let mut ev = vec![0.0; n + 1];
    for e in 0..n {
        let h = g.h(e);
        let kappa = g.edge_mass(e) / (h * h);
        let du = kappa * (p.u[e + 1] - p.u[e]);
        let dv = kappa * (p.v[e + 1] - p.v[e]);
        eu[e] -= du;
        eu[e + 1] += du;
        ev[e] -= dv;
        ev[e + 1] += dv;
    }
    let w = g.weights();
    for i in 1..=n {
        let r = g.r(i);
        eu[i] += w[i] * k2 * p.u[i] / (r * r);
    }
    let pot = Potential::new(params);
    let mut pu = vec![0.0; n + 1];
    let mut pv = vec![0.0; n + 1];
    for i in 0..=n {
        let (a, b) = pot.grad(p.u[i], p.v[i]);
        pu[i] = w[i] * a / params.l;
        pv[i] = w[i] * b / params.l;
    }
    for x in [&mut eu, &mut pu] {
        x[0] = 0.0;
        x[n] = 0.0;
    }
    ev[n] = 0.0;
    pv[n] = 0.0;
    (eu, ev, pu, pv)
}

pub fn reduced_gradient_parts(p: &Profile, params: &ModelParams) -> Result<GradientParts> {
    p.check_lengths()?;
    params.require_finite_l()?;
    let (mut eu, mut ev, mut pu, mut pv) = raw_partials_split(p, params);
    let w = p.grid.weights();
    for i in 0..p.len() {
        eu[i] /= w[i];
        ev[i] /= w[i];
        pu[i] /= w[i];
        pv[i] /= w[i];
    }
    Ok(GradientParts {
        elastic_u: eu,
        elastic_v: ev,
        potential_u: pu,
        potential_v: pv,
    })
}

/// Nodal `L²(r dr)` gradient `(du, dv)` of [`reduced_energy`]; the directional
/// derivative along `(q_u, q_v)` is `Σ w_i (du_i q_u,i + dv_i q_v,i)`.
pub fn reduced_gradient(p: &Profile, params: &ModelParams) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(reduced_gradient_parts(p, params)?.total())
}

/// `L²(r dr)` norm of the projected gradient.
pub fn grad_norm(p: &Profile, params: &ModelParams) -> Result<f64> {
    p.check_lengths()?;
    params.require_finite_l()?;
    let (gu, gv) = raw_partials(p, params);
    Ok(weighted_dual_norm(&p.grid, &gu, &gv))
}

pub(crate) fn weighted_dual_norm(grid: &RadialGrid, gu: &[f64], gv: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .enumerate()
        .map(|(i, w)| (gu[i] * gu[i] + gv[i] * gv[i]) / w)
        .sum::<f64>()
        .sqrt()
}

/// Pointwise residual of the radial Euler-Lagrange system.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeResidual {
    /// `u'' + u'/r − k²u/r² − P_u/L`, zero at `r = 0` and `r = R`.
    pub ru: Vec<f64>,
    /// `v'' + v'/r − P_v/L`, zero at `r = 0` and `r = R`.
    pub rv: Vec<f64>,
    /// `|v'(0)|` from a second-order one-sided difference.
    pub neumann_defect: f64,
}

impl OdeResidual {
    /// Max of `|ru|`, `|rv|` over nodes `skip..N` (pass 1 for all interior nodes).
    pub fn interior_max(&self, skip: usize) -> f64 {
        let n = self.ru.len() - 1;
        (skip.max(1)..n)
            .map(|i| self.ru[i].abs().max(self.rv[i].abs()))
            .fold(0.0, f64::max)
    }
}

/// Three-point finite-difference residual of the radial ODE system.
pub fn ode_residual(p: &Profile, params: &ModelParams) -> Result<OdeResidual> {
    p.check_lengths()?;
    params.require_finite_l()?;
    let g = &p.grid;
    let n = g.intervals();
    if n < MIN_INTERVALS {
        return Err(Error::GridTooSmall {
            nodes: n,
            min: MIN_INTERVALS,
        });
    }
    let k2 = params.abs_k().powi(2);
    let pot = Potential::new(params);
    let mut ru = vec![0.0; n + 1];
    let mut rv = vec![0.0; n + 1];
    for i in 1..n {
        let s = Stencil3::at(g.nodes(), i);
        let r = g.r(i);
        let fu = [p.u[i - 1], p.u[i], p.u[i + 1]];
        let fv = [p.v[i - 1], p.v[i], p.v[i + 1]];
        let (pu, pv) = pot.grad(p.u[i], p.v[i]);
        ru[i] = s.second(fu) + s.first(fu) / r - k2 * p.u[i] / (r * r) - pu / params.l;
        rv[i] = s.second(fv) + s.first(fv) / r - pv / params.l;
    }
    let neumann_defect = one_sided_start(g.nodes(), &p.v).abs();
    Ok(OdeResidual {
        ru,
        rv,
        neumann_defect,
    })
}

/// `L²(r dr)` distance `(∫ (Δu)² + (Δv)² r dr)^{1/2}` between profiles on the same grid.
pub fn l2_distance(a: &Profile, b: &Profile) -> Result<f64> {
    a.check_lengths()?;
    b.check_lengths()?;
    if !a.grid.same_nodes(&b.grid) {
        return Err(Error::GridMismatch(
            "profiles live on different grids".into(),
        ));
    }
    let sq: Vec<f64> = (0..a.len())
        .map(|i| (a.u[i] - b.u[i]).powi(2) + (a.v[i] - b.v[i]).powi(2))
        .collect();
    Ok(a.grid.integrate(&sq).sqrt())
}
