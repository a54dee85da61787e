//! Minimisation of the discrete reduced energy: semi-implicit gradient flow
//! followed by damped Newton.

use serde::{Deserialize, Serialize};

use super::{
    energy_parts, ode_residual, raw_partials, reduced_energy, weighted_dual_norm, Potential,
    Profile,
};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::harmonic::minus_uv;
use crate::linalg::{solve_block_tridiagonal, solve_tridiagonal, Block};
use crate::params::ModelParams;

/// Starting point of the minimisation.
#[derive(Clone, Debug, Default)]
pub enum Init {
    /// The `L → 0` profile `(u₋, v₋)` scaled to the actual `s₊`.
    #[default]
    ExplicitLimit,
    /// `u` linear, `v` constant.
    Linear,
    /// A user profile on the same grid; its Dirichlet values are reset.
    Profile(Profile),
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Target `L²(r dr)` norm of the projected gradient.
    pub tol: f64,
    pub max_flow_iter: usize,
    pub max_newton_iter: usize,
    /// Gradient norm at which the flow hands over to Newton.
    pub switch_tol: f64,
    pub init: Init,
    /// Keep the energy after every accepted flow step.
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            max_flow_iter: 100_000,
            max_newton_iter: 100,
            switch_tol: 1e-3,
            init: Init::ExplicitLimit,
            record_trace: false,
        }
    }
}

/// Grid-level checks of the `b² = 0` sign structure (tolerance `1e-10`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignStructure {
    /// `u > 0` on interior nodes.
    pub u_positive: bool,
    /// `v < 0` on all nodes.
    pub v_negative: bool,
    /// `v_{i+1} ≥ v_i` on all edges.
    pub v_nondecreasing: bool,
}

impl SignStructure {
    pub fn of(p: &Profile) -> Self {
        let n = p.len() - 1;
        SignStructure {
            u_positive: p.u[1..n].iter().all(|&u| u > 0.0),
            v_negative: p.v.iter().all(|&v| v < 0.0),
            v_nondecreasing: p.v.windows(2).all(|w| w[1] - w[0] >= -1e-10),
        }
    }

    pub fn holds(&self) -> bool {
        self.u_positive && self.v_negative && self.v_nondecreasing
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub energy: f64,
    pub grad_norm: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
    pub flow_iterations: usize,
    pub newton_iterations: usize,
    /// Present for `b² = 0` only.
    pub sign_structure: Option<SignStructure>,
    /// `(2/3)s₊² − max(u² + v²)`; negative means the bound is violated.
    pub norm_bound_margin: f64,
    pub neumann_defect: f64,
    #[serde(skip)]
    pub energy_trace: Vec<f64>,
}

impl SolveReport {
    pub fn summary(&self) -> String {
        format!(
            "energy {:.12e}, grad norm {:.3e} (tol {:.1e}), residual {:.3e} after {} iterations ({} flow, {} Newton)",
            self.energy,
            self.grad_norm,
            self.tol,
            self.residual_norm,
            self.iterations,
            self.flow_iterations,
            self.newton_iterations
        )
    }

    pub fn norm_bound_holds(&self) -> bool {
        self.norm_bound_margin >= -1e-8
    }
}

fn initial_profile(params: &ModelParams, grid: &RadialGrid, init: &Init) -> Result<Profile> {
    let mut p = match init {
        Init::ExplicitLimit => {
            let (u, v) = grid
                .nodes()
                .iter()
                .map(|&r| minus_uv(r, params.r, params.k, params.s_plus))
                .unzip();
            Profile {
                grid: grid.clone(),
                u,
                v,
            }
        }
        Init::Linear => Profile::linear(params, grid),
        Init::Profile(p) => {
            p.check_lengths()?;
            if !p.grid.same_nodes(grid) {
                return Err(Error::GridMismatch(
                    "initial profile is not sampled on the solver grid".into(),
                ));
            }
            p.clone()
        }
    };
    p.impose_boundary(params);
    Ok(p)
}

/// Minimises the discrete reduced energy to `opts.tol`.
///
/// On hitting an iteration cap the best iterate is returned inside
/// [`Error::NonConvergence`].
pub fn minimize(
    params: &ModelParams,
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> Result<(Profile, SolveReport)> {
    params.validate()?;
    params.require_finite_l()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let mut p = initial_profile(params, grid, &opts.init)?;
    let mut trace = Vec::new();
    let flow_target = opts.switch_tol.max(opts.tol);
    let flow_iterations = gradient_flow(&mut p, params, flow_target, opts, &mut trace)?;
    if params.b2 == 0.0 {
        reflect_signed(&mut p);
    }
    let newton_iterations = newton(&mut p, params, opts.tol, opts.max_newton_iter)?;
    let report = make_report(
        &p,
        params,
        opts.tol,
        flow_iterations,
        newton_iterations,
        trace,
    )?;
    if report.converged {
        Ok((p, report))
    } else {
        Err(Error::NonConvergence(Box::new((p, report))))
    }
}

fn make_report(
    p: &Profile,
    params: &ModelParams,
    tol: f64,
    flow_iterations: usize,
    newton_iterations: usize,
    energy_trace: Vec<f64>,
) -> Result<SolveReport> {
    let energy = energy_parts(p, params)?.total();
    let (gu, gv) = raw_partials(p, params);
    let grad = weighted_dual_norm(&p.grid, &gu, &gv);
    let res = ode_residual(p, params)?;
    let max_rho = p.norm_sq().into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(SolveReport {
        energy,
        grad_norm: grad,
        residual_norm: res.interior_max(1),
        iterations: flow_iterations + newton_iterations,
        converged: grad <= tol,
        tol,
        flow_iterations,
        newton_iterations,
        sign_structure: (params.b2 == 0.0).then(|| SignStructure::of(p)),
        norm_bound_margin: params.norm_sq_target() - max_rho,
        neumann_defect: res.neumann_defect,
        energy_trace,
    })
}

/// `u ← |u|`, `v ← −|v|`; leaves the `b² = 0` energy unchanged.
fn reflect_signed(p: &mut Profile) {
    p.u.iter_mut().for_each(|u| *u = u.abs());
    p.v.iter_mut().for_each(|v| *v = -v.abs());
}

/// Stiffness of the quadratic (elastic) part, per component, as tridiagonals
/// over all nodes. `angular` adds the `k²/r²` mass term.
struct Stiffness {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Stiffness {
    fn new(grid: &RadialGrid, k2: f64) -> Self {
        let n = grid.len();
        let mut s = Stiffness {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        };
        for e in 0..n - 1 {
            let h = grid.h(e);
            let kappa = grid.edge_mass(e) / (h * h);
            s.diag[e] += kappa;
            s.diag[e + 1] += kappa;
            s.upper[e] -= kappa;
            s.lower[e + 1] -= kappa;
        }
        if k2 > 0.0 {
            let w = grid.weights();
            for i in 1..n {
                s.diag[i] += w[i] * k2 / (grid.r(i) * grid.r(i));
            }
        }
        s
    }
}

/// One implicit step `(W + τK) x⁺ = W x − τ W P'(x)/L` per component, with
/// the Dirichlet rows pinned.
fn flow_step(
    p: &Profile,
    params: &ModelParams,
    ku: &Stiffness,
    kv: &Stiffness,
    tau: f64,
) -> Profile {
    let g = &p.grid;
    let n = g.len();
    let w = g.weights();
    let pot = Potential::new(params);
    let mut out = p.clone();
    for (comp, stiff) in [(0usize, ku), (1, kv)] {
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let x = if comp == 0 { p.u[i] } else { p.v[i] };
            let pinned = i == n - 1 || (comp == 0 && i == 0);
            if pinned {
                diag[i] = 1.0;
                rhs[i] = x;
                continue;
            }
            let (pu, pv) = pot.grad(p.u[i], p.v[i]);
            let force = if comp == 0 { pu } else { pv };
            lower[i] = tau * stiff.lower[i];
            diag[i] = w[i] + tau * stiff.diag[i];
            upper[i] = tau * stiff.upper[i];
            rhs[i] = w[i] * x - tau * w[i] * force / params.l;
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs);
        if comp == 0 {
            out.u = rhs;
        } else {
            out.v = rhs;
        }
    }
    out
}

fn gradient_flow(
    p: &mut Profile,
    params: &ModelParams,
    target: f64,
    opts: &SolverOptions,
    trace: &mut Vec<f64>,
) -> Result<usize> {
    let k2 = params.abs_k().powi(2);
    let ku = Stiffness::new(&p.grid, k2);
    let kv = Stiffness::new(&p.grid, 0.0);
    let mut tau = 0.5 * params.l / params.a2;
    let tau_max = 1e6 * tau;
    let mut energy = reduced_energy(p, params)?;
    if opts.record_trace {
        trace.push(energy);
    }
    let mut iters = 0;
    while iters < opts.max_flow_iter {
        let (gu, gv) = raw_partials(p, params);
        if weighted_dual_norm(&p.grid, &gu, &gv) <= target {
            break;
        }
        iters += 1;
        let trial = flow_step(p, params, &ku, &kv, tau);
        let e = reduced_energy(&trial, params)?;
        if e <= energy {
            *p = trial;
            energy = e;
            if opts.record_trace {
                trace.push(energy);
            }
            tau = (1.5 * tau).min(tau_max);
        } else {
            tau *= 0.5;
            if tau < 1e-14 * params.l {
                break;
            }
        }
    }
    Ok(iters)
}

/// Damped Newton on the stationarity equations, Armijo on the gradient norm.
fn newton(p: &mut Profile, params: &ModelParams, tol: f64, max_iter: usize) -> Result<usize> {
    let g = p.grid.clone();
    let n = g.len();
    let w = g.weights();
    let k2 = params.abs_k().powi(2);
    let ku = Stiffness::new(&g, k2);
    let kv = Stiffness::new(&g, 0.0);
    let pot = Potential::new(params);
    let merit = |q: &Profile| {
        let (gu, gv) = raw_partials(q, params);
        weighted_dual_norm(&g, &gu, &gv)
    };
    let mut current = merit(p);
    let mut iters = 0;
    while current > tol && iters < max_iter {
        iters += 1;
        let (gu, gv) = raw_partials(p, params);
        // Unknowns per node i < n−1: (u_i, v_i); node n−1 (r = R) is pinned.
        let m = n - 1;
        let mut lower: Vec<Block> = vec![[[0.0; 2]; 2]; m];
        let mut diag: Vec<Block> = vec![[[0.0; 2]; 2]; m];
        let mut upper: Vec<Block> = vec![[[0.0; 2]; 2]; m];
        let mut rhs = vec![[0.0; 2]; m];
        for i in 0..m {
            let h = pot.hessian(p.u[i], p.v[i]);
            let s = w[i] / params.l;
            diag[i] = [
                [ku.diag[i] + s * h[0][0], s * h[0][1]],
                [s * h[1][0], kv.diag[i] + s * h[1][1]],
            ];
            lower[i] = [[ku.lower[i], 0.0], [0.0, kv.lower[i]]];
            upper[i] = [[ku.upper[i], 0.0], [0.0, kv.upper[i]]];
            rhs[i] = [-gu[i], -gv[i]];
        }
        // u₀ is a Dirichlet value: identity row, no coupling.
        diag[0][0] = [1.0, 0.0];
        diag[0][1][0] = 0.0;
        upper[0][0] = [0.0, 0.0];
        lower[1][0][0] = 0.0;
        rhs[0][0] = 0.0;
        let step = solve_block_tridiagonal(&lower, &diag, &upper, &rhs);
        if step.iter().any(|s| !s[0].is_finite() || !s[1].is_finite()) {
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-10 {
            let mut trial = p.clone();
            for i in 0..m {
                trial.u[i] += alpha * step[i][0];
                trial.v[i] += alpha * step[i][1];
            }
            let t = merit(&trial);
            if t <= (1.0 - 1e-4 * alpha) * current {
                *p = trial;
                current = t;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(iters)
}

/// One point of a continuation branch.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub b2: f64,
    pub params: ModelParams,
    pub profile: Profile,
    pub report: SolveReport,
}

/// Solves at `b2_targets[0] = 0` and warm-starts each following `b²` from the
/// previous solution, rescaled to the new `s₊`.
pub fn continuation_in_b2(
    params: &ModelParams,
    b2_targets: &[f64],
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> Result<Vec<BranchPoint>> {
    check_targets(b2_targets)?;
    let mut branch = Vec::with_capacity(b2_targets.len());
    let mut prev: Option<BranchPoint> = None;
    for &b2 in b2_targets {
        let point = continuation_step(params, b2, prev.as_ref(), grid, opts).map_err(|e| {
            Error::ContinuationFailed {
                b2,
                source: Box::new(e),
            }
        })?;
        branch.push(point.clone());
        prev = Some(point);
    }
    Ok(branch)
}

/// Like [`continuation_in_b2`] but records a failed step and carries on from
/// the last successful solution.
pub fn continuation_records(
    params: &ModelParams,
    b2_targets: &[f64],
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> Result<Vec<(f64, Result<BranchPoint>)>> {
    check_targets(b2_targets)?;
    let mut out = Vec::with_capacity(b2_targets.len());
    let mut prev: Option<BranchPoint> = None;
    for &b2 in b2_targets {
        let step = continuation_step(params, b2, prev.as_ref(), grid, opts);
        if let Ok(p) = &step {
            prev = Some(p.clone());
        }
        out.push((b2, step));
    }
    Ok(out)
}

fn check_targets(b2_targets: &[f64]) -> Result<()> {
    if b2_targets.is_empty() {
        return Err(Error::InvalidParams("empty b2 list".into()));
    }
    if b2_targets[0] != 0.0 {
        return Err(Error::InvalidParams(format!(
            "continuation must start at b2 = 0, got {}",
            b2_targets[0]
        )));
    }
    if b2_targets.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams(
            "b2 targets must be strictly ascending".into(),
        ));
    }
    Ok(())
}

fn continuation_step(
    params: &ModelParams,
    b2: f64,
    prev: Option<&BranchPoint>,
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> Result<BranchPoint> {
    let prm = params.with_b2(b2)?;
    let step_opts = match prev {
        None => opts.clone(),
        Some(prev) => {
            let scale = prm.s_plus / prev.params.s_plus;
            let mut start = prev.profile.clone();
            start.u.iter_mut().for_each(|x| *x *= scale);
            start.v.iter_mut().for_each(|x| *x *= scale);
            SolverOptions {
                init: Init::Profile(start),
                ..opts.clone()
            }
        }
    };
    let (profile, report) = minimize(&prm, grid, &step_opts)?;
    Ok(BranchPoint {
        b2,
        params: prm,
        profile,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_small_grid() {
        let prm = ModelParams::new(1.0, 0.0, 1.0, 0.1, 1.0, 1).unwrap();
        let grid = RadialGrid::uniform(1.0, 64).unwrap();
        let (p, rep) = minimize(&prm, &grid, &SolverOptions::default()).unwrap();
        assert!(rep.converged && rep.grad_norm <= 1e-9);
        assert!(rep.sign_structure.unwrap().holds());
        assert!(rep.norm_bound_holds());
        assert!(p.boundary_defect(&prm) == 0.0);
    }

    #[test]
    fn linear_init_reaches_same_minimizer() {
        let prm = ModelParams::new(1.0, 0.0, 1.0, 0.05, 1.0, 1).unwrap();
        let grid = RadialGrid::uniform(1.0, 64).unwrap();
        let (a, _) = minimize(&prm, &grid, &SolverOptions::default()).unwrap();
        let opts = SolverOptions {
            init: Init::Linear,
            ..Default::default()
        };
        let (b, _) = minimize(&prm, &grid, &opts).unwrap();
        assert!(super::super::l2_distance(&a, &b).unwrap() < 1e-8);
    }

    #[test]
    fn flow_trace_is_monotone() {
        let prm = ModelParams::new(1.0, 0.2, 1.0, 0.02, 1.0, 2).unwrap();
        let grid = RadialGrid::default_for(2, 1.0, 64).unwrap();
        let opts = SolverOptions {
            init: Init::Linear,
            record_trace: true,
            ..Default::default()
        };
        let (_, rep) = minimize(&prm, &grid, &opts).unwrap();
        assert!(rep.energy_trace.len() > 1);
        assert!(rep.energy_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let prm = ModelParams::new(1.0, 0.0, 1.0, 0.01, 1.0, 1).unwrap();
        let grid = RadialGrid::uniform(1.0, 64).unwrap();
        let opts = SolverOptions {
            init: Init::Linear,
            max_flow_iter: 3,
            max_newton_iter: 0,
            ..Default::default()
        };
        match minimize(&prm, &grid, &opts) {
            Err(Error::NonConvergence(b)) => assert!(!b.1.converged && b.1.flow_iterations == 3),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn continuation_requires_zero_start() {
        let prm = ModelParams::new(1.0, 0.0, 1.0, 0.1, 1.0, 1).unwrap();
        let grid = RadialGrid::uniform(1.0, 32).unwrap();
        let opts = SolverOptions::default();
        assert!(continuation_in_b2(&prm, &[0.1, 0.2], &grid, &opts).is_err());
        assert!(continuation_in_b2(&prm, &[0.0, 0.2, 0.1], &grid, &opts).is_err());
    }
}
