//! Examples for the reduced radial problem.

use nematic_core::harmonic::{explicit_profile, Branch};
use nematic_core::reduced::{
    continuation_in_b2, energy_parts, l2_distance, minimize, ode_residual, reduced_energy,
    reduced_gradient, reduced_gradient_parts, Init, Profile, SolverOptions,
};
use nematic_core::{Error, ModelParams, RadialGrid};

fn params(b2: f64, l: f64, k: i32) -> ModelParams {
    ModelParams::new(1.0, b2, 1.0, l, 1.0, k).unwrap()
}

/// Independent oracle: fine trapezoid in r with Richardson extrapolation,
/// applied to the exact integrand of the linear-ramp profile.
fn ramp_oracle(prm: &ModelParams) -> f64 {
    let (ub, vb) = prm.boundary_uv();
    let k2 = prm.abs_k().powi(2);
    let integrand = |r: f64| {
        let u = ub * r;
        let v = vb;
        let rho = u * u + v * v;
        let pot = -0.5 * prm.a2 * rho + 0.25 * prm.c2 * rho * rho
            - prm.b2 / (3.0 * 6f64.sqrt()) * v * (v * v - 3.0 * u * u);
        (0.5 * (ub * ub + k2 * ub * ub) + pot / prm.l) * r
    };
    let trap = |n: usize| {
        let h = 1.0 / n as f64;
        let mut s = 0.5 * (integrand(0.0) + integrand(1.0));
        for i in 1..n {
            s += integrand(i as f64 * h);
        }
        s * h
    };
    let (a, b) = (trap(5120), trap(10240));
    (4.0 * b - a) / 3.0
}

#[test]
fn ramp_energy_matches_oracle() {
    for b2 in [0.0, 0.5] {
        let prm = params(b2, 0.1, 1);
        // the ramp is linear, so P1 gradients are exact; refine the lumped quadrature
        let e = |n| {
            reduced_energy(
                &Profile::linear(&prm, &RadialGrid::uniform(1.0, n).unwrap()),
                &prm,
            )
            .unwrap()
        };
        let (e1, e2) = (e(2048), e(4096));
        let extrapolated = (4.0 * e2 - e1) / 3.0;
        let oracle = ramp_oracle(&prm);
        assert!(
            ((extrapolated - oracle) / oracle).abs() < 1e-8,
            "{extrapolated} vs {oracle}"
        );
        assert!(((e2 - oracle) / oracle).abs() < 1e-5);
    }
}

#[test]
fn energy_bounded_below_by_well_depth() {
    let prm = params(0.0, 0.02, 1);
    let grid = RadialGrid::uniform(1.0, 256).unwrap();
    let (_, rep) = minimize(&prm, &grid, &SolverOptions::default()).unwrap();
    let floor = -(prm.a2 * prm.a2 / (4.0 * prm.c2 * prm.l)) * 0.5;
    assert!(rep.energy >= floor);
}

#[test]
fn minimizer_energy_converges_at_second_order() {
    let prm = params(0.0, 0.1, 1);
    let energies: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&n| {
            let grid = RadialGrid::uniform(1.0, n).unwrap();
            minimize(&prm, &grid, &SolverOptions::default())
                .unwrap()
                .1
                .energy
        })
        .collect();
    for w in energies.windows(3) {
        let ratio = (w[0] - w[1]) / (w[1] - w[2]);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn gradient_at_explicit_profile_is_potential_dominated() {
    // At b2 = 0 the explicit profile lies on the bottom of the well and the
    // potential part vanishes identically; with b2 > 0 it does not.
    let limit = ModelParams::new(1.0, 0.0, 1.0, 1e-4, 1.0, 1).unwrap();
    let grid = RadialGrid::uniform(1.0, 256).unwrap();
    let p = explicit_profile(Branch::Minus, &limit, &grid).unwrap();
    let parts = reduced_gradient_parts(&p, &limit).unwrap();
    assert!(parts
        .potential_u
        .iter()
        .chain(&parts.potential_v)
        .all(|x| x.abs() < 1e-9));

    let prm = ModelParams::new(1.0, 0.5, 1.0, 1e-4, 1.0, 1).unwrap();
    let parts = reduced_gradient_parts(&p, &prm).unwrap();
    let norm = |a: &[f64], b: &[f64]| {
        let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * x + y * y).collect();
        grid.integrate(&sq).sqrt()
    };
    let el = norm(&parts.elastic_u, &parts.elastic_v);
    let pot = norm(&parts.potential_u, &parts.potential_v);
    assert!(pot > 100.0 * el, "potential {pot} elastic {el}");
}

#[test]
fn gradient_vanishes_at_minimizer_and_is_linear_in_perturbation() {
    let prm = params(0.3, 0.05, 1);
    let grid = RadialGrid::uniform(1.0, 128).unwrap();
    let (p, rep) = minimize(&prm, &grid, &SolverOptions::default()).unwrap();
    assert!(rep.grad_norm <= 1e-9);
    let (gu, gv) = reduced_gradient(&p, &prm).unwrap();
    let n = grid.intervals();
    assert_eq!((gu[0], gu[n], gv[n]), (0.0, 0.0, 0.0));
    // zero perturbation, zero change
    let (hu, hv) = reduced_gradient(&p.clone(), &prm).unwrap();
    assert_eq!((gu, gv), (hu, hv));
}

#[test]
fn converged_residual_small_in_interior() {
    let prm = params(0.0, 0.1, 1);
    let grid = RadialGrid::uniform(1.0, 512).unwrap();
    let (p, rep) = minimize(&prm, &grid, &SolverOptions::default()).unwrap();
    let res = ode_residual(&p, &prm).unwrap();
    assert!(res.interior_max(3) <= 1e-3);
    assert!(rep.residual_norm <= 1e-3);
    assert!(res.neumann_defect < 1e-3);
}

#[test]
fn residual_bounded_by_tolerance_plus_h2_on_graded_grid() {
    // On graded grids the FD residual differs from the gradient by O(h²).
    let prm = params(0.0, 0.05, 2);
    let mut bounds = Vec::new();
    for n in [64, 128, 256] {
        let grid = RadialGrid::with_first_node(1.0, n, 1e-3).unwrap();
        let (p, _) = minimize(&prm, &grid, &SolverOptions::default()).unwrap();
        let res = ode_residual(&p, &prm).unwrap().interior_max(1);
        let hmax = (0..n).map(|e| grid.h(e)).fold(0.0, f64::max);
        bounds.push(res / (1e-9 + hmax * hmax));
    }
    // the constant C stays bounded under refinement
    assert!(bounds.windows(2).all(|w| w[1] < 2.0 * w[0]), "{bounds:?}");
}

#[test]
fn ode_residual_rejects_small_grids() {
    let prm = params(0.0, 0.1, 1);
    let nodes: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    assert!(matches!(
        RadialGrid::from_nodes(nodes),
        Err(Error::GridTooSmall { .. })
    ));
    let grid = RadialGrid::uniform(1.0, 16).unwrap();
    assert!(ode_residual(&Profile::linear(&prm, &grid), &prm).is_ok());
}

#[test]
fn distance_to_limit_shrinks_with_l() {
    let grid = RadialGrid::uniform(1.0, 256).unwrap();
    let limit = ModelParams::new(1.0, 0.0, 1.0, 0.0, 1.0, 1).unwrap();
    let y = explicit_profile(Branch::Minus, &limit, &grid).unwrap();
    let d: Vec<f64> = [0.1, 0.03, 0.01]
        .iter()
        .map(|&l| {
            let (p, _) = minimize(&params(0.0, l, 1), &grid, &SolverOptions::default()).unwrap();
            l2_distance(&p, &y).unwrap()
        })
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2] && d[2] < 0.05);
}

#[test]
fn continuation_branch() {
    let prm = params(0.0, 0.1, 1);
    let grid = RadialGrid::uniform(1.0, 256).unwrap();
    let opts = SolverOptions::default();
    let branch = continuation_in_b2(&prm, &[0.0, 0.1, 0.2], &grid, &opts).unwrap();
    assert_eq!(branch.len(), 3);
    let (p0, r0) = minimize(&prm, &grid, &opts).unwrap();
    assert_eq!(branch[0].profile, p0);
    assert_eq!(branch[0].report.energy.to_bits(), r0.energy.to_bits());
    for w in branch.windows(2) {
        assert!((w[1].report.energy - w[0].report.energy).abs() <= 0.5);
    }
    let n = grid.intervals();
    for bp in &branch {
        let s = nematic_core::params::s_plus(1.0, bp.b2, 1.0);
        assert_eq!(bp.profile.u[n], s / 2f64.sqrt());
        assert!(bp.report.converged);
        assert!(energy_parts(&bp.profile, &bp.params).is_ok());
    }
}

#[test]
fn continuation_identifies_failing_step() {
    let prm = params(0.0, 0.1, 1);
    let grid = RadialGrid::uniform(1.0, 64).unwrap();
    let opts = SolverOptions {
        max_flow_iter: 0,
        max_newton_iter: 0,
        init: Init::Linear,
        ..Default::default()
    };
    match continuation_in_b2(&prm, &[0.0, 0.1], &grid, &opts) {
        Err(Error::ContinuationFailed { b2, source }) => {
            assert_eq!(b2, 0.0);
            assert!(matches!(*source, Error::NonConvergence(_)));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn report_json_starts_with_contract_keys() {
    let prm = params(0.0, 0.1, 1);
    let grid = RadialGrid::uniform(1.0, 64).unwrap();
    let (_, rep) = minimize(&prm, &grid, &SolverOptions::default()).unwrap();
    let json = serde_json::to_string(&rep).unwrap();
    let keys = [
        "\"energy\"",
        "\"grad_norm\"",
        "\"residual_norm\"",
        "\"iterations\"",
        "\"converged\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert!(!json.contains("energy_trace"));
}
