//! Second variation around the `b² = 0` solution and the exact energy-gap split.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dirichlet_parts, ldg_energy_2d, ring_map, Field2D, PolarGrid, RingFft};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::qtensor::{frame_f3, QTensor};

/// `I[Y](P, P)` evaluated directly and in the weighted (Hardy) form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondVariation {
    /// `½∫|∇P|² + (1/2L)∫|P|²(−a² + c²|Y|²)`
    pub direct: f64,
    /// `½∫ v²|∇U|²` with `P = vU`
    pub hardy: f64,
}

impl SecondVariation {
    pub fn relative_gap(&self) -> f64 {
        (self.direct - self.hardy).abs()
            / self
                .direct
                .abs()
                .max(self.hardy.abs())
                .max(f64::MIN_POSITIVE)
    }
}

const BOUNDARY_TOL: f64 = 1e-12;

fn check_perturbation(y: &Field2D, p: &Field2D, params: &ModelParams) -> Result<()> {
    params.require_b2_zero()?;
    params.require_finite_l()?;
    if y.grid != p.grid {
        return Err(Error::GridMismatch(
            "perturbation and solution grids differ".into(),
        ));
    }
    let b = p.boundary_max_abs();
    if b > BOUNDARY_TOL {
        return Err(Error::BoundaryNotVanishing(b));
    }
    Ok(())
}

/// `(1/2L)∫|P|²(−a² + c²|Y|²)`.
fn potential_quadratic(y: &Field2D, p: &Field2D, params: &ModelParams) -> f64 {
    let m = y.grid.angular();
    let w = y.grid.radial().weights();
    let dphi = y.grid.dphi();
    let mut total = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let s: f64 = (0..m)
            .map(|j| {
                let k = i * m + j;
                p.values[k].norm_sq() * (-params.a2 + params.c2 * y.values[k].norm_sq())
            })
            .sum();
        total += wi * dphi * s;
    }
    0.5 * total / params.l
}

/// Second variation of the energy at `y` (a `b² = 0` critical point with
/// `v < 0`) in direction `p`, which must vanish on the boundary ring.
pub fn second_variation(y: &Field2D, params: &ModelParams, p: &Field2D) -> Result<SecondVariation> {
    check_perturbation(y, p, params)?;
    let g = y.grid.radial();
    let n = g.intervals();
    let m = y.grid.angular();
    let f3 = frame_f3();
    let v: Vec<f64> = (0..=n).map(|i| y.at(i, 0).dot(&f3)).collect();
    if let Some((node, &value)) = v.iter().enumerate().find(|(_, &x)| x >= -1e-10) {
        return Err(Error::DecompositionInvalid { node, value });
    }
    let (radial, angular) = dirichlet_parts(p);
    let direct = radial + angular + potential_quadratic(y, p, params);

    // U = P / v on every ring; v depends on r only.
    let u: Vec<QTensor> = p
        .values
        .iter()
        .enumerate()
        .map(|(k, q)| *q * (1.0 / v[k / m]))
        .collect();
    let dphi = y.grid.dphi();
    let mut hardy = 0.0;
    for e in 0..n {
        let h = g.h(e);
        let kappa = g.edge_mass(e) / (h * h);
        let s: f64 = (0..m)
            .map(|j| (u[(e + 1) * m + j] - u[e * m + j]).norm_sq())
            .sum();
        hardy += 0.5 * kappa * v[e] * v[e + 1] * dphi * s;
    }
    let fft = RingFft::new(m);
    let u_field = Field2D {
        grid: y.grid.clone(),
        values: u,
    };
    let du = ring_map(&u_field, |x| fft.d1(x));
    for i in 1..=n {
        let r = g.r(i);
        let s: f64 = du[i * m..(i + 1) * m].iter().map(QTensor::norm_sq).sum();
        hardy += g.weights()[i] * dphi * 0.5 * v[i] * v[i] * s / (r * r);
    }
    Ok(SecondVariation { direct, hardy })
}

/// `F(Y + P) − F(Y)` directly and as `I[Y](P,P) + (c²/4L)∫(|P|² + 2 Y:P)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyGap {
    pub direct: f64,
    pub decomposition: f64,
}

impl EnergyGap {
    pub fn relative_gap(&self) -> f64 {
        (self.direct - self.decomposition).abs()
            / self
                .direct
                .abs()
                .max(self.decomposition.abs())
                .max(f64::MIN_POSITIVE)
    }
}

pub fn energy_gap(y: &Field2D, g: &Field2D, params: &ModelParams) -> Result<EnergyGap> {
    let p = g.sub(y)?;
    check_perturbation(y, &p, params)?;
    let direct = ldg_energy_2d(g, params)? - ldg_energy_2d(y, params)?;
    let (radial, angular) = dirichlet_parts(&p);
    let quad = radial + angular + potential_quadratic(y, &p, params);
    let m = y.grid.angular();
    let w = y.grid.radial().weights();
    let dphi = y.grid.dphi();
    let mut rest = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let s: f64 = (0..m)
            .map(|j| {
                let k = i * m + j;
                let t = p.values[k].norm_sq() + 2.0 * y.values[k].dot(&p.values[k]);
                t * t
            })
            .sum();
        rest += wi * dphi * s;
    }
    Ok(EnergyGap {
        direct,
        decomposition: quad + 0.25 * params.c2 * rest / params.l,
    })
}

/// Families of boundary-vanishing perturbations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationKind {
    /// `(1 − r²/R²)` times a random polynomial of degree ≤ 4 in `x, y`.
    Polynomial,
    /// A bump of width `R/10` at the centre.
    CoreBump,
    /// Concentrated in a layer near `r = R`.
    BoundaryLayer,
}

fn random_tensor(rng: &mut ChaCha8Rng) -> QTensor {
    QTensor::from_array(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

/// A random perturbation of the given kind, normalised to `∫|P|² = 1`.
pub fn random_perturbation(
    grid: &PolarGrid,
    kind: PerturbationKind,
    rng: &mut ChaCha8Rng,
) -> Field2D {
    let big_r = grid.radial().radius();
    let field = match kind {
        PerturbationKind::Polynomial => {
            let mut terms = Vec::new();
            for deg in 0..=4 {
                for a in 0..=deg {
                    terms.push((a, deg - a, random_tensor(rng)));
                }
            }
            Field2D::from_sampler(grid, |r, phi| {
                let (x, y) = (r * phi.cos() / big_r, r * phi.sin() / big_r);
                let mut q = QTensor::ZERO;
                for (a, b, c) in &terms {
                    q += *c * (x.powi(*a) * y.powi(*b));
                }
                q * (1.0 - (r / big_r).powi(2))
            })
        }
        PerturbationKind::CoreBump => {
            let (c0, c1) = (random_tensor(rng), random_tensor(rng));
            let sigma = 0.1 * big_r;
            Field2D::from_sampler(grid, |r, phi| {
                let x = r * phi.cos() / sigma;
                (c0 + c1 * x) * ((-(r / sigma).powi(2)).exp() * (1.0 - (r / big_r).powi(2)))
            })
        }
        PerturbationKind::BoundaryLayer => {
            let (c0, c1, c2) = (random_tensor(rng), random_tensor(rng), random_tensor(rng));
            Field2D::from_sampler(grid, |r, phi| {
                let t = r / big_r;
                let layer = t.powi(16) * (1.0 - t * t);
                (c0 + c1 * (2.0 * phi).cos() + c2 * (3.0 * phi).sin()) * layer
            })
        }
    };
    let norm = field.l2_norm_sq().sqrt();
    let mut out = field.scale(1.0 / norm);
    // exact zeros on the boundary ring
    let n = grid.radial().intervals();
    let m = grid.angular();
    out.values[n * m..]
        .iter_mut()
        .for_each(|q| *q = QTensor::ZERO);
    out
}

/// `count` perturbations from a fixed seed: mostly polynomial, with every
/// fifth a core bump and every fifth a boundary layer.
pub fn sample_perturbations(grid: &PolarGrid, count: usize, seed: u64) -> Vec<Field2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let kind = match i % 5 {
                1 => PerturbationKind::CoreBump,
                3 => PerturbationKind::BoundaryLayer,
                _ => PerturbationKind::Polynomial,
            };
            random_perturbation(grid, kind, &mut rng)
        })
        .collect()
}

/// Sample statistics of the second variation over a perturbation set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    /// Smallest Rayleigh quotient `I[Y](P,P)/∫|P|²` over the sample (not a proven bound).
    pub min_quotient: f64,
    /// Largest relative difference between the direct and Hardy forms.
    pub max_form_gap: f64,
    pub quotients: Vec<f64>,
}

pub fn coercivity(
    y: &Field2D,
    params: &ModelParams,
    perturbations: &[Field2D],
) -> Result<CoercivityReport> {
    let mut quotients = Vec::with_capacity(perturbations.len());
    let mut max_form_gap: f64 = 0.0;
    for p in perturbations {
        let sv = second_variation(y, params, p)?;
        quotients.push(sv.direct / p.l2_norm_sq());
        max_form_gap = max_form_gap.max(sv.relative_gap());
    }
    Ok(CoercivityReport {
        min_quotient: quotients.iter().copied().fold(f64::INFINITY, f64::min),
        max_form_gap,
        quotients,
    })
}
