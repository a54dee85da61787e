//! Closed-form solutions of the vanishing-elasticity (harmonic map) limit.

use std::f64::consts::{FRAC_PI_3, PI};
use std::fmt;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::derivative;
use crate::field2d::{dirichlet_energy, Field2D, PolarGrid};
use crate::grid::RadialGrid;
use crate::params::ModelParams;
use crate::qtensor::{ansatz, boundary_tensor, QTensor};
use crate::reduced::{elastic_parts, Profile};

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Which explicit harmonic map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `Y₋`, the minimiser.
    Minus,
    /// `Y₊`, with `v > 0` at the core.
    Plus,
    /// The uniaxial field `U` escaping into the third dimension (even `k`).
    UniaxialEscape,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
            Branch::UniaxialEscape => "uniaxial",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "minus" | "y-" => Ok(Branch::Minus),
            "plus" | "y+" => Ok(Branch::Plus),
            "uniaxial" | "u" | "escape" => Ok(Branch::UniaxialEscape),
            other => Err(format!(
                "unknown branch '{other}' (expected minus, plus or uniaxial)"
            )),
        }
    }
}

fn ratio_pow(r: f64, big_r: f64, k: i32) -> f64 {
    (r / big_r).powi(k.abs())
}

/// `(u₋(r), v₋(r))` for amplitude `s`.
pub fn minus_uv(r: f64, big_r: f64, k: i32, s: f64) -> (f64, f64) {
    let t = ratio_pow(r, big_r, k);
    let d = t * t + 3.0;
    (
        2.0 * SQRT2 * s * t / d,
        (2.0f64 / 3.0).sqrt() * s * (t * t - 3.0) / d,
    )
}

/// `(u₊(r), v₊(r))` for amplitude `s`.
pub fn plus_uv(r: f64, big_r: f64, k: i32, s: f64) -> (f64, f64) {
    let t = ratio_pow(r, big_r, k);
    let d = 3.0 * t * t + 1.0;
    (
        2.0 * SQRT2 * s * t / d,
        (2.0f64 / 3.0).sqrt() * s * (1.0 - 3.0 * t * t) / d,
    )
}

/// Pointwise `(u, v)` of `Y±`.
pub fn explicit_uv(branch: Branch, r: f64, params: &ModelParams) -> Result<(f64, f64)> {
    match branch {
        Branch::Minus => Ok(minus_uv(r, params.r, params.k, params.s_plus)),
        Branch::Plus => Ok(plus_uv(r, params.r, params.k, params.s_plus)),
        Branch::UniaxialEscape => Err(Error::InvalidBranch("uniaxial")),
    }
}

/// Samples `(u±, v±)` on `grid`. Requires `b² = 0`.
pub fn explicit_profile(
    branch: Branch,
    params: &ModelParams,
    grid: &RadialGrid,
) -> Result<Profile> {
    params.require_b2_zero()?;
    let mut u = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        let (a, b) = explicit_uv(branch, r, params)?;
        u.push(a);
        v.push(b);
    }
    Profile::new(grid.clone(), u, v)
}

/// `ψ±(r)`; the value at `r = R` is exactly `π/3`.
pub fn psi_value(branch: Branch, r: f64, big_r: f64, k: i32) -> Result<f64> {
    let t = ratio_pow(r, big_r, k);
    if t == 1.0 {
        return Ok(FRAC_PI_3);
    }
    match branch {
        Branch::Minus => Ok(2.0 * (t / SQRT3).atan()),
        // 2 arctan(1/(√3 t)), continuous up to ψ₊(0) = π
        Branch::Plus => Ok(2.0 * 1f64.atan2(SQRT3 * t)),
        Branch::UniaxialEscape => Err(Error::InvalidBranch("uniaxial")),
    }
}

/// Samples of the angle `ψ` with `u = √(2/3)s₊ sin ψ`, `v = −√(2/3)s₊ cos ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiProfile {
    pub grid: RadialGrid,
    pub psi: Vec<f64>,
}

impl PsiProfile {
    pub fn to_profile(&self, params: &ModelParams) -> Profile {
        let a = (2.0f64 / 3.0).sqrt() * params.s_plus;
        let (u, v) = self
            .psi
            .iter()
            .map(|p| {
                let (s, c) = p.sin_cos();
                (a * s, -a * c)
            })
            .unzip();
        Profile {
            grid: self.grid.clone(),
            u,
            v,
        }
    }
}

pub fn psi_of_branch(
    branch: Branch,
    params: &ModelParams,
    grid: &RadialGrid,
) -> Result<PsiProfile> {
    params.require_b2_zero()?;
    let psi = grid
        .nodes()
        .iter()
        .map(|&r| psi_value(branch, r, params.r, params.k))
        .collect::<Result<_>>()?;
    Ok(PsiProfile {
        grid: grid.clone(),
        psi,
    })
}

/// `α(r) = sin²ψ − r²ψ'²/k²` with a fourth-order derivative.
pub fn first_integral_defect(p: &PsiProfile, k: i32) -> Vec<f64> {
    first_integral_defect_with_stencil(p, k, 5)
}

/// As [`first_integral_defect`] with a `width`-point derivative stencil
/// (width 3 is second order, 5 is fourth order).
pub fn first_integral_defect_with_stencil(p: &PsiProfile, k: i32, width: usize) -> Vec<f64> {
    let dpsi = derivative(p.grid.nodes(), &p.psi, width);
    let k2 = f64::from(k).powi(2);
    p.grid
        .nodes()
        .iter()
        .zip(&p.psi)
        .zip(&dpsi)
        .map(|((r, psi), d)| psi.sin().powi(2) - r * r * d * d / k2)
        .collect()
}

/// Value of the constrained energy, which is `+∞` off the constraint set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum E0Value {
    Finite(f64),
    Infinite { max_deviation: f64 },
}

impl E0Value {
    pub fn is_finite(&self) -> bool {
        matches!(self, E0Value::Finite(_))
    }

    pub fn finite(self) -> Result<f64> {
        match self {
            E0Value::Finite(e) => Ok(e),
            E0Value::Infinite { max_deviation } => Err(Error::ConstraintViolated { max_deviation }),
        }
    }
}

/// Tolerance on `|u² + v² − (2/3)s₊²|`.
pub const CONSTRAINT_TOL: f64 = 1e-8;

/// Constrained energy `∫ ½(u'² + v'² + k²u²/r²) r dr` if `u² + v² = (2/3)s₊²`.
pub fn e0_energy(p: &Profile, params: &ModelParams) -> Result<E0Value> {
    p.check_lengths()?;
    let target = params.norm_sq_target();
    let dev = p
        .norm_sq()
        .iter()
        .map(|n| (n - target).abs())
        .fold(0.0, f64::max);
    if dev > CONSTRAINT_TOL {
        return Ok(E0Value::Infinite { max_deviation: dev });
    }
    let (g, a) = elastic_parts(p, params.abs_k());
    Ok(E0Value::Finite(g + a))
}

/// The same energy as [`e0_energy`] in the angle variable,
/// `(2/3)s₊² · ½∫(rψ'² + k² sin²ψ / r) dr`, using chords for `ψ'`.
pub fn e0_energy_psi(p: &PsiProfile, params: &ModelParams) -> f64 {
    let g = &p.grid;
    let k2 = params.abs_k().powi(2);
    let mut total = 0.0;
    for e in 0..g.intervals() {
        let h = g.h(e);
        let chord = 2.0 * (0.5 * (p.psi[e + 1] - p.psi[e])).sin() / h;
        total += 0.5 * g.edge_mass(e) * chord * chord;
    }
    for i in 1..g.len() {
        let r = g.r(i);
        total += g.weights()[i] * 0.5 * k2 * p.psi[i].sin().powi(2) / (r * r);
    }
    params.norm_sq_target() * total
}

/// Closed-form and quadrature values of `½∫_{B_R} |∇Q|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletEnergy {
    pub closed_form: f64,
    pub quadrature: f64,
}

impl DirichletEnergy {
    pub fn relative_error(&self) -> f64 {
        ((self.quadrature - self.closed_form) / self.closed_form).abs()
    }
}

/// Exact Dirichlet energy: `(2/3)|k|πs₊²` for `Y₋`, `2|k|πs₊²` for `Y₊` and `U`.
pub fn dirichlet_closed_form(branch: Branch, params: &ModelParams) -> Result<f64> {
    let s2 = params.s_plus * params.s_plus;
    let k = params.abs_k();
    match branch {
        Branch::Minus => Ok(2.0 / 3.0 * k * PI * s2),
        Branch::Plus => Ok(2.0 * k * PI * s2),
        Branch::UniaxialEscape => {
            if params.k % 2 != 0 {
                Err(Error::OddK(params.k))
            } else {
                Ok(2.0 * k * PI * s2)
            }
        }
    }
}

pub fn dirichlet_energy_2d(
    branch: Branch,
    params: &ModelParams,
    grid: &PolarGrid,
) -> Result<DirichletEnergy> {
    params.require_b2_zero()?;
    let closed_form = dirichlet_closed_form(branch, params)?;
    let field = Field2D::from_sampler(grid, branch_field(branch, params)?);
    Ok(DirichletEnergy {
        closed_form,
        quadrature: dirichlet_energy(&field),
    })
}

/// Unit vector of the escaped director, `|k|/2`-fold winding.
pub fn escape_director(r: f64, phi: f64, params: &ModelParams) -> Result<[f64; 3]> {
    if params.k % 2 != 0 {
        return Err(Error::OddK(params.k));
    }
    let t = (r / params.r).powi(params.k.abs() / 2);
    let d = 1.0 + t * t;
    let (s, c) = (0.5 * f64::from(params.k) * phi).sin_cos();
    let a = 2.0 * t / d;
    let m3 = f64::from(params.k.signum()) * (1.0 - t * t) / d;
    Ok([a * c, a * s, m3])
}

/// `U = s₊(m ⊗ m − I/3)`.
pub fn uniaxial_escape_field(r: f64, phi: f64, params: &ModelParams) -> Result<QTensor> {
    Ok(QTensor::uniaxial(
        params.s_plus,
        escape_director(r, phi, params)?,
    ))
}

/// A rational function `num(ζ)/den(ζ)`, coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

impl Rational {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Self {
        Rational { num, den }
    }

    /// `(ζ/R)^n` for `n ≥ 0`, `(R/ζ)^{|n|}` for `n < 0`.
    pub fn power(n: i32, big_r: f64) -> Self {
        let mono = |m: usize, c: f64| {
            let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
            v[m] = Complex64::new(c, 0.0);
            v
        };
        let m = n.unsigned_abs() as usize;
        let scale = big_r.powi(m as i32);
        if n >= 0 {
            Rational::new(mono(m, 1.0), mono(0, scale))
        } else {
            Rational::new(mono(0, scale), mono(m, 1.0))
        }
    }

    pub fn num_at(&self, z: Complex64) -> Complex64 {
        horner(&self.num, z)
    }

    pub fn den_at(&self, z: Complex64) -> Complex64 {
        horner(&self.den, z)
    }
}

/// `m = (2 Re f, 2 Im f, 1 − |f|²)/(1 + |f|²)`, with poles sent to `(0, 0, −1)`.
pub fn sphere_map(f: &Rational, x: f64, y: f64) -> [f64; 3] {
    let z = Complex64::new(x, y);
    let (p, q) = (f.num_at(z), f.den_at(z));
    if p.norm() <= q.norm() {
        let w = p / q;
        let n2 = w.norm_sqr();
        [
            2.0 * w.re / (1.0 + n2),
            2.0 * w.im / (1.0 + n2),
            (1.0 - n2) / (1.0 + n2),
        ]
    } else {
        // g = 1/f is bounded here
        let g = q / p;
        let n2 = g.norm_sqr();
        [
            2.0 * g.re / (1.0 + n2),
            -2.0 * g.im / (1.0 + n2),
            (n2 - 1.0) / (1.0 + n2),
        ]
    }
}

/// `(m, U)` with `U = √(3/2)(m ⊗ m − I/3)`, a unit-norm tensor.
pub fn meromorphic_harmonic_map(f: &Rational, x: f64, y: f64) -> ([f64; 3], QTensor) {
    let m = sphere_map(f, x, y);
    (m, QTensor::uniaxial(1.5f64.sqrt(), m))
}

/// Five-point Cartesian residual `Δm + |∇m|² m` of the sphere map at `(x, y)`.
pub fn sphere_map_residual(f: &Rational, x: f64, y: f64, h: f64) -> [f64; 3] {
    let c = sphere_map(f, x, y);
    let e = sphere_map(f, x + h, y);
    let w = sphere_map(f, x - h, y);
    let n = sphere_map(f, x, y + h);
    let s = sphere_map(f, x, y - h);
    let mut grad2 = 0.0;
    for a in 0..3 {
        grad2 += ((e[a] - w[a]) / (2.0 * h)).powi(2) + ((n[a] - s[a]) / (2.0 * h)).powi(2);
    }
    let mut out = [0.0; 3];
    for a in 0..3 {
        out[a] = (e[a] + w[a] + n[a] + s[a] - 4.0 * c[a]) / (h * h) + grad2 * c[a];
    }
    out
}

type Sampler = Box<dyn Fn(f64, f64) -> QTensor + Send + Sync>;

/// Pointwise evaluator `(r, φ) ↦ Q` of an explicit field. Requires `b² = 0`.
pub fn branch_field(branch: Branch, params: &ModelParams) -> Result<Sampler> {
    params.require_b2_zero()?;
    let p = *params;
    match branch {
        Branch::Minus => Ok(Box::new(move |r, phi| {
            let (u, v) = minus_uv(r, p.r, p.k, p.s_plus);
            ansatz(u, v, phi, p.k)
        })),
        Branch::Plus => Ok(Box::new(move |r, phi| {
            let (u, v) = plus_uv(r, p.r, p.k, p.s_plus);
            ansatz(u, v, phi, p.k)
        })),
        Branch::UniaxialEscape => {
            if p.k % 2 != 0 {
                return Err(Error::OddK(p.k));
            }
            Ok(Box::new(move |r, phi| {
                uniaxial_escape_field(r, phi, &p).expect("k checked even")
            }))
        }
    }
}

/// Residual of the harmonic map equation on the interior rings.
#[derive(Clone, Debug)]
pub struct HmResidual {
    /// Per node, `(N+1) × M` ring-major; zero on the centre and boundary rings.
    pub values: Vec<QTensor>,
    pub max: f64,
    /// `(∫ |res|² dx)^{1/2}` over the interior rings.
    pub l2: f64,
    /// `max_φ |Q(R, φ) − s₊Q_k(φ)|`.
    pub boundary_mismatch: f64,
}

/// `ΔQ + (3/(2s₊²))|∇Q|² Q` at every interior polar node, from a five-point
/// Cartesian stencil on `sampler` with step equal to the local radial spacing.
pub fn hm_residual<F>(sampler: F, params: &ModelParams, grid: &PolarGrid) -> Result<HmResidual>
where
    F: Fn(f64, f64) -> QTensor,
{
    let radial = grid.radial();
    let n = radial.intervals();
    let m = grid.angular();
    let target = params.norm_sq_target();
    let at = |x: f64, y: f64| sampler(x.hypot(y), y.atan2(x));
    let coef = 1.5 / (params.s_plus * params.s_plus);
    let mut values = vec![QTensor::ZERO; (n + 1) * m];
    let mut dev: f64 = 0.0;
    let mut max: f64 = 0.0;
    let mut l2 = 0.0;
    let mut boundary_mismatch: f64 = 0.0;
    for i in 0..=n {
        let r = radial.r(i);
        let h = if i == 0 || i == n {
            0.0
        } else {
            radial.h(i - 1).min(radial.h(i))
        };
        for j in 0..m {
            let phi = grid.phi(j);
            let q = sampler(r, phi);
            dev = dev.max((q.norm_sq() - target).abs());
            if i == n {
                boundary_mismatch =
                    boundary_mismatch.max((q - boundary_tensor(phi, params)).max_abs());
            }
            if i == 0 || i == n {
                continue;
            }
            let (x, y) = (r * phi.cos(), r * phi.sin());
            let e = at(x + h, y);
            let w = at(x - h, y);
            let no = at(x, y + h);
            let so = at(x, y - h);
            let dx = (e - w) * (0.5 / h);
            let dy = (no - so) * (0.5 / h);
            let lap = (e + w + no + so - q * 4.0) * (1.0 / (h * h));
            let res = lap + q * (coef * (dx.norm_sq() + dy.norm_sq()));
            let a = res.max_abs();
            max = max.max(a);
            l2 += radial.weights()[i] * grid.dphi() * res.norm_sq();
            values[i * m + j] = res;
        }
    }
    if dev > CONSTRAINT_TOL * target.max(1.0) {
        return Err(Error::ConstraintViolated { max_deviation: dev });
    }
    Ok(HmResidual {
        values,
        max,
        l2: l2.sqrt(),
        boundary_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: i32) -> ModelParams {
        ModelParams::new(1.0, 0.0, 1.0, 0.0, 1.0, k).unwrap()
    }

    #[test]
    fn explicit_boundary_and_core_values() {
        for k in [-3, -1, 1, 2, 3] {
            let p = params(k);
            let s = p.s_plus;
            let (u, v) = minus_uv(1.0, 1.0, k, s);
            assert!((u - s / SQRT2).abs() < 1e-15 && (v + s / 6f64.sqrt()).abs() < 1e-15);
            let (u, v) = minus_uv(0.0, 1.0, k, s);
            assert_eq!(u, 0.0);
            assert!((v + (2.0f64 / 3.0).sqrt() * s).abs() < 1e-15);
            let (u, v) = plus_uv(1.0, 1.0, k, s);
            assert!((u - s / SQRT2).abs() < 1e-15 && (v + s / 6f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn psi_round_trip() {
        let p = params(2);
        let grid = RadialGrid::uniform(1.0, 64).unwrap();
        for b in [Branch::Minus, Branch::Plus] {
            let a = psi_of_branch(b, &p, &grid).unwrap().to_profile(&p);
            let e = explicit_profile(b, &p, &grid).unwrap();
            for i in 0..grid.len() {
                assert!((a.u[i] - e.u[i]).abs() < 1e-13 && (a.v[i] - e.v[i]).abs() < 1e-13);
            }
        }
        assert_eq!(psi_value(Branch::Plus, 0.0, 1.0, 1).unwrap(), PI);
        assert_eq!(psi_value(Branch::Minus, 0.0, 1.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn first_integral_trivial_cases() {
        let grid = RadialGrid::uniform(1.0, 32).unwrap();
        let half = PsiProfile {
            grid: grid.clone(),
            psi: vec![PI / 2.0; 33],
        };
        assert!(first_integral_defect(&half, 1)
            .iter()
            .all(|a| (a - 1.0).abs() < 1e-15));
        let zero = PsiProfile {
            grid,
            psi: vec![0.0; 33],
        };
        assert!(first_integral_defect(&zero, 1).iter().all(|a| *a == 0.0));
    }

    #[test]
    fn uniaxial_branch_rejected_for_profiles() {
        let p = params(2);
        let grid = RadialGrid::uniform(1.0, 32).unwrap();
        assert!(matches!(
            explicit_profile(Branch::UniaxialEscape, &p, &grid),
            Err(Error::InvalidBranch(_))
        ));
        assert!(matches!(
            uniaxial_escape_field(0.5, 0.0, &params(3)),
            Err(Error::OddK(3))
        ));
    }

    #[test]
    fn escape_director_limits() {
        let p = params(2);
        let m = escape_director(0.0, 0.3, &p).unwrap();
        assert_eq!(m, [0.0, 0.0, 1.0]);
        let m = escape_director(1.0, 0.7, &p).unwrap();
        assert!((m[0] - 0.7f64.cos()).abs() < 1e-15 && (m[1] - 0.7f64.sin()).abs() < 1e-15);
        assert_eq!(m[2], 0.0);
    }

    #[test]
    fn meromorphic_power_matches_escape() {
        for k in [2, 4, -2] {
            let p = params(k);
            let f = Rational::power(k / 2, 1.0);
            for &(r, phi) in &[(0.3, 0.2), (0.9, 2.5), (0.55, -1.0)] {
                let (m, u) = meromorphic_harmonic_map(&f, r * f64::cos(phi), r * f64::sin(phi));
                let e = escape_director(r, phi, &p).unwrap();
                for a in 0..3 {
                    assert!((m[a] - e[a]).abs() < 1e-13, "k={k} {m:?} {e:?}");
                }
                assert!((u.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pole_and_zero_map() {
        let f = Rational::power(-1, 1.0);
        assert_eq!(sphere_map(&f, 0.0, 0.0), [0.0, 0.0, -1.0]);
        let zero = Rational::new(
            vec![Complex64::new(0.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
        );
        assert_eq!(sphere_map(&zero, 0.4, -0.2), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn e0_forms_agree() {
        let p = params(1);
        let grid = RadialGrid::uniform(1.0, 128).unwrap();
        let psi = psi_of_branch(Branch::Minus, &p, &grid).unwrap();
        let a = e0_energy(&psi.to_profile(&p), &p)
            .unwrap()
            .finite()
            .unwrap();
        let b = e0_energy_psi(&psi, &p);
        assert!((a - b).abs() < 1e-12);
        assert!((a - 0.5).abs() < 1e-3);
    }

    #[test]
    fn e0_infinite_off_constraint() {
        let p = params(1);
        let grid = RadialGrid::uniform(1.0, 32).unwrap();
        let mut prof = explicit_profile(Branch::Minus, &p, &grid).unwrap();
        prof.v[3] += 1e-3;
        match e0_energy(&prof, &p).unwrap() {
            E0Value::Infinite { max_deviation } => assert!(max_deviation > 1e-4),
            E0Value::Finite(_) => panic!("expected infinite energy"),
        }
    }
}
