use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Material and geometric parameters of the disk problem.
///
/// `l == 0.0` stands for the vanishing-elasticity (harmonic map) regime; every
/// finite-`L` operation rejects it through [`ModelParams::require_finite_l`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub k: i32,
    pub s_plus: f64,
}

/// `s₊ = (b² + √(b⁴ + 24 a² c²)) / (4 c²)`, the uniaxial minimiser of the bulk potential.
pub fn s_plus(a2: f64, b2: f64, c2: f64) -> f64 {
    (b2 + (b2 * b2 + 24.0 * a2 * c2).sqrt()) / (4.0 * c2)
}

impl ModelParams {
    pub fn new(a2: f64, b2: f64, c2: f64, l: f64, r: f64, k: i32) -> Result<Self> {
        let p = ModelParams {
            a2,
            b2,
            c2,
            l,
            r,
            k,
            s_plus: s_plus(a2, b2, c2),
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every parameter invariant, including the stored `s_plus`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.a2 > 0.0 && self.a2.is_finite()) {
            return bad(format!("a2 must be positive and finite, got {}", self.a2));
        }
        if !(self.c2 > 0.0 && self.c2.is_finite()) {
            return bad(format!("c2 must be positive and finite, got {}", self.c2));
        }
        if !(self.b2 >= 0.0 && self.b2.is_finite()) {
            return bad(format!(
                "b2 must be non-negative and finite, got {}",
                self.b2
            ));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad(format!("R must satisfy 0 < R < inf, got {}", self.r));
        }
        if !(self.l >= 0.0 && self.l.is_finite()) {
            return bad(format!(
                "L must be positive (or 0 for the limit regime), got {}",
                self.l
            ));
        }
        if self.k == 0 {
            return bad("k must be a nonzero integer (k in Z \\ {0})".into());
        }
        let expected = s_plus(self.a2, self.b2, self.c2);
        if ((self.s_plus - expected) / expected).abs() > 1e-14 {
            return bad(format!(
                "stored s_plus {} does not match recomputed {}",
                self.s_plus, expected
            ));
        }
        Ok(())
    }

    pub fn with_b2(&self, b2: f64) -> Result<Self> {
        Self::new(self.a2, b2, self.c2, self.l, self.r, self.k)
    }

    pub fn with_l(&self, l: f64) -> Result<Self> {
        Self::new(self.a2, self.b2, self.c2, l, self.r, self.k)
    }

    pub fn require_finite_l(&self) -> Result<()> {
        if self.l > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParams(
                "L must be positive here; L = 0 is the harmonic-map limit".into(),
            ))
        }
    }

    pub fn require_b2_zero(&self) -> Result<()> {
        if self.b2 == 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "this operation requires b2 = 0, got {}",
                self.b2
            )))
        }
    }

    /// `|k|` as a float.
    pub fn abs_k(&self) -> f64 {
        f64::from(self.k.unsigned_abs())
    }

    /// Squared norm of the boundary tensor, `(2/3) s₊²`.
    pub fn norm_sq_target(&self) -> f64 {
        2.0 / 3.0 * self.s_plus * self.s_plus
    }

    /// Boundary values `(u(R), v(R)) = (s₊/√2, −s₊/√6)`.
    pub fn boundary_uv(&self) -> (f64, f64) {
        (self.s_plus / 2f64.sqrt(), -self.s_plus / 6f64.sqrt())
    }
}
