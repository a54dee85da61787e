//! The state space S₀ of symmetric traceless 3×3 matrices.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

mod eigen;

pub use eigen::{eigen3, Eigen3};

pub type Mat3 = [[f64; 3]; 3];

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// A point of S₀, stored as the five independent entries
/// `q11, q12, q13, q22, q23`; `q33 = −q11 − q22`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QTensor {
    pub q11: f64,
    pub q12: f64,
    pub q13: f64,
    pub q22: f64,
    pub q23: f64,
}

impl QTensor {
    pub const ZERO: QTensor = QTensor {
        q11: 0.0,
        q12: 0.0,
        q13: 0.0,
        q22: 0.0,
        q23: 0.0,
    };

    pub const fn new(q11: f64, q12: f64, q13: f64, q22: f64, q23: f64) -> Self {
        QTensor {
            q11,
            q12,
            q13,
            q22,
            q23,
        }
    }

    pub fn q33(&self) -> f64 {
        -self.q11 - self.q22
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.q11, self.q12, self.q13, self.q22, self.q23]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        QTensor::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_matrix(&self) -> Mat3 {
        [
            [self.q11, self.q12, self.q13],
            [self.q12, self.q22, self.q23],
            [self.q13, self.q23, self.q33()],
        ]
    }

    /// Orthogonal projection of an arbitrary 3×3 matrix onto S₀
    /// (symmetric part with the trace removed).
    pub fn project(m: &Mat3) -> Self {
        let t = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        QTensor::new(
            m[0][0] - t,
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            m[1][1] - t,
            0.5 * (m[1][2] + m[2][1]),
        )
    }

    /// `s (n ⊗ n − I/3)` for a unit vector `n`.
    pub fn uniaxial(s: f64, n: [f64; 3]) -> Self {
        let third = 1.0 / 3.0;
        QTensor::new(
            s * (n[0] * n[0] - third),
            s * n[0] * n[1],
            s * n[0] * n[2],
            s * (n[1] * n[1] - third),
            s * n[1] * n[2],
        )
    }

    /// Frobenius inner product `tr(A B)`.
    pub fn dot(&self, o: &QTensor) -> f64 {
        self.q11 * o.q11
            + self.q22 * o.q22
            + self.q33() * o.q33()
            + 2.0 * (self.q12 * o.q12 + self.q13 * o.q13 + self.q23 * o.q23)
    }

    /// `|Q|² = tr(Q²)`.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Matrix product (not symmetric in general).
    pub fn matmul(&self, o: &QTensor) -> Mat3 {
        let a = self.to_matrix();
        let b = o.to_matrix();
        let mut c = [[0.0; 3]; 3];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cij) in row.iter_mut().enumerate() {
                *cij = (0..3).map(|l| a[i][l] * b[l][j]).sum();
            }
        }
        c
    }

    /// `Q² − |Q|²I/3`, the traceless part of the square.
    pub fn square_traceless(&self) -> QTensor {
        QTensor::project(&self.matmul(self))
    }

    /// `tr(Q³)`.
    pub fn trace_cube(&self) -> f64 {
        let q2 = self.matmul(self);
        let q = self.to_matrix();
        let mut t = 0.0;
        for i in 0..3 {
            for l in 0..3 {
                t += q2[i][l] * q[l][i];
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array()
            .iter()
            .chain(std::iter::once(&self.q33()))
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

impl Add for QTensor {
    type Output = QTensor;
    fn add(self, o: QTensor) -> QTensor {
        QTensor::new(
            self.q11 + o.q11,
            self.q12 + o.q12,
            self.q13 + o.q13,
            self.q22 + o.q22,
            self.q23 + o.q23,
        )
    }
}

impl AddAssign for QTensor {
    fn add_assign(&mut self, o: QTensor) {
        *self = *self + o;
    }
}

impl Sub for QTensor {
    type Output = QTensor;
    fn sub(self, o: QTensor) -> QTensor {
        QTensor::new(
            self.q11 - o.q11,
            self.q12 - o.q12,
            self.q13 - o.q13,
            self.q22 - o.q22,
            self.q23 - o.q23,
        )
    }
}

impl Neg for QTensor {
    type Output = QTensor;
    fn neg(self) -> QTensor {
        self * -1.0
    }
}

impl Mul<f64> for QTensor {
    type Output = QTensor;
    fn mul(self, s: f64) -> QTensor {
        QTensor::new(
            self.q11 * s,
            self.q12 * s,
            self.q13 * s,
            self.q22 * s,
            self.q23 * s,
        )
    }
}

impl Mul<QTensor> for f64 {
    type Output = QTensor;
    fn mul(self, q: QTensor) -> QTensor {
        q * self
    }
}

/// Director `n(φ) = (cos(kφ/2), sin(kφ/2), 0)`.
pub fn director(phi: f64, k: i32) -> [f64; 3] {
    let (s, c) = (0.5 * f64::from(k) * phi).sin_cos();
    [c, s, 0.0]
}

/// `F_n(φ) = √2 (n ⊗ n − I₂/2)`.
pub fn frame_fn(phi: f64, k: i32) -> QTensor {
    let n = director(phi, k);
    QTensor::new(
        SQRT2 * (n[0] * n[0] - 0.5),
        SQRT2 * n[0] * n[1],
        0.0,
        SQRT2 * (n[1] * n[1] - 0.5),
        0.0,
    )
}

/// `F_3 = √(3/2) (e₃ ⊗ e₃ − I/3) = diag(−1, −1, 2)/√6`.
pub fn frame_f3() -> QTensor {
    let d = 1.0 / 6f64.sqrt();
    QTensor::new(-d, 0.0, 0.0, -d, 0.0)
}

/// `Y = u F_n(φ) + v F_3`.
pub fn ansatz(u: f64, v: f64, phi: f64, k: i32) -> QTensor {
    frame_fn(phi, k) * u + frame_f3() * v
}

/// Coefficients of `q` on `F_n(φ)` and `F_3`.
pub fn frame_coeffs(q: &QTensor, phi: f64, k: i32) -> (f64, f64) {
    (q.dot(&frame_fn(phi, k)), q.dot(&frame_f3()))
}

/// The boundary tensor `s₊ (n ⊗ n − I/3)`.
pub fn boundary_tensor(phi: f64, params: &ModelParams) -> QTensor {
    QTensor::uniaxial(params.s_plus, director(phi, params.k))
}

/// Bulk density `f(Q) = −a²/2 |Q|² − b²/3 tr(Q³) + c²/4 |Q|⁴`.
pub fn bulk_energy(q: &QTensor, params: &ModelParams) -> f64 {
    let n2 = q.norm_sq();
    -0.5 * params.a2 * n2 - params.b2 / 3.0 * q.trace_cube() + 0.25 * params.c2 * n2 * n2
}

/// Biaxiality `β = 1 − 6 (tr Q³)² / |Q|⁶`, zero for uniaxial tensors and at `Q = 0`.
pub fn biaxiality(q: &QTensor) -> f64 {
    let n2 = q.norm_sq();
    if n2.sqrt() < 1e-14 {
        return 0.0;
    }
    let t = q.trace_cube();
    (1.0 - 6.0 * t * t / (n2 * n2 * n2)).clamp(0.0, 1.0)
}
