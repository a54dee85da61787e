//! Closed-form eigen-decomposition of a symmetric 3×3 matrix.
//!
//! Eigenvalues come from the trigonometric solution of the characteristic
//! cubic. The eigenvector of the best separated eigenvalue is taken from a
//! cross product of rows of `A − λI`; the remaining pair is resolved by an exact
//! 2×2 rotation inside the orthogonal complement, which keeps full accuracy
//! for (nearly) uniaxial tensors where the cubic solution alone loses half the
//! digits.

use std::f64::consts::PI;

use super::{Mat3, QTensor};

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (`vectors[i]` belongs to `values[i]`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen3 {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl Eigen3 {
    pub fn largest(&self) -> (f64, [f64; 3]) {
        (self.values[2], self.vectors[2])
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale(a: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn mat_vec(m: &Mat3, x: &[f64; 3]) -> [f64; 3] {
    [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)]
}

fn normalize(a: &[f64; 3]) -> [f64; 3] {
    scale(a, 1.0 / dot(a, a).sqrt())
}

/// Deterministic sign: the largest-magnitude component is made positive.
fn canonical_sign(a: [f64; 3]) -> [f64; 3] {
    let mut idx = 0;
    for i in 1..3 {
        if a[i].abs() > a[idx].abs() + 1e-12 {
            idx = i;
        }
    }
    if a[idx] < 0.0 {
        scale(&a, -1.0)
    } else {
        a
    }
}

/// Unit vector orthogonal to `w`, chosen by a fixed axis order.
fn orthogonal_unit(w: &[f64; 3]) -> [f64; 3] {
    if w[0].abs() > w[1].abs() {
        normalize(&[-w[2], 0.0, w[0]])
    } else {
        normalize(&[0.0, w[2], -w[1]])
    }
}

/// Eigenvector of `a` for an eigenvalue `lambda` of multiplicity one.
fn isolated_vector(a: &Mat3, lambda: f64) -> [f64; 3] {
    let rows = [
        [a[0][0] - lambda, a[0][1], a[0][2]],
        [a[1][0], a[1][1] - lambda, a[1][2]],
        [a[2][0], a[2][1], a[2][2] - lambda],
    ];
    let candidates = [
        cross(&rows[0], &rows[1]),
        cross(&rows[0], &rows[2]),
        cross(&rows[1], &rows[2]),
    ];
    let mut best = candidates[0];
    let mut best_norm = dot(&best, &best);
    for c in &candidates[1..] {
        let n = dot(c, c);
        if n > best_norm {
            best = *c;
            best_norm = n;
        }
    }
    if best_norm == 0.0 {
        [0.0, 0.0, 1.0]
    } else {
        scale(&best, 1.0 / best_norm.sqrt())
    }
}

/// Eigen-decomposition of a symmetric matrix given as a full array.
pub fn eigen_symmetric(m: &Mat3) -> Eigen3 {
    let max = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return Eigen3 {
            values: [0.0; 3],
            vectors: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        };
    }
    let mut a = *m;
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x /= max;
        }
    }

    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let b00 = a[0][0] - q;
    let b11 = a[1][1] - q;
    let b22 = a[2][2] - q;
    let p2 = (b00 * b00
        + b11 * b11
        + b22 * b22
        + 2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]))
        / 6.0;
    if p2 <= 1e-32 {
        return Eigen3 {
            values: [q * max; 3],
            vectors: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        };
    }
    let p = p2.sqrt();
    let det = b00 * (b11 * b22 - a[1][2] * a[1][2]) - a[0][1] * (a[0][1] * b22 - a[1][2] * a[0][2])
        + a[0][2] * (a[0][1] * a[1][2] - b11 * a[0][2]);
    let half_det = (det / (2.0 * p * p2)).clamp(-1.0, 1.0);
    let angle = half_det.acos() / 3.0;
    let beta_max = 2.0 * angle.cos();
    let beta_min = 2.0 * (angle + 2.0 * PI / 3.0).cos();

    // The extreme eigenvalue farther from the middle one is well separated.
    let isolated_lambda = if half_det >= 0.0 {
        q + p * beta_max
    } else {
        q + p * beta_min
    };
    let w = isolated_vector(&a, isolated_lambda);
    let u = orthogonal_unit(&w);
    let v = cross(&w, &u);

    let au = mat_vec(&a, &u);
    let av = mat_vec(&a, &v);
    let m00 = dot(&u, &au);
    let m01 = dot(&u, &av);
    let m11 = dot(&v, &av);
    let (c, s) = if m01 == 0.0 {
        (1.0, 0.0)
    } else {
        let theta = 0.5 * (2.0 * m01).atan2(m00 - m11);
        (theta.cos(), theta.sin())
    };
    let e1 = [
        c * u[0] + s * v[0],
        c * u[1] + s * v[1],
        c * u[2] + s * v[2],
    ];
    let e2 = [
        -s * u[0] + c * v[0],
        -s * u[1] + c * v[1],
        -s * u[2] + c * v[2],
    ];
    let l1 = m00 * c * c + 2.0 * m01 * c * s + m11 * s * s;
    let l2 = m00 * s * s - 2.0 * m01 * c * s + m11 * c * c;
    let lw = dot(&w, &mat_vec(&a, &w));

    let mut pairs = [(lw, w), (l1, e1), (l2, e2)];
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Eigen3 {
        values: [pairs[0].0 * max, pairs[1].0 * max, pairs[2].0 * max],
        vectors: [
            canonical_sign(pairs[0].1),
            canonical_sign(pairs[1].1),
            canonical_sign(pairs[2].1),
        ],
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Q-tensor.
pub fn eigen3(q: &QTensor) -> Eigen3 {
    eigen_symmetric(&q.to_matrix())
}
