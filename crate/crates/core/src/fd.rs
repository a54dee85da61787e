//! Finite-difference weights on nonuniform nodes.

/// Fornberg's recursion: weights `c[d][j]` such that
/// `f^{(d)}(x0) ≈ Σ_j c[d][j] f(xs[j])` for `d = 0..=max_order`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

/// Three-point central weights at an interior node with spacings
/// `hm = r_i − r_{i−1}` and `hp = r_{i+1} − r_i`.
#[derive(Clone, Copy, Debug)]
pub struct Stencil3 {
    pub d1: [f64; 3],
    pub d2: [f64; 3],
}

impl Stencil3 {
    pub fn new(hm: f64, hp: f64) -> Self {
        let s = hm + hp;
        Stencil3 {
            d1: [-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s)],
            d2: [2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s)],
        }
    }

    pub fn at(nodes: &[f64], i: usize) -> Self {
        Self::new(nodes[i] - nodes[i - 1], nodes[i + 1] - nodes[i])
    }

    pub fn first(&self, f: [f64; 3]) -> f64 {
        self.d1[0] * f[0] + self.d1[1] * f[1] + self.d1[2] * f[2]
    }

    pub fn second(&self, f: [f64; 3]) -> f64 {
        self.d2[0] * f[0] + self.d2[1] * f[1] + self.d2[2] * f[2]
    }
}

/// First derivative of nodal data on arbitrary nodes using `width`-point
/// stencils (centred where possible, shifted near the ends).
pub fn derivative(nodes: &[f64], f: &[f64], width: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(width >= 2 && width <= n);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let xs = &nodes[start..start + width];
            let w = fornberg_weights(nodes[i], xs, 1);
            w[1].iter()
                .zip(&f[start..start + width])
                .map(|(c, y)| c * y)
                .sum()
        })
        .collect()
}

/// Second-order one-sided derivative at node 0.
pub fn one_sided_start(nodes: &[f64], f: &[f64]) -> f64 {
    let w = fornberg_weights(nodes[0], &nodes[..3], 1);
    w[1][0] * f[0] + w[1][1] * f[1] + w[1][2] * f[2]
}
