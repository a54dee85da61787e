//! Banded solvers for the radial problems.

/// Solves a tridiagonal system in place (Thomas algorithm).
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

pub type Block = [[f64; 2]; 2];

fn inv(b: &Block) -> Block {
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    [
        [b[1][1] / det, -b[0][1] / det],
        [-b[1][0] / det, b[0][0] / det],
    ]
}

fn mul(a: &Block, b: &Block) -> Block {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mul_vec(a: &Block, x: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

/// Block tridiagonal solve with 2×2 blocks: `lower[i]` couples row `i` to
/// `i − 1`, `upper[i]` couples row `i` to `i + 1`.
pub fn solve_block_tridiagonal(
    lower: &[Block],
    diag: &[Block],
    upper: &[Block],
    rhs: &[[f64; 2]],
) -> Vec<[f64; 2]> {
    let n = diag.len();
    let mut cp = vec![[[0.0; 2]; 2]; n];
    let mut dp = vec![[0.0; 2]; n];
    let m0 = inv(&diag[0]);
    cp[0] = mul(&m0, &upper[0]);
    dp[0] = mul_vec(&m0, rhs[0]);
    for i in 1..n {
        let ac = mul(&lower[i], &cp[i - 1]);
        let m = [
            [diag[i][0][0] - ac[0][0], diag[i][0][1] - ac[0][1]],
            [diag[i][1][0] - ac[1][0], diag[i][1][1] - ac[1][1]],
        ];
        let mi = inv(&m);
        cp[i] = mul(&mi, &upper[i]);
        let ad = mul_vec(&lower[i], dp[i - 1]);
        dp[i] = mul_vec(&mi, [rhs[i][0] - ad[0], rhs[i][1] - ad[1]]);
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        let cx = mul_vec(&cp[i], x[i + 1]);
        x[i] = [x[i][0] - cx[0], x[i][1] - cx[1]];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solves() {
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let upper = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x[i]
                    + if i > 0 { lower[i] * x[i - 1] } else { 0.0 }
                    + if i < 3 { upper[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        solve_tridiagonal(&lower, &diag, &upper, &mut b);
        for i in 0..4 {
            assert!((b[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn block_tridiagonal_solves() {
        let n = 5;
        let diag: Vec<Block> = (0..n)
            .map(|i| [[4.0 + i as f64, 0.5], [0.5, 3.0]])
            .collect();
        let off: Block = [[-1.0, 0.2], [0.1, -1.0]];
        let offt: Block = [[-1.0, 0.1], [0.2, -1.0]];
        let lower = vec![offt; n];
        let upper = vec![off; n];
        let x: Vec<[f64; 2]> = (0..n).map(|i| [i as f64 - 1.5, 0.3 * i as f64]).collect();
        let b: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let mut r = mul_vec(&diag[i], x[i]);
                if i > 0 {
                    let t = mul_vec(&lower[i], x[i - 1]);
                    r = [r[0] + t[0], r[1] + t[1]];
                }
                if i + 1 < n {
                    let t = mul_vec(&upper[i], x[i + 1]);
                    r = [r[0] + t[0], r[1] + t[1]];
                }
                r
            })
            .collect();
        let y = solve_block_tridiagonal(&lower, &diag, &upper, &b);
        for i in 0..n {
            assert!((y[i][0] - x[i][0]).abs() < 1e-13 && (y[i][1] - x[i][1]).abs() < 1e-13);
        }
    }
}
