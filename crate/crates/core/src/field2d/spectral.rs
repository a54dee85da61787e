//! Angular derivatives of periodic ring data by FFT.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse plans for rings of `m` samples.
pub struct RingFft {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl RingFft {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        RingFft {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    fn wavenumber(&self, j: usize) -> f64 {
        if j <= self.m / 2 {
            j as f64
        } else {
            j as f64 - self.m as f64
        }
    }

    fn apply(&self, data: &[f64], symbol: impl Fn(f64, bool) -> Complex64) -> Vec<f64> {
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        for (j, c) in buf.iter_mut().enumerate() {
            *c *= symbol(self.wavenumber(j), j == self.m / 2);
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.m as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// `∂_φ`, with the Nyquist mode dropped.
    pub fn d1(&self, data: &[f64]) -> Vec<f64> {
        self.apply(data, |k, nyq| {
            if nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k)
            }
        })
    }

    /// `∂²_φ`, multiplying every mode (Nyquist included) by `−k²`.
    pub fn d2(&self, data: &[f64]) -> Vec<f64> {
        self.apply(data, |k, _| Complex64::new(-k * k, 0.0))
    }
}
