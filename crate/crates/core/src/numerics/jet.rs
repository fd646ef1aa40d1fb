use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::C64;
use crate::error::{Error, Result};

/// Relative aliasing tolerance for circle jets.
pub const JET_TOL: f64 = 1e-10;
pub const JET_SAMPLES: usize = 256;
pub const JET_KEEP: usize = 12;

/// Truncated Laurent series `sum_{k=-L}^{M} c_k t^k` in a local parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct JetSeries {
    pub rho: f64,
    /// Number of negative powers retained.
    pub neg: usize,
    /// c_{-neg}, ..., c_{M}
    pub coeffs: Vec<C64>,
    /// Relative size of the highest sampled frequencies (aliasing estimate).
    pub tail: f64,
}

impl JetSeries {
    /// Coefficient of t^k (zero outside the window).
    pub fn c(&self, k: i64) -> C64 {
        let idx = k + self.neg as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn residue(&self) -> C64 {
        self.c(-1)
    }

    /// k-th derivative at the center, k! c_k.
    pub fn derivative(&self, k: usize) -> C64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c(k as i64) * fact
    }

    pub fn max_power(&self) -> i64 {
        self.coeffs.len() as i64 - self.neg as i64 - 1
    }
}

/// Discrete-Fourier extraction of Laurent coefficients of `f` on the circle |t| = rho.
///
/// `f` is called at `JET_SAMPLES` equispaced points `rho e^{iθ}` in order of increasing θ.
pub fn circle_jet(f: &mut dyn FnMut(C64) -> C64, rho: f64, neg: usize, keep: usize) -> Result<JetSeries> {
    circle_jet_n(f, rho, neg, keep, JET_SAMPLES)
}

pub fn circle_jet_n(
    f: &mut dyn FnMut(C64) -> C64,
    rho: f64,
    neg: usize,
    keep: usize,
    samples: usize,
) -> Result<JetSeries> {
    let mut buf: Vec<C64> = (0..samples)
        .map(|j| f(C64::from_polar(rho, 2.0 * PI * j as f64 / samples as f64)))
        .collect();
    if buf.iter().any(|z| !z.is_finite()) {
        return Err(Error::JetTail { tail: f64::INFINITY });
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(samples).process(&mut buf);
    let n = samples as f64;
    let peak = buf.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let band = samples / 8;
    let tail_abs = (samples / 2 - band..=samples / 2 + band)
        .map(|k| buf[k % samples].norm())
        .fold(0.0, f64::max);
    let tail = if peak > 0.0 { tail_abs / peak } else { 0.0 };
    let coeffs = (-(neg as i64)..=keep as i64)
        .map(|k| {
            let idx = k.rem_euclid(samples as i64) as usize;
            buf[idx] / n / rho.powi(k as i32)
        })
        .collect();
    if tail > JET_TOL {
        return Err(Error::JetTail { tail });
    }
    Ok(JetSeries { rho, neg, coeffs, tail })
}
