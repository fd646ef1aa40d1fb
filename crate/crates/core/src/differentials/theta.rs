//! Riemann theta function with half-integer characteristics, gradient and Hessian.
//!
//! `θ[a,b](z|Ω) = Σ_n exp(πi (n+a)ᵀΩ(n+a) + 2πi (n+a)ᵀ(z+b))`, summed over the lattice points
//! inside an ellipsoid whose radius comes from an incomplete-gamma tail bound.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::numerics::C64;

pub const THETA_TOL: f64 = 1e-14;
const MAX_POINTS: usize = 2_000_000;
const MAX_GENUS: usize = 4;

#[derive(Debug, Clone)]
pub struct ThetaParams {
    pub omega: DMatrix<C64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Upper factor `T` with `TᵀT = π Im Ω`.
    upper: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    pub radius: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone)]
pub struct ThetaValue {
    pub value: C64,
    pub grad: Vec<C64>,
    pub hess: DMatrix<C64>,
    pub points: usize,
}

/// Tail of the lattice sum outside radius `r` (relative to the largest term).
fn tail(g: usize, rho: f64, r: f64) -> f64 {
    let x = (r - rho / 2.0).max(0.0);
    let a = g as f64 / 2.0;
    a * (2.0 / rho).powi(g as i32) * gamma(a) * gamma_ur(a, x * x)
}

fn shortest_vector(t: &DMatrix<f64>) -> f64 {
    let g = t.nrows();
    let span = 3i64;
    let mut best = f64::INFINITY;
    let total = (2 * span + 1).pow(g as u32);
    for code in 0..total {
        let mut c = code;
        let mut v = DVector::zeros(g);
        for i in 0..g {
            v[i] = (c % (2 * span + 1) - span) as f64;
            c /= 2 * span + 1;
        }
        if v.iter().all(|&x| x == 0.0) {
            continue;
        }
        best = best.min((t * v).norm());
    }
    best
}

impl ThetaParams {
    pub fn new(omega: DMatrix<C64>, a: Vec<f64>, b: Vec<f64>) -> Result<ThetaParams> {
        let g = omega.nrows();
        if g > MAX_GENUS {
            return Err(Error::Unsupported(format!("theta for genus {g} > {MAX_GENUS}")));
        }
        let y = omega.map(|z| z.im);
        let y = (&y + y.transpose()) * 0.5;
        let chol = nalgebra::Cholesky::new(y.clone() * PI)
            .ok_or_else(|| Error::Health("Im Ω is not positive definite".into()))?;
        let upper = chol.l().transpose();
        let y_inv = y.try_inverse().ok_or(Error::Singular { cond: f64::INFINITY })?;
        let rho = shortest_vector(&upper);
        let mut radius = rho / 2.0 + 0.5;
        while tail(g, rho, radius) > THETA_TOL {
            radius += 0.25;
            if radius > 1e3 {
                return Err(Error::Unsupported("theta radius exceeds the enumeration cap".into()));
            }
        }
        // margin for the derivative weights
        radius += 1.0;
        let tail_bound = tail(g, rho, radius);
        Ok(ThetaParams { omega, a, b, upper, y_inv, radius, tail_bound })
    }

    pub fn genus(&self) -> usize {
        self.omega.nrows()
    }

    pub fn with_characteristic(&self, a: Vec<f64>, b: Vec<f64>) -> ThetaParams {
        ThetaParams { a, b, ..self.clone() }
    }

    /// Value, gradient and (if `order ≥ 2`) Hessian at `z`.
    pub fn eval(&self, z: &[C64], order: usize) -> Result<ThetaValue> {
        let g = self.genus();
        let zy = DVector::from_iterator(g, z.iter().map(|c| c.im));
        // centre of the dominant terms in m = n + a
        let center = -(&self.y_inv * zy);
        let mut value = C64::new(0.0, 0.0);
        let mut grad = vec![C64::new(0.0, 0.0); g];
        let mut hess = DMatrix::zeros(g, g);
        let mut m = vec![0.0; g];
        let mut points = 0usize;
        self.enumerate(g, &center, 0.0, &mut m, &mut |m: &[f64]| {
            points += 1;
            let mut q = C64::new(0.0, 0.0);
            for i in 0..g {
                for j in 0..g {
                    q += self.omega[(i, j)] * m[i] * m[j];
                }
            }
            let mut lin = C64::new(0.0, 0.0);
            for i in 0..g {
                lin += (z[i] + self.b[i]) * m[i];
            }
            let term = (C64::new(0.0, PI) * q + C64::new(0.0, 2.0 * PI) * lin).exp();
            value += term;
            if order >= 1 {
                for i in 0..g {
                    grad[i] += term * C64::new(0.0, 2.0 * PI * m[i]);
                }
            }
            if order >= 2 {
                for i in 0..g {
                    for j in 0..g {
                        hess[(i, j)] += term * (-4.0 * PI * PI * m[i] * m[j]);
                    }
                }
            }
        })?;
        if points > MAX_POINTS {
            return Err(Error::Unsupported("theta enumeration cap exceeded".into()));
        }
        Ok(ThetaValue { value, grad, hess, points })
    }

    /// Visits m = n + a with ‖T(m − c)‖ ≤ R, recursing from the last coordinate.
    fn enumerate(
        &self,
        level: usize,
        center: &DVector<f64>,
        partial: f64,
        m: &mut Vec<f64>,
        visit: &mut dyn FnMut(&[f64]),
    ) -> Result<()> {
        if level == 0 {
            visit(m);
            return Ok(());
        }
        let i = level - 1;
        let g = self.genus();
        let t = &self.upper;
        // row i of T(m − c): T_ii (m_i − c_i) + Σ_{j>i} T_ij (m_j − c_j)
        let shift: f64 = (i + 1..g).map(|j| t[(i, j)] * (m[j] - center[j])).sum();
        let rem = self.radius * self.radius - partial;
        if rem < 0.0 {
            return Ok(());
        }
        let half = rem.sqrt() / t[(i, i)];
        let mid = center[i] - shift / t[(i, i)];
        let lo = (mid - half - self.a[i]).ceil() as i64;
        let hi = (mid + half - self.a[i]).floor() as i64;
        if hi - lo > 100_000 {
            return Err(Error::Unsupported("theta enumeration cap exceeded".into()));
        }
        for n in lo..=hi {
            m[i] = n as f64 + self.a[i];
            let r = t[(i, i)] * (m[i] - center[i]) + shift;
            self.enumerate(i, center, partial + r * r, m, visit)?;
        }
        Ok(())
    }
}

/// Half-characteristics in lexicographic order of `(a, b)` bits.
pub fn characteristics(g: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..1usize << (2 * g))
        .map(|code| {
            let bit = |k: usize| if code >> (2 * g - 1 - k) & 1 == 1 { 0.5 } else { 0.0 };
            ((0..g).map(bit).collect(), (g..2 * g).map(bit).collect())
        })
        .collect()
}

pub fn is_odd(a: &[f64], b: &[f64]) -> bool {
    let s: f64 = a.iter().zip(b).map(|(x, y)| 4.0 * x * y).sum();
    (s.round() as i64) % 2 == 1
}

/// First odd characteristic whose theta gradient at zero is not degenerate.
pub fn odd_nonsingular(params: &ThetaParams) -> Result<ThetaParams> {
    let g = params.genus();
    let zero = vec![C64::new(0.0, 0.0); g];
    let scale = params.with_characteristic(vec![0.0; g], vec![0.0; g]).eval(&zero, 0)?.value.norm().max(1.0);
    for (a, b) in characteristics(g) {
        if !is_odd(&a, &b) {
            continue;
        }
        let p = params.with_characteristic(a, b);
        let t = p.eval(&zero, 1)?;
        let norm = t.grad.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 * scale {
            return Ok(p);
        }
    }
    Err(Error::Health("no nonsingular odd characteristic".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn omega2() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(0.3, 1.2), c(0.1, 0.4), c(0.1, 0.4), c(-0.2, 0.9)])
    }

    #[test]
    fn genus_one_matches_q_series() {
        let tau = c(0.17, 0.83);
        let p = ThetaParams::new(DMatrix::from_element(1, 1, tau), vec![0.0], vec![0.0]).unwrap();
        let z = c(0.21, -0.13);
        let direct: C64 = (-40..=40)
            .map(|n| {
                let n = n as f64;
                (C64::new(0.0, PI) * tau * n * n + C64::new(0.0, 2.0 * PI) * z * n).exp()
            })
            .sum();
        let v = p.eval(&[z], 0).unwrap().value;
        assert!((v - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn even_parity() {
        let p = ThetaParams::new(omega2(), vec![0.0; 2], vec![0.0; 2]).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.25)];
        let mz = [-z[0], -z[1]];
        let a = p.eval(&z, 0).unwrap().value;
        let b = p.eval(&mz, 0).unwrap().value;
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn quasi_periodicity() {
        let om = omega2();
        let p = ThetaParams::new(om.clone(), vec![0.0; 2], vec![0.0; 2]).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.25)];
        let (m, n) = ([1.0, -1.0], [2.0, 1.0]);
        let shifted: Vec<C64> =
            (0..2).map(|i| z[i] + om[(i, 0)] * m[0] + om[(i, 1)] * m[1] + n[i]).collect();
        let mut q = c(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                q += om[(i, j)] * m[i] * m[j];
            }
        }
        let lin = z[0] * m[0] + z[1] * m[1];
        let factor = (C64::new(0.0, -PI) * q - C64::new(0.0, 2.0 * PI) * lin).exp();
        let lhs = p.eval(&shifted, 0).unwrap().value;
        let rhs = factor * p.eval(&z, 0).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
    }

    #[test]
    fn gradient_matches_difference() {
        let p = ThetaParams::new(omega2(), vec![0.5, 0.0], vec![0.5, 0.5]).unwrap();
        let z = [c(0.1, 0.05), c(0.2, -0.1)];
        let t = p.eval(&z, 2).unwrap();
        let h = 1e-5;
        for k in 0..2 {
            let mut zp = z;
            let mut zm = z;
            zp[k] += h;
            zm[k] -= h;
            let fd = (p.eval(&zp, 1).unwrap().value - p.eval(&zm, 1).unwrap().value) / (2.0 * h);
            assert!((fd - t.grad[k]).norm() < 1e-7 * t.grad[k].norm().max(1.0));
            let fd2 = (p.eval(&zp, 1).unwrap().grad[0] - p.eval(&zm, 1).unwrap().grad[0]) / (2.0 * h);
            assert!((fd2 - t.hess[(0, k)]).norm() < 1e-6 * t.hess[(0, k)].norm().max(1.0));
        }
    }

    #[test]
    fn odd_characteristic_vanishes_at_zero() {
        let p = odd_nonsingular(&ThetaParams::new(omega2(), vec![0.0; 2], vec![0.0; 2]).unwrap()).unwrap();
        assert!(is_odd(&p.a, &p.b));
        assert!(p.eval(&[c(0.0, 0.0); 2], 0).unwrap().value.norm() < 1e-13);
    }

    #[test]
    fn six_odd_of_sixteen() {
        let n = characteristics(2).iter().filter(|(a, b)| is_odd(a, b)).count();
        assert_eq!(n, 6);
    }
}
