use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

const ROOT_TOL: f64 = 1e-12;
const CLUSTER_TOL: f64 = 1e-5;
const MAX_ITER: usize = 500;

/// Polynomial with complex coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ComplexPoly {
    pub coeffs: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = ComplexPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize, c: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// (x - a)
    pub fn linear_root(a: C64) -> Self {
        Self::new(vec![-a, C64::new(1.0, 0.0)])
    }

    pub fn from_roots(roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(C64::new(1.0, 0.0)), |acc, &r| &acc * &Self::linear_root(r))
    }

    pub fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == C64::new(0.0, 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(C64::new(0.0, 0.0));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Degree after trimming exact zeros (the zero polynomial has degree 0).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Largest coefficient modulus; the scale for residual tests.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value together with first and second derivative.
    pub fn eval_d2(&self, x: C64) -> (C64, C64, C64) {
        let zero = C64::new(0.0, 0.0);
        let (mut p, mut dp, mut ddp) = (zero, zero, zero);
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * x + dp * 2.0;
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp, ddp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(C64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Taylor coefficients about `a`: p(a + t) = sum_k c_k t^k.
    pub fn shifted(&self, a: C64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = c[j + 1] * a;
                c[j] += t;
            }
        }
        Self::new(c)
    }

    /// All roots with multiplicity flags (Aberth-Ehrlich, companion fallback).
    pub fn roots(&self) -> Result<Vec<Root>> {
        let raw = self.raw_roots()?;
        Ok(cluster(&raw))
    }

    /// Roots listed individually, without clustering.
    pub fn raw_roots(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::Invalid("root finding needs degree >= 1".into()));
        }
        match aberth(self) {
            Ok(r) => Ok(r),
            Err(_) => {
                let mut r = companion_eigenvalues(self)?;
                for z in r.iter_mut() {
                    *z = newton_polish(self, *z);
                }
                Ok(r)
            }
        }
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, o: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, o: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, o: &ComplexPoly) -> ComplexPoly {
        let mut c = vec![C64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        ComplexPoly::new(c)
    }
}

fn residual_ok(p: &ComplexPoly, z: C64) -> bool {
    let scale: f64 = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
        .sum();
    p.eval(z).norm() <= ROOT_TOL * scale.max(f64::MIN_POSITIVE) * 10.0
}

fn aberth(p: &ComplexPoly) -> Result<Vec<C64>> {
    let n = p.degree();
    let lead = p.leading();
    // deterministic initial ring at the geometric-mean root radius
    let a0 = p.coeff(0).norm();
    let radius = if a0 > 0.0 {
        (a0 / lead.norm()).powf(1.0 / n as f64)
    } else {
        1.0
    }
    .max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let dp = p.derivative();
    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let ratio = p.eval(z[i]) / dp.eval(z[i]);
            let sum: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        *zi = newton_polish(p, *zi);
    }
    let worst = z
        .iter()
        .map(|&zi| p.eval(zi).norm())
        .fold(0.0, f64::max);
    if z.iter().all(|&zi| zi.is_finite() && residual_ok(p, zi)) {
        Ok(z)
    } else {
        Err(Error::RootNonConvergence { iterations: MAX_ITER, residual: worst })
    }
}

fn newton_polish(p: &ComplexPoly, mut z: C64) -> C64 {
    for _ in 0..3 {
        let (v, d, _) = p.eval_d2(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        let cand = z - step;
        if p.eval(cand).norm() <= v.norm() {
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Eigenvalues of the companion matrix.
pub fn companion_eigenvalues(p: &ComplexPoly) -> Result<Vec<C64>> {
    let n = p.degree();
    let lead = p.leading();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeff(i) / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)
        .ok_or(Error::RootNonConvergence { iterations: 10_000, residual: f64::NAN })?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

fn cluster(raw: &[C64]) -> Vec<Root> {
    let mut used = vec![false; raw.len()];
    let mut out = Vec::new();
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![raw[i]];
        used[i] = true;
        for j in i + 1..raw.len() {
            if !used[j] && (raw[j] - raw[i]).norm() < CLUSTER_TOL * raw[i].norm().max(1.0) {
                used[j] = true;
                members.push(raw[j]);
            }
        }
        let mean = members.iter().sum::<C64>() / members.len() as f64;
        out.push(Root { value: mean, multiplicity: members.len() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn x_squared_plus_one() {
        let p = ComplexPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let mut r: Vec<C64> = p.roots().unwrap().iter().map(|r| r.value).collect();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn triple_root_flagged() {
        let p = ComplexPoly::from_roots(&[c(1.0, 0.0); 3]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert!((r[0].value - c(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn matches_companion_oracle() {
        let p = ComplexPoly::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1), c(0.2, 1.1), c(1.0, -0.4)]);
        let a = p.raw_roots().unwrap();
        let b = companion_eigenvalues(&p).unwrap();
        for z in &a {
            let d = b.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-10, "{z} unmatched ({d})");
        }
    }

    #[test]
    fn shift_is_taylor() {
        let p = ComplexPoly::new(vec![c(1.0, 2.0), c(-3.0, 0.0), c(0.5, 0.5), c(2.0, 0.0)]);
        let a = c(0.3, -0.7);
        let s = p.shifted(a);
        let t = c(0.11, 0.05);
        assert!((s.eval(t) - p.eval(a + t)).norm() < 1e-13);
    }
}
