use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

/// Relative quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-12;
const GL_ORDER: usize = 16;
const MAX_DEPTH: usize = 40;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn gl_panel(f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> C64 {
    let (x, w) = rule();
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    x.iter().zip(w).map(|(&xi, &wi)| f(m + h * xi) * wi).sum::<C64>() * h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
}

/// Adaptive Gauss-Legendre over a real parameter interval.
///
/// Each panel is accepted when the one-panel and two-half-panel values agree to
/// `tol` relative to `scale` (or absolutely when `scale` is zero).
pub fn adaptive(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64, scale: f64) -> Result<QuadResult> {
    let whole = gl_panel(f, a, b);
    let mut acc = QuadResult { value: C64::new(0.0, 0.0), error: 0.0 };
    recurse(f, a, b, whole, tol, scale, 0, &mut acc)?;
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> C64,
    a: f64,
    b: f64,
    whole: C64,
    tol: f64,
    scale: f64,
    depth: usize,
    acc: &mut QuadResult,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let left = gl_panel(f, a, m);
    let right = gl_panel(f, m, b);
    let refined = left + right;
    let diff = (refined - whole).norm();
    let target = tol * scale.max(refined.norm()).max(1e-300);
    if diff <= target || diff < 1e-15 * refined.norm().max(1e-300) {
        acc.value += refined;
        acc.error += diff;
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature { worst: m, estimate: diff });
    }
    recurse(f, a, m, left, tol, scale, depth + 1, acc)?;
    recurse(f, m, b, right, tol, scale, depth + 1, acc)
}

/// A directed piece of a contour in the base plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Line { from: C64, to: C64 },
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
}

impl Piece {
    /// Point at parameter t in [0, 1].
    pub fn point(&self, t: f64) -> C64 {
        match *self {
            Piece::Line { from, to } => from + (to - from) * t,
            Piece::Arc { center, radius, theta0, theta1 } => {
                center + C64::from_polar(radius, theta0 + (theta1 - theta0) * t)
            }
        }
    }

    /// d(point)/dt.
    pub fn tangent(&self, t: f64) -> C64 {
        match *self {
            Piece::Line { from, to } => to - from,
            Piece::Arc { center: _, radius, theta0, theta1 } => {
                let th = theta0 + (theta1 - theta0) * t;
                C64::new(0.0, theta1 - theta0) * C64::from_polar(radius, th)
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }

    /// Distance from a point to this piece (sampled for arcs).
    pub fn distance_to(&self, p: C64) -> f64 {
        match *self {
            Piece::Line { from, to } => segment_distance(from, to, p),
            Piece::Arc { .. } => {
                let n = 64;
                (0..n)
                    .map(|k| {
                        segment_distance(self.point(k as f64 / n as f64), self.point((k + 1) as f64 / n as f64), p)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

pub fn segment_distance(a: C64, b: C64, p: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

/// An ordered chain of pieces in the base plane.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Contour {
    pub pieces: Vec<Piece>,
}

impl Contour {
    pub fn new(pieces: Vec<Piece>) -> Self {
        Contour { pieces }
    }

    pub fn circle(center: C64, radius: f64) -> Self {
        Contour::new(vec![Piece::Arc { center, radius, theta0: 0.0, theta1: 2.0 * PI }])
    }

    pub fn start(&self) -> C64 {
        self.pieces[0].start()
    }

    pub fn end(&self) -> C64 {
        self.pieces.last().unwrap().end()
    }

    pub fn is_closed(&self) -> bool {
        (self.start() - self.end()).norm() < 1e-12 * self.start().norm().max(1.0)
    }

    /// Consecutive pieces share endpoints.
    pub fn is_connected(&self) -> bool {
        self.pieces
            .windows(2)
            .all(|w| (w[0].end() - w[1].start()).norm() < 1e-10 * w[0].end().norm().max(1.0))
    }

    pub fn reversed(&self) -> Contour {
        Contour::new(
            self.pieces
                .iter()
                .rev()
                .map(|p| match *p {
                    Piece::Line { from, to } => Piece::Line { from: to, to: from },
                    Piece::Arc { center, radius, theta0, theta1 } => {
                        Piece::Arc { center, radius, theta0: theta1, theta1: theta0 }
                    }
                })
                .collect(),
        )
    }

    pub fn distance_to(&self, p: C64) -> f64 {
        self.pieces.iter().map(|q| q.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Polyline approximation with `per_piece` chords per piece.
    pub fn polyline(&self, per_piece: usize) -> Vec<C64> {
        let mut pts = vec![self.start()];
        for p in &self.pieces {
            for k in 1..=per_piece {
                pts.push(p.point(k as f64 / per_piece as f64));
            }
        }
        pts
    }
}

/// ∫ f(x) dx along a contour for a single-valued integrand `f`.
///
/// `singular` lists points the panels must keep their distance from; panels are
/// no longer than half the distance to the nearest of them.
pub fn integrate(contour: &Contour, f: &dyn Fn(C64) -> C64, singular: &[C64]) -> Result<QuadResult> {
    let mut total = QuadResult { value: C64::new(0.0, 0.0), error: 0.0 };
    for piece in &contour.pieces {
        for (t0, t1) in panels(piece, singular) {
            let g = |t: f64| f(piece.point(t)) * piece.tangent(t);
            let r = adaptive(&g, t0, t1, QUAD_TOL, 0.0)?;
            total.value += r.value;
            total.error += r.error;
        }
    }
    Ok(total)
}

/// Parameter panels of a piece sized relative to the distance to `singular`.
pub fn panels(piece: &Piece, singular: &[C64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut t = 0.0;
    let len = piece.length().max(1e-300);
    while t < 1.0 {
        let x = piece.point(t);
        let d = singular.iter().map(|s| (s - x).norm()).fold(f64::INFINITY, f64::min);
        let step = if d.is_finite() { (0.4 * d / len).max(1e-6) } else { 1.0 };
        let t1 = (t + step).min(1.0);
        let t1 = if 1.0 - t1 < 0.25 * step { 1.0 } else { t1 };
        out.push((t, t1));
        t = t1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn unit_circle_dz_over_z() {
        let c = Contour::circle(C64::new(0.0, 0.0), 1.0);
        let r = integrate(&c, &|z| C64::new(1.0, 0.0) / z, &[C64::new(0.0, 0.0)]).unwrap();
        assert!((r.value - C64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        assert!((r.value - C64::new(0.0, 2.0 * PI)).norm() <= r.error.max(1e-14) * 10.0 + 1e-14);
    }

    #[test]
    fn cubic_on_unit_interval() {
        let c = Contour::new(vec![Piece::Line { from: C64::new(0.0, 0.0), to: C64::new(1.0, 0.0) }]);
        let r = integrate(&c, &|z| z * z * z, &[]).unwrap();
        assert!((r.value - C64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn error_estimate_is_conservative() {
        // ∫_0^1 exp(x) dx with a nearby pole-free analytic integrand
        let c = Contour::new(vec![Piece::Line { from: C64::new(0.0, 0.0), to: C64::new(1.0, 0.0) }]);
        let r = integrate(&c, &|z| z.exp(), &[]).unwrap();
        let truth = std::f64::consts::E - 1.0;
        assert!((r.value.re - truth).abs() <= r.error + 4.0 * f64::EPSILON);
    }
}
