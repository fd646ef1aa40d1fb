//! Paths in the base with arc detours, their lifts to the two-sheeted model, and
//! integration of differentials along them.

use std::f64::consts::PI;

use serde::Serialize;

use super::hyper::{Hyper, Pt};
use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive, panels, QUAD_TOL};
use crate::numerics::{Contour, Piece, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Obstacle {
    pub at: C64,
    pub radius: f64,
}

/// Obstacles with safety radius 0.25 × distance to the nearest other point.
pub fn obstacles(points: &[C64]) -> Vec<Obstacle> {
    points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let d = points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, q)| (q - p).norm())
                .fold(f64::INFINITY, f64::min);
            Obstacle { at: p, radius: 0.25 * d }
        })
        .collect()
}

/// Straight path `a → b` with minor-arc detours around obstacles closer than their radius.
/// Obstacles at an endpoint are ignored; obstacles near an endpoint are shrunk.
pub fn route(a: C64, b: C64, obs: &[Obstacle]) -> Contour {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return Contour::default();
    }
    let mut hits: Vec<(f64, f64, f64, Obstacle)> = Vec::new();
    for o in obs {
        let da = (o.at - a).norm();
        let db = (o.at - b).norm();
        if da < 1e-12 * len.max(1.0) || db < 1e-12 * len.max(1.0) {
            continue;
        }
        let radius = o.radius.min(0.5 * da).min(0.5 * db);
        let t = ((o.at - a) * d.conj()).re / (len * len);
        let foot = a + d * t;
        let dist = (o.at - foot).norm();
        if dist >= radius || t <= 0.0 || t >= 1.0 {
            continue;
        }
        let half = (radius * radius - dist * dist).sqrt() / len;
        hits.push((t - half, t + half, radius, *o));
    }
    hits.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut pieces = Vec::new();
    let mut cur = a;
    for (t0, t1, radius, o) in hits {
        let p0 = a + d * t0.max(0.0);
        let p1 = a + d * t1.min(1.0);
        if (p0 - cur).norm() > 0.0 {
            pieces.push(Piece::Line { from: cur, to: p0 });
        }
        let th0 = (p0 - o.at).arg();
        let mut dth = (p1 - o.at).arg() - th0;
        while dth > PI {
            dth -= 2.0 * PI;
        }
        while dth <= -PI {
            dth += 2.0 * PI;
        }
        if (dth.abs() - PI).abs() < 1e-12 {
            dth = PI;
        }
        pieces.push(Piece::Arc { center: o.at, radius, theta0: th0, theta1: th0 + dth });
        cur = o.at + C64::from_polar(radius, th0 + dth);
    }
    if (b - cur).norm() > 0.0 {
        pieces.push(Piece::Line { from: cur, to: b });
    }
    Contour::new(pieces)
}

/// Endpoint of a cover path. Moving endpoints are re-resolved on each curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Anchor {
    /// A fixed base point; the sheet is the square root of `f` nearest the stored hint.
    Fixed(C64),
    /// Branch point `i` in chain order.
    Branch(usize),
    /// Zero of `v` off the branch locus: base point `x` with `w = N₁(x)`.
    Zero(usize),
}

/// Anchor positions on a particular curve.
pub trait Locate {
    fn hyper(&self) -> &Hyper;
    fn zero_at(&self, i: usize) -> C64;
}

/// A lifted path: `start → body → end`, where `body` runs between approach points and the
/// first/last legs are rebuilt on each curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverPath {
    pub start: Anchor,
    pub end: Anchor,
    pub body: Contour,
    /// Value of `w` at the start of the body on the curve the path was built on.
    pub w_hint: C64,
}

/// Evaluation legs of a path on a concrete curve.
#[derive(Debug, Clone)]
pub enum Leg {
    Base { piece: Piece, w0: C64 },
    Local { branch: usize, from: C64, to: C64 },
}

impl CoverPath {
    pub fn closed(body: Contour, w_hint: C64) -> CoverPath {
        let x = body.start();
        CoverPath { start: Anchor::Fixed(x), end: Anchor::Fixed(x), body, w_hint }
    }

    pub fn reversed(&self, h: &Hyper, at: &dyn Locate) -> Result<CoverPath> {
        let legs = self.legs(at)?;
        let w_end = end_w(h, &legs);
        Ok(CoverPath { start: self.end, end: self.start, body: self.body.reversed(), w_hint: w_end })
    }

    fn anchor_x(&self, a: Anchor, at: &dyn Locate) -> C64 {
        match a {
            Anchor::Fixed(x) => x,
            Anchor::Branch(i) => at.hyper().branch[i],
            Anchor::Zero(i) => at.zero_at(i),
        }
    }

    /// Legs on the curve `at`.
    pub fn legs(&self, at: &dyn Locate) -> Result<Vec<Leg>> {
        let h = at.hyper();
        let mut legs = Vec::new();
        let body_start = if self.body.pieces.is_empty() { None } else { Some(self.body.start()) };
        let first = body_start.unwrap_or_else(|| self.anchor_x(self.end, at));
        // w at the start of the body
        let mut w = match self.start {
            Anchor::Fixed(x) => {
                let w0 = h.sqrt_near(x, self.w_hint);
                if (x - first).norm() > 0.0 {
                    let w1 = h.walk_w(x, w0, first).ok_or_else(|| path_err(x))?;
                    legs.push(Leg::Base { piece: Piece::Line { from: x, to: first }, w0 });
                    w1
                } else {
                    w0
                }
            }
            Anchor::Zero(i) => {
                let x = at.zero_at(i);
                let w0 = h.n1.eval(x);
                let w1 = h.walk_w(x, w0, first).ok_or_else(|| path_err(x))?;
                legs.push(Leg::Base { piece: Piece::Line { from: x, to: first }, w0 });
                w1
            }
            Anchor::Branch(_) => return Err(Error::Unsupported("paths starting at a branch point".into())),
        };
        for piece in &self.body.pieces {
            legs.push(Leg::Base { piece: *piece, w0: w });
            w = walk_piece(h, piece, w)?;
        }
        let last = legs_end(&legs).unwrap_or(first);
        match self.end {
            Anchor::Fixed(x) => {
                if (x - last).norm() > 1e-14 * x.norm().max(1.0) {
                    legs.push(Leg::Base { piece: Piece::Line { from: last, to: x }, w0: w });
                }
            }
            Anchor::Zero(i) => {
                let x = at.zero_at(i);
                if (x - last).norm() > 0.0 {
                    legs.push(Leg::Base { piece: Piece::Line { from: last, to: x }, w0: w });
                }
            }
            Anchor::Branch(i) => {
                let lam = h.lambda_of(i, last, w);
                legs.push(Leg::Local { branch: i, from: lam, to: C64::new(0.0, 0.0) });
            }
        }
        Ok(legs)
    }

    /// Polyline of `(x, w)` samples, refined so each chord is short against the distance to
    /// the branch points.
    pub fn samples(&self, at: &dyn Locate, per_piece: usize) -> Result<Vec<(C64, C64)>> {
        let h = at.hyper();
        let mut out: Vec<(C64, C64)> = Vec::new();
        for leg in self.legs(at)? {
            match leg {
                Leg::Base { piece, w0 } => {
                    let mut w = w0;
                    let mut x = piece.start();
                    if out.is_empty() {
                        out.push((x, w));
                    }
                    let mut t = 0.0;
                    let base = 1.0 / per_piece as f64;
                    let len = piece.length().max(1e-300);
                    while t < 1.0 {
                        let d = h.dist_to_branch(x);
                        let step = base.min(0.1 * d / len).max(1e-9);
                        let t1 = (t + step).min(1.0);
                        let x1 = piece.point(t1);
                        w = h.continue_w(x, w, x1);
                        x = x1;
                        t = t1;
                        out.push((x, w));
                    }
                }
                Leg::Local { branch, from, to } => {
                    if out.is_empty() {
                        let p = h.local(branch, from);
                        out.push((p.x, p.w));
                    }
                    for k in 1..=per_piece {
                        let lam = from + (to - from) * (k as f64 / per_piece as f64);
                        let p = h.local(branch, lam);
                        out.push((p.x, p.w));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn path_err(x: C64) -> Error {
    Error::RootCollision { x: format!("{x:.6}") }
}

fn legs_end(legs: &[Leg]) -> Option<C64> {
    legs.last().map(|l| match l {
        Leg::Base { piece, .. } => piece.end(),
        Leg::Local { .. } => unreachable!("local legs only end a path"),
    })
}

fn end_w(h: &Hyper, legs: &[Leg]) -> C64 {
    match legs.last() {
        Some(Leg::Base { piece, w0 }) => walk_piece(h, piece, *w0).unwrap_or(*w0),
        Some(Leg::Local { branch, to, .. }) => h.local(*branch, *to).w,
        None => C64::new(0.0, 0.0),
    }
}

/// `w` at the end of a piece from its value at the start.
pub fn walk_piece(h: &Hyper, piece: &Piece, w0: C64) -> Result<C64> {
    let mut w = w0;
    let mut x = piece.start();
    for (_, t1) in panels(piece, &h.branch) {
        let x1 = piece.point(t1);
        w = h.continue_w(x, w, x1);
        x = x1;
    }
    if !w.is_finite() {
        return Err(path_err(piece.start()));
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy)]
pub struct PathIntegral {
    pub value: C64,
    pub error: f64,
    /// Cover point at the end of the path (local parameter `x` unless it ends at a branch point).
    pub end: Pt,
}

/// ∫ of a differential along a path. `f` returns the differential relative to `dλ` at a point.
pub fn integrate_path(
    at: &dyn Locate,
    path: &CoverPath,
    f: &dyn Fn(&Pt) -> C64,
    singular: &[C64],
) -> Result<PathIntegral> {
    let legs = path.legs(at)?;
    integrate_legs(at.hyper(), &legs, f, singular)
}

pub fn integrate_legs(h: &Hyper, legs: &[Leg], f: &dyn Fn(&Pt) -> C64, singular: &[C64]) -> Result<PathIntegral> {
    let mut avoid: Vec<C64> = h.branch.clone();
    avoid.extend_from_slice(singular);
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut end = Pt::regular(C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    for leg in legs {
        match *leg {
            Leg::Base { piece, w0 } => {
                let mut w = w0;
                for (t0, t1) in panels(&piece, &avoid) {
                    let x0 = piece.point(t0);
                    let anchor = (x0, w);
                    let g = |t: f64| {
                        let x = piece.point(t);
                        let wx = h.continue_w(anchor.0, anchor.1, x);
                        f(&Pt::regular(x, wx)) * piece.tangent(t)
                    };
                    let r = integrate_panel(&g, t0, t1)?;
                    value += r.0;
                    error += r.1;
                    let x1 = piece.point(t1);
                    w = h.continue_w(x0, w, x1);
                }
                end = Pt::regular(piece.end(), w);
            }
            Leg::Local { branch, from, to } => {
                let g = |t: f64| f(&h.local(branch, from + (to - from) * t)) * (to - from);
                let r = integrate_panel(&g, 0.0, 1.0)?;
                value += r.0;
                error += r.1;
                end = h.local(branch, to);
            }
        }
    }
    Ok(PathIntegral { value, error, end })
}

fn integrate_panel(g: &dyn Fn(f64) -> C64, t0: f64, t1: f64) -> Result<(C64, f64)> {
    // magnitude scale so near-cancelling panels terminate
    static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    let (x, w) = RULE.get_or_init(|| crate::numerics::quad::gauss_legendre(8));
    let h = 0.5 * (t1 - t0);
    let m = 0.5 * (t0 + t1);
    let scale: f64 = x.iter().zip(w).map(|(&xi, &wi)| g(m + h * xi).norm() * wi).sum::<f64>() * h;
    let r = adaptive(g, t0, t1, QUAD_TOL, scale)?;
    Ok((r.value, r.error))
}
