//! Canonical homology basis for the two-sheeted model.
//!
//! Branch points `e_1..e_{2g+2}` (chain order) are joined by loops `γ_k` around
//! `[e_k, e_{k+1}]`. With `a_α = γ_{2α−1}` and `b_α = γ_{2α} + γ_{2α+2} + … + γ_{2g}`, the signs
//! of the `γ_k` are fixed from their computed intersection numbers so that `a_α · b_β = δ_αβ`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::intersect::intersection;
use super::route::{self, integrate_path, Anchor, CoverPath, Obstacle};
use super::SpectralCurve;
use crate::error::{Error, Result};
use crate::numerics::linalg::solve_matrix;
use crate::numerics::quad::segment_distance;
use crate::numerics::{Contour, Piece, C64};

/// A cycle as a sum of closed lifted loops.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cycle {
    pub parts: Vec<CoverPath>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomologyBasis {
    /// Branch indices in chain order.
    pub order: Vec<usize>,
    /// Signed loops `γ_1..γ_{2g}`.
    pub loops: Vec<CoverPath>,
    pub a: Vec<Cycle>,
    pub b: Vec<Cycle>,
    /// `γ_k · γ_{k+1}` before sign calibration.
    pub adjacent: Vec<i32>,
    /// Small circles around the points over the poles, `(pole, sheet, loop)`.
    pub pole_circles: Vec<(usize, usize, CoverPath)>,
    /// Paths from `x_r` to every other zero of `v`: branch points first, then the other zeros.
    pub zero_paths: Vec<(Anchor, CoverPath)>,
}

fn segments_distance(a0: C64, a1: C64, b0: C64, b1: C64) -> f64 {
    segment_distance(a0, a1, b0)
        .min(segment_distance(a0, a1, b1))
        .min(segment_distance(b0, b1, a0))
        .min(segment_distance(b0, b1, a1))
}

/// Counter-clockwise stadium around `[p, q]` at distance `r`, starting mid-way along the side
/// to the right of `p → q`.
pub fn stadium(p: C64, q: C64, r: f64) -> Contour {
    let u = (q - p) / (q - p).norm();
    let nrm = C64::new(0.0, 1.0) * u;
    let mid = (p + q) * 0.5 - nrm * r;
    let right_th = (-nrm).arg();
    let left_th = nrm.arg();
    Contour::new(vec![
        Piece::Line { from: mid, to: q - nrm * r },
        Piece::Arc { center: q, radius: r, theta0: right_th, theta1: right_th + PI },
        Piece::Line { from: q + nrm * r, to: p + nrm * r },
        Piece::Arc { center: p, radius: r, theta0: left_th, theta1: left_th + PI },
        Piece::Line { from: p - nrm * r, to: mid },
    ])
}

pub fn homology_basis(curve: &SpectralCurve) -> Result<HomologyBasis> {
    let order: Vec<usize> = (0..curve.branch.len()).collect();
    homology_basis_with_order(curve, &order)
}

/// Basis for a prescribed chain order of the branch points.
pub fn homology_basis_with_order(curve: &SpectralCurve, order: &[usize]) -> Result<HomologyBasis> {
    if curve.n() != 2 {
        return Err(Error::Unsupported("homology basis not implemented for n>2".into()));
    }
    let h = curve.two_sheeted()?;
    let g = curve.genus();
    let e: Vec<C64> = order.iter().map(|&i| curve.branch[i].x).collect();
    let special = curve.special_points();

    let mut raw = Vec::with_capacity(2 * g);
    for k in 0..2 * g {
        let (p, q) = (e[k], e[k + 1]);
        let mut d = special
            .iter()
            .filter(|&&s| s != p && s != q)
            .map(|&s| segment_distance(p, q, s))
            .fold(f64::INFINITY, f64::min);
        for j in 0..e.len() - 1 {
            if j + 1 < k || j > k + 1 {
                d = d.min(segments_distance(p, q, e[j], e[j + 1]));
            }
        }
        let factor = if k % 2 == 0 { 0.25 } else { 0.18 };
        let contour = stadium(p, q, factor * d);
        let x = contour.start();
        let w = h.f.eval(x).sqrt();
        raw.push(CoverPath::closed(contour, w));
    }

    let mut adjacent = Vec::new();
    for k in 0..2 * g - 1 {
        let i = intersection(curve, &raw[k], &raw[k + 1])?;
        if i.abs() != 1 {
            return Err(Error::Health(format!("loops {} and {} meet with index {i}", k + 1, k + 2)));
        }
        adjacent.push(i);
    }
    let mut sign = vec![1i32; 2 * g];
    for k in 0..2 * g - 1 {
        sign[k + 1] = sign[k] * adjacent[k];
    }
    let loops: Vec<CoverPath> = raw
        .iter()
        .zip(&sign)
        .map(|(l, &s)| if s > 0 { Ok(l.clone()) } else { l.reversed(h, curve) })
        .collect::<Result<_>>()?;

    let mut basis = HomologyBasis {
        order: order.to_vec(),
        a: (0..g).map(|al| Cycle { parts: vec![loops[2 * al].clone()] }).collect(),
        b: (0..g)
            .map(|al| Cycle { parts: (al..g).map(|be| loops[2 * be + 1].clone()).collect() })
            .collect(),
        loops,
        adjacent,
        pole_circles: Vec::new(),
        zero_paths: Vec::new(),
    };
    orient(curve, &mut basis)?;
    basis.pole_circles = pole_circles(curve)?;
    basis.zero_paths = zero_paths(curve)?;
    Ok(basis)
}

/// Flips the b-cycles if the raw periods give a period matrix with negative imaginary part.
fn orient(curve: &SpectralCurve, basis: &mut HomologyBasis) -> Result<()> {
    let g = curve.genus();
    let (a, b) = raw_periods(curve, basis)?;
    let omega = solve_matrix(&a.transpose(), &b.transpose())?.transpose();
    let im = omega.map(|z| z.im);
    let eig = nalgebra::SymmetricEigen::new((&im + im.transpose()) * 0.5).eigenvalues;
    if eig.iter().all(|&l| l < 0.0) {
        for cyc in basis.b.iter_mut() {
            cyc.parts = cyc.parts.iter().map(|p| p.reversed(curve.two_sheeted()?, curve)).collect::<Result<_>>()?;
        }
        for k in 0..g {
            basis.loops[2 * k + 1] = basis.loops[2 * k + 1].reversed(curve.two_sheeted()?, curve)?;
        }
    } else if !eig.iter().all(|&l| l > 0.0) {
        return Err(Error::Health("period matrix imaginary part is indefinite".into()));
    }
    Ok(())
}

/// Periods of `x^k dx/w`: rows are cycles, columns the differentials.
pub fn raw_periods(curve: &SpectralCurve, basis: &HomologyBasis) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let g = curve.genus();
    let mut a = DMatrix::zeros(g, g);
    let mut b = DMatrix::zeros(g, g);
    for k in 0..g {
        let f = move |p: &super::Pt| p.x.powu(k as u32) * p.m;
        for al in 0..g {
            a[(al, k)] = cycle_integral(curve, &basis.a[al], &f, &[])?;
            b[(al, k)] = cycle_integral(curve, &basis.b[al], &f, &[])?;
        }
    }
    Ok((a, b))
}

pub fn cycle_integral(
    curve: &SpectralCurve,
    cycle: &Cycle,
    f: &dyn Fn(&super::Pt) -> C64,
    singular: &[C64],
) -> Result<C64> {
    let mut total = C64::new(0.0, 0.0);
    for part in &cycle.parts {
        total += integrate_path(curve, part, f, singular)?.value;
    }
    Ok(total)
}

fn circle_from(center: C64, radius: f64, theta: f64) -> Contour {
    Contour::new(vec![Piece::Arc { center, radius, theta0: theta, theta1: theta + 2.0 * PI }])
}

fn pole_circles(curve: &SpectralCurve) -> Result<Vec<(usize, usize, CoverPath)>> {
    let h = curve.two_sheeted()?;
    let mut out = Vec::new();
    for fib in &curve.pole_fibers {
        let y = curve.spec.poles[fib.pole].x;
        let r = 0.2 * curve.clearance(y);
        let w_y = fib.psi * 2.0 + h.n1.eval(y);
        let x = y + C64::new(r, 0.0);
        let w = h.continue_w(y, w_y, x);
        out.push((fib.pole, fib.sheet, CoverPath::closed(circle_from(y, r, 0.0), w)));
    }
    Ok(out)
}

/// Approach point at distance `0.25 × clearance` from `x` in the direction of `toward`.
fn approach(curve: &SpectralCurve, x: C64, toward: C64) -> C64 {
    let r = 0.25 * curve.clearance(x);
    x + (toward - x) / (toward - x).norm() * r
}

fn zero_paths(curve: &SpectralCurve) -> Result<Vec<(Anchor, CoverPath)>> {
    let h = curve.two_sheeted()?;
    let obs = curve.obstacles();
    let xr = curve.base_zero_x();
    let mut targets: Vec<Anchor> = (0..curve.branch.len()).map(Anchor::Branch).collect();
    targets.extend((0..curve.zeros.len()).filter(|&i| i != curve.base_zero).map(Anchor::Zero));
    let mut out = Vec::new();
    for t in targets {
        let x = match t {
            Anchor::Branch(i) => curve.branch[i].x,
            Anchor::Zero(i) => curve.zeros[i].x,
            Anchor::Fixed(x) => x,
        };
        let a0 = approach(curve, xr, x);
        let a1 = approach(curve, x, xr);
        let body = route::route(a0, a1, &obs);
        let w0 = h.walk_w(xr, h.n1.eval(xr), a0).ok_or(Error::RootCollision { x: format!("{xr:.6}") })?;
        let mut path = CoverPath { start: Anchor::Zero(curve.base_zero), end: t, body, w_hint: w0 };
        if let Anchor::Zero(i) = t {
            // arrive on the sheet where v vanishes
            let end = integrate_path(curve, &path, &|_| C64::new(0.0, 0.0), &[])?.end;
            let want = h.n1.eval(curve.zeros[i].x);
            if (end.w - want).norm() > (end.w + want).norm() {
                path.body = with_sheet_swap(curve, &path.body, &obs);
            }
        }
        out.push((t, path));
    }
    Ok(out)
}

/// Appends a loop around the branch point nearest the end of `body`, which swaps sheets.
fn with_sheet_swap(curve: &SpectralCurve, body: &Contour, obs: &[Obstacle]) -> Contour {
    let end = body.end();
    let (i, _) = curve
        .branch
        .iter()
        .enumerate()
        .map(|(i, b)| (i, (b.x - end).norm()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let e = curve.branch[i].x;
    let radius = obs.iter().find(|o| o.at == e).map(|o| o.radius).unwrap_or(1e-3);
    let lp = super::monodromy_loop(end, e, radius, obs);
    let mut pieces = body.pieces.clone();
    pieces.extend(lp.pieces);
    Contour::new(pieces)
}

impl HomologyBasis {
    /// Polylines (base coordinates) of the a- and b-loops, for diagnostics.
    pub fn polylines(&self, _curve: &SpectralCurve) -> Vec<Vec<C64>> {
        self.loops.iter().map(|l| l.body.polyline(16)).collect()
    }

    /// Full intersection matrix of `(a_1..a_g, b_1..b_g)`.
    pub fn intersection_matrix(&self, curve: &SpectralCurve) -> Result<Vec<Vec<i32>>> {
        let cycles: Vec<&Cycle> = self.a.iter().chain(self.b.iter()).collect();
        let mut m = vec![vec![0; cycles.len()]; cycles.len()];
        for i in 0..cycles.len() {
            for j in 0..cycles.len() {
                if i == j {
                    continue;
                }
                let mut s = 0;
                for p in &cycles[i].parts {
                    for q in &cycles[j].parts {
                        s += intersection(curve, p, q)?;
                    }
                }
                m[i][j] = s;
            }
        }
        Ok(m)
    }

    /// `c · path` for a cycle and any lifted path.
    pub fn cycle_dot(&self, curve: &SpectralCurve, cycle: &Cycle, path: &CoverPath) -> Result<i32> {
        let mut s = 0;
        for p in &cycle.parts {
            s += intersection(curve, p, path)?;
        }
        Ok(s)
    }
}
