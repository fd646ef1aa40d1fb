//! Homological coordinates `(A, C)` of `v`, their Jacobian in the raw numerator coefficients,
//! Newton navigation to nearby coordinates and the finite-difference engine.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::differentials::{coefficient_tangent, v_differential, Cover};
use crate::error::{Error, Result};
use crate::numerics::linalg::{condition, solve_dense};
use crate::numerics::C64;

pub const NEWTON_TOL: f64 = 1e-12;
pub const FD_EPS: f64 = 1e-4;
const NEWTON_MAX: usize = 25;
/// Residual accepted when the iteration stagnates.
const NEWTON_FLOOR: f64 = 1e-10;

/// One homological coordinate. Indices are zero-based; names are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coord {
    /// `a`-period of `v`.
    A(usize),
    /// Coefficient of `χ^{-ℓ} dχ` of `v` at the point over pole `j` on sheet `s`.
    C { j: usize, s: usize, ell: usize },
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Coord::A(a) => write!(f, "A{}", a + 1),
            Coord::C { j, s, ell } => write!(f, "C{}.{}.{}", j + 1, s + 1, ell),
        }
    }
}

impl FromStr for Coord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Coord> {
        let bad = || Error::Invalid(format!("bad coordinate name {s:?} (expected A<α> or C<j>.<s>.<ℓ>)"));
        if let Some(rest) = s.strip_prefix('A') {
            let a: usize = rest.parse().map_err(|_| bad())?;
            return if a == 0 { Err(bad()) } else { Ok(Coord::A(a - 1)) };
        }
        if let Some(rest) = s.strip_prefix('C') {
            let parts: Vec<usize> = rest.split('.').map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            if parts.len() != 3 || parts[0] == 0 || parts[1] == 0 || parts[2] == 0 {
                return Err(bad());
            }
            return Ok(Coord::C { j: parts[0] - 1, s: parts[1] - 1, ell: parts[2] });
        }
        Err(bad())
    }
}

impl Coord {
    pub fn is_dependent(&self) -> bool {
        matches!(self, Coord::C { j: 0, s: 0, ell: 1 })
    }
}

/// Coordinates in the fixed order: `A_1..A_g`, then `C` by pole, sheet and order.
pub fn coordinate_list(cover: &Cover) -> Vec<Coord> {
    let mut out: Vec<Coord> = (0..cover.genus()).map(Coord::A).collect();
    for (j, p) in cover.spec().poles.iter().enumerate() {
        for s in 0..cover.spec().n {
            for ell in 1..=p.k {
                let c = Coord::C { j, s, ell };
                if !c.is_dependent() {
                    out.push(c);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuliPoint {
    pub coords: Vec<Coord>,
    pub values: Vec<C64>,
    /// The dependent residue at the first pole on the first sheet.
    pub dependent: C64,
    /// Sum of all residues of `v` including the dependent one.
    pub residue_sum: C64,
}

impl ModuliPoint {
    pub fn get(&self, c: Coord) -> Option<C64> {
        self.coords.iter().position(|&k| k == c).map(|i| self.values[i])
    }

    pub fn index(&self, c: Coord) -> Result<usize> {
        self.coords.iter().position(|&k| k == c).ok_or_else(|| Error::Invalid(format!("unknown coordinate {c}")))
    }

    pub fn scale(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }
}

pub fn coordinates_of(cover: &Cover) -> Result<ModuliPoint> {
    let v = v_differential(cover)?;
    let coords = coordinate_list(cover);
    let sing = |j: usize, s: usize| {
        let (y, w) = cover.pole_point(j, s)?;
        v.singular
            .iter()
            .find(|p| p.x == y && p.w == w)
            .ok_or_else(|| Error::Invalid(format!("no singular part at pole {j}, sheet {s}")))
    };
    let mut values = Vec::with_capacity(coords.len());
    for c in &coords {
        values.push(match *c {
            Coord::A(a) => cover.periods.a_v[a],
            Coord::C { j, s, ell } => sing(j, s)?.principal[ell - 1],
        });
    }
    let dependent = sing(0, 0)?.principal[0];
    let residue_sum = v.singular.iter().map(|p| p.residue()).sum();
    Ok(ModuliPoint { coords, values, dependent, residue_sum })
}

/// `∂(A, C)/∂(coefficients)`, square of size `dim`.
pub fn jacobian(cover: &Cover) -> Result<DMatrix<C64>> {
    let coords = coordinate_list(cover);
    let ncoef = cover.spec().coefficients().len();
    if ncoef != coords.len() {
        return Err(Error::Health(format!("{} coordinates for {} coefficients", coords.len(), ncoef)));
    }
    let mut jac = DMatrix::zeros(coords.len(), ncoef);
    for col in 0..ncoef {
        let mut e = vec![C64::new(0.0, 0.0); ncoef];
        e[col] = C64::new(1.0, 0.0);
        let t = coefficient_tangent(cover, &e);
        let ap = cover.a_periods(&t)?;
        for (row, c) in coords.iter().enumerate() {
            jac[(row, col)] = match *c {
                Coord::A(a) => ap[a],
                Coord::C { j, s, ell } => {
                    let (y, w) = cover.pole_point(j, s)?;
                    let k = cover.spec().poles[j].k;
                    cover.laurent(&t, y, w, cover.pole_radius(j), k, 2)?.c(-(ell as i64))
                }
            };
        }
    }
    Ok(jac)
}

pub fn jacobian_condition(cover: &Cover) -> Result<f64> {
    Ok(condition(&jacobian(cover)?))
}

/// Navigation context: a source cover with its coordinates and Jacobian.
#[derive(Debug, Clone)]
pub struct Chart {
    pub source: Cover,
    pub point: ModuliPoint,
    pub jac: DMatrix<C64>,
}

#[derive(Debug, Clone)]
pub struct Step {
    pub cover: Cover,
    pub point: ModuliPoint,
    pub iterations: usize,
    pub residual: f64,
}

impl Chart {
    pub fn new(source: Cover) -> Result<Chart> {
        let point = coordinates_of(&source)?;
        let jac = jacobian(&source)?;
        Ok(Chart { source, point, jac })
    }

    /// Cover whose coordinates equal `target`, with labels carried from the source.
    pub fn step_to(&self, target: &[C64]) -> Result<Step> {
        let scale = self.point.scale();
        let mut coef = self.source.spec().coefficients();
        let mut cover = self.source.clone();
        let mut point = self.point.clone();
        let mut last = f64::INFINITY;
        let mut best: Option<Step> = None;
        for it in 0..NEWTON_MAX {
            let r: Vec<C64> = point.values.iter().zip(target).map(|(a, b)| a - b).collect();
            let res = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if res <= NEWTON_TOL * scale {
                return Ok(Step { cover, point, iterations: it, residual: res });
            }
            if it > 3 && res > 0.5 * last {
                if last <= NEWTON_FLOOR * scale {
                    return Ok(best.expect("previous iterate"));
                }
                return Err(Error::NewtonDivergence { residual: res });
            }
            best = Some(Step { cover: cover.clone(), point: point.clone(), iterations: it, residual: res });
            last = res;
            let d = solve_dense(&self.jac, &r)?.x;
            for (c, dc) in coef.iter_mut().zip(&d) {
                *c -= dc;
            }
            cover = Cover::tracked(self.source.spec().with_coefficients(&coef), &self.source)?;
            point = coordinates_of(&cover)?;
        }
        Err(Error::NewtonDivergence { residual: last })
    }

    /// Step by `delta` in one coordinate.
    pub fn step_along(&self, c: Coord, delta: C64) -> Result<Step> {
        let i = self.point.index(c)?;
        let mut t = self.point.values.clone();
        t[i] += delta;
        self.step_to(&t)
    }

    pub fn eps_for(&self, c: Coord, rel: f64) -> Result<f64> {
        let z = self.point.values[self.point.index(c)?];
        Ok(rel * z.norm().max(1.0))
    }
}

/// Central difference at `ε` and `ε/2` with one Richardson level.
#[derive(Debug, Clone, Serialize)]
pub struct FdResult {
    pub eps: f64,
    pub coarse: Vec<C64>,
    pub fine: Vec<C64>,
    pub value: Vec<C64>,
    /// `max |fine − coarse|`, the `ε²`-consistency gap.
    pub gap: f64,
}

pub fn central<F>(chart: &Chart, c: Coord, eps: f64, f: &F) -> Result<Vec<C64>>
where
    F: Fn(&Cover) -> Result<Vec<C64>>,
{
    let plus = f(&chart.step_along(c, C64::new(eps, 0.0))?.cover)?;
    let minus = f(&chart.step_along(c, C64::new(-eps, 0.0))?.cover)?;
    Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * eps)).collect())
}

pub fn fd_derivative<F>(chart: &Chart, c: Coord, rel_eps: f64, f: &F) -> Result<FdResult>
where
    F: Fn(&Cover) -> Result<Vec<C64>>,
{
    let eps = chart.eps_for(c, rel_eps)?;
    let coarse = central(chart, c, eps, f)?;
    let fine = central(chart, c, eps / 2.0, f)?;
    let value = coarse.iter().zip(&fine).map(|(a, b)| (b * 4.0 - a) / 3.0).collect();
    let gap = coarse.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(FdResult { eps, coarse, fine, value, gap })
}
