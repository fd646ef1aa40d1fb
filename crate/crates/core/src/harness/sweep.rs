//! Convergence tables of plain central differences against the residue formulas.

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use super::suites::{central_at, moved, Context};
use crate::differentials::Cover;
use crate::error::{Error, Result};
use crate::moduli::{Coord, NEWTON_TOL};
use crate::numerics::C64;
use crate::variations::{direction_differential, period_variation_forms, vary_kernel, KernelTarget};

/// Quantities a sweep can differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// Entry of the period matrix (zero-based).
    Omega(usize, usize),
    /// `v_α` at the first sample point.
    VAlpha(usize),
    /// `B` at the first two sample points.
    Bidiff,
}

impl FromStr for Functional {
    type Err = Error;

    /// `omega`, `omega:α:β`, `valpha:α` (one-based) or `bidiff`.
    fn from_str(s: &str) -> Result<Functional> {
        let bad = || Error::Invalid(format!("unknown functional `{s}` (valid: omega, omega:<α>:<β>, valpha:<α>, bidiff)"));
        let parts: Vec<&str> = s.split(':').collect();
        let idx = |p: &str| p.parse::<usize>().ok().filter(|&k| k > 0).map(|k| k - 1).ok_or_else(bad);
        match parts.as_slice() {
            ["omega"] => Ok(Functional::Omega(0, 0)),
            ["omega", a, b] => Ok(Functional::Omega(idx(a)?, idx(b)?)),
            ["valpha", a] => Ok(Functional::VAlpha(idx(a)?)),
            ["bidiff"] => Ok(Functional::Bidiff),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub fd_re: f64,
    pub fd_im: f64,
    pub formula_re: f64,
    pub formula_im: f64,
    pub abs_err: f64,
    /// Error of the previous row over this one.
    pub ratio: Option<f64>,
    /// The error is within reach of the Newton residual amplified by `1/ε`.
    pub noise_floor: bool,
}

/// Headroom over the estimated noise before a row counts as truncation-dominated.
const NOISE_MARGIN: f64 = 10.0;

pub fn sweep(ctx: &Context, functional: Functional, c: Coord, eps_list: &[f64]) -> Result<Vec<SweepRow>> {
    if eps_list.is_empty() {
        return Err(Error::Invalid("empty ε list".into()));
    }
    if let Some(e) = eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::Invalid(format!("ε must be positive, got {e}")));
    }
    let src = ctx.cover();
    let g = src.genus();
    let h = direction_differential(src, c)?;
    let pts = match functional {
        Functional::Omega(a, b) if a >= g || b >= g => {
            return Err(Error::Invalid(format!("Ω index out of range for genus {g}")));
        }
        Functional::VAlpha(a) if a >= g => return Err(Error::Invalid(format!("α out of range for genus {g}"))),
        Functional::Omega(..) => Vec::new(),
        _ => ctx.points(2)?,
    };
    let formula = match functional {
        Functional::Omega(a, b) => period_variation_forms(src, &ctx.table, &h)?.pairing[(a, b)],
        Functional::VAlpha(alpha) => vary_kernel(src, &ctx.table, &h, KernelTarget::VAlpha { alpha, x: pts[0] })?,
        Functional::Bidiff => vary_kernel(src, &ctx.table, &h, KernelTarget::B { x: pts[0], y: pts[1] })?,
    };
    let f = |cv: &Cover| -> Result<Vec<C64>> {
        Ok(vec![match functional {
            Functional::Omega(a, b) => cv.periods.omega[(a, b)],
            Functional::VAlpha(a) => {
                let p = moved(cv, &pts[0]);
                cv.v_alpha_numer(a, p.x) * p.m
            }
            Functional::Bidiff => cv.bker.eval(&moved(cv, &pts[0]), &moved(cv, &pts[1])),
        }])
    };
    // Newton residual in the coordinates times the size of the derivative
    let floor = NEWTON_TOL * ctx.chart.point.scale() * formula.norm();
    let mut rows: Vec<SweepRow> = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let fd = central_at(ctx, c, eps, &f)?[0];
        let abs_err = (fd - formula).norm();
        let ratio = rows.last().map(|r| r.abs_err / abs_err);
        rows.push(SweepRow {
            eps,
            fd_re: fd.re,
            fd_im: fd.im,
            formula_re: formula.re,
            formula_im: formula.im,
            abs_err,
            ratio,
            noise_floor: abs_err < NOISE_MARGIN * floor / eps,
        });
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Invalid(format!("cannot write CSV: {e}")))?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("cannot write CSV: {e}")))?;
    Ok(())
}
