use nalgebra::{DMatrix, DVector};

use super::C64;
use crate::error::{Error, Result};

const SINGULAR_COND: f64 = 1e13;

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<C64>,
    pub residual: f64,
    pub cond: f64,
}

pub fn to_matrix(rows: &[Vec<C64>]) -> DMatrix<C64> {
    let n = rows.len();
    let m = if n == 0 { 0 } else { rows[0].len() };
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// 2-norm condition number from singular values.
pub fn condition(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve a square dense system; residual is relative to ‖A‖‖x‖ + ‖b‖.
pub fn solve_dense(a: &DMatrix<C64>, b: &[C64]) -> Result<Solution> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::Invalid("solve_dense needs a square system".into()));
    }
    let cond = condition(a);
    if !cond.is_finite() || cond > SINGULAR_COND {
        return Err(Error::Singular { cond });
    }
    let rhs = DVector::from_column_slice(b);
    let x = a.clone().lu().solve(&rhs).ok_or(Error::Singular { cond })?;
    let r = a * &x - &rhs;
    let scale = a.norm() * x.norm() + rhs.norm();
    let residual = if scale > 0.0 { r.norm() / scale } else { 0.0 };
    Ok(Solution { x: x.iter().copied().collect(), residual, cond })
}

/// Solve A X = B column by column; returns X.
pub fn solve_matrix(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let mut out = DMatrix::zeros(a.ncols(), b.ncols());
    for j in 0..b.ncols() {
        let col: Vec<C64> = b.column(j).iter().copied().collect();
        let s = solve_dense(a, &col)?;
        for i in 0..a.ncols() {
            out[(i, j)] = s.x[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_returns_rhs() {
        let a = DMatrix::<C64>::identity(3, 3);
        let b = vec![c(1.0, 2.0), c(-1.0, 0.0), c(0.0, 3.0)];
        let s = solve_dense(&a, &b).unwrap();
        assert_eq!(s.x, b);
        assert!((s.cond - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = to_matrix(&[vec![c(2.0, 0.0), c(1.0, 1.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]]);
        let b = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let x0 = (a[(1, 1)] * b[0] - a[(0, 1)] * b[1]) / det;
        let x1 = (a[(0, 0)] * b[1] - a[(1, 0)] * b[0]) / det;
        let s = solve_dense(&a, &b).unwrap();
        assert!((s.x[0] - x0).norm() < 1e-15 && (s.x[1] - x1).norm() < 1e-15);
        assert!(s.residual < 1e-15);
    }

    #[test]
    fn singular_rejected() {
        let a = to_matrix(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(matches!(solve_dense(&a, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::Singular { .. })));
    }
}
