//! Fibers of `ψⁿ + N₁ψⁿ⁻¹ + … + N_n = 0` (with `ψ = P·v/dx`) and their continuation.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numerics::{ComplexPoly, Contour, C64};

const NEWTON_TOL: f64 = 1e-13;
const MIN_STEP: f64 = 1e-12;

/// `F(x, ψ)` together with `∂_ψF` and `∂_xF`.
pub fn eval_fiber_poly(numer: &[ComplexPoly], x: C64, psi: C64) -> (C64, C64, C64) {
    let n = numer.len();
    // F = ψ^n + Σ N_ℓ ψ^{n−ℓ}
    let mut f = psi.powu(n as u32);
    let mut fp = psi.powu(n as u32 - 1) * n as f64;
    let mut fx = C64::new(0.0, 0.0);
    for (i, q) in numer.iter().enumerate() {
        let ell = i + 1;
        let k = (n - ell) as u32;
        let (qv, dq, _) = q.eval_d2(x);
        f += qv * psi.powu(k);
        if k > 0 {
            fp += qv * psi.powu(k - 1) * k as f64;
        }
        fx += dq * psi.powu(k);
    }
    (f, fp, fx)
}

/// The polynomial in `ψ` at fixed `x`, constant term first.
fn fiber_poly(numer: &[ComplexPoly], x: C64) -> ComplexPoly {
    let n = numer.len();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    for (i, q) in numer.iter().enumerate() {
        c[n - 1 - i] = q.eval(x);
    }
    ComplexPoly::new(c)
}

/// All `n` values of `ψ` over `x`.
pub fn fiber(numer: &[ComplexPoly], x: C64) -> Result<Vec<C64>> {
    fiber_poly(numer, x).raw_roots()
}

/// Discriminant of the fiber polynomial as a polynomial in `x` of degree at most `bound`.
pub fn discriminant(numer: &[ComplexPoly], bound: usize) -> Result<ComplexPoly> {
    match numer.len() {
        2 => Ok(&(&numer[0] * &numer[0]) - &numer[1].scaled(C64::new(4.0, 0.0))),
        3 => {
            let (a, b, c) = (&numer[0], &numer[1], &numer[2]);
            let ab = a * b;
            let terms = [
                (&ab * &ab, 1.0),
                (&(b * b) * b, -4.0),
                (&(&(a * a) * a) * c, -4.0),
                (c * c, -27.0),
                (&ab * c, 18.0),
            ];
            Ok(terms
                .iter()
                .fold(ComplexPoly::default(), |acc, (t, s)| &acc + &t.scaled(C64::new(*s, 0.0))))
        }
        _ => interpolated_discriminant(numer, bound),
    }
}

fn interpolated_discriminant(numer: &[ComplexPoly], bound: usize) -> Result<ComplexPoly> {
    let samples = (bound + 1).next_power_of_two() * 2;
    let radius = 1.0;
    let mut buf = Vec::with_capacity(samples);
    for j in 0..samples {
        let x = C64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64);
        let r = fiber(numer, x)?;
        let mut d = C64::new(1.0, 0.0);
        for i in 0..r.len() {
            for k in 0..i {
                d *= (r[i] - r[k]) * (r[i] - r[k]);
            }
        }
        buf.push(d);
    }
    FftPlanner::new().plan_fft_forward(samples).process(&mut buf);
    let coeffs = (0..=bound).map(|k| buf[k] / samples as f64).collect::<Vec<_>>();
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let cleaned = coeffs
        .into_iter()
        .map(|c| if c.norm() < 1e-13 * scale { C64::new(0.0, 0.0) } else { c })
        .collect();
    Ok(ComplexPoly::new(cleaned))
}

/// Newton polish of one fiber value.
fn polish(numer: &[ComplexPoly], x: C64, mut psi: C64) -> Option<C64> {
    for _ in 0..20 {
        let (f, fp, _) = eval_fiber_poly(numer, x, psi);
        if fp.norm() == 0.0 {
            return None;
        }
        let step = f / fp;
        psi -= step;
        if step.norm() <= NEWTON_TOL * psi.norm().max(1.0) {
            return Some(psi);
        }
    }
    None
}

fn min_separation(r: &[C64], i: usize) -> f64 {
    r.iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, z)| (z - r[i]).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Continue all fiber values along a contour; `start` is the fiber over the contour start
/// in the caller's ordering, and the result keeps that ordering. Returns the final fiber and
/// a log of `(x, fiber)` at accepted steps.
pub fn track(numer: &[ComplexPoly], path: &Contour, start: &[C64]) -> Result<(Vec<C64>, Vec<(C64, Vec<C64>)>)> {
    let mut roots = start.to_vec();
    let mut log = vec![(path.start(), roots.clone())];
    for piece in &path.pieces {
        let mut t = 0.0;
        let mut h: f64 = 0.05;
        while t < 1.0 {
            let step = h.min(1.0 - t);
            let x0 = piece.point(t);
            let x1 = piece.point(t + step);
            let dx = x1 - x0;
            let mut next = Vec::with_capacity(roots.len());
            let mut ok = true;
            for &psi in &roots {
                let (_, fp, fx) = eval_fiber_poly(numer, x0, psi);
                let pred = psi - fx / fp * dx;
                match polish(numer, x1, pred) {
                    Some(z) => next.push((pred, z)),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let preds: Vec<C64> = next.iter().map(|p| p.0).collect();
                ok = next
                    .iter()
                    .enumerate()
                    .all(|(i, (p, z))| (z - p).norm() < 0.25 * min_separation(&preds, i));
            }
            if ok {
                roots = next.into_iter().map(|p| p.1).collect();
                t += step;
                h = (step * 1.5).min(0.1);
                log.push((x1, roots.clone()));
            } else {
                h = step * 0.5;
                if h < MIN_STEP {
                    return Err(Error::RootCollision { x: format!("{x0:.6}") });
                }
            }
        }
    }
    Ok((roots, log))
}

/// Permutation of the labels in `start` after continuation around a closed contour:
/// `perm[s]` is the label that sheet `s` ends on.
pub fn loop_permutation(numer: &[ComplexPoly], path: &Contour, start: &[C64]) -> Result<Vec<usize>> {
    let (end, _) = track(numer, path, start)?;
    let mut perm = Vec::with_capacity(end.len());
    for z in &end {
        let (k, d) = start
            .iter()
            .enumerate()
            .map(|(k, s)| (k, (s - z).norm()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if d > 1e-6 * z.norm().max(1.0) {
            return Err(Error::Health(format!("loop does not close on a fiber point ({d:.2e})")));
        }
        perm.push(k);
    }
    Ok(perm)
}

pub fn compose(first: &[usize], then: &[usize]) -> Vec<usize> {
    first.iter().map(|&s| then[s]).collect()
}

pub fn is_transposition(perm: &[usize]) -> bool {
    let moved: Vec<usize> = (0..perm.len()).filter(|&i| perm[i] != i).collect();
    moved.len() == 2 && perm[moved[0]] == moved[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cubic_numer() -> Vec<ComplexPoly> {
        vec![
            ComplexPoly::new(vec![c(0.2, 0.1), c(0.5, 0.0)]),
            ComplexPoly::new(vec![c(-0.3, 0.2), c(0.1, 0.0), c(0.4, -0.1), c(0.2, 0.0)]),
            ComplexPoly::new(vec![c(0.1, 0.0), c(0.3, 0.3), c(-0.2, 0.0), c(0.1, 0.1), c(0.6, 0.0)]),
        ]
    }

    #[test]
    fn cubic_discriminant_matches_root_product() {
        let numer = cubic_numer();
        let d = discriminant(&numer, 8).unwrap();
        let x = c(0.37, -0.21);
        let r = fiber(&numer, x).unwrap();
        let mut prod = c(1.0, 0.0);
        for i in 0..3 {
            for k in 0..i {
                prod *= (r[i] - r[k]) * (r[i] - r[k]);
            }
        }
        assert!((d.eval(x) - prod).norm() < 1e-11 * prod.norm().max(1.0));
    }

    #[test]
    fn interpolation_matches_closed_form() {
        let numer = cubic_numer();
        let a = discriminant(&numer, 12).unwrap();
        let b = interpolated_discriminant(&numer, 12).unwrap();
        let x = c(-0.6, 0.45);
        assert!((a.eval(x) - b.eval(x)).norm() < 1e-9 * a.eval(x).norm().max(1.0));
    }

    #[test]
    fn contractible_loop_is_identity() {
        let numer = cubic_numer();
        let d = discriminant(&numer, 8).unwrap();
        let e = d.raw_roots().unwrap();
        // a small circle avoiding every branch point
        let center = c(5.0, 5.0);
        assert!(e.iter().all(|z| (z - center).norm() > 1.0));
        let start = fiber(&numer, center + c(0.5, 0.0)).unwrap();
        let path = Contour::new(vec![crate::numerics::Piece::Arc {
            center,
            radius: 0.5,
            theta0: 0.0,
            theta1: 2.0 * PI,
        }]);
        assert_eq!(loop_permutation(&numer, &path, &start).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn small_loop_around_branch_point_transposes() {
        let numer = cubic_numer();
        let d = discriminant(&numer, 8).unwrap();
        let e = d.raw_roots().unwrap();
        let e0 = e[0];
        let sep = e.iter().skip(1).map(|z| (z - e0).norm()).fold(f64::INFINITY, f64::min);
        let r = 0.2 * sep;
        let start = fiber(&numer, e0 + C64::new(r, 0.0)).unwrap();
        let perm = loop_permutation(&numer, &Contour::circle(e0, r), &start).unwrap();
        assert!(is_transposition(&perm), "{perm:?}");
    }
}
