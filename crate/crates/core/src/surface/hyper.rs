//! The two-sheeted model `w² = f(x)`, `f = N₁² − 4N₂`, with `v = (w − N₁)/(2P) dx`.

use crate::numerics::{ComplexPoly, C64};

/// A point of the cover together with its local parameter `λ`.
///
/// `m = (dx/dλ)/w`, so a differential written as `F(x, w) dx/w` has value `F·m` relative to `dλ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub x: C64,
    pub w: C64,
    pub m: C64,
}

impl Pt {
    /// Point away from branch points, local parameter `x`.
    pub fn regular(x: C64, w: C64) -> Pt {
        Pt { x, w, m: w.inv() }
    }
}

#[derive(Debug, Clone)]
pub struct Hyper {
    pub n1: ComplexPoly,
    pub n2: ComplexPoly,
    pub pole: ComplexPoly,
    pub f: ComplexPoly,
    pub df: ComplexPoly,
    /// Branch points in chain order.
    pub branch: Vec<C64>,
    pub genus: usize,
    /// `R(e_i)`, the principal square root of `f'(e_i)`.
    r_branch: Vec<C64>,
}

impl Hyper {
    pub fn new(n1: ComplexPoly, n2: ComplexPoly, pole: ComplexPoly, branch: Vec<C64>) -> Hyper {
        let f = &(&n1 * &n1) - &n2.scaled(C64::new(4.0, 0.0));
        let df = f.derivative();
        let r_branch = branch.iter().map(|&e| df.eval(e).sqrt()).collect();
        let genus = (branch.len() / 2).saturating_sub(1);
        Hyper { n1, n2, pole, f, df, branch, genus, r_branch }
    }

    pub fn dist_to_branch(&self, x: C64) -> f64 {
        self.branch.iter().map(|e| (x - e).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `w` at `to` from its value at `from`; valid while `|to − from|` is well inside the
    /// distance from `from` to the branch points.
    pub fn continue_w(&self, from: C64, w_from: C64, to: C64) -> C64 {
        self.branch.iter().fold(w_from, |w, &e| w * ((to - e) / (from - e)).sqrt())
    }

    /// Continue `w` along the segment `from → to` in safe steps.
    pub fn walk_w(&self, from: C64, w_from: C64, to: C64) -> Option<C64> {
        let (mut x, mut w) = (from, w_from);
        let mut guard = 0;
        while (to - x).norm() > 0.0 {
            let d = self.dist_to_branch(x);
            let len = (to - x).norm();
            let step = (0.4 * d).min(len);
            if step < 1e-12 * len.max(1.0) || guard > 100_000 {
                return None;
            }
            let next = if step >= len { to } else { x + (to - x) * (step / len) };
            w = self.continue_w(x, w, next);
            x = next;
            guard += 1;
        }
        Some(w)
    }

    /// The square root of `f(x)` closest to `guess`.
    pub fn sqrt_near(&self, x: C64, guess: C64) -> C64 {
        let w = self.f.eval(x).sqrt();
        if (w - guess).norm() <= (w + guess).norm() {
            w
        } else {
            -w
        }
    }

    /// `v/dx` at `(x, w)`.
    pub fn phi(&self, x: C64, w: C64) -> C64 {
        (w - self.n1.eval(x)) / (self.pole.eval(x) * 2.0)
    }

    /// `v` relative to `dx/w`.
    pub fn v_numer(&self, x: C64, w: C64) -> C64 {
        w * self.phi(x, w)
    }

    /// `w/λ` near branch point `i`, where `x = e_i + λ²`.
    pub fn r_at(&self, i: usize, x: C64) -> C64 {
        let e = self.branch[i];
        self.branch
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .fold(self.r_branch[i], |r, (_, &ek)| r * ((x - ek) / (e - ek)).sqrt())
    }

    /// Point with local parameter `λ` at branch point `i`.
    pub fn local(&self, i: usize, lambda: C64) -> Pt {
        let x = self.branch[i] + lambda * lambda;
        let r = self.r_at(i, x);
        Pt { x, w: lambda * r, m: C64::new(2.0, 0.0) / r }
    }

    /// Local parameter of `(x, w)` near branch point `i`.
    pub fn lambda_of(&self, i: usize, x: C64, w: C64) -> C64 {
        w / self.r_at(i, x)
    }

    /// Radius within which the branch-local chart at `i` is used.
    pub fn chart_radius(&self, i: usize) -> f64 {
        let e = self.branch[i];
        self.branch
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, ek)| (e - ek).norm())
            .fold(f64::INFINITY, f64::min)
            * 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> Hyper {
        let n1 = ComplexPoly::new(vec![c(0.3, 0.1), c(-0.2, 0.4), c(1.0, 0.0)]);
        let n2 = ComplexPoly::new(vec![c(0.5, 0.0), c(0.1, -0.3), c(-0.7, 0.2), c(0.2, 0.0), c(0.9, 0.1)]);
        let pole = ComplexPoly::from_roots(&[c(0.0, 0.0); 4]);
        let f = &(&n1 * &n1) - &n2.scaled(c(4.0, 0.0));
        let mut e: Vec<C64> = f.raw_roots().unwrap();
        e.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        Hyper::new(n1, n2, pole, e)
    }

    #[test]
    fn continuation_squares_to_f() {
        let h = sample();
        let x0 = c(3.0, 2.0);
        let w0 = h.f.eval(x0).sqrt();
        let w = h.walk_w(x0, w0, c(-2.5, 1.7)).unwrap();
        assert!((w * w - h.f.eval(c(-2.5, 1.7))).norm() < 1e-11 * h.f.eval(c(-2.5, 1.7)).norm());
    }

    #[test]
    fn local_chart_matches_curve() {
        let h = sample();
        for i in 0..h.branch.len() {
            let p = h.local(i, c(0.05, 0.02));
            assert!((p.w * p.w - h.f.eval(p.x)).norm() < 1e-12);
            let lam = h.lambda_of(i, p.x, p.w);
            assert!((lam - c(0.05, 0.02)).norm() < 1e-13);
        }
    }

    #[test]
    fn sheets_solve_the_quadratic() {
        let h = sample();
        let x = c(0.7, -0.4);
        let w = h.f.eval(x).sqrt();
        let q1 = h.n1.eval(x) / h.pole.eval(x);
        let q2 = h.n2.eval(x) / (h.pole.eval(x) * h.pole.eval(x));
        for s in [w, -w] {
            let ph = h.phi(x, s);
            assert!((ph * ph + q1 * ph + q2).norm() < 1e-12 * (q2.norm() + 1.0));
        }
    }
}
