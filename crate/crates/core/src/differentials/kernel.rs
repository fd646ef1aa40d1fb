//! Canonical bidifferential, Abel map, prime form and the Bergman projective connection.
//!
//! The bidifferential is built algebraically:
//! `B₀ = (2w₁w₂ + F(x₁,x₂)) / (4(x₁−x₂)²) · (dx₁/w₁)(dx₂/w₂)` with
//! `F(x,z) = Σ_i x^i z^i (2a_{2i} + a_{2i+1}(x+z))` for `f = Σ a_k x^k`, plus
//! `Σ c_kl x₁^k x₂^l (dx₁/w₁)(dx₂/w₂)` chosen so that all a-periods vanish.

use nalgebra::DMatrix;

use super::{Cover, PeriodData};
use crate::error::{Error, Result};
use crate::numerics::linalg::solve_matrix;
use crate::numerics::{circle_jet, C64};
use crate::surface::homology::{cycle_integral, HomologyBasis};
use crate::surface::route::{integrate_path, route, Anchor, CoverPath, Locate};
use crate::surface::{monodromy_loop, Hyper, Pt, SpectralCurve};

#[derive(Debug, Clone)]
pub struct AlgebraicB {
    /// Coefficients of `f`, padded to degree `2g+3`.
    pub a: Vec<C64>,
    pub genus: usize,
    /// Holomorphic correction `c_kl`.
    pub corr: DMatrix<C64>,
}

impl AlgebraicB {
    pub fn new(curve: &SpectralCurve, basis: &HomologyBasis, periods: &PeriodData) -> Result<AlgebraicB> {
        let h = curve.two_sheeted()?;
        let g = curve.genus();
        let mut a: Vec<C64> = (0..2 * g + 4).map(|k| h.f.coeff(k)).collect();
        a.truncate(2 * g + 4);
        let mut out = AlgebraicB { a, genus: g, corr: DMatrix::zeros(g, g) };
        // a-periods of B₀(·, q) relative to dq/w(q), sampled far from every cycle
        let r = curve.basepoint;
        let qs: Vec<C64> = (0..g).map(|m| r * C64::from_polar(1.0, 0.15 * m as f64)).collect();
        let mut vals = DMatrix::zeros(g, g);
        for (m, &q) in qs.iter().enumerate() {
            let wq = h.f.eval(q).sqrt();
            let f = |p: &Pt| out.b0(p.x, p.w, q, wq) * p.m;
            for al in 0..g {
                vals[(m, al)] = cycle_integral(curve, &basis.a[al], &f, &[q])?;
            }
        }
        // vals[m][α] = Σ_l N[α][l] q_m^l
        let vander = DMatrix::from_fn(g, g, |m, l| qs[m].powu(l as u32));
        let n = solve_matrix(&vander, &vals)?.transpose();
        // Σ_k A[α][k] c[k][l] = −N[α][l]
        out.corr = -solve_matrix(&periods.raw_a, &n)?;
        Ok(out)
    }

    fn f_xz(&self, x: C64, z: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        let xz = x * z;
        let mut p = C64::new(1.0, 0.0);
        for i in 0..=self.genus + 1 {
            s += p * (self.a[2 * i] * 2.0 + self.a[2 * i + 1] * (x + z));
            p *= xz;
        }
        s
    }

    /// `∂²F/∂z²` on the diagonal.
    fn f_zz_diag(&self, x: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..=self.genus + 1 {
            let fi = i as f64;
            if i >= 2 {
                s += x.powu(2 * i as u32 - 2) * fi * (fi - 1.0) * (self.a[2 * i] * 2.0 + self.a[2 * i + 1] * x * 2.0);
            }
            if i >= 1 {
                s += x.powu(2 * i as u32 - 1) * self.a[2 * i + 1] * 2.0 * fi;
            }
        }
        s
    }

    fn b0(&self, x1: C64, w1: C64, x2: C64, w2: C64) -> C64 {
        let d = x1 - x2;
        (w1 * w2 * 2.0 + self.f_xz(x1, x2)) / (d * d * 4.0)
    }

    fn correction(&self, x1: C64, x2: C64) -> C64 {
        let g = self.genus;
        let mut s = C64::new(0.0, 0.0);
        for k in 0..g {
            for l in 0..g {
                s += self.corr[(k, l)] * x1.powu(k as u32) * x2.powu(l as u32);
            }
        }
        s
    }

    /// `B` relative to `(dx₁/w₁)(dx₂/w₂)`.
    pub fn numer(&self, x1: C64, w1: C64, x2: C64, w2: C64) -> C64 {
        self.b0(x1, w1, x2, w2) + self.correction(x1, x2)
    }

    /// `B` relative to the local parameters of both points.
    pub fn eval(&self, p: &Pt, q: &Pt) -> C64 {
        self.numer(p.x, p.w, q.x, q.w) * p.m * q.m
    }

    /// Regular part of `B` on the diagonal in the coordinate `x`: `S_B / 6`.
    pub fn reg_x(&self, h: &Hyper, x: C64) -> C64 {
        let (f, df, d2f) = h.f.eval_d2(x);
        (self.f_zz_diag(x) - d2f + df * df / (f * 2.0)) / (f * 8.0) + self.correction(x, x) / f
    }

    /// Bergman projective connection in the coordinate `x`.
    pub fn sb_x(&self, h: &Hyper, x: C64) -> C64 {
        self.reg_x(h, x) * 6.0
    }

    /// Bergman projective connection in the local parameter `λ` at branch point `i`
    /// (`x = e_i + λ²`).
    pub fn sb_lambda(&self, h: &Hyper, i: usize, lambda: C64) -> C64 {
        let x = h.branch[i] + lambda * lambda;
        self.sb_x(h, x) * lambda * lambda * 4.0 - (lambda * lambda).inv() * 1.5
    }
}

/// `(φ, φ', φ'')` of `φ = v/dx` along the sheet through `(x, w)`.
pub fn phi_derivatives(h: &Hyper, x: C64, w: C64) -> (C64, C64, C64) {
    let (f, df, d2f) = h.f.eval_d2(x);
    let (n1, dn1, d2n1) = h.n1.eval_d2(x);
    let (p, dp, d2p) = h.pole.eval_d2(x);
    let dw = df / (w * 2.0);
    let d2w = (d2f * 0.5 - dw * dw) / w;
    let _ = f;
    let u = w - n1;
    let du = dw - dn1;
    let d2u = d2w - d2n1;
    let phi = u / (p * 2.0);
    let dphi = (du * p - u * dp) / (p * p * 2.0);
    let d2phi = ((d2u * p - u * d2p) * p - (du * p - u * dp) * dp * 2.0) / (p * p * p * 2.0);
    (phi, dphi, d2phi)
}

/// Schwarzian of `∫v` in the coordinate `x`.
pub fn sv_x(h: &Hyper, x: C64, w: C64) -> C64 {
    let (phi, d1, d2) = phi_derivatives(h, x, w);
    let r = d1 / phi;
    d2 / phi - r * r - r * r * 0.5
}

/// `B_reg(x,x)/v` relative to `dx`.
pub fn breg_over_v_x(cover: &Cover, x: C64, w: C64) -> C64 {
    let h = cover.h();
    let (phi, _, _) = phi_derivatives(h, x, w);
    (cover.bker.sb_x(h, x) - sv_x(h, x, w)) / (phi * 6.0)
}

/// `B_reg(x,x)/v` relative to `dλ` at branch point `i`.
pub fn breg_over_v_lambda(cover: &Cover, i: usize, lambda: C64) -> C64 {
    let h = cover.h();
    let p = h.local(i, lambda);
    breg_over_v_x(cover, p.x, p.w) * lambda * 2.0
}

/// `B_reg(x,x)` in the coordinate `x` from the defining limit, on a circle of radius `δ`.
pub fn breg_limit(cover: &Cover, x: C64, w: C64, delta: f64) -> Result<C64> {
    let h = cover.h();
    let one = |d: C64| {
        let y = x + d;
        let wy = h.continue_w(x, w, y);
        let b = cover.bker.numer(x, w, y, wy) / (w * wy);
        // ∫_x^y v by 16-point Gauss–Legendre on the segment
        let (nodes, weights) = crate::numerics::quad::gauss_legendre(16);
        let mut z = C64::new(0.0, 0.0);
        for (t, wt) in nodes.iter().zip(&weights) {
            let s = x + d * (0.5 * (t + 1.0));
            let ws = h.continue_w(x, w, s);
            z += h.phi(s, ws) * d * (0.5 * wt);
        }
        b - h.phi(x, w) * h.phi(y, wy) / (z * z)
    };
    // removable singularity at d = 0: take the constant term on a circle
    let mut f = one;
    circle_jet(&mut f, delta, 0, 12).map(|j| j.c(0))
}

/// `∫ v⃗` from the basepoint on sheet 0 to the basepoint on sheet 1.
pub fn sheet_shift(cover: &Cover) -> Result<Vec<C64>> {
    let curve = &cover.curve;
    let h = cover.h();
    let e = h.branch[0];
    let obs = curve.obstacles();
    let radius = obs.iter().find(|o| o.at == e).map(|o| o.radius).unwrap_or(1e-3);
    let body = monodromy_loop(curve.basepoint, e, radius, &obs);
    let w0 = curve.basepoint_w(0)?;
    let path = CoverPath::closed(body, w0);
    let out = abel_along(cover, &path)?;
    let end = out.1;
    if (end.w + w0).norm() > 1e-8 * w0.norm() {
        return Err(Error::Health("sheet-swap loop did not change sheets".into()));
    }
    Ok(out.0)
}

fn abel_along(cover: &Cover, path: &CoverPath) -> Result<(Vec<C64>, Pt)> {
    let g = cover.genus();
    let mut out = Vec::with_capacity(g);
    let mut end = None;
    for al in 0..g {
        let r = integrate_path(&cover.curve, path, &|p: &Pt| cover.v_alpha_numer(al, p.x) * p.m, &[])?;
        end = Some(r.end);
        out.push(r.value);
    }
    Ok((out, end.expect("genus ≥ 1")))
}

/// Abel map of a cover point from the basepoint on sheet 0, along the reference route.
pub fn abel(cover: &Cover, p: &Pt) -> Result<Vec<C64>> {
    let curve = &cover.curve;
    let h = cover.h();
    let x0 = curve.basepoint;
    let at_branch = h.branch.iter().position(|&e| (e - p.x).norm() < 1e-14 * e.norm().max(1.0));
    let end = match at_branch {
        Some(i) => Anchor::Branch(i),
        None => Anchor::Fixed(p.x),
    };
    let target = route(x0, p.x, &curve.obstacles());
    let w0 = curve.basepoint_w(0)?;
    let path = CoverPath { start: Anchor::Fixed(x0), end, body: target, w_hint: w0 };
    let (vals, reached) = abel_along(cover, &path)?;
    if at_branch.is_some() || (reached.w - p.w).norm() <= (reached.w + p.w).norm() {
        return Ok(vals);
    }
    let other = CoverPath { w_hint: -w0, ..path };
    let (vals, _) = abel_along(cover, &other)?;
    Ok(vals.iter().zip(&cover.sheet_shift).map(|(a, s)| a + s).collect())
}

/// Hessian of `ln θ[δ]` at `z`.
fn log_theta_hessian(cover: &Cover, z: &[C64]) -> Result<DMatrix<C64>> {
    let t = cover.theta.eval(z, 2)?;
    let g = z.len();
    Ok(DMatrix::from_fn(g, g, |a, b| t.hess[(a, b)] / t.value - t.grad[a] * t.grad[b] / (t.value * t.value)))
}

/// `B(p, q) = d_p d_q ln θ[δ](A(q) − A(p))` relative to the local parameters.
pub fn bidiff_theta(cover: &Cover, p: &Pt, q: &Pt) -> Result<C64> {
    let ap = abel(cover, p)?;
    let aq = abel(cover, q)?;
    let z: Vec<C64> = aq.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let hess = log_theta_hessian(cover, &z)?;
    let (vp, vq) = (cover.v_vec(p), cover.v_vec(q));
    let mut s = C64::new(0.0, 0.0);
    for a in 0..z.len() {
        for b in 0..z.len() {
            s -= hess[(a, b)] * vp[a] * vq[b];
        }
    }
    Ok(s)
}

/// `h_δ(p)² = Σ ∂_αθ[δ](0) v_α(p)` relative to the local parameter of `p`.
pub fn half_density_sq(cover: &Cover, p: &Pt) -> Result<C64> {
    let g = cover.genus();
    let t = cover.theta.eval(&vec![C64::new(0.0, 0.0); g], 1)?;
    Ok(cover.v_vec(p).iter().zip(&t.grad).map(|(v, d)| v * d).sum())
}

/// `ln E(p, q)` with principal logarithms, relative to the local parameters.
pub fn ln_prime_form(cover: &Cover, p: &Pt, q: &Pt) -> Result<C64> {
    let ap = abel(cover, p)?;
    let aq = abel(cover, q)?;
    let z: Vec<C64> = aq.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let th = cover.theta.eval(&z, 0)?.value;
    Ok(th.ln() - half_density_sq(cover, p)?.ln() * 0.5 - half_density_sq(cover, q)?.ln() * 0.5)
}

/// `E(p, q)` with the principal square roots of `h_δ²`.
pub fn prime_form(cover: &Cover, p: &Pt, q: &Pt) -> Result<C64> {
    Ok(ln_prime_form(cover, p, q)?.exp())
}

/// `d_t ln(E(x,t)/E(y,t))` relative to the local parameter at `t`.
pub fn log_prime_ratio(cover: &Cover, ax: &[C64], ay: &[C64], t: &Pt, at: &[C64]) -> Result<C64> {
    let zx: Vec<C64> = at.iter().zip(ax).map(|(a, b)| a - b).collect();
    let zy: Vec<C64> = at.iter().zip(ay).map(|(a, b)| a - b).collect();
    let tx = cover.theta.eval(&zx, 1)?;
    let ty = cover.theta.eval(&zy, 1)?;
    let v = cover.v_vec(t);
    Ok((0..v.len()).map(|a| (tx.grad[a] / tx.value - ty.grad[a] / ty.value) * v[a]).sum())
}

impl Locate for Cover {
    fn hyper(&self) -> &Hyper {
        self.h()
    }

    fn zero_at(&self, i: usize) -> C64 {
        self.curve.zeros[i].x
    }
}
