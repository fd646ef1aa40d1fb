//! Variations of `Ω`, `v_α`, `B`, `ln E`, `ln τ_B` and the multi-differential hierarchies along
//! the homological coordinates, by residues at the branch points.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::differentials::jets::{branch_jet, cross_b, differential_jet, lambda_radius, BranchJet};
use crate::differentials::kernel::{abel, breg_over_v_lambda, breg_over_v_x, log_prime_ratio, phi_derivatives};
use crate::differentials::{holomorphic, second_kind, third_kind, Cover, Differential};
use crate::error::{Error, Result};
use crate::moduli::{coordinates_of, Coord};
use crate::numerics::quad::gauss_legendre;
use crate::numerics::{circle_jet, JetSeries, C64};
use crate::surface::route::{integrate_path, Anchor};
use crate::surface::Pt;

/// Agreement required between the two residue forms of the period-matrix variation.
pub const FORM_TOL: f64 = 1e-9;

fn i2pi() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `∂v/∂z` for a coordinate `z`.
pub fn direction_differential(cover: &Cover, c: Coord) -> Result<Differential> {
    if c.is_dependent() {
        return Err(Error::Invalid(format!("{c} is the dependent residue, not a coordinate")));
    }
    match c {
        Coord::A(a) if a < cover.genus() => Ok(holomorphic(cover, a)),
        Coord::A(a) => Err(Error::Invalid(format!("A{} exceeds the genus {}", a + 1, cover.genus()))),
        Coord::C { j, s, ell } => {
            let k = cover.spec().poles.get(j).map(|p| p.k).unwrap_or(0);
            if ell == 0 || ell > k || s >= cover.spec().n {
                return Err(Error::Invalid(format!("no coordinate {c} on this instance")));
            }
            if ell == 1 {
                third_kind(cover, j, s)
            } else {
                second_kind(cover, j, s, ell)
            }
        }
    }
}

/// Branch-point jets of a cover, computed once.
#[derive(Debug, Clone)]
pub struct BranchTable {
    pub jets: Vec<BranchJet>,
    /// `λ`-radius inside which `d(v/dξ)/dλ` has no zeros.
    pub critical_free: Vec<f64>,
}

/// `dy/dλ` at the point with parameter `λ` at branch point `i`.
pub fn dy_dlambda(cover: &Cover, i: usize, l: C64) -> C64 {
    let hy = cover.h();
    let p = hy.local(i, l);
    phi_derivatives(hy, p.x, p.w).1 * l * 2.0
}

pub fn winding(f: &dyn Fn(C64) -> C64, rho: f64) -> f64 {
    let n = 256;
    let vals: Vec<C64> = (0..=n).map(|k| f(C64::from_polar(rho, 2.0 * PI * k as f64 / n as f64))).collect();
    vals.windows(2).map(|w| (w[1] / w[0]).arg()).sum::<f64>() / (2.0 * PI)
}

impl BranchTable {
    pub fn new(cover: &Cover) -> Result<BranchTable> {
        let jets = (0..cover.h().branch.len())
            .map(|i| branch_jet(cover, i, lambda_radius(cover, i)))
            .collect::<Result<Vec<_>>>()?;
        let mut critical_free = Vec::with_capacity(jets.len());
        for j in &jets {
            // largest zero-free disc of dy/dλ, then half of it
            let free = |r: f64| winding(&|l| dy_dlambda(cover, j.index, l), r).round() == 0.0;
            let mut r = 1.6 * j.rho;
            while r > 1e-3 * j.rho && !free(r) {
                r *= 0.9;
            }
            critical_free.push((0.5 * r).min(j.rho));
        }
        Ok(BranchTable { jets, critical_free })
    }

    /// `h/dλ` at every branch point.
    pub fn values(&self, cover: &Cover, h: &Differential) -> Result<Vec<C64>> {
        self.jets.iter().map(|j| Ok(differential_jet(cover, h, j.index, j.rho)?.c(0))).collect()
    }

    /// `(h / d ln(v/dx))(x_i) = g_h y / y'` at every branch point.
    pub fn weights(&self, cover: &Cover, h: &Differential) -> Result<Vec<C64>> {
        Ok(self.values(cover, h)?.iter().zip(&self.jets).map(|(g, j)| g * j.y0() / j.y1()).collect())
    }
}

/// The endpoint term of `∂(∫_{x_r}^{x_i} v)/∂z` at branch point `i`.
pub fn endpoint_correction(cover: &Cover, table: &BranchTable, h: &Differential, i: usize) -> Result<C64> {
    let j = &table.jets[i];
    let g = differential_jet(cover, h, i, j.rho)?.c(0);
    Ok(-g * j.y0() / j.y1())
}

/// The same endpoint term computed in a different base coordinate `ξ = χ(x)`;
/// `chart` returns `(χ(x), χ'(x))`.
pub fn endpoint_correction_in_chart(
    cover: &Cover,
    h: &Differential,
    i: usize,
    chart: &dyn Fn(C64) -> (C64, C64),
) -> Result<C64> {
    let hy = cover.h();
    let e = hy.branch[i];
    let (ce, dce) = chart(e);
    let sq = dce.sqrt();
    let rho = 0.4 * lambda_radius(cover, i) * sq.norm();
    // x(μ) with χ(x) = χ(e) + μ², and w analytic in μ
    let point = |mu: C64| -> (C64, C64, C64) {
        let mut x = e + mu * mu / dce;
        for _ in 0..40 {
            let (c, dc) = chart(x);
            let step = (c - ce - mu * mu) / dc;
            x -= step;
            if step.norm() < 1e-16 * x.norm().max(1.0) {
                break;
            }
        }
        let q = if mu.norm() == 0.0 { dce } else { mu * mu / (x - e) };
        let root = (q / dce).sqrt() * sq;
        let w = mu / root * hy.r_at(i, x);
        let dx = mu * 2.0 / chart(x).1;
        (x, w, dx)
    };
    let g = circle_jet(
        &mut |mu| {
            let (x, w, dx) = point(mu);
            h.numer(hy, x, w) / w * dx
        },
        rho,
        0,
        4,
    )?;
    let y = circle_jet(
        &mut |mu| {
            let (x, w, _) = point(mu);
            hy.phi(x, w) / chart(x).1
        },
        rho,
        0,
        4,
    )?;
    Ok(-g.c(0) * y.c(0) / y.c(1))
}

/// Both residue forms of `∂Ω/∂z`.
#[derive(Debug, Clone)]
pub struct PeriodVariation {
    /// `−2πi Σ (h/d ln(v/dξ))(x_i) res(v_α v_β / v)`.
    pub pairing: DMatrix<C64>,
    /// `−2πi Σ res(v_α v_β h / (dξ d(v/dξ)))`.
    pub single: DMatrix<C64>,
    pub mismatch: f64,
}

impl PeriodVariation {
    pub fn value(&self) -> &DMatrix<C64> {
        &self.pairing
    }
}

/// Both forms of `∂Ω` in direction `h`, without the agreement check.
pub fn period_variation_forms(cover: &Cover, table: &BranchTable, h: &Differential) -> Result<PeriodVariation> {
    let g = cover.genus();
    let hy = cover.h();
    let weights = table.weights(cover, h)?;
    let mut pairing = DMatrix::zeros(g, g);
    let mut single = DMatrix::zeros(g, g);
    for ((jet, wgt), &rho) in table.jets.iter().zip(&weights).zip(&table.critical_free) {
        let i = jet.index;
        for a in 0..g {
            for b in a..g {
                // residue of v_α v_β / v from the product of the jets
                let res = jet.g0(a) * jet.g0(b) / (jet.y0() * 2.0);
                pairing[(a, b)] -= i2pi() * wgt * res;
                let r = circle_jet(
                    &mut |l| {
                        let p = hy.local(i, l);
                        let dy = dy_dlambda(cover, i, l);
                        let ga = cover.v_alpha_numer(a, p.x) * p.m;
                        let gb = cover.v_alpha_numer(b, p.x) * p.m;
                        ga * gb * h.at(hy, &p) / (l * 2.0 * dy)
                    },
                    rho,
                    2,
                    2,
                )?
                .residue();
                single[(a, b)] -= i2pi() * r;
            }
        }
    }
    for a in 0..g {
        for b in 0..a {
            pairing[(a, b)] = pairing[(b, a)];
            single[(a, b)] = single[(b, a)];
        }
    }
    let scale = pairing.iter().chain(single.iter()).map(|z: &C64| z.norm()).fold(1e-300, f64::max);
    let mismatch = (&pairing - &single).iter().map(|z: &C64| z.norm()).fold(0.0, f64::max) / scale;
    Ok(PeriodVariation { pairing, single, mismatch })
}

/// `∂Ω` in direction `h`; fails if the two residue forms disagree beyond `FORM_TOL`.
pub fn vary_period_matrix(cover: &Cover, table: &BranchTable, h: &Differential) -> Result<PeriodVariation> {
    let var = period_variation_forms(cover, table, h)?;
    if var.mismatch > FORM_TOL {
        return Err(Error::Health(format!("period-variation forms disagree by {:e}", var.mismatch)));
    }
    Ok(var)
}

/// Targets of the kernel variations.
#[derive(Debug, Clone, Copy)]
pub enum KernelTarget {
    /// `v_α(x)` relative to the local parameter of `x`.
    VAlpha { alpha: usize, x: Pt },
    /// `B(x, y)`.
    B { x: Pt, y: Pt },
    /// `ln E(x, y)`.
    LnE { x: Pt, y: Pt },
}

fn check_outside(cover: &Cover, i: usize, rho: f64, p: &Pt) -> Result<()> {
    let e = cover.h().branch[i];
    if (p.x - e).norm() < 2.0 * rho * rho {
        return Err(Error::Invalid(format!("evaluation point {} lies inside the jet circle at {e}", p.x)));
    }
    Ok(())
}

/// `∫ f(s) ds` along the segment `from → to`, by 16-point Gauss–Legendre.
fn ray_integral(f: &dyn Fn(C64) -> C64, from: C64, to: C64) -> C64 {
    let (nodes, weights) = gauss_legendre(16);
    let d = to - from;
    nodes.iter().zip(&weights).map(|(t, wt)| f(from + d * (0.5 * (t + 1.0))) * d * (0.5 * wt)).sum()
}

/// Residue at branch point `i` (in `λ`) of a differential in `t` given relative to `dλ`.
fn branch_residue(cover: &Cover, jet: &BranchJet, k: &dyn Fn(&Pt, C64) -> Result<C64>) -> Result<C64> {
    let hy = cover.h();
    let mut err = None;
    let r = circle_jet(
        &mut |l| {
            let t = hy.local(jet.index, l);
            match k(&t, l) {
                Ok(z) => z,
                Err(e) => {
                    err.get_or_insert(e);
                    C64::new(f64::NAN, 0.0)
                }
            }
        },
        jet.rho,
        3,
        2,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(r?.residue())
}

fn v_local(cover: &Cover, p: &Pt) -> C64 {
    cover.h().v_numer(p.x, p.w) * p.m
}

/// Per-branch-point factors `r_i` with `∂K = Σ_i (h/d ln(v/dξ))(x_i) r_i` for every direction `h`:
/// `r_i = −res_{t=x_i} K(t)`, and `+res` for the `ln E` target.
pub fn kernel_residues(cover: &Cover, table: &BranchTable, target: KernelTarget) -> Result<Vec<C64>> {
    let bk = &cover.bker;
    let hy = cover.h();
    let mut out = Vec::with_capacity(table.jets.len());
    match target {
        KernelTarget::VAlpha { alpha, x } => {
            for jet in &table.jets {
                check_outside(cover, jet.index, jet.rho, &x)?;
                let r = branch_residue(cover, jet, &|t, _| {
                    Ok(cover.v_alpha_numer(alpha, t.x) * t.m * bk.eval(t, &x) / v_local(cover, t))
                })?;
                out.push(-r);
            }
        }
        KernelTarget::B { x, y } => {
            for jet in &table.jets {
                check_outside(cover, jet.index, jet.rho, &x)?;
                check_outside(cover, jet.index, jet.rho, &y)?;
                let r = branch_residue(cover, jet, &|t, _| Ok(bk.eval(&x, t) * bk.eval(t, &y) / v_local(cover, t)))?;
                out.push(-r);
            }
        }
        KernelTarget::LnE { x, y } => {
            let ax = abel(cover, &x)?;
            let ay = abel(cover, &y)?;
            let g = cover.genus();
            for jet in &table.jets {
                check_outside(cover, jet.index, jet.rho, &x)?;
                check_outside(cover, jet.index, jet.rho, &y)?;
                let i = jet.index;
                let l0 = C64::new(jet.rho, 0.0);
                let a0 = abel(cover, &hy.local(i, l0))?;
                let r = branch_residue(cover, jet, &|t, l| {
                    let at: Vec<C64> = (0..g)
                        .map(|a| {
                            a0[a] + ray_integral(&|s| {
                                let p = hy.local(i, s);
                                cover.v_alpha_numer(a, p.x) * p.m
                            }, l0, l)
                        })
                        .collect();
                    let d = log_prime_ratio(cover, &ax, &ay, t, &at)?;
                    Ok(d * d * 0.5 / v_local(cover, t))
                })?;
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// Variation of a kernel in direction `h` at fixed base coordinates of its arguments.
pub fn vary_kernel(cover: &Cover, table: &BranchTable, h: &Differential, target: KernelTarget) -> Result<C64> {
    let weights = table.weights(cover, h)?;
    Ok(kernel_residues(cover, table, target)?.iter().zip(&weights).map(|(r, w)| r * w).sum())
}

/// The two sums of the `ln τ_B` gradient.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TauGradient {
    pub value: C64,
    /// `−2πi Σ_{D_br} (v_γ/d ln(v/dξ)) res(B_reg/v)`.
    pub branch_part: C64,
    /// `−(πi/8) Σ_{all zeros} res(v_γ/∫_{x_i}^x v)`.
    pub zero_part: C64,
}

/// Refuses instances whose `v` has residues or simple poles.
pub fn require_residue_free(cover: &Cover) -> Result<()> {
    if cover.spec().poles.iter().any(|p| p.k < 2) {
        return Err(Error::Invalid("tau gradient needs every pole order ≥ 2".into()));
    }
    let pt = coordinates_of(cover)?;
    let scale = pt.scale();
    let worst = pt
        .coords
        .iter()
        .zip(&pt.values)
        .filter(|(c, _)| matches!(c, Coord::C { ell: 1, .. }))
        .map(|(_, z)| z.norm())
        .fold(pt.dependent.norm(), f64::max);
    if worst > 1e-8 * scale {
        return Err(Error::Invalid(format!("instance has nonzero residues (max {worst:e})")));
    }
    Ok(())
}

/// Radius of the `x`-circle used at a zero of `v` off the branch locus.
fn zero_radius(cover: &Cover, x: C64) -> f64 {
    0.25 * cover.curve.clearance(x)
}

/// `res_{x=x_i} (v_γ(x) / ∫_{x_i}^x v)` at branch point `i` (in `λ`).
pub fn flat_residue_branch(cover: &Cover, jet: &BranchJet, gamma: usize) -> Result<C64> {
    let hy = cover.h();
    let i = jet.index;
    let r = circle_jet(
        &mut |l| {
            let p = hy.local(i, l);
            let z = ray_integral(&|s| {
                let q = hy.local(i, s);
                v_local(cover, &q)
            }, zero(), l);
            cover.v_alpha_numer(gamma, p.x) * p.m / z
        },
        jet.rho,
        3,
        2,
    )?;
    Ok(r.residue())
}

/// `res_{x=x_0} (v_γ(x) / ∫_{x_0}^x v)` at the zero `k` of `v` off the branch locus.
pub fn flat_residue_zero(cover: &Cover, k: usize, gamma: usize) -> Result<C64> {
    let hy = cover.h();
    let x0 = cover.curve.zeros[k].x;
    let w0 = hy.n1.eval(x0);
    let r = circle_jet(
        &mut |chi| {
            let x = x0 + chi;
            let w = hy.continue_w(x0, w0, x);
            let z = ray_integral(&|s| {
                let ws = hy.continue_w(x0, w0, s);
                hy.phi(s, ws)
            }, x0, x);
            cover.v_alpha_numer(gamma, x) / w / z
        },
        zero_radius(cover, x0),
        3,
        2,
    )?;
    Ok(r.residue())
}

/// `res (B_reg/v)` at the zero `k` of `v` off the branch locus, in `x`.
pub fn breg_residue_zero(cover: &Cover, k: usize) -> Result<C64> {
    let hy = cover.h();
    let x0 = cover.curve.zeros[k].x;
    let w0 = hy.n1.eval(x0);
    let r = circle_jet(
        &mut |chi| {
            let x = x0 + chi;
            breg_over_v_x(cover, x, hy.continue_w(x0, w0, x))
        },
        zero_radius(cover, x0),
        4,
        2,
    )?;
    Ok(r.residue())
}

/// `res (B_reg/v)` at branch point `i`, in `λ`.
pub fn breg_residue_branch(cover: &Cover, jet: &BranchJet) -> Result<C64> {
    Ok(circle_jet(&mut |l| breg_over_v_lambda(cover, jet.index, l), jet.rho, 4, 2)?.residue())
}

pub fn tau_gradient(cover: &Cover, table: &BranchTable, gamma: usize) -> Result<TauGradient> {
    require_residue_free(cover)?;
    let h = holomorphic(cover, gamma);
    let weights = table.weights(cover, &h)?;
    let mut branch_part = zero();
    let mut zero_part = zero();
    for (jet, wgt) in table.jets.iter().zip(&weights) {
        branch_part -= i2pi() * wgt * breg_residue_branch(cover, jet)?;
        zero_part += flat_residue_branch(cover, jet, gamma)?;
    }
    for k in 0..cover.curve.zeros.len() {
        zero_part += flat_residue_zero(cover, k, gamma)?;
    }
    let zero_part = zero_part * C64::new(0.0, -PI / 8.0);
    Ok(TauGradient { value: branch_part + zero_part, branch_part, zero_part })
}

/// Chain-rule evaluation of `∂ ln τ_B/∂A_γ` from the defining equations: dual cycles paired with
/// the derivatives of the relative periods of `v`.
pub fn tau_chain_rule(cover: &Cover, table: &BranchTable, gamma: usize) -> Result<C64> {
    require_residue_free(cover)?;
    let g = cover.genus();
    let curve = &cover.curve;
    let basis = &cover.basis;
    let q = |p: &Pt| breg_over_v_x(cover, p.x, p.w) * p.m * p.w;
    let mut singular = curve.zero_x();
    singular.extend(curve.branch_x());
    let qa: Vec<C64> = basis
        .a
        .iter()
        .map(|c| crate::surface::homology::cycle_integral(curve, c, &q, &singular))
        .collect::<Result<_>>()?;
    let qb: Vec<C64> = basis
        .b
        .iter()
        .map(|c| crate::surface::homology::cycle_integral(curve, c, &q, &singular))
        .collect::<Result<_>>()?;
    let om = &cover.periods.omega;
    let mut total = -qb[gamma];
    for d in 0..g {
        total += om[(gamma, d)] * qa[d];
    }
    // orientation of the intersection routine relative to ⟨a, b⟩ = +1
    let sigma = basis.intersection_matrix(curve)?[0][g];
    if sigma.abs() != 1 {
        return Err(Error::Health(format!("a₁·b₁ = {sigma}")));
    }
    let h = holomorphic(cover, gamma);
    let vg = |p: &Pt| cover.v_alpha_numer(gamma, p.x) * p.m;
    for (anchor, path) in &basis.zero_paths {
        let (res, corr) = match *anchor {
            Anchor::Branch(i) => {
                let jet = &table.jets[i];
                (breg_residue_branch(cover, jet)?, endpoint_correction(cover, table, &h, i)?)
            }
            Anchor::Zero(k) => (breg_residue_zero(cover, k)?, zero()),
            Anchor::Fixed(_) => continue,
        };
        let dp = integrate_path(cover, path, &vg, &[])?.value + corr;
        let mut coef = dp + f64::from(sigma * basis.cycle_dot(curve, &basis.b[gamma], path)?);
        for d in 0..g {
            coef -= om[(gamma, d)] * f64::from(sigma * basis.cycle_dot(curve, &basis.a[d], path)?);
        }
        total += i2pi() * res * coef;
    }
    Ok(total)
}

/// Cycles through `0..n` up to rotation and reflection, each starting at `0`.
pub fn cycles(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let rest: Vec<usize> = (1..n).collect();
    for p in permutations(&rest) {
        if n < 3 || p[0] < p[p.len() - 1] {
            let mut c = vec![0];
            c.extend(p);
            out.push(c);
        }
    }
    out
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

fn distinct(pts: &[Pt]) -> Result<()> {
    for i in 0..pts.len() {
        for j in 0..i {
            if (pts[i].x - pts[j].x).norm() < 1e-12 && (pts[i].w - pts[j].w).norm() < 1e-12 * pts[i].w.norm().max(1.0) {
                return Err(Error::Invalid(format!("coincident points {i} and {j}")));
            }
        }
    }
    Ok(())
}

/// The symmetric multi-differential `Q_n`; `Q_2 = B²/(v v)`.
pub fn q_multidiff(cover: &Cover, pts: &[Pt]) -> Result<C64> {
    distinct(pts)?;
    let n = pts.len();
    if n < 2 {
        return Err(Error::Invalid("Q_n needs n ≥ 2".into()));
    }
    let bk = &cover.bker;
    let den: C64 = pts.iter().map(|p| v_local(cover, p)).product();
    if n == 2 {
        let b = bk.eval(&pts[0], &pts[1]);
        return Ok(b * b / den);
    }
    let sum: C64 = cycles(n)
        .iter()
        .map(|c| (0..n).map(|k| bk.eval(&pts[c[k]], &pts[c[(k + 1) % n]])).product::<C64>())
        .sum();
    Ok(sum * 2.0 / den)
}

/// `R_n`: paths from the first to the last point through all others.
pub fn r_multidiff(cover: &Cover, pts: &[Pt]) -> Result<C64> {
    distinct(pts)?;
    let n = pts.len();
    if n < 2 {
        return Err(Error::Invalid("R_n needs n ≥ 2".into()));
    }
    Ok(path_sum(cover, pts) / pts[1..n - 1].iter().map(|p| v_local(cover, p)).product::<C64>())
}

fn path_sum(cover: &Cover, pts: &[Pt]) -> C64 {
    let n = pts.len();
    let middle: Vec<usize> = (1..n - 1).collect();
    permutations(&middle)
        .iter()
        .map(|m| {
            let mut route = vec![0];
            route.extend(m);
            route.push(n - 1);
            route.windows(2).map(|w| cover.bker.eval(&pts[w[0]], &pts[w[1]])).product::<C64>()
        })
        .sum()
}

/// `R_n^{αβ} = v_α(z_1) v_β(z_n) Σ_paths Π B / Π v`.
pub fn r_ab(cover: &Cover, alpha: usize, beta: usize, pts: &[Pt]) -> Result<C64> {
    distinct(pts)?;
    let n = pts.len();
    if n < 2 {
        return Err(Error::Invalid("R_n^{αβ} needs n ≥ 2".into()));
    }
    let va = cover.v_alpha_numer(alpha, pts[0].x) * pts[0].m;
    let vb = cover.v_alpha_numer(beta, pts[n - 1].x) * pts[n - 1].m;
    let den: C64 = pts.iter().map(|p| v_local(cover, p)).product();
    Ok(va * vb * path_sum(cover, pts) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hierarchy {
    Q,
    R,
}

/// Variation of `Q_n` or `R_n` at fixed base coordinates of the points: the branch-point residue
/// of the next member plus the change of the `1/v(z_j)` factors.
pub fn hierarchy_variation(
    cover: &Cover,
    table: &BranchTable,
    h: &Differential,
    kind: Hierarchy,
    pts: &[Pt],
) -> Result<C64> {
    let weights = table.weights(cover, h)?;
    let hy = cover.h();
    let n = pts.len();
    let mut total = zero();
    for (jet, wgt) in table.jets.iter().zip(&weights) {
        for p in pts {
            check_outside(cover, jet.index, jet.rho, p)?;
        }
        let r = branch_residue(cover, jet, &|t, _| {
            let mut ext = pts.to_vec();
            match kind {
                Hierarchy::Q => {
                    ext.push(*t);
                    q_multidiff(cover, &ext)
                }
                Hierarchy::R => {
                    ext.insert(n - 1, *t);
                    r_multidiff(cover, &ext)
                }
            }
        })?;
        total -= wgt * r;
    }
    let (value, varying) = match kind {
        Hierarchy::Q => (q_multidiff(cover, pts)?, &pts[..]),
        Hierarchy::R => (r_multidiff(cover, pts)?, &pts[1..n.saturating_sub(1)]),
    };
    let shift: C64 = varying.iter().map(|p| h.at(hy, p) / v_local(cover, p)).sum();
    Ok(total - value * shift)
}

/// `∂²Ω_{αβ}/∂A_γ∂A_δ` from branch-point jets and the values of `B` between branch points.
pub fn period_hessian(cover: &Cover, table: &BranchTable, idx: [usize; 4]) -> C64 {
    let [a, b, c, d] = idx;
    let jets = &table.jets;
    let m = jets.len();
    let mut off = zero();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let (ji, jj) = (&jets[i], &jets[j]);
            let pair = |p: usize, q: usize, r: usize, s: usize| ji.g0(p) * ji.g0(q) * jj.g0(r) * jj.g0(s);
            let num = pair(d, c, a, b) + pair(d, a, b, c) + pair(d, b, c, a);
            off += cross_b(cover, ji.index, jj.index) * num / (ji.y1() * jj.y1());
        }
    }
    let mut diag = zero();
    for jt in jets {
        let (y1, y3) = (jt.y1(), jt.y3());
        let prod = jt.g0(a) * jt.g0(b) * jt.g0(c) * jt.g0(d);
        let second = jt.g2(a) * jt.g0(b) * jt.g0(c) * jt.g0(d)
            + jt.g0(a) * jt.g2(b) * jt.g0(c) * jt.g0(d)
            + jt.g0(a) * jt.g0(b) * jt.g2(c) * jt.g0(d)
            + jt.g0(a) * jt.g0(b) * jt.g0(c) * jt.g2(d);
        diag += (jt.sb / (y1 * y1) - y3 / (y1 * y1 * y1)) * prod + second / (y1 * y1);
    }
    i2pi() * (off * 0.25 + diag * 0.125)
}

/// Jet of `h/dλ` at branch point `i`, exposed for diagnostics.
pub fn direction_jet(cover: &Cover, table: &BranchTable, h: &Differential, i: usize) -> Result<JetSeries> {
    differential_jet(cover, h, i, table.jets[i].rho)
}
