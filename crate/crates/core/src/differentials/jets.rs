//! Taylor data at the branch points in the local parameter `λ = √(x − e_i)`.

use super::{kernel, Cover, Differential};
use crate::error::Result;
use crate::numerics::{circle_jet, JetSeries, C64};

pub const KEEP: usize = 12;

#[derive(Debug, Clone)]
pub struct BranchJet {
    pub index: usize,
    pub x: C64,
    pub rho: f64,
    /// `v_α/dλ`.
    pub g: Vec<JetSeries>,
    /// `y = v/dx` as a function of `λ`.
    pub y: JetSeries,
    /// Bergman projective connection in `λ` at the branch point.
    pub sb: C64,
}

impl BranchJet {
    pub fn g0(&self, a: usize) -> C64 {
        self.g[a].c(0)
    }

    /// Second `λ`-derivative of `v_α/dλ` at the branch point.
    pub fn g2(&self, a: usize) -> C64 {
        self.g[a].c(2) * 2.0
    }

    pub fn y0(&self) -> C64 {
        self.y.c(0)
    }

    pub fn y1(&self) -> C64 {
        self.y.c(1)
    }

    pub fn y3(&self) -> C64 {
        self.y.c(3) * 6.0
    }

    /// `B_reg` in `λ` at the branch point, `S_B/6`.
    pub fn breg(&self) -> C64 {
        self.sb / 6.0
    }
}

/// `λ`-radius for jets at branch point `i`.
pub fn lambda_radius(cover: &Cover, i: usize) -> f64 {
    let e = cover.h().branch[i];
    (0.25 * cover.curve.clearance(e)).sqrt()
}

pub fn branch_jet(cover: &Cover, i: usize, rho: f64) -> Result<BranchJet> {
    let h = cover.h();
    let g = (0..cover.genus())
        .map(|a| circle_jet(&mut |l| cover.v_alpha_numer(a, h.local(i, l).x) * h.local(i, l).m, rho, 0, KEEP))
        .collect::<Result<Vec<_>>>()?;
    let y = circle_jet(
        &mut |l| {
            let p = h.local(i, l);
            h.phi(p.x, p.w)
        },
        rho,
        0,
        KEEP,
    )?;
    let sb = circle_jet(&mut |l| cover.bker.sb_lambda(h, i, l), rho, 0, KEEP)?.c(0);
    Ok(BranchJet { index: i, x: h.branch[i], rho, g, y, sb })
}

pub fn branch_jets(cover: &Cover) -> Result<Vec<BranchJet>> {
    (0..cover.h().branch.len()).map(|i| branch_jet(cover, i, lambda_radius(cover, i))).collect()
}

/// Jet of a differential in `λ` at branch point `i` (relative to `dλ`).
pub fn differential_jet(cover: &Cover, d: &Differential, i: usize, rho: f64) -> Result<JetSeries> {
    let h = cover.h();
    circle_jet(&mut |l| d.at(h, &h.local(i, l)), rho, 0, KEEP)
}

/// `B(e_i, e_j)` relative to `dλ_i dλ_j`.
pub fn cross_b(cover: &Cover, i: usize, j: usize) -> C64 {
    let h = cover.h();
    cover.bker.eval(&h.local(i, C64::new(0.0, 0.0)), &h.local(j, C64::new(0.0, 0.0)))
}

/// `B_reg/v` relative to `dλ` as a Laurent series at branch point `i`.
pub fn breg_over_v_jet(cover: &Cover, i: usize, rho: f64) -> Result<JetSeries> {
    circle_jet(&mut |l| kernel::breg_over_v_lambda(cover, i, l), rho, 3, KEEP)
}
