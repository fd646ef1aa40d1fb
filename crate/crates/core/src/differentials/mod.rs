//! Canonical differentials on the two-sheeted cover: `v`, the normalized `v_α`,
//! second- and third-kind differentials, periods, kernels and branch-point jets.

pub mod jets;
pub mod kernel;
pub mod theta;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::instance::InstanceSpec;
use crate::numerics::linalg::condition;
use crate::numerics::{ComplexPoly, C64};
use crate::surface::homology::{cycle_integral, raw_periods, Cycle, HomologyBasis};
use crate::surface::{build_surface, build_tracked, homology_basis, Hyper, Pt, SpectralCurve};

pub use jets::{branch_jets, BranchJet};
pub use kernel::AlgebraicB;
pub use theta::{ThetaParams, ThetaValue};

/// One summand of a differential, written as `numer(x, w) · dx/w`.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// `Σ c_k x^k`.
    Holo(Vec<C64>),
    /// `(w + Σ b_k χ^k) / (2χ^ℓ)` with `χ = x − at`: a pole of order `ℓ` on the sheet where
    /// `w(at) = b_0`, regular on the other sheet.
    Pole { at: C64, order: usize, taylor: Vec<C64> },
    /// `v` itself.
    V,
    /// First-order change of `v` when `(N₁, N₂)` move by `(δN₁, δN₂)`.
    Tangent { dn1: ComplexPoly, dn2: ComplexPoly },
}

impl Term {
    fn numer(&self, h: &Hyper, x: C64, w: C64) -> C64 {
        match self {
            Term::Holo(c) => c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * x + ck),
            Term::Pole { at, order, taylor } => {
                let chi = x - at;
                let tail = taylor.iter().rev().fold(C64::new(0.0, 0.0), |acc, &b| acc * chi + b);
                (w + tail) / (chi.powu(*order as u32) * 2.0)
            }
            Term::V => h.v_numer(x, w),
            Term::Tangent { dn1, dn2 } => {
                let (d1, d2) = (dn1.eval(x), dn2.eval(x));
                (h.n1.eval(x) * d1 - d2 * 2.0 - w * d1) / (h.pole.eval(x) * 2.0)
            }
        }
    }
}

/// Principal part at a point over a pole: `principal[k]` multiplies `χ^{−(k+1)} dχ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularPart {
    pub x: C64,
    pub w: C64,
    pub principal: Vec<C64>,
}

impl SingularPart {
    pub fn residue(&self) -> C64 {
        self.principal.first().copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Differential {
    pub label: String,
    pub terms: Vec<(C64, Term)>,
    pub singular: Vec<SingularPart>,
    pub a_periods: Vec<C64>,
}

impl Differential {
    /// Value relative to `dx/w`.
    pub fn numer(&self, h: &Hyper, x: C64, w: C64) -> C64 {
        self.terms.iter().map(|(c, t)| c * t.numer(h, x, w)).sum()
    }

    /// Value relative to the local parameter of `p`.
    pub fn at(&self, h: &Hyper, p: &Pt) -> C64 {
        self.numer(h, p.x, p.w) * p.m
    }

    /// Value relative to `dx` at a regular point.
    pub fn per_dx(&self, h: &Hyper, x: C64, w: C64) -> C64 {
        self.numer(h, x, w) / w
    }

    /// Base points where the differential may be singular.
    pub fn poles(&self, curve: &SpectralCurve) -> Vec<C64> {
        let mut out = curve.pole_x();
        for (_, t) in &self.terms {
            if let Term::Pole { at, .. } = t {
                if !out.contains(at) {
                    out.push(*at);
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: C64) -> Differential {
        Differential {
            label: self.label.clone(),
            terms: self.terms.iter().map(|(c, t)| (c * s, t.clone())).collect(),
            singular: self
                .singular
                .iter()
                .map(|p| SingularPart { principal: p.principal.iter().map(|c| c * s).collect(), ..p.clone() })
                .collect(),
            a_periods: self.a_periods.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, other: &Differential, s: C64) -> Differential {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().map(|(c, t)| (c * s, t.clone())));
        out.singular.extend(other.scaled(s).singular);
        out.a_periods = self.a_periods.iter().zip(&other.a_periods).map(|(a, b)| a + b * s).collect();
        out
    }
}

/// Periods of `v`, the normalized basis and the period matrix.
#[derive(Debug, Clone)]
pub struct PeriodData {
    /// `∮_{a_α} x^k dx/w` (row α, column k).
    pub raw_a: DMatrix<C64>,
    pub raw_b: DMatrix<C64>,
    /// Column α holds the coefficients of `v_α` in `x^k dx/w`.
    pub coeffs: DMatrix<C64>,
    pub omega: DMatrix<C64>,
    pub a_v: Vec<C64>,
    pub b_v: Vec<C64>,
    pub normalization_error: f64,
    pub symmetry_error: f64,
    pub gram_condition: f64,
}

pub fn normalized_basis(curve: &SpectralCurve, basis: &HomologyBasis) -> Result<PeriodData> {
    let h = curve.two_sheeted()?;
    let g = curve.genus();
    if g == 0 {
        return Err(Error::Unsupported("genus-zero cover has no period matrix".into()));
    }
    let (raw_a, raw_b) = raw_periods(curve, basis)?;
    let gram_condition = condition(&raw_a);
    if gram_condition > 1e10 {
        return Err(Error::Singular { cond: gram_condition });
    }
    let coeffs = raw_a.clone().try_inverse().ok_or(Error::Singular { cond: gram_condition })?;
    let omega = &raw_b * &coeffs;
    let normalization_error = (&raw_a * &coeffs - DMatrix::<C64>::identity(g, g)).norm();
    let symmetry_error = (&omega - omega.transpose()).norm() / omega.norm();
    let im = omega.map(|z| z.im);
    let eig = nalgebra::SymmetricEigen::new((&im + im.transpose()) * 0.5).eigenvalues;
    if !eig.iter().all(|&l| l > 0.0) {
        return Err(Error::Health("Im Ω is not positive definite".into()));
    }
    let poles = curve.pole_x();
    let v = |p: &Pt| h.v_numer(p.x, p.w) * p.m;
    let a_v = basis.a.iter().map(|c| cycle_integral(curve, c, &v, &poles)).collect::<Result<Vec<_>>>()?;
    let b_v = basis.b.iter().map(|c| cycle_integral(curve, c, &v, &poles)).collect::<Result<Vec<_>>>()?;
    Ok(PeriodData { raw_a, raw_b, coeffs, omega, a_v, b_v, normalization_error, symmetry_error, gram_condition })
}

/// A cover with everything needed to evaluate canonical objects on it.
#[derive(Debug, Clone)]
pub struct Cover {
    pub curve: SpectralCurve,
    pub basis: HomologyBasis,
    pub periods: PeriodData,
    pub bker: AlgebraicB,
    /// Theta with the chosen odd nonsingular characteristic.
    pub theta: ThetaParams,
    /// `∫ v⃗` from the basepoint on sheet 0 to the basepoint on sheet 1.
    pub sheet_shift: Vec<C64>,
}

impl Cover {
    pub fn build(spec: InstanceSpec) -> Result<Cover> {
        let curve = build_surface(spec)?;
        let basis = homology_basis(&curve)?;
        Cover::assemble(curve, basis, None)
    }

    /// Cover of a nearby instance with labels and cycles carried over from `reference`.
    pub fn tracked(spec: InstanceSpec, reference: &Cover) -> Result<Cover> {
        let curve = build_tracked(spec, &reference.curve)?;
        Cover::assemble(curve, reference.basis.clone(), Some(reference))
    }

    fn assemble(curve: SpectralCurve, basis: HomologyBasis, reference: Option<&Cover>) -> Result<Cover> {
        let periods = normalized_basis(&curve, &basis)?;
        let bker = AlgebraicB::new(&curve, &basis, &periods)?;
        let base = ThetaParams::new(periods.omega.clone(), vec![0.0; curve.genus()], vec![0.0; curve.genus()])?;
        let theta = match reference {
            Some(r) => base.with_characteristic(r.theta.a.clone(), r.theta.b.clone()),
            None => theta::odd_nonsingular(&base)?,
        };
        let mut cover = Cover { curve, basis, periods, bker, theta, sheet_shift: Vec::new() };
        cover.sheet_shift = kernel::sheet_shift(&cover)?;
        Ok(cover)
    }

    pub fn h(&self) -> &Hyper {
        self.curve.hyper.as_ref().expect("two-sheeted model")
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.curve.spec
    }

    /// `(x, w)` of the point over pole `j` on sheet `s`.
    pub fn pole_point(&self, j: usize, s: usize) -> Result<(C64, C64)> {
        let f = self
            .curve
            .pole_fibers
            .iter()
            .find(|f| f.pole == j && f.sheet == s)
            .ok_or_else(|| Error::Invalid(format!("no point over pole {j} on sheet {s}")))?;
        let y = self.spec().poles[j].x;
        Ok((y, f.psi * 2.0 + self.h().n1.eval(y)))
    }

    /// Radius of the `χ`-circle used for jets at a pole.
    pub fn pole_radius(&self, j: usize) -> f64 {
        let y = self.spec().poles[j].x;
        0.3 * self.curve.clearance(y)
    }

    /// Deterministic regular points with clearance from every special point and cycle.
    pub fn sample_points(&self, count: usize) -> Vec<Pt> {
        let h = self.h();
        let special = self.curve.special_points();
        let scale = special.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let loops: Vec<Vec<C64>> = self.basis.loops.iter().map(|l| l.body.polyline(64)).collect();
        let mut out = Vec::new();
        let mut k = 0usize;
        while out.len() < count && k < 4000 {
            k += 1;
            // golden-angle spiral over the disc of radius 1.2·scale
            let r = 1.2 * scale * ((k as f64 + 0.5) / 400.0).sqrt().min(1.0);
            let x = C64::from_polar(r, 2.399963229728653 * k as f64);
            let near_special = special.iter().map(|p| (p - x).norm()).fold(f64::INFINITY, f64::min);
            let near_loop = loops.iter().flatten().map(|p| (p - x).norm()).fold(f64::INFINITY, f64::min);
            if near_special < 0.35 * scale / (special.len() as f64).sqrt() || near_loop < 0.05 * scale {
                continue;
            }
            let w = h.f.eval(x).sqrt();
            let w = if out.len() % 2 == 0 { w } else { -w };
            out.push(Pt::regular(x, w));
            k += 37;
        }
        out
    }

    /// `∮` of a differential over a cycle.
    pub fn cycle_integral(&self, d: &Differential, cycle: &Cycle) -> Result<C64> {
        let h = self.h();
        cycle_integral(&self.curve, cycle, &|p: &Pt| d.at(h, p), &d.poles(&self.curve))
    }

    pub fn a_periods(&self, d: &Differential) -> Result<Vec<C64>> {
        self.basis.a.iter().map(|c| self.cycle_integral(d, c)).collect()
    }

    pub fn b_periods(&self, d: &Differential) -> Result<Vec<C64>> {
        self.basis.b.iter().map(|c| self.cycle_integral(d, c)).collect()
    }

    /// Coefficients of `v_α` in `x^k dx/w`.
    pub fn holo_coeffs(&self, alpha: usize) -> Vec<C64> {
        self.periods.coeffs.column(alpha).iter().copied().collect()
    }

    /// `v_α` relative to `dx/w`.
    pub fn v_alpha_numer(&self, alpha: usize, x: C64) -> C64 {
        let c = self.periods.coeffs.column(alpha);
        c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * x + ck)
    }

    /// All `v_α` relative to the local parameter of `p`.
    pub fn v_vec(&self, p: &Pt) -> Vec<C64> {
        (0..self.genus()).map(|a| self.v_alpha_numer(a, p.x) * p.m).collect()
    }

    /// Laurent expansion of a differential in `χ = x − y` at a point `(y, w_y)` over a pole.
    pub fn laurent(&self, d: &Differential, y: C64, w_y: C64, rho: f64, neg: usize, keep: usize) -> Result<crate::numerics::JetSeries> {
        let h = self.h();
        crate::numerics::circle_jet(
            &mut |chi: C64| {
                let x = y + chi;
                let w = h.continue_w(y, w_y, x);
                d.numer(h, x, w) / w
            },
            rho,
            neg,
            keep,
        )
    }
}

/// Holomorphic differential `v_α`.
pub fn holomorphic(cover: &Cover, alpha: usize) -> Differential {
    let g = cover.genus();
    let mut a_periods = vec![C64::new(0.0, 0.0); g];
    a_periods[alpha] = C64::new(1.0, 0.0);
    Differential {
        label: format!("v_{}", alpha + 1),
        terms: vec![(C64::new(1.0, 0.0), Term::Holo(cover.holo_coeffs(alpha)))],
        singular: Vec::new(),
        a_periods,
    }
}

/// `v` itself, with principal parts read from jets.
pub fn v_differential(cover: &Cover) -> Result<Differential> {
    let mut d = Differential {
        label: "v".into(),
        terms: vec![(C64::new(1.0, 0.0), Term::V)],
        singular: Vec::new(),
        a_periods: cover.periods.a_v.clone(),
    };
    for (j, p) in cover.spec().poles.iter().enumerate() {
        for s in 0..2 {
            let (y, w) = cover.pole_point(j, s)?;
            let jet = cover.laurent(&d, y, w, cover.pole_radius(j), p.k, 2)?;
            let principal = (1..=p.k).map(|l| jet.c(-(l as i64))).collect();
            d.singular.push(SingularPart { x: y, w, principal });
        }
    }
    Ok(d)
}

/// Taylor coefficients of `w` at `y` on the sheet with `w(y) = w_y`, up to `χ^{len−1}`.
pub fn w_taylor(h: &Hyper, y: C64, w_y: C64, len: usize) -> Vec<C64> {
    let a = h.f.shifted(y);
    let mut b = vec![w_y];
    for k in 1..len {
        let conv: C64 = (1..k).map(|i| b[i] * b[k - i]).sum();
        b.push((a.coeff(k) - conv) / (w_y * 2.0));
    }
    b
}

/// Adds the holomorphic combination that cancels the a-periods.
fn normalize(cover: &Cover, mut d: Differential) -> Result<Differential> {
    let p = cover.a_periods(&d)?;
    let g = cover.genus();
    let mut corr = vec![C64::new(0.0, 0.0); g];
    for (al, &pa) in p.iter().enumerate() {
        for (k, c) in corr.iter_mut().enumerate() {
            *c -= cover.periods.coeffs[(k, al)] * pa;
        }
    }
    d.terms.push((C64::new(1.0, 0.0), Term::Holo(corr)));
    d.a_periods = vec![C64::new(0.0, 0.0); g];
    Ok(d)
}

/// Normalized second-kind differential with principal part `χ^{−ℓ} dχ` at the point over
/// pole `j` on sheet `s`.
pub fn second_kind(cover: &Cover, j: usize, s: usize, ell: usize) -> Result<Differential> {
    let k = cover.spec().poles.get(j).map(|p| p.k).ok_or_else(|| Error::Invalid(format!("no pole {j}")))?;
    if ell < 2 || ell > k {
        return Err(Error::Invalid(format!("order ℓ = {ell} outside 2..={k}")));
    }
    let (y, w) = cover.pole_point(j, s)?;
    let taylor = w_taylor(cover.h(), y, w, ell);
    let mut principal = vec![C64::new(0.0, 0.0); ell];
    principal[ell - 1] = C64::new(1.0, 0.0);
    let d = Differential {
        label: format!("w_{}^({}),{}", j + 1, s + 1, ell),
        terms: vec![(C64::new(1.0, 0.0), Term::Pole { at: y, order: ell, taylor })],
        singular: vec![SingularPart { x: y, w, principal }],
        a_periods: Vec::new(),
    };
    normalize(cover, d)
}

/// Unnormalized third-kind differential with residue `+1` at `(x, w)` and `−½` at both
/// points over infinity.
pub fn third_kind_term(x: C64, w: C64) -> Term {
    Term::Pole { at: x, order: 1, taylor: vec![w] }
}

/// Normalized third-kind differential with residues `−1` at the first pole point
/// (pole 0, sheet 0) and `+1` at pole `j`, sheet `s`.
pub fn third_kind(cover: &Cover, j: usize, s: usize) -> Result<Differential> {
    if j == 0 && s == 0 {
        return Err(Error::Invalid("third-kind differential needs a point other than the first pole point".into()));
    }
    let (y, w) = cover.pole_point(j, s)?;
    let (y0, w0) = cover.pole_point(0, 0)?;
    let d = Differential {
        label: format!("u_{}^({})", j + 1, s + 1),
        terms: vec![(C64::new(1.0, 0.0), third_kind_term(y, w)), (C64::new(-1.0, 0.0), third_kind_term(y0, w0))],
        singular: vec![
            SingularPart { x: y, w, principal: vec![C64::new(1.0, 0.0)] },
            SingularPart { x: y0, w: w0, principal: vec![C64::new(-1.0, 0.0)] },
        ],
        a_periods: Vec::new(),
    };
    normalize(cover, d)
}

/// Normalized third-kind differential with residue `+1` at `p` and `−1` at `q` (regular points).
pub fn third_kind_between(cover: &Cover, p: (C64, C64), q: (C64, C64)) -> Result<Differential> {
    let d = Differential {
        label: "ω_pq".into(),
        terms: vec![(C64::new(1.0, 0.0), third_kind_term(p.0, p.1)), (C64::new(-1.0, 0.0), third_kind_term(q.0, q.1))],
        singular: vec![
            SingularPart { x: p.0, w: p.1, principal: vec![C64::new(1.0, 0.0)] },
            SingularPart { x: q.0, w: q.1, principal: vec![C64::new(-1.0, 0.0)] },
        ],
        a_periods: Vec::new(),
    };
    normalize(cover, d)
}

/// `δv` for a change of the numerator coefficients (flattened as in
/// [`InstanceSpec::coefficients`]).
pub fn coefficient_tangent(cover: &Cover, delta: &[C64]) -> Differential {
    let t = cover.spec().with_coefficients(delta);
    Differential {
        label: "δv".into(),
        terms: vec![(C64::new(1.0, 0.0), Term::Tangent { dn1: t.numer[0].clone(), dn2: t.numer[1].clone() })],
        singular: Vec::new(),
        a_periods: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_series_squares_back() {
        let n1 = ComplexPoly::new(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.4), C64::new(1.0, 0.0)]);
        let n2 = ComplexPoly::new(vec![C64::new(0.5, 0.0), C64::new(0.1, -0.3), C64::new(-0.7, 0.2)]);
        let pole = ComplexPoly::from_roots(&[C64::new(0.0, 0.0); 4]);
        let h = Hyper::new(n1, n2, pole, vec![]);
        let y = C64::new(0.4, -0.2);
        let b = w_taylor(&h, y, h.f.eval(y).sqrt(), 12);
        let chi = C64::new(0.01, 0.02);
        let w: C64 = b.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * chi + c);
        assert!((w * w - h.f.eval(y + chi)).norm() < 1e-9);
    }
}
