//! Verification suites: each group compares a residue formula or structural identity with an
//! independent evaluation and records one check per compared quantity.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::library::{draw, layout, load};
use super::oracles::{agm_tau, nearest_image};
use super::report::{Recorder, Report};
use super::sweep::{sweep, Functional, SweepRow};
use crate::differentials::kernel::ln_prime_form;
use crate::differentials::{holomorphic, Cover};
use crate::error::{Error, Result};
use crate::instance::InstanceSpec;
use crate::moduli::{central, coordinate_list, coordinates_of, fd_derivative, Chart, Coord, FdResult, FD_EPS};
use crate::numerics::C64;
use crate::surface::route::{integrate_path, Anchor};
use crate::surface::{build_surface, Pt};
use crate::variations::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Surface,
    DmCubic,
    Kernels,
    PrimeForm,
    Tau,
    Hessian,
    Hierarchy,
    Scaling,
    All,
}

pub const SUITES: [&str; 9] =
    ["surface", "dm-cubic", "kernels", "prime-form", "tau", "hessian", "hierarchy", "scaling", "all"];

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "surface" => Suite::Surface,
            "dm-cubic" => Suite::DmCubic,
            "kernels" => Suite::Kernels,
            "prime-form" => Suite::PrimeForm,
            "tau" => Suite::Tau,
            "hessian" => Suite::Hessian,
            "hierarchy" => Suite::Hierarchy,
            "scaling" => Suite::Scaling,
            "all" => Suite::All,
            _ => return Err(Error::Invalid(format!("unknown suite `{s}` (valid: {})", SUITES.join(", ")))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::Surface,
            Suite::DmCubic,
            Suite::Kernels,
            Suite::PrimeForm,
            Suite::Tau,
            Suite::Hessian,
            Suite::Hierarchy,
            Suite::Scaling,
            Suite::All,
        ]
        .iter()
        .position(|s| s == self)
        .unwrap();
        f.write_str(SUITES[i])
    }
}

/// Units of checks; suites are unions of groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// Period matrix normalization, symmetry and positivity.
    Periods,
    /// Derivatives of `v` in coordinate directions.
    Directions,
    /// Derivatives of relative periods of `v` and the endpoint term.
    Endpoints,
    /// First variation of the period matrix.
    Cubic,
    /// `Σ z ∂_z Ω = 0`.
    Homogeneity,
    Kernels,
    PrimeForm,
    Tau,
    Hessian,
    Hierarchy,
    /// Coordinate equivariance under `v → λv`.
    Scaling,
    /// Error ratios of central differences under `ε`-halving.
    Convergence,
}

impl Suite {
    pub fn groups(self) -> Vec<Group> {
        use Group::*;
        match self {
            Suite::Surface => vec![Periods],
            Suite::DmCubic => vec![Directions, Endpoints, Cubic, Homogeneity],
            Suite::Kernels => vec![Kernels],
            Suite::PrimeForm => vec![PrimeForm],
            Suite::Tau => vec![Tau],
            Suite::Hessian => vec![Hessian],
            Suite::Hierarchy => vec![Hierarchy],
            Suite::Scaling => vec![Scaling, Homogeneity, Convergence],
            Suite::All => vec![
                Periods,
                Directions,
                Endpoints,
                Cubic,
                Homogeneity,
                Kernels,
                PrimeForm,
                Tau,
                Hessian,
                Hierarchy,
                Scaling,
                Convergence,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Replaces the tolerance of every gating check.
    pub tol: Option<f64>,
    /// Relative finite-difference step; defaults to [`FD_EPS`].
    pub eps: Option<f64>,
}

/// A built instance with its chart and branch-point jets.
pub struct Context {
    pub label: String,
    pub chart: Chart,
    pub table: BranchTable,
    pub eps: f64,
}

impl Context {
    pub fn new(spec: InstanceSpec, eps: f64) -> Result<Context> {
        let label = spec.label.clone();
        let cover = Cover::build(spec)?;
        let table = BranchTable::new(&cover)?;
        Ok(Context { label, chart: Chart::new(cover)?, table, eps })
    }

    pub fn cover(&self) -> &Cover {
        &self.chart.source
    }

    fn fd<F>(&self, c: Coord, f: &F) -> Result<FdResult>
    where
        F: Fn(&Cover) -> Result<Vec<C64>>,
    {
        fd_derivative(&self.chart, c, self.eps, f)
    }

    /// Sample points outside every jet circle at the branch points.
    pub fn points(&self, count: usize) -> Result<Vec<Pt>> {
        let cover = self.cover();
        let e = &cover.h().branch;
        let pts: Vec<Pt> = cover
            .sample_points(8 * count)
            .into_iter()
            .filter(|p| self.table.jets.iter().all(|j| (p.x - e[j.index]).norm() > 3.0 * j.rho * j.rho))
            .take(count)
            .collect();
        if pts.len() < count {
            return Err(Error::Health(format!("only {} usable sample points", pts.len())));
        }
        Ok(pts)
    }
}

/// The same base point on a nearby cover, on the sheet continued from `p`.
pub fn moved(cover: &Cover, p: &Pt) -> Pt {
    Pt::regular(p.x, cover.h().sqrt_near(p.x, p.w))
}

pub fn run_suite(instance: &str, suite: Suite, opts: Options) -> Result<Report> {
    let spec = load(instance)?;
    let label = spec.label.clone();
    let ctx = Context::new(spec, opts.eps.unwrap_or(FD_EPS))?;
    let mut rec = Recorder::new(opts.tol);
    let residue_free = require_residue_free(ctx.cover()).is_ok();
    for g in suite.groups() {
        if g == Group::Tau && suite == Suite::All && !residue_free {
            continue;
        }
        run_group(&ctx, g, &mut rec);
    }
    if matches!(suite, Suite::Surface | Suite::All) {
        rec.exploratory();
        smoke_three_sheets(&mut rec);
        rec.gating();
    }
    Ok(Report::new(&label, &suite.to_string(), rec.checks))
}

pub fn run_group(ctx: &Context, group: Group, rec: &mut Recorder) {
    let out = match group {
        Group::Periods => periods(ctx, rec),
        Group::Directions => directions(ctx, rec),
        Group::Endpoints => endpoints(ctx, rec),
        Group::Cubic => cubic(ctx, rec),
        Group::Homogeneity => homogeneity(ctx, rec),
        Group::Kernels => kernels(ctx, rec),
        Group::PrimeForm => prime_form(ctx, rec),
        Group::Tau => tau(ctx, rec),
        Group::Hessian => hessian(ctx, rec),
        Group::Hierarchy => hierarchy(ctx, rec),
        Group::Scaling => scaling(ctx, rec),
        Group::Convergence => convergence(ctx, rec),
    };
    if let Err(e) = out {
        rec.failed(format!("{group:?}"), "evaluation", &e);
    }
}

fn max_norm<'a>(it: impl IntoIterator<Item = &'a C64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn periods(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let cover = ctx.cover();
    let om = &cover.periods.omega;
    let g = cover.genus();
    let scale = max_norm(om.iter());
    for a in 0..g {
        for b in a + 1..g {
            rec.scaled(format!("Ω[{a},{b}] = Ω[{b},{a}]"), "period matrix symmetry", om[(a, b)], om[(b, a)], 1e-10, scale);
        }
    }
    let im = om.map(|z| z.im);
    let eig = SymmetricEigen::new((&im + im.transpose()) * 0.5).eigenvalues;
    rec.positive("min eigenvalue of Im Ω", "positivity of the imaginary part of the period matrix", eig.min());
    for a in 0..g {
        let ap = cover.a_periods(&holomorphic(cover, a))?;
        for (b, z) in ap.iter().enumerate() {
            let want = C64::new(if a == b { 1.0 } else { 0.0 }, 0.0);
            rec.scaled(format!("∮_a{b} v{a}"), "a-normalization of holomorphic differentials", *z, want, 1e-10, 1.0);
        }
    }
    if g == 1 {
        let e = &cover.h().branch;
        if e.len() == 4 {
            let tau = om[(0, 0)];
            let oracle = agm_tau(e[0], e[1], e[2], e[3]);
            let (reduced, image) = nearest_image(tau, oracle);
            rec.scaled("τ vs AGM", "elliptic period ratio from the arithmetic-geometric mean", reduced, image, 1e-9, reduced.norm());
        }
    }
    Ok(())
}

fn smoke_three_sheets(rec: &mut Recorder) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let poles = layout("ell4").expect("layout");
    let spec = draw("n3", poles, 3, &mut rng);
    let p = crate::instance::derived_counts(&spec).p;
    match build_surface(spec) {
        Ok(c) => rec.rel("n=3 build: branch points", "branch point count", C64::new(c.branch.len() as f64, 0.0), C64::new(p as f64, 0.0), 0.0),
        Err(e) => rec.failed("n=3 build", "branch point count", &e),
    }
}

fn directions(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let pts = src.sample_points(5);
    for c in coordinate_list(src) {
        let h = direction_differential(src, c)?;
        let fd = ctx.fd(c, &|cv: &Cover| {
            Ok(pts
                .iter()
                .map(|p| {
                    let q = moved(cv, p);
                    cv.h().phi(q.x, q.w)
                })
                .collect())
        })?;
        for (k, p) in pts.iter().enumerate() {
            let want = h.per_dx(src.h(), p.x, p.w);
            rec.rel(format!("∂v/∂{c} at point {k}"), "variation of v in coordinate directions", fd.value[k], want, 1e-5);
        }
    }
    Ok(())
}

fn endpoints(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let hy = src.h();
    let paths = src.basis.zero_paths.clone();
    let poles = src.curve.pole_x();
    for c in coordinate_list(src) {
        let h = direction_differential(src, c)?;
        let fd = ctx.fd(c, &|cv: &Cover| {
            let hy = cv.h();
            paths
                .iter()
                .map(|(_, p)| Ok(integrate_path(cv, p, &|q: &Pt| hy.v_numer(q.x, q.w) * q.m, &poles)?.value))
                .collect()
        })?;
        for (k, (anchor, p)) in paths.iter().enumerate() {
            let int_h = integrate_path(src, p, &|q: &Pt| h.at(hy, q), &h.poles(&src.curve))?.value;
            let corr = match anchor {
                Anchor::Branch(i) => endpoint_correction(src, &ctx.table, &h, *i)?,
                _ => C64::new(0.0, 0.0),
            };
            rec.rel(
                format!("∂/∂{c} ∫ v from the base zero to {anchor:?}"),
                "variation of relative periods of v with endpoint correction",
                fd.value[k],
                int_h + corr,
                1e-5,
            );
        }
    }
    let h = direction_differential(src, Coord::A(0))?;
    let chart = |x: C64| (x * 2.0 + x * x * x, C64::new(2.0, 0.0) + x * x * 3.0);
    for i in 0..hy.branch.len() {
        let a = endpoint_correction(src, &ctx.table, &h, i)?;
        let b = endpoint_correction_in_chart(src, &h, i, &chart)?;
        rec.rel(format!("endpoint term at branch point {i}, ξ = 2x + x³"), "base-coordinate independence of the endpoint term", b, a, 1e-8);
    }
    Ok(())
}

/// `∂Ω/∂z` for every coordinate, from the residue formula.
fn cubic_all(ctx: &Context) -> Result<Vec<(Coord, PeriodVariation)>> {
    let src = ctx.cover();
    coordinate_list(src)
        .into_iter()
        .map(|c| Ok((c, period_variation_forms(src, &ctx.table, &direction_differential(src, c)?)?)))
        .collect()
}

fn cubic(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let g = src.genus();
    let all = cubic_all(ctx)?;
    for (c, var) in &all {
        let fd = ctx.fd(*c, &|cv: &Cover| Ok(cv.periods.omega.iter().copied().collect()))?;
        let scale = max_norm(var.pairing.iter());
        for (k, z) in var.pairing.iter().enumerate() {
            let (a, b) = (k % g, k / g);
            rec.scaled(format!("∂Ω[{a},{b}]/∂{c}"), "period matrix variation residue formula", fd.value[k], *z, 1e-5, scale);
        }
        rec.scaled(
            format!("two residue forms of ∂Ω/∂{c}"),
            "agreement of the pairing and single-residue forms",
            C64::new(var.mismatch, 0.0),
            C64::new(0.0, 0.0),
            FORM_TOL,
            1.0,
        );
    }
    // ∂Ω_αβ/∂A_γ is totally symmetric
    let d = |a: usize, b: usize, c: usize| all[c].1.pairing[(a, b)];
    let scale = (0..g).flat_map(|c| all[c].1.pairing.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    for a in 0..g {
        for b in a..g {
            for c in b..g {
                let base = d(a, b, c);
                let worst = permutations(&[a, b, c])
                    .iter()
                    .map(|p| d(p[0], p[1], p[2]))
                    .max_by(|x, y| (x - base).norm().total_cmp(&(y - base).norm()))
                    .unwrap();
                rec.scaled(format!("∂Ω/∂A symmetry ({a},{b},{c})"), "total symmetry of the period matrix variation", worst, base, 1e-9, scale);
            }
        }
    }
    Ok(())
}

fn homogeneity(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let g = ctx.cover().genus();
    let mut euler = DMatrix::<C64>::zeros(g, g);
    for (c, var) in cubic_all(ctx)? {
        euler += &var.pairing * ctx.chart.point.values[ctx.chart.point.index(c)?];
    }
    let scale = ctx.cover().periods.omega.norm();
    for a in 0..g {
        for b in a..g {
            rec.scaled(format!("Σ z ∂Ω[{a},{b}]/∂z"), "homogeneity of the period matrix", euler[(a, b)], C64::new(0.0, 0.0), 1e-8, scale);
        }
    }
    Ok(())
}

fn weights_by_direction(ctx: &Context) -> Result<Vec<(Coord, Vec<C64>)>> {
    let src = ctx.cover();
    coordinate_list(src)
        .into_iter()
        .map(|c| Ok((c, ctx.table.weights(src, &direction_differential(src, c)?)?)))
        .collect()
}

fn dot(r: &[C64], w: &[C64]) -> C64 {
    r.iter().zip(w).map(|(a, b)| a * b).sum()
}

fn kernels(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let g = src.genus();
    let pts = ctx.points(6)?;
    let cfg: Vec<(Pt, Pt)> = (0..3).map(|k| (pts[2 * k], pts[2 * k + 1])).collect();
    let mut targets = Vec::new();
    for (p, q) in &cfg {
        for alpha in 0..g {
            targets.push((format!("v{alpha}({:.3})", p.x), "holomorphic differential variation", KernelTarget::VAlpha { alpha, x: *p }));
        }
        targets.push((format!("B({:.3}, {:.3})", p.x, q.x), "bidifferential variation", KernelTarget::B { x: *p, y: *q }));
    }
    let res = targets.iter().map(|(_, _, t)| kernel_residues(src, &ctx.table, *t)).collect::<Result<Vec<_>>>()?;
    for (c, w) in weights_by_direction(ctx)? {
        let fd = ctx.fd(c, &|cv: &Cover| {
            let mut out = Vec::new();
            for (p, q) in &cfg {
                let (p, q) = (moved(cv, p), moved(cv, q));
                for a in 0..g {
                    out.push(cv.v_alpha_numer(a, p.x) * p.m);
                }
                out.push(cv.bker.eval(&p, &q));
            }
            Ok(out)
        })?;
        for (k, (name, eq, _)) in targets.iter().enumerate() {
            rec.rel(format!("∂{name}/∂{c}"), eq, fd.value[k], dot(&res[k], &w), 1e-4);
        }
    }
    Ok(())
}

fn prime_form(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let pts = ctx.points(6)?;
    let cfg: Vec<(Pt, Pt)> = (0..3).map(|k| (pts[2 * k], pts[2 * k + 1])).collect();
    let res = cfg
        .iter()
        .map(|(p, q)| kernel_residues(src, &ctx.table, KernelTarget::LnE { x: *p, y: *q }))
        .collect::<Result<Vec<_>>>()?;
    for (c, w) in weights_by_direction(ctx)? {
        let fd = ctx.fd(c, &|cv: &Cover| cfg.iter().map(|(p, q)| ln_prime_form(cv, &moved(cv, p), &moved(cv, q))).collect())?;
        for (k, (p, q)) in cfg.iter().enumerate() {
            rec.rel(format!("∂ ln E({:.3}, {:.3})/∂{c}", p.x, q.x), "prime form variation", fd.value[k], dot(&res[k], &w), 1e-4);
        }
    }
    Ok(())
}

fn tau(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    require_residue_free(src)?;
    let g = src.genus();
    for gamma in 0..g {
        let grad = tau_gradient(src, &ctx.table, gamma)?;
        let oracle = tau_chain_rule(src, &ctx.table, gamma)?;
        rec.rel(format!("∂ ln τ/∂A{}", gamma + 1), "tau gradient residue formula against dual-cycle integrals", grad.value, oracle, 1e-4);
    }
    let grad = |cv: &Cover| -> Result<Vec<C64>> {
        let t = BranchTable::new(cv)?;
        (0..g).map(|c| Ok(tau_gradient(cv, &t, c)?.value)).collect()
    };
    let d = (0..g).map(|a| Ok(ctx.fd(Coord::A(a), &grad)?.value)).collect::<Result<Vec<_>>>()?;
    for a in 0..g {
        for b in 0..a {
            rec.rel(format!("∂²ln τ/∂A{}∂A{}", a + 1, b + 1), "closedness of the tau gradient", d[a][b], d[b][a], 1e-4);
        }
    }
    Ok(())
}

fn hessian(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let g = src.genus();
    let h4 = |i: [usize; 4]| period_hessian(src, &ctx.table, i);
    let mut all = Vec::new();
    for a in 0..g {
        for b in 0..g {
            for c in 0..g {
                for d in 0..g {
                    all.push(h4([a, b, c, d]));
                }
            }
        }
    }
    let scale = max_norm(all.iter());
    for d in 0..g {
        let grad = |cv: &Cover| -> Result<Vec<C64>> {
            let t = BranchTable::new(cv)?;
            let h = direction_differential(cv, Coord::A(d))?;
            Ok(period_variation_forms(cv, &t, &h)?.pairing.iter().copied().collect())
        };
        for c in 0..g {
            let fd = ctx.fd(Coord::A(c), &grad)?;
            for b in 0..g {
                for a in 0..g {
                    rec.scaled(
                        format!("∂²Ω[{a},{b}]/∂A{}∂A{}", c + 1, d + 1),
                        "second variation of the period matrix",
                        fd.value[a + g * b],
                        h4([a, b, c, d]),
                        5e-4,
                        scale,
                    );
                }
            }
        }
    }
    for a in 0..g {
        for b in a..g {
            for c in b..g {
                for d in c..g {
                    let base = h4([a, b, c, d]);
                    let worst = permutations(&[a, b, c, d])
                        .iter()
                        .map(|p| h4([p[0], p[1], p[2], p[3]]))
                        .max_by(|x, y| (x - base).norm().total_cmp(&(y - base).norm()))
                        .unwrap();
                    rec.scaled(format!("24 orderings of ({a},{b},{c},{d})"), "symmetry of the second variation", worst, base, 1e-8, scale);
                }
            }
        }
    }
    let om = &src.periods.omega;
    for a in 0..g {
        let fd = ctx.fd(Coord::A(a), &|cv: &Cover| Ok(cv.periods.b_v.clone()))?;
        for gamma in 0..g {
            rec.rel(format!("∂B{}/∂A{}", gamma + 1, a + 1), "b-periods of v differentiate to the period matrix", fd.value[gamma], om[(a, gamma)], 1e-5);
        }
    }
    Ok(())
}

fn hierarchy(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let p = ctx.points(3)?;
    let base = q_multidiff(src, &p)?;
    for perm in [[1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]] {
        let q = q_multidiff(src, &[p[perm[0]], p[perm[1]], p[perm[2]]])?;
        rec.rel(format!("Q3 under {perm:?}"), "symmetry of Q_3", q, base, 1e-9);
    }
    let b = |x: &Pt, y: &Pt| src.bker.eval(x, y);
    rec.rel("R2 = B", "R_2 is the bidifferential", r_multidiff(src, &p[..2])?, b(&p[0], &p[1]), 1e-10);
    let v1 = src.h().v_numer(p[1].x, p[1].w) * p[1].m;
    rec.rel("R3 = B B / v", "R_3 from two bidifferentials", r_multidiff(src, &p)?, b(&p[0], &p[1]) * b(&p[1], &p[2]) / v1, 1e-10);
    for c in coordinate_list(src) {
        let h = direction_differential(src, c)?;
        let fd = ctx.fd(c, &|cv: &Cover| {
            let q: Vec<Pt> = p.iter().map(|x| moved(cv, x)).collect();
            Ok(vec![q_multidiff(cv, &q[..2])?, q_multidiff(cv, &q)?, r_multidiff(cv, &q)?])
        })?;
        let want = [
            hierarchy_variation(src, &ctx.table, &h, Hierarchy::Q, &p[..2])?,
            hierarchy_variation(src, &ctx.table, &h, Hierarchy::Q, &p)?,
            hierarchy_variation(src, &ctx.table, &h, Hierarchy::R, &p)?,
        ];
        for (k, name) in ["Q2", "Q3", "R3"].iter().enumerate() {
            rec.rel(format!("∂{name}/∂{c}"), "Q_n variation from the next member", fd.value[k], want[k], 1e-4);
        }
    }
    Ok(())
}

fn scaling(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let src = ctx.cover();
    let lambda = C64::new(1.5, 0.0);
    // continuation keeps sheet labels at the fibers, whose values scale with λ
    let steps = 20;
    let mut scaled = src.clone();
    for k in 1..=steps {
        let l = C64::new(lambda.re.powf(k as f64 / steps as f64), 0.0);
        scaled = Cover::tracked(src.spec().scaled(l), &scaled)?;
    }
    let pt = coordinates_of(&scaled)?;
    let scale = ctx.chart.point.scale() * lambda.norm();
    for (k, c) in pt.coords.iter().enumerate() {
        rec.scaled(format!("{c} under v → 1.5 v"), "coordinate scaling equivariance", pt.values[k], ctx.chart.point.values[k] * lambda, 1e-9, scale);
    }
    Ok(())
}

/// Halving sequence of absolute steps used by the convergence group.
pub fn default_eps_list(z: C64) -> Vec<f64> {
    (0..7).map(|k| 4e-3 * z.norm().max(1.0) / f64::powi(2.0, k)).collect()
}

/// Records one check per `ε`-halving before the noise floor.
pub fn record_ratios(rec: &mut Recorder, name: &str, rows: &[SweepRow]) {
    let mut any = false;
    for w in rows.windows(2) {
        if w[0].noise_floor || w[1].noise_floor || (w[0].eps / w[1].eps - 2.0).abs() > 1e-12 {
            continue;
        }
        any = true;
        let ratio = w[0].abs_err / w[1].abs_err;
        rec.scaled(
            format!("{name}: error ratio {:.2e} → {:.2e}", w[0].eps, w[1].eps),
            "second-order convergence of central differences",
            C64::new(ratio, 0.0),
            C64::new(4.0, 0.0),
            0.5,
            1.0,
        );
    }
    if !any {
        rec.failed(name, "second-order convergence of central differences", &Error::Health("no halving above the noise floor".into()));
    }
}

fn convergence(ctx: &Context, rec: &mut Recorder) -> Result<()> {
    let coords = coordinate_list(ctx.cover());
    let mut runs = vec![(Functional::Omega(0, 0), coords[0]), (Functional::Bidiff, coords[0])];
    if let Some(&last) = coords.iter().rev().find(|c| matches!(c, Coord::C { .. })) {
        runs.push((Functional::Omega(0, 0), last));
    }
    for (f, c) in runs {
        let z = ctx.chart.point.values[ctx.chart.point.index(c)?];
        // halve the starting step until every step stays within the tracking guard
        let mut list = default_eps_list(z);
        let mut rows = sweep(ctx, f, c, &list);
        for _ in 0..4 {
            if rows.is_ok() {
                break;
            }
            list.iter_mut().for_each(|e| *e *= 0.5);
            rows = sweep(ctx, f, c, &list);
        }
        record_ratios(rec, &format!("{f:?} along {c}"), &rows?);
    }
    Ok(())
}

/// Plain central difference of `f` at one absolute step.
pub fn central_at<F>(ctx: &Context, c: Coord, eps: f64, f: &F) -> Result<Vec<C64>>
where
    F: Fn(&Cover) -> Result<Vec<C64>>,
{
    central(&ctx.chart, c, eps, f)
}
