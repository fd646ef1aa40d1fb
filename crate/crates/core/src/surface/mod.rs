//! The spectral cover as a sheeted surface over the base sphere.

pub mod homology;
pub mod hyper;
pub mod intersect;
pub mod route;
pub mod sheets;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{check_genericity, derived_counts, DerivedCounts, DivisorData, GenericityReport, InstanceSpec};
use crate::numerics::{ComplexPoly, Contour, Piece, C64};

pub use homology::{homology_basis, HomologyBasis};
pub use hyper::{Hyper, Pt};
pub use route::{integrate_path, Anchor, CoverPath, Locate, Obstacle};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub x: C64,
    /// The two sheet labels (at the basepoint) exchanged by the loop around this point.
    pub sheets: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleFiber {
    /// Index into the instance's pole list.
    pub pole: usize,
    pub sheet: usize,
    /// `P·v/dx` at the pole on this sheet.
    pub psi: C64,
    /// Coefficient of `χ^{-k}` in `v/dχ`.
    pub lead: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroPoint {
    pub x: C64,
    pub sheet: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub x: C64,
    pub sheet: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Monodromy {
    pub branch: usize,
    pub perm: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectralCurve {
    pub spec: InstanceSpec,
    pub counts: DerivedCounts,
    pub basepoint: C64,
    /// `v/dx` on each sheet at the basepoint, sorted by (Re, Im).
    pub sheets: Vec<C64>,
    /// Branch points sorted by (Re, Im).
    pub branch: Vec<BranchPoint>,
    /// Loops in angular order around the basepoint.
    pub monodromy: Vec<Monodromy>,
    pub pole_fibers: Vec<PoleFiber>,
    /// Zeros of `v` off the branch locus, sorted by (Re, Im).
    pub zeros: Vec<ZeroPoint>,
    /// Index into `zeros` of the base zero `x_r`.
    pub base_zero: usize,
    pub discriminant: ComplexPoly,
    pub genericity: GenericityReport,
    /// Two-sheeted model, present for `n = 2`.
    pub hyper: Option<Hyper>,
}

impl Locate for SpectralCurve {
    fn hyper(&self) -> &Hyper {
        self.hyper.as_ref().expect("two-sheeted model")
    }

    fn zero_at(&self, i: usize) -> C64 {
        self.zeros[i].x
    }
}

fn lex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
}

fn max_norm(points: &[C64]) -> f64 {
    points.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl SpectralCurve {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn genus(&self) -> usize {
        self.counts.genus as usize
    }

    pub fn two_sheeted(&self) -> Result<&Hyper> {
        self.hyper
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("operation needs n = 2 (n = {})", self.spec.n)))
    }

    pub fn branch_x(&self) -> Vec<C64> {
        self.branch.iter().map(|b| b.x).collect()
    }

    pub fn pole_x(&self) -> Vec<C64> {
        self.spec.poles.iter().map(|p| p.x).collect()
    }

    pub fn zero_x(&self) -> Vec<C64> {
        self.zeros.iter().map(|z| z.x).collect()
    }

    /// Poles, branch points and zeros of `v`.
    pub fn special_points(&self) -> Vec<C64> {
        let mut pts = self.pole_x();
        pts.extend(self.branch_x());
        pts.extend(self.zero_x());
        pts
    }

    pub fn obstacles(&self) -> Vec<Obstacle> {
        route::obstacles(&self.special_points())
    }

    /// Distance from `x` to the nearest special point other than `x` itself.
    pub fn clearance(&self, x: C64) -> f64 {
        self.special_points()
            .iter()
            .map(|p| (p - x).norm())
            .filter(|&d| d > 1e-12 * x.norm().max(1.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Base zero `x_r`.
    pub fn base_zero_x(&self) -> C64 {
        self.zeros[self.base_zero].x
    }

    /// `P·v/dx` values over `x`.
    pub fn fiber(&self, x: C64) -> Result<Vec<C64>> {
        sheets::fiber(&self.spec.numer, x)
    }

    /// Reference path from the basepoint to `x`.
    pub fn reference_path(&self, x: C64) -> Contour {
        route::route(self.basepoint, x, &self.obstacles())
    }

    /// `w` at the basepoint on a sheet (two-sheeted model).
    pub fn basepoint_w(&self, sheet: usize) -> Result<C64> {
        let h = self.two_sheeted()?;
        let x = self.basepoint;
        let guess = self.sheets[sheet] * self.spec.pole_polynomial().eval(x) * 2.0 + h.n1.eval(x);
        Ok(h.sqrt_near(x, guess))
    }

    /// Lift of a surface point to `(x, w)` by continuation along its reference path.
    pub fn lift(&self, p: SurfacePoint) -> Result<(C64, C64)> {
        let h = self.two_sheeted()?;
        let w0 = self.basepoint_w(p.sheet)?;
        let path = CoverPath {
            start: Anchor::Fixed(self.basepoint),
            end: Anchor::Fixed(p.x),
            body: self.reference_path(p.x),
            w_hint: w0,
        };
        let legs = path.legs(self)?;
        let mut w = w0;
        for leg in &legs {
            if let route::Leg::Base { piece, w0 } = leg {
                w = route::walk_piece(h, piece, *w0)?;
            }
        }
        Ok((p.x, w))
    }
}

/// Result of continuing one sheet along a path from the basepoint.
#[derive(Debug, Clone)]
pub struct Continuation {
    /// `v/dx` at the end of the path.
    pub end_value: C64,
    /// Sheet label at the end when the path returns to the basepoint.
    pub end_sheet: Option<usize>,
    /// `(x, v/dx)` along the path.
    pub log: Vec<(C64, C64)>,
}

pub fn continue_sheet(curve: &SpectralCurve, path: &Contour, start_sheet: usize) -> Result<Continuation> {
    if (path.start() - curve.basepoint).norm() > 1e-12 * curve.basepoint.norm().max(1.0) {
        return Err(Error::Invalid("continuation paths start at the basepoint".into()));
    }
    let pole = curve.spec.pole_polynomial();
    let start: Vec<C64> = curve.sheets.iter().map(|&s| s * pole.eval(curve.basepoint)).collect();
    let (end, log) = sheets::track(&curve.spec.numer, path, &start)?;
    let end_x = path.end();
    let end_value = end[start_sheet] / pole.eval(end_x);
    let end_sheet = if (end_x - curve.basepoint).norm() < 1e-12 * end_x.norm().max(1.0) {
        let z = end[start_sheet];
        start
            .iter()
            .enumerate()
            .map(|(k, s)| (k, (s - z).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(k, _)| k)
    } else {
        None
    };
    let log = log.into_iter().map(|(x, r)| (x, r[start_sheet] / pole.eval(x))).collect();
    Ok(Continuation { end_value, end_sheet, log })
}

/// Builds the cover from an instance.
pub fn build_surface(spec: InstanceSpec) -> Result<SpectralCurve> {
    spec.validate()?;
    let counts = derived_counts(&spec);
    let n = spec.n;
    let disc = sheets::discriminant(&spec.numer, counts.p.max(0) as usize)?;
    let top = spec.numer[n - 1].clone();
    let branch_roots = disc.roots()?;
    let zero_roots = top.roots()?;
    let genericity = check_genericity(
        &spec,
        &DivisorData { discriminant: &disc, branch_roots: &branch_roots, zero_roots: &zero_roots, top: &top },
    );
    let genericity = genericity.into_result()?;

    let mut bx: Vec<C64> = branch_roots.iter().map(|r| polish_root(&disc, r.value)).collect();
    bx.sort_by(lex);
    let mut zx: Vec<C64> = zero_roots.iter().map(|r| polish_root(&top, r.value)).collect();
    zx.sort_by(lex);

    let poles: Vec<C64> = spec.poles.iter().map(|p| p.x).collect();
    let mut special = poles.clone();
    special.extend(&bx);
    special.extend(&zx);
    let basepoint = choose_basepoint(&special);
    let pole_poly = spec.pole_polynomial();
    let mut psi0 = sheets::fiber(&spec.numer, basepoint)?;
    psi0.sort_by(lex);
    let sheets_at_x0: Vec<C64> = psi0.iter().map(|&s| s / pole_poly.eval(basepoint)).collect();

    let obs = route::obstacles(&special);
    // labels of pole fibers and zeros by continuation from the basepoint
    let mut pole_fibers = Vec::new();
    for (j, p) in spec.poles.iter().enumerate() {
        let path = route::route(basepoint, p.x, &obs);
        let (end, _) = sheets::track(&spec.numer, &path, &psi0)?;
        let others: C64 = spec
            .poles
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, q)| (p.x - q.x).powu(q.k as u32))
            .product();
        for (s, &psi) in end.iter().enumerate() {
            pole_fibers.push(PoleFiber { pole: j, sheet: s, psi, lead: psi / others });
        }
    }
    let mut zeros = Vec::new();
    for &x in &zx {
        let path = route::route(basepoint, x, &obs);
        let (end, _) = sheets::track(&spec.numer, &path, &psi0)?;
        let (sheet, _) = end
            .iter()
            .enumerate()
            .map(|(k, z)| (k, z.norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        zeros.push(ZeroPoint { x, sheet });
    }
    let base_zero = zeros
        .iter()
        .enumerate()
        .max_by(|a, b| lex(&a.1.x, &b.1.x).then(a.1.sheet.cmp(&b.1.sheet)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Genericity("v has no zeros off the branch locus".into()))?;

    let mut branch: Vec<BranchPoint> = bx.iter().map(|&x| BranchPoint { x, sheets: (0, 1) }).collect();
    let monodromy = monodromies(&spec, basepoint, &bx, &obs, &psi0)?;
    for m in &monodromy {
        if !sheets::is_transposition(&m.perm) {
            return Err(Error::Genericity(format!(
                "monodromy at {:.6} is not a transposition: {:?}",
                bx[m.branch], m.perm
            )));
        }
        let moved: Vec<usize> = (0..n).filter(|&s| m.perm[s] != s).collect();
        branch[m.branch].sheets = (moved[0], moved[1]);
    }

    let hyper = if n == 2 {
        Some(Hyper::new(spec.numer[0].clone(), spec.numer[1].clone(), pole_poly, bx.clone()))
    } else {
        None
    };
    Ok(SpectralCurve {
        spec,
        counts,
        basepoint,
        sheets: sheets_at_x0,
        branch,
        monodromy,
        pole_fibers,
        zeros,
        base_zero,
        discriminant: disc,
        genericity,
        hyper,
    })
}

/// Builds a nearby cover keeping the labels of `reference` (branch points, zeros, sheets).
pub fn build_tracked(spec: InstanceSpec, reference: &SpectralCurve) -> Result<SpectralCurve> {
    spec.validate()?;
    let counts = derived_counts(&spec);
    let n = spec.n;
    let disc = sheets::discriminant(&spec.numer, counts.p.max(0) as usize)?;
    let top = spec.numer[n - 1].clone();
    let branch_roots = disc.roots()?;
    let zero_roots = top.roots()?;
    let genericity = check_genericity(
        &spec,
        &DivisorData { discriminant: &disc, branch_roots: &branch_roots, zero_roots: &zero_roots, top: &top },
    )
    .into_result()?;
    let new_b: Vec<C64> = branch_roots.iter().map(|r| polish_root(&disc, r.value)).collect();
    let new_z: Vec<C64> = zero_roots.iter().map(|r| polish_root(&top, r.value)).collect();
    let bx = match_points(&reference.branch_x(), &new_b)?;
    let zx = match_points(&reference.zero_x(), &new_z)?;

    let pole_poly = spec.pole_polynomial();
    let x0 = reference.basepoint;
    let ref_psi: Vec<C64> = reference.sheets.iter().map(|s| s * reference.spec.pole_polynomial().eval(x0)).collect();
    let psi0 = match_points(&ref_psi, &sheets::fiber(&spec.numer, x0)?)?;
    let sheets_at_x0 = psi0.iter().map(|&s| s / pole_poly.eval(x0)).collect();

    let mut pole_fibers = Vec::new();
    for (j, p) in spec.poles.iter().enumerate() {
        let refs: Vec<C64> = reference.pole_fibers.iter().filter(|f| f.pole == j).map(|f| f.psi).collect();
        let here = match_points(&refs, &sheets::fiber(&spec.numer, p.x)?)?;
        let others: C64 = spec
            .poles
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, q)| (p.x - q.x).powu(q.k as u32))
            .product();
        for (f, psi) in reference.pole_fibers.iter().filter(|f| f.pole == j).zip(here) {
            pole_fibers.push(PoleFiber { pole: j, sheet: f.sheet, psi, lead: psi / others });
        }
    }
    let zeros = reference.zeros.iter().zip(&zx).map(|(z, &x)| ZeroPoint { x, sheet: z.sheet }).collect();
    let hyper = if n == 2 {
        Some(Hyper::new(spec.numer[0].clone(), spec.numer[1].clone(), pole_poly, bx.clone()))
    } else {
        None
    };
    let branch = reference.branch.iter().zip(&bx).map(|(b, &x)| BranchPoint { x, sheets: b.sheets }).collect();
    Ok(SpectralCurve {
        spec,
        counts,
        basepoint: x0,
        sheets: sheets_at_x0,
        branch,
        monodromy: reference.monodromy.clone(),
        pole_fibers,
        zeros,
        base_zero: reference.base_zero,
        discriminant: disc,
        genericity,
        hyper,
    })
}

fn polish_root(p: &ComplexPoly, mut z: C64) -> C64 {
    let dp = p.derivative();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = p.eval(z) / d;
        if !step.is_finite() {
            break;
        }
        z -= step;
    }
    z
}

/// Reorders `new` to follow `old` by nearest neighbour, refusing ambiguous matches.
pub fn match_points(old: &[C64], new: &[C64]) -> Result<Vec<C64>> {
    if old.len() != new.len() {
        return Err(Error::Health(format!("point count changed ({} → {})", old.len(), new.len())));
    }
    let sep = (0..old.len())
        .flat_map(|i| (0..i).map(move |k| (i, k)))
        .map(|(i, k)| (old[i] - old[k]).norm())
        .fold(f64::INFINITY, f64::min);
    let mut used = vec![false; new.len()];
    let mut out = Vec::with_capacity(old.len());
    for o in old {
        let (k, d) = new
            .iter()
            .enumerate()
            .filter(|&(k, _)| !used[k])
            .map(|(k, z)| (k, (z - o).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if d > 0.1 * sep {
            return Err(Error::Health(format!("point near {o:.6} moved by {d:.2e}, beyond the tracking guard")));
        }
        used[k] = true;
        out.push(new[k]);
    }
    Ok(out)
}

/// A point on a bounding circle with maximal distance to all special points.
fn choose_basepoint(special: &[C64]) -> C64 {
    let radius = 1.5 * max_norm(special) + 1.0;
    let samples = 720;
    (0..samples)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / samples as f64))
        .map(|x| (x, special.iter().map(|p| (p - x).norm()).fold(f64::INFINITY, f64::min)))
        .fold((C64::new(radius, 0.0), -1.0), |best, c| if c.1 > best.1 + 1e-12 { c } else { best })
        .0
}

/// Loop from the basepoint around one branch point: reference route to an approach point,
/// counter-clockwise circle, route back.
pub fn monodromy_loop(basepoint: C64, e: C64, radius: f64, obs: &[Obstacle]) -> Contour {
    let dir = (basepoint - e) / (basepoint - e).norm();
    let a = e + dir * radius;
    let out = route::route(basepoint, a, obs);
    let th = dir.arg();
    let mut pieces = out.pieces.clone();
    pieces.push(Piece::Arc { center: e, radius, theta0: th, theta1: th + 2.0 * PI });
    pieces.extend(out.reversed().pieces);
    Contour::new(pieces)
}

fn monodromies(
    spec: &InstanceSpec,
    basepoint: C64,
    branch: &[C64],
    obs: &[Obstacle],
    psi0: &[C64],
) -> Result<Vec<Monodromy>> {
    let toward_center = -basepoint;
    let mut order: Vec<(usize, f64)> =
        branch.iter().enumerate().map(|(i, e)| (i, ((e - basepoint) * toward_center.conj()).arg())).collect();
    order.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let mut out = Vec::new();
    for (i, _) in order {
        let e = branch[i];
        let radius = obs.iter().find(|o| o.at == e).map(|o| o.radius).unwrap_or(1e-3);
        let path = monodromy_loop(basepoint, e, radius, obs);
        let perm = sheets::loop_permutation(&spec.numer, &path, psi0)?;
        out.push(Monodromy { branch: i, perm });
    }
    Ok(out)
}

/// Composition of all loops in angular order.
pub fn monodromy_product(curve: &SpectralCurve) -> Vec<usize> {
    curve
        .monodromy
        .iter()
        .fold((0..curve.n()).collect(), |acc: Vec<usize>, m| sheets::compose(&acc, &m.perm))
}

/// JSON-ready summary of the constructed cover.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceDump {
    pub label: String,
    pub counts: DerivedCounts,
    pub basepoint: C64,
    pub branch_points: Vec<BranchPoint>,
    pub monodromy: Vec<Monodromy>,
    pub zeros: Vec<ZeroPoint>,
    pub base_zero: ZeroPoint,
    pub pole_fibers: Vec<PoleFiber>,
    pub genericity: GenericityReport,
    pub homology: Option<Vec<Vec<C64>>>,
}

pub fn dump(curve: &SpectralCurve, basis: Option<&HomologyBasis>) -> SurfaceDump {
    SurfaceDump {
        label: curve.spec.label.clone(),
        counts: curve.counts,
        basepoint: curve.basepoint,
        branch_points: curve.branch.clone(),
        monodromy: curve.monodromy.clone(),
        zeros: curve.zeros.clone(),
        base_zero: curve.zeros[curve.base_zero],
        pole_fibers: curve.pole_fibers.clone(),
        genericity: curve.genericity.clone(),
        homology: basis.map(|b| b.polylines(curve)),
    }
}
