//! Built-in instances and the seeded generator that produced them.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::differentials::Cover;
use crate::error::{Error, Result};
use crate::moduli::{coordinates_of, jacobian, Coord};
use crate::instance::{parse_instance, InstanceSpec, Pole};
use crate::numerics::{ComplexPoly, C64};
use crate::surface::{build_surface, homology_basis};

pub const BUILTIN: [&str; 4] = ["ell4", "g2-5", "g2-23", "g2-resfree"];

/// Smallest accepted separation of special points, relative to their spread.
pub const MIN_MARGIN: f64 = 0.08;

const DATA: [(&str, &str); 4] = [
    ("ell4", include_str!("../../instances/ell4.json")),
    ("g2-5", include_str!("../../instances/g2-5.json")),
    ("g2-23", include_str!("../../instances/g2-23.json")),
    ("g2-resfree", include_str!("../../instances/g2-resfree.json")),
];

pub fn builtin(label: &str) -> Result<InstanceSpec> {
    DATA.iter()
        .find(|(l, _)| *l == label)
        .map(|(_, doc)| parse_instance(doc))
        .unwrap_or_else(|| {
            Err(Error::Invalid(format!("unknown instance `{label}` (built-in: {})", BUILTIN.join(", "))))
        })
}

/// A label or a path to an instance file.
pub fn load(name: &str) -> Result<InstanceSpec> {
    if BUILTIN.contains(&name) {
        return builtin(name);
    }
    let doc = std::fs::read_to_string(name)
        .map_err(|e| Error::Instance { path: name.to_string(), msg: format!("cannot read file: {e}") })?;
    parse_instance(&doc)
}

/// Pole layout of a built-in family.
pub fn layout(label: &str) -> Result<Vec<Pole>> {
    let p = |re: f64, im: f64, k: usize| Pole { x: C64::new(re, im), k };
    Ok(match label {
        "ell4" => vec![p(0.0, 0.0, 4)],
        "g2-5" => (0..5)
            .map(|j| {
                let z = C64::from_polar(2.0, 0.3 + 2.0 * std::f64::consts::PI * j as f64 / 5.0);
                p(z.re, z.im, 1)
            })
            .collect(),
        "g2-23" | "g2-resfree" => vec![p(-1.0, 0.2, 2), p(1.1, -0.3, 3)],
        _ => return Err(Error::Invalid(format!("no layout for `{label}`"))),
    })
}

/// Random numerators with the maximal degrees for the given poles.
pub fn draw(label: &str, poles: Vec<Pole>, n: usize, rng: &mut ChaCha8Rng) -> InstanceSpec {
    let mut spec = InstanceSpec { label: label.to_string(), n, poles, numer: vec![ComplexPoly::default(); n] };
    for ell in 1..=n {
        let len = (spec.degree_bound(ell) + 1).max(0) as usize;
        let c = (0..len)
            .map(|_| {
                let mut part = || (rng.gen_range(-1.0f64..1.0) * 100.0).round() / 100.0;
                C64::new(part(), part())
            })
            .collect();
        spec.numer[ell - 1] = ComplexPoly::new(c);
    }
    spec
}

/// Accepts an instance if the cover builds with margin and a homology basis exists.
pub fn acceptable(spec: &InstanceSpec) -> bool {
    let Ok(curve) = build_surface(spec.clone()) else { return false };
    curve.genericity.margin >= MIN_MARGIN && homology_basis(&curve).is_ok()
}

/// Draws until [`acceptable`]; returns the instance and the number of rejected draws.
pub fn generate(label: &str, seed: u64) -> Result<(InstanceSpec, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poles = layout(label)?;
    for attempt in 0..500 {
        let spec = draw(label, poles.clone(), 2, &mut rng);
        if acceptable(&spec) {
            return Ok((spec, attempt));
        }
    }
    Err(Error::Genericity(format!("no acceptable draw for `{label}` after 500 attempts")))
}

/// Draws a cover with the given layout and projects it onto the residue-free locus by
/// minimum-norm Gauss-Newton in the numerator coefficients. Draws that leave the generic locus
/// are retried.
pub fn generate_residue_free(label: &str, seed: u64) -> Result<(InstanceSpec, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poles = layout(label)?;
    for attempt in 0..500 {
        let start = draw(label, poles.clone(), 2, &mut rng);
        if let Ok(spec) = project_residue_free(start) {
            if acceptable(&spec) {
                return Ok((spec, attempt));
            }
        }
    }
    Err(Error::Genericity(format!("no residue-free instance for `{label}` after 500 draws")))
}

fn project_residue_free(start: InstanceSpec) -> Result<InstanceSpec> {
    let mut spec = start;
    for _ in 0..30 {
        let cover = Cover::build(spec.clone())?;
        let point = coordinates_of(&cover)?;
        let rows: Vec<usize> =
            point.coords.iter().enumerate().filter(|(_, c)| matches!(c, Coord::C { ell: 1, .. })).map(|(i, _)| i).collect();
        let r = DVector::from_iterator(rows.len(), rows.iter().map(|&i| point.values[i]));
        if r.norm() < 1e-13 * point.scale() {
            return Ok(spec);
        }
        let jac = jacobian(&cover)?.select_rows(&rows);
        let jh = jac.adjoint();
        let y = (&jac * &jh)
            .lu()
            .solve(&r)
            .ok_or_else(|| Error::Health("singular residue Jacobian".into()))?;
        let d = jh * y;
        let coef: Vec<C64> = spec.coefficients().iter().zip(d.iter()).map(|(c, dc)| c - dc).collect();
        spec = spec.with_coefficients(&coef);
    }
    Err(Error::NewtonDivergence { residual: f64::NAN })
}
