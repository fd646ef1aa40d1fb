//! Spectral-cover instance files: parsing, validation and the combinatorial counts.
//!
//! An instance fixes `n`, the marked points `y_j` with orders `k_j`, and for each
//! `ℓ = 1..n` the numerator `N_ℓ` of `Q_ℓ = N_ℓ(x) / Π_j (x - y_j)^{ℓ k_j} (dx)^ℓ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexPoly, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub x: C64,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub label: String,
    pub n: usize,
    pub poles: Vec<Pole>,
    /// `numer[ℓ-1]` is `N_ℓ`.
    pub numer: Vec<ComplexPoly>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DerivedCounts {
    /// Number of branch points.
    pub p: i64,
    /// Genus of the cover.
    pub genus: i64,
    /// Number of zeros of `v`.
    pub r: i64,
    /// Dimension of the moduli space.
    pub dim: i64,
    /// Σ k_j.
    pub total_order: i64,
}

// ---- file format ----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct RawPole {
    x: [f64; 2],
    k: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawQ {
    ell: i64,
    numer: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawInstance {
    label: String,
    n: i64,
    poles: Vec<RawPole>,
    #[serde(rename = "Q")]
    q: Vec<RawQ>,
}

fn field(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Instance { path: path.into(), msg: msg.into() }
}

pub fn parse_instance(document: &str) -> Result<InstanceSpec> {
    let raw: RawInstance =
        serde_json::from_str(document).map_err(|e| field("$", format!("malformed document: {e}")))?;
    if raw.n < 2 {
        return Err(field("n", format!("n = {} < 2", raw.n)));
    }
    let n = raw.n as usize;
    let mut poles = Vec::with_capacity(raw.poles.len());
    for (i, p) in raw.poles.iter().enumerate() {
        if p.k < 1 {
            return Err(field(format!("poles[{i}].k"), "pole order must be >= 1"));
        }
        if !p.x.iter().all(|v| v.is_finite()) {
            return Err(field(format!("poles[{i}].x"), "pole location must be finite"));
        }
        poles.push(Pole { x: C64::new(p.x[0], p.x[1]), k: p.k as usize });
    }
    let mut numer: Vec<Option<ComplexPoly>> = vec![None; n];
    for (i, q) in raw.q.iter().enumerate() {
        if q.ell < 1 || q.ell as usize > n {
            return Err(field(format!("Q[{i}].ell"), format!("ℓ = {} outside 1..{n}", q.ell)));
        }
        let slot = &mut numer[q.ell as usize - 1];
        if slot.is_some() {
            return Err(field(format!("Q[{i}].ell"), format!("duplicate differential ℓ={}", q.ell)));
        }
        *slot = Some(ComplexPoly::new(q.numer.iter().map(|c| C64::new(c[0], c[1])).collect()));
    }
    let numer = numer
        .into_iter()
        .enumerate()
        .map(|(i, q)| q.ok_or_else(|| field("Q", format!("missing differential ℓ={}", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let spec = InstanceSpec { label: raw.label, n, poles, numer };
    spec.validate()?;
    Ok(spec)
}

impl InstanceSpec {
    pub fn total_order(&self) -> usize {
        self.poles.iter().map(|p| p.k).sum()
    }

    /// Maximal degree of `N_ℓ` for a differential regular at infinity.
    pub fn degree_bound(&self, ell: usize) -> i64 {
        ell as i64 * self.total_order() as i64 - 2 * ell as i64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(field("n", format!("n = {} < 2", self.n)));
        }
        if self.poles.is_empty() || self.poles.iter().all(|p| p.k == 0) {
            return Err(field("poles", "at least one pole of positive order is required"));
        }
        for i in 0..self.poles.len() {
            for j in 0..i {
                let d = (self.poles[i].x - self.poles[j].x).norm();
                if d <= 1e-12 * self.poles[i].x.norm().max(1.0) {
                    return Err(field(format!("poles[{i}].x"), format!("duplicate pole (same as poles[{j}])")));
                }
            }
        }
        if self.numer.len() != self.n {
            return Err(field("Q", format!("expected {} differentials, found {}", self.n, self.numer.len())));
        }
        for (i, q) in self.numer.iter().enumerate() {
            let ell = i + 1;
            let bound = self.degree_bound(ell);
            let deg = if q.is_zero() { -1 } else { q.degree() as i64 };
            if deg > bound {
                return Err(field(
                    format!("Q[ℓ={ell}].numer"),
                    format!("degree bound violated: deg N_{ell} = {deg} > {bound}"),
                ));
            }
        }
        Ok(())
    }

    /// `P(x) = Π_j (x - y_j)^{k_j}`.
    pub fn pole_polynomial(&self) -> ComplexPoly {
        let roots: Vec<C64> = self.poles.iter().flat_map(|p| std::iter::repeat(p.x).take(p.k)).collect();
        ComplexPoly::from_roots(&roots)
    }

    /// Raw coefficient vector (N_1 coefficients, then N_2, ...), each padded to its bound.
    pub fn coefficients(&self) -> Vec<C64> {
        (1..=self.n)
            .flat_map(|ell| {
                let len = (self.degree_bound(ell) + 1).max(0) as usize;
                (0..len).map(move |k| self.numer[ell - 1].coeff(k))
            })
            .collect()
    }

    /// Inverse of [`InstanceSpec::coefficients`].
    pub fn with_coefficients(&self, c: &[C64]) -> InstanceSpec {
        let mut out = self.clone();
        let mut offset = 0;
        for ell in 1..=self.n {
            let len = (self.degree_bound(ell) + 1).max(0) as usize;
            out.numer[ell - 1] = ComplexPoly::new(c[offset..offset + len].to_vec());
            offset += len;
        }
        out
    }

    /// `Q_ℓ → λ^ℓ Q_ℓ`, i.e. `v → λ v`.
    pub fn scaled(&self, lambda: C64) -> InstanceSpec {
        let mut out = self.clone();
        for (i, q) in out.numer.iter_mut().enumerate() {
            *q = q.scaled(lambda.powu(i as u32 + 1));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            label: self.label.clone(),
            n: self.n as i64,
            poles: self.poles.iter().map(|p| RawPole { x: [p.x.re, p.x.im], k: p.k as i64 }).collect(),
            q: self
                .numer
                .iter()
                .enumerate()
                .map(|(i, q)| RawQ { ell: i as i64 + 1, numer: q.coeffs.iter().map(|c| [c.re, c.im]).collect() })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serializes")
    }
}

/// Counts for a genus-0 base.
pub fn derived_counts(spec: &InstanceSpec) -> DerivedCounts {
    let n = spec.n as i64;
    let k = spec.total_order() as i64;
    let g = 0i64;
    let p = n * (n - 1) * (2 * g - 2 + k);
    let genus = n * n * (g - 1) + 1 + n * (n - 1) / 2 * k;
    let r = 2 * genus - 2 + n * k;
    let dim = genus + n * k - 1;
    DerivedCounts { p, genus, r, dim, total_order: k }
}

impl DerivedCounts {
    /// Moduli dimension computed as `n(n+1)/2 Σk + n²(g-1)`.
    pub fn dim_alt(n: i64, total_order: i64) -> i64 {
        n * (n + 1) / 2 * total_order - n * n
    }

    /// Number of coefficients of `N_ℓ`.
    pub fn coefficient_dim(&self, ell: i64) -> i64 {
        ell * self.total_order - 2 * ell + 1
    }
}

/// Outcome of the genericity checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityReport {
    pub failures: Vec<String>,
    /// Smallest pairwise distance among special points, relative to their spread.
    pub margin: f64,
}

impl GenericityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<GenericityReport> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::Genericity(self.failures.join("; ")))
        }
    }
}

/// Data the genericity checks need from a constructed cover.
pub struct DivisorData<'a> {
    pub discriminant: &'a ComplexPoly,
    pub branch_roots: &'a [crate::numerics::Root],
    pub zero_roots: &'a [crate::numerics::Root],
    /// `N_n`, whose zeros project the non-branch zeros of `v`.
    pub top: &'a ComplexPoly,
}

const COLLIDE: f64 = 1e-7;

/// Checks simple, distinct branch points away from poles and infinity, simple
/// zeros of `v`, and unramified fibers over the poles.
pub fn check_genericity(spec: &InstanceSpec, d: &DivisorData) -> GenericityReport {
    let counts = derived_counts(spec);
    let mut failures = Vec::new();
    let scale = spec
        .poles
        .iter()
        .map(|p| p.x.norm())
        .chain(d.branch_roots.iter().map(|r| r.value.norm()))
        .fold(1.0, f64::max);
    let tol = COLLIDE * scale;

    if d.discriminant.is_zero() || (d.discriminant.degree() as i64) < counts.p {
        failures.push(format!(
            "branch point at infinity (discriminant degree {} < {})",
            if d.discriminant.is_zero() { -1 } else { d.discriminant.degree() as i64 },
            counts.p
        ));
    }
    for r in d.branch_roots {
        if r.multiplicity > 1 {
            failures.push(format!("non-simple branch point at {:.6}", r.value));
        }
    }
    for (i, a) in d.branch_roots.iter().enumerate() {
        for b in &d.branch_roots[..i] {
            if (a.value - b.value).norm() < tol {
                failures.push(format!("non-simple branch point: {:.6} and {:.6} coincide", a.value, b.value));
            }
        }
        for p in &spec.poles {
            if (a.value - p.x).norm() < tol * 10.0 {
                failures.push(format!("pole collides with branch point at {:.6}", p.x));
            }
        }
    }
    let expected_d0 = counts.r - counts.p;
    if d.top.is_zero() || (d.top.degree() as i64) < expected_d0 {
        failures.push("zero of v at infinity".to_string());
    }
    for z in d.zero_roots {
        if z.multiplicity > 1 {
            failures.push(format!("non-simple zero of v at {:.6}", z.value));
        }
        for b in d.branch_roots {
            if (z.value - b.value).norm() < tol {
                failures.push(format!("zero of v collides with branch point at {:.6}", z.value));
            }
        }
        for p in &spec.poles {
            if (z.value - p.x).norm() < tol {
                failures.push(format!("zero of v collides with pole at {:.6}", p.x));
            }
        }
    }
    for p in &spec.poles {
        if d.discriminant.eval(p.x).norm() <= tol * d.discriminant.scale() {
            failures.push(format!("fiber over pole {:.6} is ramified", p.x));
        }
    }
    let mut pts: Vec<C64> = spec.poles.iter().map(|p| p.x).collect();
    pts.extend(d.branch_roots.iter().map(|r| r.value));
    pts.extend(d.zero_roots.iter().map(|r| r.value));
    let mut min_d = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            min_d = min_d.min((pts[i] - pts[j]).norm());
        }
    }
    GenericityReport { failures, margin: min_d / scale }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with_orders(n: usize, ks: &[usize]) -> InstanceSpec {
        InstanceSpec {
            label: "t".into(),
            n,
            poles: ks.iter().enumerate().map(|(i, &k)| Pole { x: C64::new(i as f64, 0.0), k }).collect(),
            numer: vec![ComplexPoly::default(); n],
        }
    }

    #[test]
    fn five_simple_poles() {
        let c = derived_counts(&spec_with_orders(2, &[1, 1, 1, 1, 1]));
        assert_eq!((c.p, c.genus, c.r, c.dim), (6, 2, 12, 11));
    }

    #[test]
    fn one_order_four_pole() {
        let c = derived_counts(&spec_with_orders(2, &[4]));
        assert_eq!((c.p, c.genus, c.r, c.dim), (4, 1, 8, 8));
    }

    #[test]
    fn orders_two_and_three() {
        let c = derived_counts(&spec_with_orders(2, &[2, 3]));
        assert_eq!((c.p, c.genus, c.r), (6, 2, 12));
    }

    #[test]
    fn trivial_cover() {
        let c = derived_counts(&spec_with_orders(1, &[3]));
        assert_eq!((c.p, c.genus), (0, 0));
    }

    #[test]
    fn dimension_two_ways_and_coordinate_count() {
        for n in 2..6 {
            for ks in [vec![1usize, 1, 1], vec![4], vec![2, 3], vec![1, 2, 2, 1]] {
                let c = derived_counts(&spec_with_orders(n, &ks));
                let k: i64 = ks.iter().map(|&k| k as i64).sum();
                assert_eq!(c.dim, DerivedCounts::dim_alt(n as i64, k));
                let coords = c.genus + n as i64 * k - 1;
                assert_eq!(coords, c.dim);
                let coeffs: i64 = (1..=n as i64).map(|l| c.coefficient_dim(l)).sum();
                assert_eq!(coeffs, c.dim);
            }
        }
    }

    const ELL4: &str = r#"{"label":"x","n":2,"poles":[{"x":[0,0],"k":4}],
        "Q":[{"ell":1,"numer":[[1,0],[0.5,0.2],[0.3,-0.1]]},
             {"ell":2,"numer":[[0.2,0],[0,1],[0.4,0],[0.1,0.1],[1,0]]}]}"#;

    #[test]
    fn parses_valid_instance() {
        let s = parse_instance(ELL4).unwrap();
        assert_eq!(s.n, 2);
        assert_eq!(s.numer[1].degree(), 4);
        let again = parse_instance(&s.to_json()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn missing_differential() {
        let doc = r#"{"label":"x","n":2,"poles":[{"x":[0,0],"k":4}],"Q":[{"ell":1,"numer":[[1,0]]}]}"#;
        let e = parse_instance(doc).unwrap_err().to_string();
        assert!(e.contains("missing differential ℓ=2"), "{e}");
    }

    #[test]
    fn duplicate_pole() {
        let doc = r#"{"label":"x","n":2,"poles":[{"x":[1,0],"k":2},{"x":[1,0],"k":2}],
            "Q":[{"ell":1,"numer":[[1,0]]},{"ell":2,"numer":[[1,0]]}]}"#;
        let e = parse_instance(doc).unwrap_err().to_string();
        assert!(e.contains("duplicate pole") && e.contains("poles[1]"), "{e}");
    }

    #[test]
    fn degree_bound_and_small_n() {
        let doc = r#"{"label":"x","n":2,"poles":[{"x":[0,0],"k":2}],
            "Q":[{"ell":1,"numer":[[1,0],[1,0]]},{"ell":2,"numer":[[1,0]]}]}"#;
        assert!(parse_instance(doc).unwrap_err().to_string().contains("degree bound"));
        let doc = r#"{"label":"x","n":1,"poles":[{"x":[0,0],"k":2}],"Q":[]}"#;
        assert!(parse_instance(doc).unwrap_err().to_string().contains("`n`"));
        assert!(parse_instance("{not json").is_err());
    }

    #[test]
    fn coefficient_vector_roundtrip() {
        let s = parse_instance(ELL4).unwrap();
        let c = s.coefficients();
        assert_eq!(c.len(), 3 + 5);
        assert_eq!(s.with_coefficients(&c), s);
    }
}
