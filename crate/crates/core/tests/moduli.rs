use std::sync::OnceLock;

use speclab::differentials::Cover;
use speclab::harness::library::builtin;
use speclab::instance::derived_counts;
use speclab::moduli::{coordinates_of, fd_derivative, jacobian, Chart, Coord, FD_EPS};
use speclab::numerics::C64;

fn chart(label: &str) -> &'static Chart {
    static ELL4: OnceLock<Chart> = OnceLock::new();
    static G223: OnceLock<Chart> = OnceLock::new();
    let cell = if label == "ell4" { &ELL4 } else { &G223 };
    cell.get_or_init(|| Chart::new(Cover::build(builtin(label).unwrap()).unwrap()).unwrap())
}

#[test]
fn coordinate_count_and_residue_sum() {
    for l in ["ell4", "g2-5", "g2-23"] {
        let c = Cover::build(builtin(l).unwrap()).unwrap();
        let p = coordinates_of(&c).unwrap();
        assert_eq!(p.coords.len() as i64, derived_counts(c.spec()).dim, "{l}");
        assert!(p.residue_sum.norm() < 1e-10 * p.scale(), "{l}: {}", p.residue_sum);
    }
}

#[test]
fn jacobian_matches_coefficient_differences() {
    let ch = chart("ell4");
    let src = &ch.source;
    let coef = src.spec().coefficients();
    let jac = jacobian(src).unwrap();
    let h = 1e-5;
    for col in 0..coef.len() {
        let at = |s: f64| {
            let mut c = coef.clone();
            c[col] += C64::new(s, 0.0);
            coordinates_of(&Cover::tracked(src.spec().with_coefficients(&c), src).unwrap()).unwrap().values
        };
        let (p, m) = (at(h), at(-h));
        let (p2, m2) = (at(h / 2.0), at(-h / 2.0));
        for row in 0..coef.len() {
            let d1 = (p[row] - m[row]) / (2.0 * h);
            let d2 = (p2[row] - m2[row]) / h;
            let fd = (d2 * 4.0 - d1) / 3.0;
            let scale = jac.column(col).iter().map(|z| z.norm()).fold(1e-300, f64::max);
            assert!((fd - jac[(row, col)]).norm() < 1e-7 * scale, "({row},{col}): {fd} vs {}", jac[(row, col)]);
        }
    }
}

#[test]
fn newton_steps_hit_targets() {
    for l in ["ell4", "g2-23"] {
        let ch = chart(l);
        let zero = ch.step_to(&ch.point.values).unwrap();
        assert_eq!(zero.iterations, 0);
        let eps = 1e-4;
        let s = ch.step_along(Coord::A(0), C64::new(eps, 0.0)).unwrap();
        for (i, (a, b)) in s.point.values.iter().zip(&ch.point.values).enumerate() {
            let want = if i == 0 { C64::new(eps, 0.0) } else { C64::new(0.0, 0.0) };
            assert!((a - b - want).norm() < 1e-11 * ch.point.scale(), "{l}: coordinate {i}");
        }
        // uniform rescaling of coordinates is v → (1+ε)v
        let t: Vec<C64> = ch.point.values.iter().map(|z| z * (1.0 + eps)).collect();
        let s = ch.step_to(&t).unwrap();
        let want = ch.source.spec().scaled(C64::new(1.0 + eps, 0.0)).coefficients();
        for (a, b) in s.cover.spec().coefficients().iter().zip(&want) {
            assert!((a - b).norm() < 1e-9 * b.norm().max(1.0), "{l}: {a} vs {b}");
        }
    }
}

#[test]
fn chart_consistency_and_b_periods() {
    let ch = chart("g2-23");
    let g = ch.source.genus();
    for gam in 0..g {
        let fd = fd_derivative(ch, Coord::A(gam), FD_EPS, &|c: &Cover| {
            let mut out = c.periods.a_v.clone();
            out.extend(c.periods.b_v.iter().copied());
            Ok(out)
        })
        .unwrap();
        for b in 0..g {
            let want = if b == gam { 1.0 } else { 0.0 };
            assert!((fd.value[b] - want).norm() < 1e-10, "∂A_{b}/∂A_{gam} = {}", fd.value[b]);
            let om = ch.source.periods.omega[(b, gam)];
            assert!((fd.value[g + b] - om).norm() < 1e-5 * om.norm(), "∂B/∂A: {} vs {om}", fd.value[g + b]);
        }
    }
}
