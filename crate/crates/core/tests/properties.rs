use proptest::prelude::*;

use speclab::harness::oracles::{agm, fundamental};
use speclab::moduli::Coord;
use speclab::numerics::jet::circle_jet;
use speclab::numerics::poly::ComplexPoly;
use speclab::numerics::quad::adaptive;
use speclab::numerics::{c64, C64};

fn cx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c64(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coord_names_round_trip(a in 0usize..6, j in 0usize..4, s in 0usize..3, ell in 1usize..5, pick in any::<bool>()) {
        let c = if pick { Coord::A(a) } else { Coord::C { j, s, ell } };
        let back: Coord = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn roots_of_product(roots in prop::collection::vec(cx(2.0), 1..7)) {
        let sep = roots.iter().enumerate()
            .flat_map(|(i, a)| roots[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        prop_assume!(sep > 0.2);
        let p = ComplexPoly::from_roots(&roots);
        let found = p.raw_roots().unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for r in &roots {
            let d = found.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d < 1e-8, "root {} missed by {:e}", r, d);
        }
    }

    #[test]
    fn derivative_matches_difference(coeffs in prop::collection::vec(cx(1.0), 2..8), x in cx(1.0)) {
        let p = ComplexPoly::new(coeffs);
        let h = 1e-5;
        let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
        let d = p.derivative().eval(x);
        prop_assert!((fd - d).norm() < 1e-7 * (1.0 + d.norm()));
    }

    #[test]
    fn circle_jet_recovers_laurent(coeffs in prop::collection::vec(cx(1.0), 6), rho in 0.3f64..2.0) {
        // t^-2 .. t^3
        let f = |t: C64| coeffs.iter().enumerate().map(|(k, c)| c * t.powi(k as i32 - 2)).sum::<C64>();
        let jet = circle_jet(&mut |t| f(t), rho, 2, 8).unwrap();
        for (k, c) in coeffs.iter().enumerate() {
            prop_assert!((jet.c(k as i64 - 2) - c).norm() < 1e-12 * (1.0 + rho.powi(-3)) * 10.0);
        }
        prop_assert!(jet.c(4).norm() < 1e-12);
    }

    #[test]
    fn quadrature_of_polynomials(coeffs in prop::collection::vec(-2.0f64..2.0, 1..10), b in 0.1f64..3.0) {
        let f = |x: f64| c64(coeffs.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum(), 0.0);
        let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| c * b.powi(k as i32 + 1) / (k as f64 + 1.0)).sum();
        let q = adaptive(&f, 0.0, b, 1e-13, 1.0).unwrap();
        prop_assert!((q.value.re - exact).abs() < 1e-11 * (1.0 + exact.abs()));
    }

    #[test]
    fn agm_symmetric_and_homogeneous(a in 0.1f64..10.0, b in 0.1f64..10.0, k in 0.1f64..10.0) {
        let m = agm(c64(a, 0.0), c64(b, 0.0));
        prop_assert!((agm(c64(b, 0.0), c64(a, 0.0)) - m).norm() < 1e-13 * m.norm());
        prop_assert!((agm(c64(k * a, 0.0), c64(k * b, 0.0)) - m * k).norm() < 1e-13 * k * m.norm());
        prop_assert!(m.re >= a.min(b) && m.re <= a.max(b));
    }

    #[test]
    fn fundamental_domain(re in -5.0f64..5.0, im in 0.05f64..3.0, n in -3i32..3) {
        let t = c64(re, im);
        let f = fundamental(t);
        prop_assert!(f.re.abs() <= 0.5 + 1e-12);
        prop_assert!(f.norm() >= 1.0 - 1e-12);
        let g = fundamental(t + n as f64);
        prop_assert!((f - g).norm() < 1e-9 || (f.re.abs() - 0.5).abs() < 1e-9 || (f.norm() - 1.0).abs() < 1e-9);
    }
}
