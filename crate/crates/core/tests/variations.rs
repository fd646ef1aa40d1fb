mod common;

use common::{moved, rel, setup};
use speclab::differentials::Cover;
use speclab::moduli::{coordinate_list, fd_derivative, Coord, FD_EPS};
use speclab::numerics::C64;
use speclab::surface::route::{integrate_path, Anchor};
use speclab::surface::Pt;
use speclab::variations::*;

#[test]
fn direction_differentials_match_fd_of_v() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let pts = src.sample_points(5);
        for c in coordinate_list(src) {
            let h = direction_differential(src, c).unwrap();
            let fd = fd_derivative(&s.chart, c, FD_EPS, &|cv: &Cover| {
                Ok(pts.iter().map(|p| {
                    let q = moved(cv, p);
                    cv.h().phi(q.x, q.w)
                }).collect())
            })
            .unwrap();
            for (k, p) in pts.iter().enumerate() {
                let want = h.per_dx(src.h(), p.x, p.w);
                assert!(rel(fd.value[k], want) < 1e-5, "{l} {c}: {} vs {want}", fd.value[k]);
            }
        }
    }
}

#[test]
fn endpoint_corrections_match_fd_of_relative_periods() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let paths = src.basis.zero_paths.clone();
        for c in coordinate_list(src) {
            let h = direction_differential(src, c).unwrap();
            let fd = fd_derivative(&s.chart, c, FD_EPS, &|cv: &Cover| {
                let hy = cv.h();
                paths
                    .iter()
                    .map(|(_, p)| Ok(integrate_path(cv, p, &|q: &Pt| hy.v_numer(q.x, q.w) * q.m, &cv.curve.pole_x())?.value))
                    .collect()
            })
            .unwrap();
            for (k, (anchor, p)) in paths.iter().enumerate() {
                let hy = src.h();
                let int_h = integrate_path(src, p, &|q: &Pt| h.at(hy, q), &h.poles(&src.curve)).unwrap().value;
                let corr = match anchor {
                    Anchor::Branch(i) => endpoint_correction(src, &s.table, &h, *i).unwrap(),
                    _ => C64::new(0.0, 0.0),
                };
                assert!(rel(fd.value[k], int_h + corr) < 1e-5, "{l} {c} {anchor:?}: {} vs {}", fd.value[k], int_h + corr);
            }
        }
        // base-coordinate independence
        let h = direction_differential(src, Coord::A(0)).unwrap();
        for i in 0..src.h().branch.len() {
            let a = endpoint_correction(src, &s.table, &h, i).unwrap();
            let b = endpoint_correction_in_chart(src, &h, i, &|x| (x * 2.0 + x * x * x, C64::new(2.0, 0.0) + x * x * 3.0)).unwrap();
            assert!(rel(b, a) < 1e-8, "{l}: {a} vs {b}");
        }
    }
}

#[test]
fn period_matrix_variation_matches_fd() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let g = src.genus();
        let mut euler = nalgebra::DMatrix::<C64>::zeros(g, g);
        for (ci, c) in coordinate_list(src).into_iter().enumerate() {
            let h = direction_differential(src, c).unwrap();
            let var = vary_period_matrix(src, &s.table, &h).unwrap();
            let fd = fd_derivative(&s.chart, c, FD_EPS, &|cv: &Cover| Ok(cv.periods.omega.iter().copied().collect()))
                .unwrap();
            let scale = var.pairing.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (k, z) in var.pairing.iter().enumerate() {
                assert!((fd.value[k] - z).norm() < 1e-5 * scale, "{l} {c}: {} vs {z}", fd.value[k]);
            }
            euler += &var.pairing * s.chart.point.values[ci];
        }
        let om = src.periods.omega.norm();
        assert!(euler.norm() < 1e-8 * om, "{l}: Euler {:e}", euler.norm());
    }
}
