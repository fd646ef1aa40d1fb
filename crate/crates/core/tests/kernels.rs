mod common;

use common::{moved, rel, setup};
use speclab::differentials::kernel::ln_prime_form;
use speclab::differentials::Cover;
use speclab::moduli::{coordinate_list, fd_derivative, Coord, FD_EPS};
use speclab::numerics::C64;
use speclab::surface::Pt;
use speclab::variations::*;

/// Three point pairs with every point outside the branch-point jet circles.
fn configurations(cover: &Cover, table: &BranchTable) -> Vec<(Pt, Pt)> {
    let e = &cover.h().branch;
    let pts: Vec<Pt> = cover
        .sample_points(24)
        .into_iter()
        .filter(|p| table.jets.iter().all(|j| (p.x - e[j.index]).norm() > 3.0 * j.rho * j.rho))
        .collect();
    assert!(pts.len() >= 6, "only {} usable sample points", pts.len());
    (0..3).map(|k| (pts[2 * k], pts[2 * k + 1])).collect()
}

fn directions(cover: &Cover) -> Vec<Coord> {
    let all = coordinate_list(cover);
    let mut out = vec![all[0]];
    out.extend(all.iter().copied().filter(|c| matches!(c, Coord::C { ell: 1, .. })).take(1));
    out.extend(all.iter().copied().filter(|c| matches!(c, Coord::C { ell, .. } if *ell >= 2)).take(1));
    out
}

#[test]
fn holomorphic_and_bergman_variations_match_fd() {
    for l in ["ell4", "g2-23", "g2-5"] {
        let s = setup(l);
        let src = &s.chart.source;
        let g = src.genus();
        let cfg = configurations(src, &s.table);
        for c in directions(src) {
            let h = direction_differential(src, c).unwrap();
            let fd = fd_derivative(&s.chart, c, FD_EPS, &|cv: &Cover| {
                let mut out = Vec::new();
                for (p, q) in &cfg {
                    let (p, q) = (moved(cv, p), moved(cv, q));
                    for a in 0..g {
                        out.push(cv.v_alpha_numer(a, p.x) * p.m);
                    }
                    out.push(cv.bker.eval(&p, &q));
                }
                Ok(out)
            })
            .unwrap();
            let mut k = 0;
            for (p, q) in &cfg {
                for alpha in 0..g {
                    let want = vary_kernel(src, &s.table, &h, KernelTarget::VAlpha { alpha, x: *p }).unwrap();
                    assert!(rel(fd.value[k], want) < 1e-4, "{l} {c} v_{alpha}: {} vs {want}", fd.value[k]);
                    k += 1;
                }
                let want = vary_kernel(src, &s.table, &h, KernelTarget::B { x: *p, y: *q }).unwrap();
                let swapped = vary_kernel(src, &s.table, &h, KernelTarget::B { x: *q, y: *p }).unwrap();
                assert!(rel(fd.value[k], want) < 1e-4, "{l} {c} B: {} vs {want}", fd.value[k]);
                assert!(rel(swapped, want) < 1e-10, "{l} {c} B asymmetric");
                k += 1;
            }
        }
    }
}

#[test]
fn prime_form_variation_matches_fd() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let cfg = configurations(src, &s.table);
        for c in directions(src) {
            let h = direction_differential(src, c).unwrap();
            let fd = fd_derivative(&s.chart, c, FD_EPS, &|cv: &Cover| {
                cfg.iter().map(|(p, q)| ln_prime_form(cv, &moved(cv, p), &moved(cv, q))).collect()
            })
            .unwrap();
            for (k, (p, q)) in cfg.iter().enumerate() {
                let want = vary_kernel(src, &s.table, &h, KernelTarget::LnE { x: *p, y: *q }).unwrap();
                assert!(rel(fd.value[k], want) < 1e-4, "{l} {c} ln E: {} vs {want}", fd.value[k]);
            }
        }
    }
}

#[test]
fn evaluation_inside_a_jet_circle_is_refused() {
    let s = setup("ell4");
    let src = &s.chart.source;
    let h = direction_differential(src, Coord::A(0)).unwrap();
    let near = src.h().local(0, C64::new(0.5 * s.table.jets[0].rho, 0.0));
    let far = src.sample_points(1)[0];
    assert!(vary_kernel(src, &s.table, &h, KernelTarget::B { x: near, y: far }).is_err());
}
