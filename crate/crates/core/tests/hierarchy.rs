mod common;

use common::{moved, rel, setup};
use speclab::differentials::Cover;
use speclab::moduli::{coordinate_list, fd_derivative, Coord, FD_EPS};
use speclab::surface::Pt;
use speclab::variations::*;

fn points(cover: &Cover, table: &BranchTable, count: usize) -> Vec<Pt> {
    let e = &cover.h().branch;
    let pts: Vec<Pt> = cover
        .sample_points(4 * count)
        .into_iter()
        .filter(|p| table.jets.iter().all(|j| (p.x - e[j.index]).norm() > 3.0 * j.rho * j.rho))
        .take(count)
        .collect();
    assert_eq!(pts.len(), count);
    pts
}

#[test]
fn cycle_counts() {
    assert_eq!(cycles(2).len(), 1);
    assert_eq!(cycles(3).len(), 1);
    assert_eq!(cycles(4).len(), 3);
    assert_eq!(cycles(5).len(), 12);
}

#[test]
fn q3_is_symmetric() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let p = points(src, &s.table, 3);
        let base = q_multidiff(src, &p).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]] {
            let q = q_multidiff(src, &[p[perm[0]], p[perm[1]], p[perm[2]]]).unwrap();
            assert!(rel(q, base) < 1e-9, "{l} {perm:?}");
        }
    }
}

#[test]
fn low_members_of_the_r_family() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let p = points(src, &s.table, 3);
        let b = |x: &Pt, y: &Pt| src.bker.eval(x, y);
        assert!(rel(r_multidiff(src, &p[..2]).unwrap(), b(&p[0], &p[1])) < 1e-10);
        let v1 = src.h().v_numer(p[1].x, p[1].w) * p[1].m;
        let want = b(&p[0], &p[1]) * b(&p[1], &p[2]) / v1;
        assert!(rel(r_multidiff(src, &p).unwrap(), want) < 1e-10);
        // the R_2 variation is the bidifferential variation
        let h = direction_differential(src, Coord::A(0)).unwrap();
        let via_r = hierarchy_variation(src, &s.table, &h, Hierarchy::R, &p[..2]).unwrap();
        let via_b = vary_kernel(src, &s.table, &h, KernelTarget::B { x: p[0], y: p[1] }).unwrap();
        assert!(rel(via_r, via_b) < 1e-10, "{l}: {via_r} vs {via_b}");
    }
}

#[test]
fn hierarchy_variations_match_fd() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let p = points(src, &s.table, 3);
        let all = coordinate_list(src);
        for c in [all[0], all[all.len() - 1]] {
            let h = direction_differential(src, c).unwrap();
            let fd = fd_derivative(&s.chart, c, FD_EPS, &|cv: &Cover| {
                let q: Vec<Pt> = p.iter().map(|x| moved(cv, x)).collect();
                Ok(vec![q_multidiff(cv, &q[..2])?, q_multidiff(cv, &q)?, r_multidiff(cv, &q)?])
            })
            .unwrap();
            let want = [
                hierarchy_variation(src, &s.table, &h, Hierarchy::Q, &p[..2]).unwrap(),
                hierarchy_variation(src, &s.table, &h, Hierarchy::Q, &p).unwrap(),
                hierarchy_variation(src, &s.table, &h, Hierarchy::R, &p).unwrap(),
            ];
            for (k, w) in want.iter().enumerate() {
                assert!(rel(fd.value[k], *w) < 1e-4, "{l} {c} member {k}: {} vs {w}", fd.value[k]);
            }
        }
    }
}
