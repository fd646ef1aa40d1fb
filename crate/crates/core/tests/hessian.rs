mod common;

use common::setup;
use speclab::differentials::Cover;
use speclab::moduli::{fd_derivative, Coord, FD_EPS};
use speclab::numerics::C64;
use speclab::variations::*;

fn gradient(cover: &Cover, delta: usize) -> speclab::Result<Vec<C64>> {
    let table = BranchTable::new(cover)?;
    let h = direction_differential(cover, Coord::A(delta))?;
    Ok(vary_period_matrix(cover, &table, &h)?.pairing.iter().copied().collect())
}

#[test]
fn hessian_matches_fd_of_the_gradient() {
    for l in ["ell4", "g2-23"] {
        let s = setup(l);
        let src = &s.chart.source;
        let g = src.genus();
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for d in 0..g {
            for c in 0..g {
                let fd = fd_derivative(&s.chart, Coord::A(c), FD_EPS, &|cv: &Cover| gradient(cv, d)).unwrap();
                for b in 0..g {
                    for a in 0..g {
                        let want = period_hessian(src, &s.table, [a, b, c, d]);
                        scale = scale.max(want.norm());
                        worst = worst.max((fd.value[a + g * b] - want).norm());
                    }
                }
            }
        }
        assert!(worst < 5e-4 * scale, "{l}: {worst:e} of {scale:e}");
    }
}

#[test]
fn hessian_is_fully_symmetric() {
    let s = setup("g2-23");
    let src = &s.chart.source;
    for idx in [[0, 0, 0, 1], [0, 0, 1, 1], [0, 1, 1, 1]] {
        let base = period_hessian(src, &s.table, idx);
        let mut items = idx;
        // Heap's algorithm over the 24 orderings
        let mut c = [0usize; 4];
        let mut i = 0;
        while i < 4 {
            if c[i] < i {
                if i % 2 == 0 { items.swap(0, i) } else { items.swap(c[i], i) }
                let z = period_hessian(src, &s.table, items);
                assert!((z - base).norm() < 1e-8 * base.norm().max(1.0), "{items:?}");
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }
}
