use speclab::harness::library::builtin;
use speclab::instance::derived_counts;
use speclab::numerics::linalg::solve_matrix;
use speclab::surface::homology::raw_periods;
use speclab::surface::{build_surface, homology_basis, monodromy_product};

#[test]
fn builtin_surfaces() {
    for label in ["ell4", "g2-5", "g2-23"] {
        let t = std::time::Instant::now();
        let spec = builtin(label).unwrap();
        let counts = derived_counts(&spec);
        let curve = build_surface(spec).unwrap();
        assert_eq!(curve.branch.len() as i64, counts.p);
        let id: Vec<usize> = (0..2).collect();
        assert_eq!(monodromy_product(&curve), id, "{label}");
        let basis = homology_basis(&curve).unwrap();
        let g = curve.genus();
        let m = basis.intersection_matrix(&curve).unwrap();
        for i in 0..2 * g {
            for j in 0..2 * g {
                let want = if i < g && j == i + g {
                    1
                } else if j < g && i == j + g {
                    -1
                } else {
                    0
                };
                assert_eq!(m[i][j], want, "{label}: {m:?}");
            }
        }
        let (a, b) = raw_periods(&curve, &basis).unwrap();
        let omega = solve_matrix(&a.transpose(), &b.transpose()).unwrap().transpose();
        let asym = (&omega - omega.transpose()).norm();
        assert!(asym < 1e-10 * omega.norm(), "{label}: {asym:e}");
        eprintln!("{label}: Ω = {omega:.6} in {:?}", t.elapsed());
    }
}
