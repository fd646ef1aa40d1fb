mod common;

use common::{rel, setup};
use speclab::differentials::Cover;
use speclab::moduli::{fd_derivative, Coord, FD_EPS};
use speclab::variations::*;

#[test]
fn residue_free_instance_is_residue_free() {
    let s = setup("g2-resfree");
    require_residue_free(&s.chart.source).unwrap();
    assert!(require_residue_free(&setup("g2-23").chart.source).is_err());
    assert!(require_residue_free(&setup("g2-5").chart.source).is_err());
}

#[test]
fn tau_gradient_matches_chain_rule() {
    let s = setup("g2-resfree");
    let src = &s.chart.source;
    for gamma in 0..src.genus() {
        let grad = tau_gradient(src, &s.table, gamma).unwrap();
        let oracle = tau_chain_rule(src, &s.table, gamma).unwrap();
        println!("γ={gamma}: {} (branch {}, zeros {}) vs {oracle}", grad.value, grad.branch_part, grad.zero_part);
        assert!(rel(grad.value, oracle) < 1e-4, "γ={gamma}: {} vs {oracle}", grad.value);
    }
}

#[test]
fn tau_cross_partials_are_symmetric() {
    let s = setup("g2-resfree");
    let g = s.chart.source.genus();
    let grad = |cv: &Cover| {
        let t = BranchTable::new(cv)?;
        (0..g).map(|c| Ok(tau_gradient(cv, &t, c)?.value)).collect()
    };
    let d: Vec<_> = (0..g).map(|a| fd_derivative(&s.chart, Coord::A(a), FD_EPS, &grad).unwrap().value).collect();
    for a in 0..g {
        for b in 0..a {
            assert!(rel(d[a][b], d[b][a]) < 1e-4, "{a},{b}: {} vs {}", d[a][b], d[b][a]);
        }
    }
}
