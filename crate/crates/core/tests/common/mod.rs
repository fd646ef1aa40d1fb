#![allow(dead_code)]

use std::sync::OnceLock;

use speclab::differentials::Cover;
use speclab::harness::library::builtin;
use speclab::moduli::Chart;
use speclab::numerics::C64;
use speclab::surface::Pt;
use speclab::variations::BranchTable;

pub struct Setup {
    pub chart: Chart,
    pub table: BranchTable,
}

pub fn setup(label: &str) -> &'static Setup {
    static ELL4: OnceLock<Setup> = OnceLock::new();
    static G223: OnceLock<Setup> = OnceLock::new();
    static G25: OnceLock<Setup> = OnceLock::new();
    static RESFREE: OnceLock<Setup> = OnceLock::new();
    let cell = match label {
        "ell4" => &ELL4,
        "g2-5" => &G25,
        "g2-resfree" => &RESFREE,
        _ => &G223,
    };
    cell.get_or_init(|| {
        let cover = Cover::build(builtin(label).unwrap()).unwrap();
        let table = BranchTable::new(&cover).unwrap();
        Setup { chart: Chart::new(cover).unwrap(), table }
    })
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

pub fn moved(c: &Cover, p: &Pt) -> Pt {
    Pt::regular(p.x, c.h().sqrt_near(p.x, p.w))
}
