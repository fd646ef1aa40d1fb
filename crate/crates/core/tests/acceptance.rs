//! Acceptance criteria 1-10, one line per criterion.

use std::collections::HashMap;
use std::time::Instant;

use speclab::harness::library::builtin;
use speclab::harness::report::Recorder;
use speclab::harness::suites::{run_group, Context, Group};
use speclab::moduli::FD_EPS;

const MAIN: [&str; 3] = ["ell4", "g2-23", "g2-5"];

struct Criterion {
    id: usize,
    what: &'static str,
    instances: Vec<&'static str>,
    groups: Vec<Group>,
}

fn criteria() -> Vec<Criterion> {
    use Group::*;
    let c = |id, what, instances: &[&'static str], groups: &[Group]| Criterion {
        id,
        what,
        instances: instances.to_vec(),
        groups: groups.to_vec(),
    };
    vec![
        c(1, "period matrix: symmetry, positivity, normalization, AGM", &["ell4", "g2-23", "g2-5", "g2-resfree"], &[Periods]),
        c(2, "coordinate directions vs FD of v", &MAIN, &[Directions]),
        c(3, "relative periods with endpoint term; chart independence", &MAIN, &[Endpoints]),
        c(4, "period matrix variation: FD, two forms, symmetry, homogeneity", &MAIN, &[Cubic, Homogeneity]),
        c(5, "variations of v_α and B vs FD", &MAIN, &[Kernels]),
        c(6, "variation of ln E vs FD", &MAIN, &[PrimeForm]),
        c(7, "tau gradient vs dual-cycle chain rule; closedness", &["g2-resfree"], &[Tau]),
        c(8, "second variation of Ω; 24 symmetries; ∂B/∂A = Ω", &MAIN, &[Hessian]),
        c(9, "Q_3 symmetry, R_2 and R_3, Q_n variations", &MAIN, &[Hierarchy]),
        c(10, "central-difference error ratios under ε-halving", &["ell4", "g2-23", "g2-5", "g2-resfree"], &[Convergence]),
    ]
}

fn main() {
    let start = Instant::now();
    let mut contexts: HashMap<&str, Context> = HashMap::new();
    let mut failed = Vec::new();
    for cr in criteria() {
        let t = Instant::now();
        let mut rec = Recorder::new(None);
        for &label in &cr.instances {
            if !contexts.contains_key(label) {
                let ctx = Context::new(builtin(label).expect("built-in instance"), FD_EPS).expect("instance builds");
                contexts.insert(label, ctx);
            }
            for &g in &cr.groups {
                let before = rec.checks.len();
                run_group(&contexts[label], g, &mut rec);
                for c in &mut rec.checks[before..] {
                    c.name = format!("{label}: {}", c.name);
                }
            }
        }
        let gating: Vec<_> = rec.checks.iter().filter(|c| c.gating).collect();
        let bad: Vec<_> = gating.iter().filter(|c| !c.pass).collect();
        let worst = gating
            .iter()
            .filter(|c| c.tol > 0.0)
            .map(|c| c.rel_err / c.tol)
            .fold(0.0, f64::max);
        let pass = bad.is_empty() && !gating.is_empty();
        println!(
            "criterion {:>2} {}: {} ({} checks, worst error {:.2e} of tolerance, {:.1} s)",
            cr.id,
            if pass { "PASS" } else { "FAIL" },
            cr.what,
            gating.len(),
            worst,
            t.elapsed().as_secs_f64()
        );
        for c in bad.iter().take(5) {
            println!(
                "    {}: rel {:e} > tol {:e}{}",
                c.name,
                c.rel_err,
                c.tol,
                c.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
            );
        }
        if !pass {
            failed.push(cr.id);
        }
    }
    println!("acceptance: {} of 10 criteria pass ({:.1} s)", 10 - failed.len(), start.elapsed().as_secs_f64());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
