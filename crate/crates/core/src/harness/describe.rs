//! Human-readable summary of an instance.

use std::fmt::Write;

use crate::error::Result;
use crate::instance::InstanceSpec;
use crate::surface::build_surface;
use crate::variations::require_residue_free;

pub fn describe(spec: &InstanceSpec) -> Result<String> {
    let curve = build_surface(spec.clone())?;
    let c = curve.counts;
    let mut s = String::new();
    let _ = writeln!(s, "instance {}", spec.label);
    let _ = writeln!(s, "sheets n = {}", spec.n);
    for (j, p) in spec.poles.iter().enumerate() {
        let _ = writeln!(s, "pole {}: x = {:.6}, order {}", j + 1, p.x, p.k);
    }
    let _ = writeln!(s, "genus ĝ = {}", c.genus);
    let _ = writeln!(s, "branch points p = {}", c.p);
    let _ = writeln!(s, "zeros of v r = {}", c.r);
    let _ = writeln!(s, "moduli dimension dim = {}", c.dim);
    let _ = writeln!(s, "total pole order Σk = {}", c.total_order);
    let _ = writeln!(s, "branch points:");
    for b in &curve.branch {
        let _ = writeln!(s, "  {:.10}  (sheets {} ↔ {})", b.x, b.sheets.0 + 1, b.sheets.1 + 1);
    }
    let _ = writeln!(s, "zeros of v off the branch locus:");
    for z in &curve.zeros {
        let _ = writeln!(s, "  {:.10}  (sheet {})", z.x, z.sheet + 1);
    }
    let g = &curve.genericity;
    let _ = writeln!(s, "genericity: {} (margin {:.4})", if g.passed() { "passed" } else { "FAILED" }, g.margin);
    for f in &g.failures {
        let _ = writeln!(s, "  {f}");
    }
    if spec.n == 2 {
        let cover = crate::differentials::Cover::build(spec.clone())?;
        let _ = writeln!(s, "residue-free: {}", if require_residue_free(&cover).is_ok() { "yes" } else { "no" });
    }
    Ok(s)
}
