//! Regenerates the built-in instance files.

use speclab::harness::library::{generate, generate_residue_free};

fn main() -> anyhow::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "crates/core/instances".into());
    for (label, seed) in [("ell4", 4u64), ("g2-5", 5), ("g2-23", 23)] {
        let (spec, rejected) = generate(label, seed)?;
        std::fs::write(format!("{dir}/{label}.json"), spec.to_json() + "\n")?;
        eprintln!("{label}: seed {seed}, {rejected} rejected draws");
    }
    let (mut spec, rejected) = generate_residue_free("g2-resfree", 7)?;
    spec.label = "g2-resfree".into();
    std::fs::write(format!("{dir}/g2-resfree.json"), spec.to_json() + "\n")?;
    eprintln!("g2-resfree: seed 7, {rejected} rejected draws");
    Ok(())
}
