//! Certify the closed-form spectra, entropies, and GMCs against the dense
//! 2^N brute force (partial traces, eigendecompositions, and the
//! matrix-exponential solution of the cascade).
//!
//! Run with: cargo run --release --example oracle_check

use dicke_gmc::oracle::run_equivalence_suite;

fn main() -> Result<(), dicke_gmc::Error> {
    let report = run_equivalence_suite(6, None)?;
    for w in &report.warnings {
        println!("warning: {w}");
    }
    let names: Vec<&str> = {
        let mut seen = Vec::new();
        for c in &report.checks {
            if !seen.contains(&c.name) {
                seen.push(c.name);
            }
        }
        seen
    };
    for name in names {
        let group: Vec<_> = report.checks.iter().filter(|c| c.name == name).collect();
        let worst = group.iter().map(|c| c.deviation).fold(0.0_f64, f64::max);
        println!(
            "{}: {} cases, worst deviation {:.3e} -> {}",
            name,
            group.len(),
            worst,
            if group.iter().all(|c| c.pass) { "ok" } else { "MISMATCH" }
        );
    }
    assert!(report.all_pass());
    println!("\nclosed forms agree with the dense oracle on all {} checks", report.checks.len());
    Ok(())
}
