//! Builds the noiseless scoring curve for the 3-qubit instance and writes it
//! to the system temp directory.

use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::scoring::{build_reference_samples, ScoringCurve, DEFAULT_BINS};

fn main() -> toniq::Result<()> {
    let inst = builtin_instances(3)?;
    let samples = build_reference_samples(&inst, 1, 2000, 42, &RunOptions::default())?;
    let curve = ScoringCurve::from_samples(&samples, DEFAULT_BINS)?;

    println!("{} runs, mean accuracy {:.4}", samples.len(), samples.mean());
    for x in [0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
        println!("F({x:.2}) = {:.4}", curve.evaluate(x)?);
    }
    let path = std::env::temp_dir().join("toniq_reference_qubits_3_p1.json");
    std::fs::write(&path, curve.to_json()).expect("write curve");
    let back = ScoringCurve::load(&path)?;
    assert_eq!(back, curve);
    println!("wrote {}", path.display());
    Ok(())
}
