//! H-Scores of the shipped backends. The presets share uniform noise, so on
//! three qubits they all compile to the same line; five qubits need different
//! routing on each topology.
//!
//! ```text
//! cargo run --release --example hscore_backends
//! ```

use std::path::Path;

use toniq::backend::BackendModel;
use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::scoring::{build_reference, collect_samples, h_score};

fn main() -> toniq::Result<()> {
    let opts = RunOptions::default();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("backends");
    let mut shipped = Vec::new();
    for name in ["heavy_hex_16", "two_line_27", "i_shape_7"] {
        shipped.push(BackendModel::load(dir.join(format!("{name}.json")))?);
    }

    for (n, m) in [(3, 300), (5, 30)] {
        let inst = builtin_instances(n)?;
        let curve = build_reference(&inst, 1, 2000, 42, &opts)?;
        println!("{}:", inst.id);
        for b in std::iter::once(&BackendModel::ideal(n)).chain(&shipped) {
            let samples = collect_samples(&inst, b, 1, m, 42, &opts)?;
            let report = h_score(&samples, &curve)?;
            println!(
                "  {:<13} H = {:.4}  mean accuracy {:.4}",
                b.name,
                report.h_score,
                samples.mean()
            );
        }
    }
    Ok(())
}
