//! Regenerates the instance and backend files shipped with the crate.
//!
//! ```text
//! cargo run --release --example generate_builtins
//! ```

use std::path::Path;

use toniq::backend::{topology_preset, NoiseParams, Topology};
use toniq::qubo::{generate_instance, QuboInstance, BUILTIN_SEEDS};

fn main() -> toniq::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    for (n, seed) in BUILTIN_SEEDS {
        let generated = generate_instance(n, seed)?;
        let inst = QuboInstance::new(format!("qubits_{n}"), generated.q, Some(seed))?;
        let path = root.join(format!("instances/qubits_{n}.json"));
        std::fs::write(&path, inst.to_json()).expect("write instance");
        println!(
            "{}: ground energy {:.4}, ground states {:?}",
            path.display(),
            inst.ground_energy,
            inst.ground_states
        );
    }
    for kind in Topology::ALL {
        let backend = topology_preset(kind, &NoiseParams::default());
        let path = root.join(format!("backends/{kind}.json"));
        std::fs::write(&path, backend.to_json()).expect("write backend");
        println!(
            "{}: {} qubits, {} edges",
            path.display(),
            backend.num_qubits,
            backend.coupling.len()
        );
    }
    Ok(())
}
