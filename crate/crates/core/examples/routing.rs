//! Compiles a QAOA circuit onto each topology preset and reports the SWAP
//! overhead and gate counts.

use toniq::backend::{route_and_compile, select_layout, topology_preset, NoiseParams, Topology};
use toniq::qaoa::{build_ansatz, QaoaParams};
use toniq::qubo::builtin_instances;
use toniq::sim::GateKind;

fn main() -> toniq::Result<()> {
    let params = QaoaParams::new(vec![0.4, 0.7], vec![0.9, 0.3])?;
    for n in [3, 5, 6] {
        let inst = builtin_instances(n)?;
        let logical = build_ansatz(&inst, &params);
        for kind in Topology::ALL {
            let b = topology_preset(kind, &NoiseParams::default());
            let layout = select_layout(&b, n)?;
            let c = route_and_compile(&logical, &b, &layout)?;
            println!(
                "n={n} {kind:<13} layout {:?} -> {:?}  swaps {:>2}  cnot {:>3}  rz {:>3}",
                c.initial_layout.as_slice(),
                c.final_layout.as_slice(),
                c.swaps_inserted,
                c.count(GateKind::CNOT),
                c.count(GateKind::RZ)
            );
        }
    }
    Ok(())
}
