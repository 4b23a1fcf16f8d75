//! One optimized QAOA run per layer count, on the noiseless backend and on a
//! noisy preset.

use toniq::backend::{topology_preset, BackendModel, NoiseParams, Topology};
use toniq::qaoa::{run_once, RunOptions};
use toniq::qubo::builtin_instances;
use toniq::seed::{run_seed, Stream};

fn main() -> toniq::Result<()> {
    let inst = builtin_instances(3)?;
    let ideal = BackendModel::ideal(3);
    let noisy = topology_preset(Topology::HeavyHex16, &NoiseParams::default());
    let opts = RunOptions::default();

    println!("{} ground energy {:.4}", inst.id, inst.ground_energy);
    for layers in [1, 2, 4] {
        for backend in [&ideal, &noisy] {
            let r = run_once(&inst, backend, layers, &opts, run_seed(7, Stream::Scoring, 0))?;
            println!(
                "p={layers} {:<13} accuracy {:.4}  cost {:8.4}  evals {:>4}  converged {}",
                backend.name, r.accuracy, r.final_cost, r.evals_used, r.converged
            );
        }
    }
    Ok(())
}
