//! Compares accuracy distributions directly: a batch against itself, against a
//! noisy backend, and against a shifted copy.

use toniq::backend::{topology_preset, BackendModel, NoiseParams, Topology};
use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::scoring::{build_reference_samples, collect_samples, compare_distr};

fn main() -> toniq::Result<()> {
    let inst = builtin_instances(3)?;
    let opts = RunOptions::default();
    let reference = build_reference_samples(&inst, 1, 2000, 1, &opts)?;
    let fresh = collect_samples(&inst, &BackendModel::ideal(3), 1, 2000, 2, &opts)?;
    let noisy = collect_samples(
        &inst,
        &topology_preset(Topology::IShape7, &NoiseParams::two_qubit_only(0.02)),
        1,
        500,
        3,
        &opts,
    )?;
    let mut shifted = reference.clone();
    shifted.values.iter_mut().for_each(|x| *x = (*x + 0.2).min(1.0));

    println!(
        "fresh noiseless vs reference  {:.4}",
        compare_distr(&fresh, &reference)?
    );
    println!(
        "noisy vs reference            {:.4}",
        compare_distr(&noisy, &reference)?
    );
    println!(
        "reference vs noisy            {:.4}",
        compare_distr(&reference, &noisy)?
    );
    println!(
        "shifted +0.2 vs reference     {:.4}",
        compare_distr(&shifted, &reference)?
    );
    Ok(())
}
