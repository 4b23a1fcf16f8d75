//! Repeats the H-Score of a noisy backend and fits a normal distribution to
//! the repeats.

use toniq::backend::{topology_preset, NoiseParams, Topology};
use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::scoring::{robustness, RobustnessConfig};

fn main() -> toniq::Result<()> {
    let inst = builtin_instances(3)?;
    let backend = topology_preset(Topology::IShape7, &NoiseParams::default());
    let cfg = RobustnessConfig {
        repeats: 30,
        scoring_runs: 200,
        reference_runs: 2000,
        master_seed: 42,
        fixed_seed: false,
    };
    let stats = robustness(&inst, &backend, 1, &cfg, &RunOptions::default())?;
    println!("{} repeats of H on {}", stats.repeats, backend.name);
    println!(
        "mean {:.4}  95% CI [{:.4}, {:.4}]",
        stats.mean, stats.ci95_mean[0], stats.ci95_mean[1]
    );
    println!(
        "std  {:.4}  95% CI [{:.4}, {:.4}]",
        stats.std, stats.ci95_std[0], stats.ci95_std[1]
    );

    let fixed = robustness(
        &inst,
        &backend,
        1,
        &RobustnessConfig {
            fixed_seed: true,
            repeats: 10,
            ..cfg
        },
        &RunOptions::default(),
    )?;
    println!("same seeds every repeat: std {}", fixed.std);
    Ok(())
}
