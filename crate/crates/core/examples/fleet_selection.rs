//! Ranks a graded-noise fleet and compares ranked, random and worst choices
//! of three backends.

use toniq::backend::{topology_preset, NoiseParams, Topology};
use toniq::fleet::{score_fleet, Strategy};
use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::scoring::build_reference;

fn main() -> toniq::Result<()> {
    let inst = builtin_instances(3)?;
    let opts = RunOptions::default();
    let curve = build_reference(&inst, 1, 2000, 42, &opts)?;
    let fleet: Vec<_> = (0..6)
        .map(|i| {
            let noise = NoiseParams::two_qubit_only(0.006 * i as f64);
            topology_preset(Topology::IShape7, &noise).with_name(format!("qpu_{i}"))
        })
        .collect();

    // every backend runs the same scoring seeds once; strategies reuse the runs
    let runs = score_fleet(&fleet, &inst, 1, 300, 42, &opts)?;
    for e in runs.ranking(&curve)?.entries {
        println!("{:<6} H = {:.4}", e.backend_name, e.h_score);
    }
    for strategy in [Strategy::RankedTopK, Strategy::RandomK, Strategy::WorstK] {
        let out = runs.select(&curve, 3, strategy, 200)?;
        match out.random_trials {
            Some(t) => println!(
                "{strategy:<13} mean H {:.4} (std {:.4} over {} draws)",
                t.mean, t.std, t.trials
            ),
            None => println!(
                "{strategy:<13} pooled H {:.4} from {:?}",
                out.pooled_report.h_score, out.chosen
            ),
        }
    }
    Ok(())
}
