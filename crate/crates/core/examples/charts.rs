//! Renders the SVG chart types from freshly scored data into the temp directory.

use toniq::backend::{topology_preset, BackendModel, NoiseParams, Topology};
use toniq::qaoa::RunOptions;
use toniq::qubo::builtin_instances;
use toniq::report::{accuracy_heatmap, grouped_bar_chart, score_histogram, sort_by_first_layer, BackendSeries};
use toniq::scoring::{build_reference, collect_samples, fit_gaussian, h_score};

fn main() -> toniq::Result<()> {
    let inst = builtin_instances(3)?;
    let opts = RunOptions::default();
    let out = std::env::temp_dir().join("toniq_charts");
    std::fs::create_dir_all(&out).expect("create output directory");

    let backends = [
        BackendModel::ideal(3),
        topology_preset(Topology::IShape7, &NoiseParams::default()),
        topology_preset(Topology::TwoLine27, &NoiseParams::two_qubit_only(0.02)).with_name("two_line_noisy"),
    ];
    let mut series: Vec<BackendSeries> = backends
        .iter()
        .map(|b| BackendSeries {
            backend_name: b.name.clone(),
            points: Vec::new(),
        })
        .collect();
    let mut heat = Vec::new();
    for layers in 1..=3 {
        let curve = build_reference(&inst, layers, 1000, 42, &opts)?;
        for (b, s) in backends.iter().zip(series.iter_mut()) {
            let samples = collect_samples(&inst, b, layers, 100, 42, &opts)?;
            s.points.push((layers, h_score(&samples, &curve)?.h_score));
            if b.noiseless {
                heat.push((layers, samples.values));
            }
        }
    }
    sort_by_first_layer(&mut series);

    let curve = build_reference(&inst, 1, 1000, 42, &opts)?;
    let repeats: Vec<f64> = (0..40u64)
        .map(|r| Ok(h_score(&collect_samples(&inst, &backends[1], 1, 50, 100 + r, &opts)?, &curve)?.h_score))
        .collect::<toniq::Result<_>>()?;
    let fit = fit_gaussian(&repeats)?;

    for (name, svg) in [
        ("hscore_bars.svg", grouped_bar_chart(&series)?),
        ("accuracy_heatmap.svg", accuracy_heatmap(&heat, 50)?),
        (
            "hscore_histogram.svg",
            score_histogram(&repeats, fit.mean, fit.std, 20)?,
        ),
    ] {
        let path = out.join(name);
        std::fs::write(&path, svg).expect("write chart");
        println!("wrote {}", path.display());
    }
    Ok(())
}
