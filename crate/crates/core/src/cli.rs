//! The `toniq` command line.
//!
//! Every command writes JSON (and CSV where tabular) under a data directory,
//! `--data-dir` or `$TONIQ_DATA_DIR` or `./toniq_data`. Each JSON file carries a
//! `provenance` block with the tool version, seed, profile and a SHA-256 hash of
//! the resolved configuration, and nothing time-dependent, so repeating a
//! command with the same inputs and seed reproduces its files byte for byte.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::backend::{topology_preset, BackendModel, NoiseParams, Topology};
use crate::error::{Error, Result};
use crate::fleet::{score_fleet, Strategy, DEFAULT_TRIALS, POOLING};
use crate::qaoa::RunOptions;
use crate::qubo::{builtin_instances, QuboInstance};
use crate::report::{self, BackendSeries};
use crate::scoring::{
    build_reference_samples, compare_distr, h_score, robustness_with_curve, sample_runs, AccuracySamples,
    FixedAccuracy, HScoreReport, QaoaSampler, RobustnessConfig, RunSampler, ScoringCurve, DEFAULT_BINS,
    DEFAULT_REFERENCE_RUNS, DEFAULT_REPEATS, DEFAULT_SCORING_RUNS,
};
use crate::seed::Stream;

/// Master seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

const FAST_REFERENCE_RUNS: usize = 2000;
const FAST_SCORING_RUNS: usize = 300;
const FAST_REPEATS: usize = 30;
const HEATMAP_BINS: usize = 50;
const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "toniq",
    version,
    about = "Benchmark QPU models with QAOA accuracy distributions and H-Scores"
)]
pub struct Cli {
    /// Master seed for every run.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// CI profile: N=2000 reference runs, M=300 scoring runs, 30 repeats.
    #[arg(long, global = true)]
    pub fast: bool,
    /// Worker threads for independent runs (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output root.
    #[arg(long, global = true, env = "TONIQ_DATA_DIR", default_value = "toniq_data")]
    pub data_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the noiseless scoring curve.
    Reference(ProblemArgs),
    /// H-Score one backend.
    Score {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
    },
    /// Rank a fleet of backends.
    Rank {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        fleet: FleetArgs,
    },
    /// Choose k backends from a fleet and score their pooled runs.
    Select {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        fleet: FleetArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Random selections for random_k.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Score samples A against a curve built from samples B.
    Compare {
        /// Samples file written by `score`.
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Repeat the H-Score many times and fit a normal distribution.
    Robustness {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long)]
        repeats: Option<usize>,
        /// Reuse the same run seeds in every repeat.
        #[arg(long)]
        fixed_seed: bool,
    },
    /// Draw charts from a results directory.
    Report {
        /// Defaults to `<data-dir>/results`.
        #[arg(long)]
        results: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Built-in instance size (3 to 6) or path to an instance file.
    #[arg(long, default_value = "3")]
    pub instance: String,
    /// Number of QAOA layers; a comma-separated list sweeps several.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub layers: Vec<usize>,
    /// Reference runs N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Scoring runs M.
    #[arg(long)]
    pub m: Option<usize>,
    /// Invert readout confusion before evaluating each circuit.
    #[arg(long)]
    pub mitigate: bool,
    /// Estimate the cost from this many sampled shots.
    #[arg(long)]
    pub shots: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ScoringArgs {
    /// Backend file, preset name (heavy_hex_16, two_line_27, i_shape_7) or `ideal`.
    #[arg(long, default_value = "ideal")]
    pub backend: String,
    /// Existing curve file to score against instead of the cached reference.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Replace QAOA with a constant-accuracy sampler (for testing the scoring path).
    #[arg(long, value_enum)]
    pub synthetic: Option<Synthetic>,
}

#[derive(Debug, Clone, Args)]
pub struct FleetArgs {
    /// JSON list of backend files; relative paths resolve against the list's directory.
    #[arg(long)]
    pub fleet: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Synthetic {
    /// Every run reaches accuracy 1.
    Perfect,
    /// Every run has accuracy 0.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum StrategyArg {
    RankedTopK,
    RandomK,
    WorstK,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::RankedTopK => Strategy::RankedTopK,
            StrategyArg::RandomK => Strategy::RandomK,
            StrategyArg::WorstK => Strategy::WorstK,
        }
    }
}

/// Process exit status for an error: 2 invalid input, 3 scoring-context
/// mismatch, 4 failed runs, 5 file I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::Capacity(_)
        | Error::GenerationFailure { .. }
        | Error::InvalidChannel(_)
        | Error::NothingToReport(_) => 2,
        Error::ScoringContext(_) => 3,
        Error::Routing(_) | Error::Mitigation(_) | Error::Run(_) | Error::RunBudget { .. } => 4,
        Error::Io { .. } | Error::Json { .. } => 5,
    }
}

/// Parses `args` (including the program name), runs the command and returns the
/// exit status. Messages go to stdout, errors to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command and returns the files it wrote.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    match cli.jobs {
        Some(0) => Err(Error::invalid("--jobs must be positive")),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {jobs} workers: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<Vec<PathBuf>> {
    let ctx = Context::new(cli);
    match &cli.command {
        Command::Reference(p) => cmd_reference(&ctx, p),
        Command::Score { problem, scoring } => cmd_score(&ctx, problem, scoring),
        Command::Rank { problem, fleet } => cmd_rank(&ctx, problem, fleet),
        Command::Select {
            problem,
            fleet,
            k,
            strategy,
            trials,
        } => cmd_select(&ctx, problem, fleet, *k, (*strategy).into(), *trials),
        Command::Compare { a, b } => cmd_compare(&ctx, a, b),
        Command::Robustness {
            problem,
            scoring,
            repeats,
            fixed_seed,
        } => cmd_robustness(&ctx, problem, scoring, *repeats, *fixed_seed),
        Command::Report { results } => cmd_report(&ctx, results.as_deref()),
    }
}

struct Context {
    seed: u64,
    fast: bool,
    root: PathBuf,
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    profile: &'static str,
    seed: u64,
    config_hash: String,
}

impl Context {
    fn new(cli: &Cli) -> Self {
        Context {
            seed: cli.seed,
            fast: cli.fast,
            root: cli.data_dir.clone(),
        }
    }

    fn profile(&self) -> &'static str {
        if self.fast {
            "fast"
        } else {
            "default"
        }
    }

    fn reference_runs(&self, p: &ProblemArgs) -> usize {
        p.n.unwrap_or(if self.fast {
            FAST_REFERENCE_RUNS
        } else {
            DEFAULT_REFERENCE_RUNS
        })
    }

    fn scoring_runs(&self, p: &ProblemArgs) -> Result<usize> {
        let m = p.m.unwrap_or(if self.fast {
            FAST_SCORING_RUNS
        } else {
            DEFAULT_SCORING_RUNS
        });
        if m == 0 {
            return Err(Error::invalid("M must be at least 1"));
        }
        Ok(m)
    }

    fn repeats(&self, given: Option<usize>) -> usize {
        given.unwrap_or(if self.fast { FAST_REPEATS } else { DEFAULT_REPEATS })
    }

    fn dir(&self, name: &str) -> Result<PathBuf> {
        let d = self.root.join(name);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
        Ok(d)
    }

    /// Serializes `body` with a provenance block derived from `config`.
    fn document(&self, command: &str, config: &Value, body: &impl Serialize) -> Result<String> {
        let canonical = serde_json::to_string(config).expect("config serializes");
        let hash = Sha256::digest(canonical.as_bytes());
        let provenance = Provenance {
            tool: "toniq",
            version: env!("CARGO_PKG_VERSION"),
            command,
            profile: self.profile(),
            seed: self.seed,
            config_hash: hash.iter().map(|b| format!("{b:02x}")).collect(),
        };
        let mut doc = serde_json::to_value(body).expect("output serializes");
        let obj = doc.as_object_mut().expect("outputs are JSON objects");
        obj.insert(
            "provenance".into(),
            serde_json::to_value(provenance).expect("provenance serializes"),
        );
        obj.insert("config".into(), config.clone());
        Ok(serde_json::to_string_pretty(&doc).expect("document serializes") + "\n")
    }
}

fn write(path: &Path, text: &str) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

fn file_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn load_instance(arg: &str) -> Result<QuboInstance> {
    match arg.parse::<usize>() {
        Ok(n) => builtin_instances(n),
        Err(_) => QuboInstance::load(arg),
    }
}

fn load_backend(arg: &str, inst: &QuboInstance) -> Result<BackendModel> {
    if arg == "ideal" {
        return Ok(BackendModel::ideal(inst.n()));
    }
    if let Ok(kind) = arg.parse::<Topology>() {
        if !Path::new(arg).exists() {
            return Ok(topology_preset(kind, &NoiseParams::default()));
        }
    }
    BackendModel::load(arg)
}

fn load_fleet(path: &Path) -> Result<Vec<BackendModel>> {
    let entries: Vec<PathBuf> = read_json(path)?;
    if entries.is_empty() {
        return Err(Error::invalid(format!("{} lists no backends", path.display())));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    entries
        .iter()
        .map(|p| BackendModel::load(if p.is_absolute() { p.clone() } else { base.join(p) }))
        .collect()
}

fn run_options(p: &ProblemArgs) -> RunOptions {
    RunOptions {
        optimizer: None,
        mitigate_readout: p.mitigate,
        shots: p.shots,
    }
}

fn layers(p: &ProblemArgs) -> Result<Vec<usize>> {
    if p.layers.is_empty() || p.layers.contains(&0) {
        return Err(Error::invalid("--layers must list positive layer counts"));
    }
    let mut l = p.layers.clone();
    l.sort_unstable();
    l.dedup();
    Ok(l)
}

fn problem_config(ctx: &Context, p: &ProblemArgs, inst: &QuboInstance, n_layers: usize) -> Value {
    json!({
        "instance": serde_json::from_str::<Value>(&inst.to_json()).expect("instance JSON"),
        "n_layers": n_layers,
        "N": ctx.reference_runs(p),
        "master_seed": ctx.seed,
        "mitigate_readout": p.mitigate,
        "shots": p.shots,
    })
}

fn curve_path(ctx: &Context, p: &ProblemArgs, inst: &QuboInstance, n_layers: usize) -> Result<PathBuf> {
    let mut name = format!("{}_p{}_N{}_seed{}", inst.id, n_layers, ctx.reference_runs(p), ctx.seed);
    if let Some(s) = p.shots {
        name += &format!("_shots{s}");
    }
    Ok(ctx.dir("curves")?.join(name + ".json"))
}

/// Builds the reference curve and writes it to its keyed path.
fn build_curve(
    ctx: &Context,
    p: &ProblemArgs,
    inst: &QuboInstance,
    n_layers: usize,
) -> Result<(ScoringCurve, PathBuf)> {
    let n = ctx.reference_runs(p);
    let samples = build_reference_samples(inst, n_layers, n, ctx.seed, &run_options(p))?;
    let curve = ScoringCurve::from_samples(&samples, DEFAULT_BINS)?;
    let path = curve_path(ctx, p, inst, n_layers)?;
    let config = problem_config(ctx, p, inst, n_layers);
    write(&path, &ctx.document("reference", &config, &curve)?)?;
    Ok((curve, path))
}

/// The curve for `(instance, layers, N, seed)`: an explicit file, the cached one, or a fresh build.
fn obtain_curve(
    ctx: &Context,
    p: &ProblemArgs,
    explicit: Option<&Path>,
    inst: &QuboInstance,
    n_layers: usize,
) -> Result<(ScoringCurve, Option<PathBuf>)> {
    if let Some(path) = explicit {
        return Ok((ScoringCurve::load(path)?, None));
    }
    let path = curve_path(ctx, p, inst, n_layers)?;
    if path.exists() {
        return Ok((ScoringCurve::load(&path)?, None));
    }
    let (curve, path) = build_curve(ctx, p, inst, n_layers)?;
    Ok((curve, Some(path)))
}

fn cmd_reference(ctx: &Context, p: &ProblemArgs) -> Result<Vec<PathBuf>> {
    let inst = load_instance(&p.instance)?;
    let mut written = Vec::new();
    for l in layers(p)? {
        let (curve, path) = build_curve(ctx, p, &inst, l)?;
        println!(
            "{} p={} N={}: F(0.25)={:.3} F(0.5)={:.3} F(0.75)={:.3}",
            curve.instance_id,
            l,
            curve.n_used,
            curve.evaluate(0.25)?,
            curve.evaluate(0.5)?,
            curve.evaluate(0.75)?
        );
        written.push(path);
    }
    Ok(written)
}

fn sampler_for<'a>(s: &ScoringArgs, qaoa: &'a QaoaSampler<'a>, fixed: &'a FixedAccuracy) -> &'a dyn RunSampler {
    if s.synthetic.is_some() {
        fixed
    } else {
        qaoa
    }
}

fn fixed_sampler(s: &ScoringArgs) -> FixedAccuracy {
    FixedAccuracy(match s.synthetic {
        Some(Synthetic::Perfect) => 1.0,
        _ => 0.0,
    })
}

fn backend_label(s: &ScoringArgs, backend: &BackendModel) -> String {
    match s.synthetic {
        Some(Synthetic::Perfect) => "synthetic_perfect".into(),
        Some(Synthetic::Zero) => "synthetic_zero".into(),
        None => backend.name.clone(),
    }
}

fn score_config(
    ctx: &Context,
    p: &ProblemArgs,
    s: &ScoringArgs,
    inst: &QuboInstance,
    backend: &BackendModel,
    l: usize,
) -> Result<Value> {
    let mut config = problem_config(ctx, p, inst, l);
    config["M"] = json!(ctx.scoring_runs(p)?);
    config["backend"] = serde_json::from_str(&backend.to_json()).expect("backend JSON");
    config["synthetic"] = json!(s.synthetic.map(|x| format!("{x:?}").to_lowercase()));
    if let Some(c) = &s.curve {
        config["curve_sha256"] = json!(file_hash(c)?);
    }
    Ok(config)
}

fn per_run_csv(samples: &AccuracySamples, report: &HScoreReport) -> String {
    let scores = report.per_run_scores.as_deref().unwrap_or(&[]);
    report::csv(
        &["run", "accuracy", "score"],
        samples
            .values
            .iter()
            .zip(scores)
            .enumerate()
            .map(|(i, (a, f))| vec![i.to_string(), format!("{a:.12}"), format!("{f:.12}")]),
    )
}

fn cmd_score(ctx: &Context, p: &ProblemArgs, s: &ScoringArgs) -> Result<Vec<PathBuf>> {
    let inst = load_instance(&p.instance)?;
    let backend = load_backend(&s.backend, &inst)?;
    let opts = run_options(p);
    let m = ctx.scoring_runs(p)?;
    let layer_list = layers(p)?;
    if s.curve.is_some() && layer_list.len() > 1 {
        return Err(Error::invalid("--curve applies to a single layer count"));
    }
    let results = ctx.dir("results")?;
    let label = backend_label(s, &backend);
    let fixed = fixed_sampler(s);
    let mut written = Vec::new();
    for l in layer_list {
        let (curve, built) = obtain_curve(ctx, p, s.curve.as_deref(), &inst, l)?;
        written.extend(built);
        let qaoa = QaoaSampler {
            instance: &inst,
            backend: &backend,
            n_layers: l,
            options: opts,
        };
        let (values, failed) = sample_runs(sampler_for(s, &qaoa, &fixed), m, ctx.seed, Stream::Scoring)?;
        let mut samples = AccuracySamples::new(values, inst.id.clone(), l, label.clone(), ctx.seed);
        samples.failed_runs = failed;
        let report = h_score(&samples, &curve)?;
        println!(
            "{} on {label}, p={l}: H-Score {:.4} over {} runs",
            inst.id, report.h_score, report.m_used
        );

        let config = score_config(ctx, p, s, &inst, &backend, l)?;
        let stem = format!("{}_{}_p{}", inst.id, label, l);
        written.push(write(
            &results.join(format!("score_{stem}.json")),
            &ctx.document("score", &config, &report)?,
        )?);
        written.push(write(
            &results.join(format!("score_{stem}.csv")),
            &per_run_csv(&samples, &report),
        )?);
        written.push(write(
            &results.join(format!("samples_{stem}.json")),
            &ctx.document("score", &config, &samples)?,
        )?);
    }
    Ok(written)
}

fn fleet_config(
    ctx: &Context,
    p: &ProblemArgs,
    inst: &QuboInstance,
    backends: &[BackendModel],
    l: usize,
) -> Result<Value> {
    let mut config = problem_config(ctx, p, inst, l);
    config["M"] = json!(ctx.scoring_runs(p)?);
    config["fleet"] = Value::Array(
        backends
            .iter()
            .map(|b| serde_json::from_str(&b.to_json()).expect("backend JSON"))
            .collect(),
    );
    Ok(config)
}

fn cmd_rank(ctx: &Context, p: &ProblemArgs, f: &FleetArgs) -> Result<Vec<PathBuf>> {
    let inst = load_instance(&p.instance)?;
    let backends = load_fleet(&f.fleet)?;
    let results = ctx.dir("results")?;
    let mut written = Vec::new();
    for l in layers(p)? {
        let (curve, built) = obtain_curve(ctx, p, None, &inst, l)?;
        written.extend(built);
        let runs = score_fleet(&backends, &inst, l, ctx.scoring_runs(p)?, ctx.seed, &run_options(p))?;
        let ranking = runs.ranking(&curve)?;
        for (i, e) in ranking.entries.iter().enumerate() {
            println!("{:>3}. {:<24} {:.4}", i + 1, e.backend_name, e.h_score);
        }
        for x in &ranking.excluded {
            eprintln!("warning: {} excluded: {}", x.backend_name, x.reason);
        }
        let config = fleet_config(ctx, p, &inst, &backends, l)?;
        let stem = format!("{}_p{}", inst.id, l);
        written.push(write(
            &results.join(format!("rank_{stem}.json")),
            &ctx.document("rank", &config, &ranking)?,
        )?);
        let csv = report::csv(
            &["rank", "backend_name", "h_score"],
            ranking.entries.iter().enumerate().map(|(i, e)| {
                vec![
                    (i + 1).to_string(),
                    e.backend_name.clone(),
                    format!("{:.12}", e.h_score),
                ]
            }),
        );
        written.push(write(&results.join(format!("rank_{stem}.csv")), &csv)?);
    }
    Ok(written)
}

fn cmd_select(
    ctx: &Context,
    p: &ProblemArgs,
    f: &FleetArgs,
    k: usize,
    strategy: Strategy,
    trials: usize,
) -> Result<Vec<PathBuf>> {
    let inst = load_instance(&p.instance)?;
    let backends = load_fleet(&f.fleet)?;
    if k == 0 || k > backends.len() {
        return Err(Error::invalid(format!(
            "k = {k} must be between 1 and the fleet size {}",
            backends.len()
        )));
    }
    let results = ctx.dir("results")?;
    let mut written = Vec::new();
    for l in layers(p)? {
        let (curve, built) = obtain_curve(ctx, p, None, &inst, l)?;
        written.extend(built);
        let runs = score_fleet(&backends, &inst, l, ctx.scoring_runs(p)?, ctx.seed, &run_options(p))?;
        let outcome = runs.select(&curve, k, strategy, trials)?;
        match &outcome.random_trials {
            Some(t) => println!(
                "{strategy} k={k}: mean pooled H-Score {:.4} (std {:.4}) over {} trials",
                t.mean, t.std, t.trials
            ),
            None => println!(
                "{strategy} k={k}: {} pooled H-Score {:.4}",
                outcome.chosen.join(", "),
                outcome.pooled_report.h_score
            ),
        }
        let mut config = fleet_config(ctx, p, &inst, &backends, l)?;
        config["k"] = json!(k);
        config["strategy"] = json!(strategy.to_string());
        config["trials"] = json!(trials);
        config["pooling"] = json!(POOLING);
        let path = results.join(format!("select_{strategy}_k{k}_{}_p{l}.json", inst.id));
        written.push(write(&path, &ctx.document("select", &config, &outcome)?)?);
    }
    Ok(written)
}

fn cmd_compare(ctx: &Context, a_path: &Path, b_path: &Path) -> Result<Vec<PathBuf>> {
    let a: AccuracySamples = read_json(a_path)?;
    let b: AccuracySamples = read_json(b_path)?;
    let value = compare_distr(&a, &b)?;
    let curve = ScoringCurve::from_samples(&b, DEFAULT_BINS)?;
    let scored = h_score(&a, &curve)?;
    println!("{} vs {}: {value:.4}", a.backend_name, b.backend_name);

    let config = json!({
        "a_sha256": file_hash(a_path)?,
        "b_sha256": file_hash(b_path)?,
        "master_seed": ctx.seed,
    });
    let body = json!({
        "value": value,
        "a_backend": a.backend_name,
        "b_backend": b.backend_name,
        "instance_id": a.instance_id,
        "n_layers": a.n_layers,
        "a_count": a.len(),
        "b_count": b.len(),
    });
    let stem = |p: &Path| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let name = format!("compare_{}_vs_{}", stem(a_path), stem(b_path));
    let results = ctx.dir("results")?;
    Ok(vec![
        write(
            &results.join(format!("{name}.json")),
            &ctx.document("compare", &config, &body)?,
        )?,
        write(&results.join(format!("{name}.csv")), &per_run_csv(&a, &scored))?,
    ])
}

fn cmd_robustness(
    ctx: &Context,
    p: &ProblemArgs,
    s: &ScoringArgs,
    repeats: Option<usize>,
    fixed_seed: bool,
) -> Result<Vec<PathBuf>> {
    let inst = load_instance(&p.instance)?;
    let backend = load_backend(&s.backend, &inst)?;
    let label = backend_label(s, &backend);
    let fixed = fixed_sampler(s);
    let results = ctx.dir("results")?;
    let mut written = Vec::new();
    for l in layers(p)? {
        let (curve, built) = obtain_curve(ctx, p, s.curve.as_deref(), &inst, l)?;
        written.extend(built);
        let cfg = RobustnessConfig {
            repeats: ctx.repeats(repeats),
            scoring_runs: ctx.scoring_runs(p)?,
            reference_runs: ctx.reference_runs(p),
            master_seed: ctx.seed,
            fixed_seed,
        };
        let qaoa = QaoaSampler {
            instance: &inst,
            backend: &backend,
            n_layers: l,
            options: run_options(p),
        };
        if curve.instance_id != inst.id || curve.n_layers != l {
            return Err(Error::ScoringContext(format!(
                "curve is for ({}, {} layers), requested ({}, {l} layers)",
                curve.instance_id, curve.n_layers, inst.id
            )));
        }
        let stats = robustness_with_curve(sampler_for(s, &qaoa, &fixed), &curve, &label, &cfg)?;
        println!(
            "{} on {label}, p={l}: mean {:.4} [{:.4}, {:.4}], std {:.4} [{:.4}, {:.4}] over {} repeats",
            inst.id,
            stats.mean,
            stats.ci95_mean[0],
            stats.ci95_mean[1],
            stats.std,
            stats.ci95_std[0],
            stats.ci95_std[1],
            stats.repeats
        );
        let report = HScoreReport {
            h_score: stats.mean.clamp(0.0, 2.0),
            m_used: cfg.scoring_runs,
            instance_id: inst.id.clone(),
            n_layers: l,
            backend_name: label.clone(),
            master_seed: ctx.seed,
            failed_runs: 0,
            per_run_scores: None,
            repeat_stats: Some(stats.clone()),
        };
        let mut config = score_config(ctx, p, s, &inst, &backend, l)?;
        config["repeats"] = json!(cfg.repeats);
        config["fixed_seed"] = json!(fixed_seed);
        let stem = format!("{}_{}_p{}", inst.id, label, l);
        written.push(write(
            &results.join(format!("robustness_{stem}.json")),
            &ctx.document("robustness", &config, &report)?,
        )?);
        let csv = report::csv(
            &["repeat", "h_score"],
            stats
                .scores
                .iter()
                .enumerate()
                .map(|(i, h)| vec![i.to_string(), format!("{h:.12}")]),
        );
        written.push(write(&results.join(format!("robustness_{stem}.csv")), &csv)?);
    }
    Ok(written)
}

/// Result files in `dir` whose names start with `prefix` and end in `.json`, sorted.
fn result_files(dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            name.starts_with(prefix) && name.ends_with(".json")
        })
        .collect();
    files.sort();
    Ok(files)
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_report(ctx: &Context, results: Option<&Path>) -> Result<Vec<PathBuf>> {
    let dir = results
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ctx.root.join("results"));
    if !dir.is_dir() {
        return Err(Error::NothingToReport(format!("{} is not a directory", dir.display())));
    }
    let scores = result_files(&dir, "score_")?;
    let samples = result_files(&dir, "samples_")?;
    let repeats = result_files(&dir, "robustness_")?;
    if scores.is_empty() && samples.is_empty() && repeats.is_empty() {
        return Err(Error::NothingToReport(format!(
            "no score, samples or robustness files in {}",
            dir.display()
        )));
    }
    let charts = ctx.dir("charts")?;
    let mut written = Vec::new();

    // bar chart per instance: H-Score vs layers per backend
    let mut by_instance: std::collections::BTreeMap<String, Vec<BackendSeries>> = Default::default();
    for path in &scores {
        let r: HScoreReport = read_json(path)?;
        let series = by_instance.entry(r.instance_id.clone()).or_default();
        match series.iter_mut().find(|s| s.backend_name == r.backend_name) {
            Some(s) => s.points.push((r.n_layers, r.h_score)),
            None => series.push(BackendSeries {
                backend_name: r.backend_name.clone(),
                points: vec![(r.n_layers, r.h_score)],
            }),
        }
    }
    for (instance, mut series) in by_instance {
        for s in &mut series {
            s.points.sort_by_key(|p| p.0);
        }
        report::sort_by_first_layer(&mut series);
        let stem = format!("hscore_bars_{}", sanitize(&instance));
        written.push(write(
            &charts.join(format!("{stem}.svg")),
            &report::grouped_bar_chart(&series)?,
        )?);
        let rows = series.iter().flat_map(|s| {
            s.points
                .iter()
                .map(|(l, h)| {
                    vec![
                        instance.clone(),
                        s.backend_name.clone(),
                        l.to_string(),
                        format!("{h:.12}"),
                    ]
                })
                .collect::<Vec<_>>()
        });
        written.push(write(
            &charts.join(format!("{stem}.csv")),
            &report::csv(&["instance_id", "backend_name", "n_layers", "h_score"], rows),
        )?);
    }

    // heatmap per (instance, backend): layers x accuracy bins
    type LayerSamples = Vec<(usize, Vec<f64>)>;
    let mut by_pair: std::collections::BTreeMap<(String, String), LayerSamples> = Default::default();
    for path in &samples {
        let s: AccuracySamples = read_json(path)?;
        by_pair
            .entry((s.instance_id.clone(), s.backend_name.clone()))
            .or_default()
            .push((s.n_layers, s.values));
    }
    for ((instance, backend), mut rows) in by_pair {
        rows.sort_by_key(|r| r.0);
        let stem = format!("accuracy_heatmap_{}_{}", sanitize(&instance), sanitize(&backend));
        written.push(write(
            &charts.join(format!("{stem}.svg")),
            &report::accuracy_heatmap(&rows, HEATMAP_BINS)?,
        )?);
        let matrix = report::accuracy_heatmap_matrix(&rows, HEATMAP_BINS)?;
        let csv_rows = rows.iter().zip(&matrix).flat_map(|((l, _), row)| {
            row.iter()
                .enumerate()
                .map(|(b, v)| {
                    vec![
                        l.to_string(),
                        format!("{:.4}", b as f64 / HEATMAP_BINS as f64),
                        format!("{:.4}", (b + 1) as f64 / HEATMAP_BINS as f64),
                        format!("{v:.12}"),
                    ]
                })
                .collect::<Vec<_>>()
        });
        written.push(write(
            &charts.join(format!("{stem}.csv")),
            &report::csv(&["n_layers", "bin_lo", "bin_hi", "fraction"], csv_rows),
        )?);
    }

    // histogram with normal overlay per robustness study
    for path in &repeats {
        let r: HScoreReport = read_json(path)?;
        let Some(stats) = r.repeat_stats else { continue };
        let stem = format!(
            "hscore_histogram_{}_{}_p{}",
            sanitize(&r.instance_id),
            sanitize(&r.backend_name),
            r.n_layers
        );
        written.push(write(
            &charts.join(format!("{stem}.svg")),
            &report::score_histogram(&stats.scores, stats.mean, stats.std, HISTOGRAM_BINS)?,
        )?);
        written.push(write(
            &charts.join(format!("{stem}.csv")),
            &report::csv(
                &["repeat", "h_score"],
                stats
                    .scores
                    .iter()
                    .enumerate()
                    .map(|(i, h)| vec![i.to_string(), format!("{h:.12}")]),
            ),
        )?);
    }
    Ok(written)
}
