use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tt_sketch::baselines::{approximate, MethodKind, MethodParams};
use tt_sketch::bench::{
    emit_csv, parse_csv, plot_data, preset, preset_names, run_experiment, run_experiment_with_threads, summarize,
    ExperimentRecord, ExperimentSpec, KvConfig, RankSpec, Recipe,
};
use tt_sketch::drm::DrmType;
use tt_sketch::sketch::{assemble_pack, sketch, Oversampling, SketchPack, SttaConfig};
use tt_sketch::tensor::io::{load_tensor, save_tensor, TensorFileKind};
use tt_sketch::tensor::{rel_errors, Shape, StructuredTensor, DEFAULT_MATERIALIZATION_CAP};

#[derive(Parser)]
#[command(name = "tt-sketch", version, about = "Tensor-train approximation from two-sided random sketches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sketch a tensor file and write the sketch pack.
    Sketch {
        tensor: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Assemble a TT from a sketch pack.
    Assemble {
        pack: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = tt_sketch::linalg::DEFAULT_RTOL)]
        rtol: f64,
    },
    /// Approximate a tensor file in one go and report the error.
    Approx {
        tensor: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Run an experiment and write one CSV row per trial.
    Bench {
        /// Experiment file; omit when using --preset.
        spec: Option<PathBuf>,
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        /// Run the timing preset at its original, much larger size.
        #[arg(long)]
        full_size: bool,
        #[arg(short, long)]
        output: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Build a test tensor and save it.
    Gen {
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Turn a results CSV into gnuplot column blocks.
    PlotData {
        csv: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A `key = value` file plus per-key flag overrides.
#[derive(Args)]
struct ConfigArgs {
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Any config key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    rank: Option<String>,
    #[arg(long)]
    ranks: Option<String>,
    #[arg(long)]
    oversampling: Option<String>,
    #[arg(long)]
    drm: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    recipe: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    name: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self, file: Option<&Path>) -> Result<KvConfig> {
        let mut cfg = match file.or(self.config.as_deref()) {
            Some(p) => KvConfig::load(p)?,
            None => KvConfig::default(),
        };
        let flags = [
            ("seed", &self.seed),
            ("rank", &self.rank),
            ("ranks", &self.ranks),
            ("oversampling", &self.oversampling),
            ("drm", &self.drm),
            ("method", &self.method),
            ("methods", &self.methods),
            ("recipe", &self.recipe),
            ("trials", &self.trials),
            ("name", &self.name),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v);
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').with_context(|| format!("--set expects key=value, got {kv:?}"))?;
            cfg.set(k, v);
        }
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sketch { tensor, output, cfg } => {
            let cfg = cfg.resolve(None)?;
            let t = load_tensor(&tensor, None)?;
            let config = stta_config(&cfg, t.shape())?;
            for w in config.warnings() {
                eprintln!("warning: {w}");
            }
            let (left, right) = config.chains(t.shape())?;
            sketch(&t, &left, &right)?.save(&output)?;
            println!("wrote sketch of {} ({}) to {}", t.shape(), t.kind(), output.display());
        }
        Command::Assemble { pack, output, rtol } => {
            let pack = SketchPack::load(&pack)?;
            let tt = assemble_pack(&pack, rtol)?;
            println!("assembled TT with ranks {:?}", tt.ranks().as_slice());
            save_tensor(&output, &tt.into())?;
        }
        Command::Approx { tensor, output, cfg } => {
            let cfg = cfg.resolve(None)?;
            let t = load_tensor(&tensor, None)?;
            let method: MethodKind = cfg.parsed_or("method", MethodKind::Stta)?;
            let params = method_params(&cfg, t.shape())?;
            let start = Instant::now();
            let tt = approximate(method, &t, &params)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let errs = rel_errors(&t, &tt, DEFAULT_MATERIALIZATION_CAP)?;
            println!(
                "{method}: ranks {:?}, rel error {:.3e} (vs input norm), {:.3e} (vs approximation norm), {ms:.2} ms",
                tt.ranks().as_slice(),
                errs.vs_input,
                errs.vs_approx
            );
            if let Some(out) = output {
                save_tensor(&out, &tt.into())?;
            }
        }
        Command::Bench { spec, preset: name, full_size, output, threads, cfg } => {
            let specs = match (&spec, &name) {
                (Some(path), None) => vec![ExperimentSpec::from_config(&cfg.resolve(Some(path))?)?],
                (None, Some(name)) => {
                    let overrides = cfg.resolve(None)?;
                    preset(name, full_size)?
                        .into_iter()
                        .map(|s| apply_overrides(s, &overrides))
                        .collect::<Result<_>>()?
                }
                _ => bail!("give an experiment file or --preset (one of {})", preset_names().join(", ")),
            };
            let mut records: Vec<ExperimentRecord> = Vec::new();
            for s in &specs {
                eprintln!("running {} ({} trials)", s.name, s.trials);
                let rows = match threads {
                    Some(n) => run_experiment_with_threads(s, n)?,
                    None => run_experiment(s)?,
                };
                records.extend(rows);
            }
            emit_csv(&records, &output)?;
            print_summary(&records);
            let failed = records.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} of {} runs failed; see the error column", records.len());
            }
        }
        Command::Gen { output, cfg } => {
            let cfg = cfg.resolve(None)?;
            let recipe = Recipe::from_config(&cfg)?;
            let seed = cfg.seed("seed")?.unwrap_or(0);
            let t = recipe.build(seed)?;
            let t = file_form(t, TensorFileKind::from_path(&output))?;
            save_tensor(&output, &t)?;
            println!("wrote {} tensor of shape {} to {}", t.kind(), t.shape(), output.display());
        }
        Command::PlotData { csv, output } => {
            let text = plot_data(&summarize(&parse_csv(&csv)?));
            match output {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

/// STTA ranks from `rank` (scalar or tuple) plus `oversampling`. With
/// `target = left` the output ranks sit on the left DRMs instead.
/// Explicit `left_ranks` and `right_ranks` take precedence.
fn stta_config(cfg: &KvConfig, shape: &Shape) -> Result<SttaConfig> {
    let seed = cfg.seed("seed")?.unwrap_or(0);
    let drm: DrmType = cfg.parsed_or("drm", DrmType::Gaussian)?;
    let rtol = cfg.parsed_or("rtol", tt_sketch::linalg::DEFAULT_RTOL)?;
    let config = match (cfg.parsed::<RankSpec>("left_ranks")?, cfg.parsed::<RankSpec>("right_ranks")?) {
        (Some(l), Some(r)) => SttaConfig::new(l.resolve(shape)?, r.resolve(shape)?, seed, drm)?,
        (None, None) => {
            let target = target_ranks(cfg, shape)?;
            let rule: Oversampling = cfg.parsed_or("oversampling", Oversampling::default())?;
            let larger = target.map(|r| rule.apply(r))?;
            match cfg.get("target").unwrap_or("right") {
                "right" => SttaConfig::new(larger, target, seed, drm)?,
                "left" => SttaConfig::new(target, larger, seed, drm)?,
                other => bail!("target must be left or right, got {other:?}"),
            }
        }
        _ => bail!("give both left_ranks and right_ranks, or neither"),
    };
    Ok(config.with_rtol(rtol))
}

fn target_ranks(cfg: &KvConfig, shape: &Shape) -> Result<tt_sketch::tensor::RankTuple> {
    let rank: RankSpec = cfg.parsed("rank")?.context("missing key: rank")?;
    Ok(rank.resolve(shape)?)
}

fn method_params(cfg: &KvConfig, shape: &Shape) -> Result<MethodParams> {
    Ok(MethodParams {
        ranks: target_ranks(cfg, shape)?,
        oversampling: cfg.parsed_or("oversampling", Oversampling::default())?,
        seed: cfg.seed("seed")?.unwrap_or(0),
        drm: cfg.parsed_or("drm", DrmType::Gaussian)?,
    })
}

/// Re-read a preset with the command-line keys layered on top.
fn apply_overrides(spec: ExperimentSpec, overrides: &KvConfig) -> Result<ExperimentSpec> {
    let mut s = spec;
    if let Some(v) = overrides.parsed("trials")? {
        s.trials = v;
    }
    if let Some(v) = overrides.seed("seed")? {
        s.seed = v;
    }
    if let Some(v) = overrides.get("name") {
        s.name = v.to_string();
    }
    if let Some(v) = overrides.list("methods")? {
        s.methods = v;
    }
    if let Some(v) = overrides.list("drm")? {
        s.drms = v;
    }
    if let Some(v) = overrides.list("oversampling")? {
        s.oversampling = v;
    }
    if let Some(v) = overrides.get("ranks") {
        s.ranks = tt_sketch::bench::parse_rank_grid(v)?;
    }
    if let Some(unknown) = overrides
        .keys()
        .find(|k| !["trials", "seed", "name", "methods", "drm", "oversampling", "ranks"].contains(k))
    {
        bail!("key {unknown:?} cannot override a preset; write an experiment file instead");
    }
    s.validate()?;
    Ok(s)
}

/// Convert to something the chosen file kind can hold.
fn file_form(t: StructuredTensor, kind: TensorFileKind) -> Result<StructuredTensor> {
    Ok(match (kind, t) {
        (TensorFileKind::Tt, t @ StructuredTensor::Tt(_)) => t,
        (TensorFileKind::Tt, t) => t
            .as_tt()
            .with_context(|| format!("a {} tensor has no exact TT form; use a dense output file", t.kind()))?
            .into(),
        (TensorFileKind::SparseText, t @ StructuredTensor::Sparse(_)) => t,
        (TensorFileKind::SparseText, t) => bail!("a {} tensor cannot be written as sparse text", t.kind()),
        (TensorFileKind::Dense, t @ StructuredTensor::Dense(_)) => t,
        (TensorFileKind::Dense, t) => t.to_dense(DEFAULT_MATERIALIZATION_CAP)?.into(),
    })
}

fn print_summary(records: &[ExperimentRecord]) {
    println!(
        "{:<22} {:<22} {:>10} {:>11} {:>11} {:>11} {:>10}",
        "experiment", "series", "rank", "p20", "median", "p80", "time_ms"
    );
    for s in summarize(records) {
        println!(
            "{:<22} {:<22} {:>10} {:>11.3e} {:>11.3e} {:>11.3e} {:>10.2}",
            s.experiment,
            s.series(),
            s.rank,
            s.p20,
            s.median,
            s.p80,
            s.median_time_ms
        );
    }
}
