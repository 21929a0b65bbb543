use std::path::{Path, PathBuf};

use eventflux::analysis::{
    binomial_above_chance, histogram, hp_sensitivity, pairwise_cosine, read_gradients, read_runs_csv, read_runs_jsonl,
    SensitivityOptions,
};
use eventflux::formats::{self, FormatKind};
use eventflux::represent::{load_mlp_kernel_file, write_nonzero_csv, write_tensor};
use eventflux::synth::{gen_fan, gen_two_class_fan_dataset, FanConfig, FanDatasetSpec};
use eventflux::{est_frames, subsample, EventStream, KernelKind, KernelSpec, ReprConfig, SubsamplePlan};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::{
    BinomialArgs, Cli, Command, ConvertArgs, GenFanArgs, Geometry, GradArgs, HpArgs, RepresentArgs, SubsampleArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] eventflux::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Core(e) if e.is_io() => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

struct Ctx {
    seed: u64,
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

pub fn run(cli: &Cli) -> Result<Value> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let ctx = Ctx {
        seed: cli.seed,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Convert(a) => convert(&ctx, a),
        Command::Subsample(a) => subsample_cmd(&ctx, a),
        Command::Represent(a) => represent(&ctx, a),
        Command::HpSensitivity(a) => hp(&ctx, a),
        Command::GradDiversity(a) => grads(&ctx, a),
        Command::Binomial(a) => binomial(&ctx, a),
        Command::GenFan(a) => gen_fan_cmd(&ctx, a),
    }
}

fn resolve_format(explicit: Option<FormatKind>, path: &Path, flag: &str) -> Result<FormatKind> {
    explicit
        .or_else(|| FormatKind::from_extension(path))
        .ok_or_else(|| CliError::Usage(format!("cannot infer format of {}; pass {flag}", path.display())))
}

fn load_input(path: &Path, format: Option<FormatKind>, geometry: &Geometry) -> Result<EventStream> {
    let kind = resolve_format(format, path, "--in-format")?;
    let geometry = match (geometry.width, geometry.height) {
        (Some(w), Some(h)) => Some((w, h)),
        (None, None) => None,
        _ => return Err(CliError::Usage("--width and --height must be given together".into())),
    };
    if kind.needs_geometry() && geometry.is_none() {
        return Err(CliError::Usage(format!("{kind} input requires --width W --height H")));
    }
    Ok(formats::load(path, kind, geometry)?)
}

fn convert(ctx: &Ctx, a: &ConvertArgs) -> Result<Value> {
    let stream = load_input(&a.input, a.in_format, &a.geometry)?;
    let out_kind = resolve_format(a.out_format, &a.out, "--out-format")?;
    formats::save(&a.out, out_kind, &stream)?;
    ctx.note(format!(
        "wrote {} events to {} ({out_kind})",
        stream.len(),
        a.out.display()
    ));
    Ok(json!({
        "command": "convert",
        "out": a.out,
        "format": out_kind.to_string(),
        "n_events": stream.len(),
        "duration_us": stream.duration_us(),
    }))
}

/// `out.evs` -> `out.r003.evs`.
fn repeat_path(out: &Path, i: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.r{i:03}.{}", ext.to_string_lossy()),
        None => format!("{stem}.r{i:03}"),
    };
    out.with_file_name(name)
}

fn subsample_cmd(ctx: &Ctx, a: &SubsampleArgs) -> Result<Value> {
    let stream = load_input(&a.input, a.in_format, &a.geometry)?;
    let out_kind = FormatKind::from_extension(&a.out).unwrap_or(FormatKind::Native);
    let plan = SubsamplePlan::new(a.n, ctx.seed, a.epoch);

    let Some(repeats) = a.repeats else {
        let s = subsample(&stream, &plan);
        formats::save(&a.out, out_kind, &s)?;
        ctx.note(format!("kept {} of {} events", s.len(), stream.len()));
        return Ok(json!({
            "command": "subsample",
            "outputs": [{ "path": a.out, "epoch": a.epoch, "n_events": s.len() }],
            "n_source": stream.len(),
        }));
    };

    let draws: Vec<EventStream> = (0..repeats as u64)
        .into_par_iter()
        .map(|i| {
            subsample(
                &stream,
                &SubsamplePlan {
                    epoch: a.epoch + i,
                    ..plan
                },
            )
        })
        .collect();
    let mut outputs = Vec::with_capacity(repeats);
    for (i, s) in draws.iter().enumerate() {
        let epoch = a.epoch + i as u64;
        let path = repeat_path(&a.out, i);
        formats::save(&path, out_kind, s)?;
        ctx.note(format!("{}: {} events (epoch {epoch})", path.display(), s.len()));
        outputs.push(json!({ "path": path, "epoch": epoch, "n_events": s.len() }));
    }
    Ok(json!({ "command": "subsample", "outputs": outputs, "n_source": stream.len() }))
}

fn represent(ctx: &Ctx, a: &RepresentArgs) -> Result<Value> {
    let kernel = match a.kernel {
        KernelKind::Delta => KernelSpec::Delta,
        KernelKind::Triangular => KernelSpec::Triangular,
        KernelKind::Gaussian => KernelSpec::gaussian(a.sigma)?,
        KernelKind::Mlp => {
            let path = a
                .kernel_file
                .as_ref()
                .ok_or_else(|| CliError::Usage("--kernel mlp requires --kernel-file".into()))?;
            load_mlp_kernel_file(path)?
        }
    };
    let mut cfg = ReprConfig::new(a.channels, kernel)?;
    if a.raw_time {
        cfg = cfg.raw_time();
    }
    let stream = load_input(&a.input, a.in_format, &a.geometry)?;
    let t = est_frames(&stream, &cfg)?;
    write(&a.out, write_tensor(&t))?;
    if let Some(csv) = &a.csv {
        write(csv, write_nonzero_csv(&t))?;
    }
    let (p, c, h, w) = t.shape();
    let shape = format!("({p}, {c}, {h}, {w})");
    let nonzero = t.nonzero_count();
    ctx.note(format!(
        "shape {shape}, {nonzero} nonzero cells from {} events",
        stream.len()
    ));
    Ok(json!({
        "command": "represent",
        "shape": shape,
        "nonzero": nonzero,
        "n_events": stream.len(),
        "out": a.out,
    }))
}

fn hp(ctx: &Ctx, a: &HpArgs) -> Result<Value> {
    let bytes = read(&a.runs)?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{} is not UTF-8", a.runs.display())))?;
    let records = match a.runs.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => read_runs_jsonl(&text)?,
        _ => read_runs_csv(&text)?,
    };
    let selected: Vec<_> = records.into_iter().filter(|r| r.split == a.split).collect();
    let opts = SensitivityOptions {
        k_max: a.kmax,
        seed: ctx.seed,
        ..SensitivityOptions::default()
    };
    let report = hp_sensitivity(&selected, &opts)?;
    let json_report = serde_json::to_string_pretty(&report).expect("report serializes");
    write(&a.out, json_report + "\n")?;
    let per_k_path = a.per_k_out.clone().unwrap_or_else(|| a.out.with_extension("per_k.csv"));
    write(&per_k_path, report.per_k_csv())?;
    ctx.note(format!(
        "{} {} runs: metric {:.4} at k = {}",
        report.n_runs, a.split, report.metric, report.best_k
    ));
    Ok(json!({
        "command": "hp-sensitivity",
        "metric": report.metric,
        "best_k": report.best_k,
        "n_runs": report.n_runs,
        "degenerate": report.degenerate,
        "out": a.out,
        "per_k": per_k_path,
    }))
}

fn grads(ctx: &Ctx, a: &GradArgs) -> Result<Value> {
    let g = read_gradients(&read(&a.grads)?)?;
    let sims = pairwise_cosine(&g)?;
    let bins = histogram(&sims, a.bins, -1.0, 1.0)?;
    let mut csv = String::from("bin_lo,bin_hi,count\n");
    for b in &bins {
        csv.push_str(&format!("{},{},{}\n", b.lo, b.hi, b.count));
    }
    write(&a.out, csv)?;
    if let Some(path) = &a.svg {
        write(
            path,
            crate::svg::bar_chart(&bins, &format!("cosine similarity, {}", g.layer_id)),
        )?;
    }
    let mean = sims.iter().sum::<f64>() / sims.len() as f64;
    ctx.note(format!("pairs: {}", sims.len()));
    Ok(json!({
        "command": "grad-diversity",
        "pairs": sims.len(),
        "vectors": g.len(),
        "mean_cosine": mean,
        "out": a.out,
    }))
}

fn binomial(ctx: &Ctx, a: &BinomialArgs) -> Result<Value> {
    let p = binomial_above_chance(a.correct, a.trials, a.chance)?;
    let formatted = format!("{p:.3e}");
    ctx.note(format!("P[X >= {}] = {formatted}", a.correct));
    Ok(json!({
        "command": "binomial",
        "p_value": formatted,
        "correct": a.correct,
        "trials": a.trials,
        "chance": a.chance,
    }))
}

fn gen_fan_cmd(ctx: &Ctx, a: &GenFanArgs) -> Result<Value> {
    let cfg = FanConfig {
        width: a.width,
        height: a.height,
        n_blades: a.blades,
        angular_speed: a.speed,
        duration: a.duration,
        events_per_revolution: a.events_per_rev,
        noise_rate: a.noise_rate,
        seed: ctx.seed,
    };
    if let Some(dir) = &a.dataset {
        let spec = FanDatasetSpec {
            fast: cfg.with_speed(a.fast_speed.unwrap_or(3.0 * a.speed)),
            slow: cfg,
            n_slow: a.n_slow,
            n_fast: a.n_fast,
        };
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let manifest = gen_two_class_fan_dataset(&spec, dir)?;
        if !ctx.quiet {
            eprint!("{}", manifest.to_csv());
        }
        return Ok(json!({
            "command": "gen-fan",
            "dataset": dir,
            "manifest": dir.join("manifest.csv"),
            "videos": manifest.rows.len(),
            "n_events": manifest.rows.iter().map(|r| r.n_events).sum::<usize>(),
        }));
    }
    let out = a
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("gen-fan needs --out or --dataset".into()))?;
    let stream = gen_fan(&cfg)?;
    let kind = FormatKind::from_extension(out).unwrap_or(FormatKind::Native);
    formats::save(out, kind, &stream)?;
    ctx.note(format!(
        "{}: {} events over {} us",
        out.display(),
        stream.len(),
        stream.duration_us()
    ));
    Ok(json!({
        "command": "gen-fan",
        "out": out,
        "n_events": stream.len(),
        "duration_us": stream.duration_us(),
    }))
}
