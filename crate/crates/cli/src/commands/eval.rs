//! `ugcbench eval`: the metric suite over embedding and value files.
//!
//! `xsim` and `cosdist` optionally sweep a list of seeds: `{seed}` in
//! an embedding path is substituted per seed, the report carries the
//! per-seed values and their mean, and `--baseline` t-tests them
//! against an earlier multi-seed report.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Subcommand};

use ugcbench_core::metrics::{
    average_precision, avg_pairwise_cosine_distance, cosine_distance, pearson, quantiles,
    spearman, welch_t_test, xsim, MarginConfig, MarginKind,
};
use ugcbench_core::{EmbeddingMatrix, Error, Result};

use super::load_matrix;
use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::{kv, mean_sd, read_labels, read_values};
use crate::Ctx;

#[derive(Subcommand)]
pub enum EvalCommand {
    /// Alignment error rate of sources against a gold-aligned target pool.
    Xsim(XsimArgs),
    /// Average cosine distance between aligned embedding rows.
    Cosdist(CosdistArgs),
    /// Linear-interpolation quantiles of a value file.
    Quantiles(QuantilesArgs),
    /// Welch two-sample t-test between two value files.
    Ttest(TtestArgs),
    /// Rank correlation of paired cosine similarities against gold scores.
    Sts(StsArgs),
    /// Average precision of paired cosine similarities against binary labels.
    Ap(ApArgs),
}

pub fn run(ctx: &Ctx<'_>, metric: &EvalCommand) -> Result<()> {
    match metric {
        EvalCommand::Xsim(args) => run_xsim(ctx, args),
        EvalCommand::Cosdist(args) => run_cosdist(ctx, args),
        EvalCommand::Quantiles(args) => run_quantiles(ctx, args),
        EvalCommand::Ttest(args) => run_ttest(ctx, args),
        EvalCommand::Sts(args) => run_sts(ctx, args),
        EvalCommand::Ap(args) => run_ap(ctx, args),
    }
}

/// Reports go beside `--json-out` when given, else to stdout.
fn finish(ctx: &Ctx<'_>, builder: ManifestBuilder) -> Result<()> {
    match ctx.json_out() {
        Some(path) => ctx.emit_manifest(builder, ManifestSink::Beside(path)),
        None => ctx.emit_manifest(builder, ManifestSink::Stdout),
    }
}

fn parse_margin(s: &str) -> std::result::Result<MarginKind, String> {
    MarginKind::from_str(s).map_err(|e| e.to_string())
}

// ---- multi-seed sweeps -------------------------------------------------

/// Seed-sweep flags shared by the score-producing metrics.
#[derive(Args, Debug)]
pub struct SeedSweep {
    /// Evaluate once per seed, substituting `{seed}` into the
    /// embedding paths.
    #[arg(long, value_delimiter = ',', value_name = "S1,S2,...")]
    pub seeds: Vec<u64>,

    /// Earlier multi-seed JSON report whose per-seed values the
    /// current ones are t-tested against.
    #[arg(long, value_name = "REPORT", requires = "seeds")]
    pub baseline: Option<PathBuf>,
}

const SEED_TOKEN: &str = "{seed}";

fn substitute(pattern: &str, seed: u64) -> PathBuf {
    PathBuf::from(pattern.replace(SEED_TOKEN, &seed.to_string()))
}

struct Sweep {
    per_seed: Vec<f64>,
    mean: f64,
    stddev: f64,
    /// Every embedding file visited, in evaluation order.
    inputs: Vec<PathBuf>,
}

fn run_sweep(
    sweep: &SeedSweep,
    src: &str,
    tgt: &str,
    eval_one: impl Fn(&Path, &Path) -> Result<f64>,
) -> Result<Sweep> {
    if !src.contains(SEED_TOKEN) && !tgt.contains(SEED_TOKEN) {
        return Err(Error::config(format!(
            "multi-seed mode needs a {SEED_TOKEN} placeholder in --src-emb or --tgt-emb"
        )));
    }
    let mut per_seed = Vec::with_capacity(sweep.seeds.len());
    let mut inputs = Vec::new();
    for &seed in &sweep.seeds {
        let s = substitute(src, seed);
        let t = substitute(tgt, seed);
        per_seed.push(eval_one(&s, &t)?);
        inputs.push(s);
        inputs.push(t);
    }
    let (mean, stddev) = mean_sd(&per_seed);
    Ok(Sweep {
        per_seed,
        mean,
        stddev,
        inputs,
    })
}

struct BaselineTest {
    path: PathBuf,
    mean: f64,
    t: f64,
    df: f64,
    p: f64,
    stars: &'static str,
}

fn against_baseline(path: &Path, current: &[f64]) -> Result<BaselineTest> {
    if current.len() < 2 {
        return Err(Error::config(
            "a baseline comparison needs at least two --seeds",
        ));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    };
    let arr = doc
        .get("per_seed")
        .and_then(|v| v.as_array())
        .ok_or_else(|| parse_err("baseline report lacks a per_seed array".to_string()))?;
    let mut base = Vec::with_capacity(arr.len());
    for v in arr {
        base.push(
            v.as_f64()
                .ok_or_else(|| parse_err(format!("non-numeric per_seed entry {v}")))?,
        );
    }
    let tt = welch_t_test(current, &base)?;
    let (mean, _) = mean_sd(&base);
    Ok(BaselineTest {
        path: path.to_path_buf(),
        mean,
        t: tt.t,
        df: tt.df,
        p: tt.p,
        stars: tt.stars(),
    })
}

/// `stars` is empty below every threshold; reports show a dash then.
fn stars_or_dash(stars: &str) -> &str {
    if stars.is_empty() {
        "-"
    } else {
        stars
    }
}

fn sweep_lines(human: &mut String, sweep: &SeedSweep, result: &Sweep) {
    let seeds: Vec<String> = sweep.seeds.iter().map(u64::to_string).collect();
    let values: Vec<String> = result.per_seed.iter().map(|v| format!("{v:.4}")).collect();
    kv(human, "seeds", seeds.join(","));
    kv(human, "per_seed", values.join(" "));
    kv(human, "mean", format!("{:.4}", result.mean));
    kv(human, "stddev", format!("{:.4}", result.stddev));
}

fn baseline_lines(human: &mut String, test: &BaselineTest) {
    kv(human, "baseline", test.path.display());
    kv(human, "baseline_mean", format!("{:.4}", test.mean));
    kv(human, "t", format!("{:.4}", test.t));
    kv(human, "p", format!("{:.6}", test.p));
    kv(human, "stars", stars_or_dash(test.stars));
}

fn baseline_json(test: &BaselineTest) -> serde_json::Value {
    serde_json::json!({
        "path": test.path.display().to_string(),
        "mean": test.mean,
        "t": test.t,
        "df": test.df,
        "p": test.p,
        "stars": test.stars,
    })
}

// ---- eval xsim ---------------------------------------------------------

#[derive(Args, Debug)]
pub struct XsimArgs {
    /// Source embeddings (binary file with JSON sidecar).
    #[arg(long, value_name = "FILE")]
    pub src_emb: String,

    /// Target pool; its first rows are the gold matches of the sources.
    #[arg(long, value_name = "FILE")]
    pub tgt_emb: String,

    /// Neighbors averaged on each side by the margin score.
    #[arg(long, default_value_t = 4)]
    pub k: usize,

    /// Margin variant: ratio, distance, or absolute.
    #[arg(long, default_value = "ratio", value_parser = parse_margin)]
    pub margin: MarginKind,

    #[command(flatten)]
    pub sweep: SeedSweep,
}

fn run_xsim(ctx: &Ctx<'_>, args: &XsimArgs) -> Result<()> {
    let cfg = MarginConfig {
        k: args.k,
        kind: args.margin,
    };
    let mut human = String::new();
    kv(&mut human, "metric", "xsim_error_rate");
    kv(&mut human, "margin", args.margin);
    kv(&mut human, "k", args.k);
    let mut report = serde_json::json!({
        "command": "eval xsim",
        "metric": "xsim_error_rate",
        "margin": args.margin.to_string(),
        "k": args.k,
    });
    let builder = ManifestBuilder::new("eval xsim")
        .config("src_emb", &args.src_emb)
        .config("tgt_emb", &args.tgt_emb)
        .config("k", args.k)
        .config("margin", args.margin)
        .seeds(&args.sweep.seeds);

    let builder = if args.sweep.seeds.is_empty() {
        let src = load_matrix(Path::new(&args.src_emb))?;
        let tgt = load_matrix(Path::new(&args.tgt_emb))?;
        let result = xsim(&src, &tgt, &cfg)?;
        kv(&mut human, "pairs", src.n());
        kv(&mut human, "candidates", tgt.n());
        kv(&mut human, "errors", result.errors.len());
        kv(
            &mut human,
            "error_rate",
            format!("{:.2}", result.error_rate()),
        );
        report["n_src"] = serde_json::json!(src.n());
        report["n_tgt"] = serde_json::json!(tgt.n());
        report["errors"] = serde_json::json!(result.errors.len());
        report["value"] = serde_json::json!(result.error_rate());
        builder
            .input(&args.src_emb)
            .input(&args.tgt_emb)
            .detail("value", serde_json::json!(result.error_rate()))
    } else {
        let result = run_sweep(&args.sweep, &args.src_emb, &args.tgt_emb, |s, t| {
            Ok(xsim(&load_matrix(s)?, &load_matrix(t)?, &cfg)?.error_rate())
        })?;
        sweep_lines(&mut human, &args.sweep, &result);
        report["seeds"] = serde_json::json!(args.sweep.seeds);
        report["per_seed"] = serde_json::json!(result.per_seed);
        report["value"] = serde_json::json!(result.mean);
        report["stddev"] = serde_json::json!(result.stddev);
        let mut builder = builder
            .config_opt(
                "baseline",
                args.sweep.baseline.as_ref().map(|p| p.display().to_string()),
            )
            .detail("value", serde_json::json!(result.mean));
        for input in &result.inputs {
            builder = builder.input(input);
        }
        if let Some(path) = &args.sweep.baseline {
            let test = against_baseline(path, &result.per_seed)?;
            baseline_lines(&mut human, &test);
            report["baseline"] = baseline_json(&test);
            builder = builder.input(path);
        }
        builder
    };

    ctx.emit_report(&human, &report)?;
    finish(ctx, builder.output_opt(ctx.json_out()))
}

// ---- eval cosdist ------------------------------------------------------

#[derive(Args, Debug)]
pub struct CosdistArgs {
    /// First embedding file; rows pair up with --tgt-emb rows.
    #[arg(long, value_name = "FILE")]
    pub src_emb: String,

    #[arg(long, value_name = "FILE")]
    pub tgt_emb: String,

    #[command(flatten)]
    pub sweep: SeedSweep,
}

fn run_cosdist(ctx: &Ctx<'_>, args: &CosdistArgs) -> Result<()> {
    let mut human = String::new();
    kv(&mut human, "metric", "avg_cosine_distance");
    let mut report = serde_json::json!({
        "command": "eval cosdist",
        "metric": "avg_cosine_distance",
    });
    let builder = ManifestBuilder::new("eval cosdist")
        .config("src_emb", &args.src_emb)
        .config("tgt_emb", &args.tgt_emb)
        .seeds(&args.sweep.seeds);

    let builder = if args.sweep.seeds.is_empty() {
        let src = load_matrix(Path::new(&args.src_emb))?;
        let tgt = load_matrix(Path::new(&args.tgt_emb))?;
        let value = avg_pairwise_cosine_distance(&src, &tgt)?;
        kv(&mut human, "pairs", src.n());
        kv(&mut human, "value", format!("{value:.6}"));
        report["n"] = serde_json::json!(src.n());
        report["value"] = serde_json::json!(value);
        builder
            .input(&args.src_emb)
            .input(&args.tgt_emb)
            .detail("value", serde_json::json!(value))
    } else {
        let result = run_sweep(&args.sweep, &args.src_emb, &args.tgt_emb, |s, t| {
            avg_pairwise_cosine_distance(&load_matrix(s)?, &load_matrix(t)?)
        })?;
        sweep_lines(&mut human, &args.sweep, &result);
        report["seeds"] = serde_json::json!(args.sweep.seeds);
        report["per_seed"] = serde_json::json!(result.per_seed);
        report["value"] = serde_json::json!(result.mean);
        report["stddev"] = serde_json::json!(result.stddev);
        let mut builder = builder
            .config_opt(
                "baseline",
                args.sweep.baseline.as_ref().map(|p| p.display().to_string()),
            )
            .detail("value", serde_json::json!(result.mean));
        for input in &result.inputs {
            builder = builder.input(input);
        }
        if let Some(path) = &args.sweep.baseline {
            let test = against_baseline(path, &result.per_seed)?;
            baseline_lines(&mut human, &test);
            report["baseline"] = baseline_json(&test);
            builder = builder.input(path);
        }
        builder
    };

    ctx.emit_report(&human, &report)?;
    finish(ctx, builder.output_opt(ctx.json_out()))
}

// ---- eval quantiles ----------------------------------------------------

#[derive(Args, Debug)]
pub struct QuantilesArgs {
    /// Value file, one number per line.
    #[arg(long, value_name = "FILE")]
    pub values: PathBuf,

    /// Probabilities in [0, 1].
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [0.0, 0.25, 0.5, 0.75, 1.0],
        value_name = "P1,P2,..."
    )]
    pub probs: Vec<f64>,

    /// Also write `prob,value` rows as CSV.
    #[arg(long, value_name = "FILE")]
    pub out_csv: Option<PathBuf>,
}

fn run_quantiles(ctx: &Ctx<'_>, args: &QuantilesArgs) -> Result<()> {
    let values = read_values(&args.values)?;
    let qs = quantiles(&values, &args.probs)?;

    let mut human = String::new();
    kv(&mut human, "metric", "quantiles");
    kv(&mut human, "n", values.len());
    for (p, q) in args.probs.iter().zip(&qs) {
        kv(&mut human, &format!("q{p}"), format!("{q:.6}"));
    }
    let report = serde_json::json!({
        "command": "eval quantiles",
        "metric": "quantiles",
        "n": values.len(),
        "probs": args.probs,
        "values": qs,
    });
    ctx.emit_report(&human, &report)?;

    if let Some(path) = &args.out_csv {
        let mut csv = String::from("prob,value\n");
        for (p, q) in args.probs.iter().zip(&qs) {
            csv.push_str(&format!("{p},{q}\n"));
        }
        std::fs::write(path, csv).map_err(|e| Error::io(path, e))?;
    }

    let probs_text: Vec<String> = args.probs.iter().map(f64::to_string).collect();
    let builder = ManifestBuilder::new("eval quantiles")
        .config("values", args.values.display())
        .config("probs", probs_text.join(","))
        .config_opt("out_csv", args.out_csv.as_ref().map(|p| p.display().to_string()))
        .input(&args.values)
        .output_opt(args.out_csv.as_ref())
        .output_opt(ctx.json_out());
    match (&args.out_csv, ctx.json_out()) {
        (Some(path), _) => ctx.emit_manifest(builder, ManifestSink::Beside(path)),
        (None, Some(path)) => ctx.emit_manifest(builder, ManifestSink::Beside(path)),
        (None, None) => ctx.emit_manifest(builder, ManifestSink::Stdout),
    }
}

// ---- eval ttest --------------------------------------------------------

#[derive(Args, Debug)]
pub struct TtestArgs {
    /// First sample, one value per line.
    #[arg(long, value_name = "FILE")]
    pub a: PathBuf,

    /// Second sample.
    #[arg(long, value_name = "FILE")]
    pub b: PathBuf,
}

fn run_ttest(ctx: &Ctx<'_>, args: &TtestArgs) -> Result<()> {
    let a = read_values(&args.a)?;
    let b = read_values(&args.b)?;
    let test = welch_t_test(&a, &b)?;
    let (mean_a, _) = mean_sd(&a);
    let (mean_b, _) = mean_sd(&b);

    let mut human = String::new();
    kv(&mut human, "metric", "welch_t_test");
    kv(&mut human, "n_a", a.len());
    kv(&mut human, "n_b", b.len());
    kv(&mut human, "mean_a", format!("{mean_a:.6}"));
    kv(&mut human, "mean_b", format!("{mean_b:.6}"));
    kv(&mut human, "t", format!("{:.6}", test.t));
    kv(&mut human, "df", format!("{:.4}", test.df));
    kv(&mut human, "p", format!("{:.6}", test.p));
    kv(&mut human, "stars", stars_or_dash(test.stars()));
    let report = serde_json::json!({
        "command": "eval ttest",
        "metric": "welch_t_test",
        "n_a": a.len(),
        "n_b": b.len(),
        "mean_a": mean_a,
        "mean_b": mean_b,
        "t": test.t,
        "df": test.df,
        "p": test.p,
        "stars": test.stars(),
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("eval ttest")
        .config("a", args.a.display())
        .config("b", args.b.display())
        .input(&args.a)
        .input(&args.b)
        .output_opt(ctx.json_out())
        .detail("p", serde_json::json!(test.p));
    finish(ctx, builder)
}

// ---- eval sts / eval ap ------------------------------------------------

/// Cosine similarity of each aligned row pair.
fn paired_cosine_sims(a: &EmbeddingMatrix<f64>, b: &EmbeddingMatrix<f64>) -> Result<Vec<f64>> {
    if a.n() != b.n() || a.d() != b.d() {
        return Err(Error::shape(format!(
            "paired similarities need matching shapes, got {} x {} vs {} x {}",
            a.n(),
            a.d(),
            b.n(),
            b.d()
        )));
    }
    a.rows()
        .zip(b.rows())
        .map(|(u, v)| cosine_distance(u, v).map(|d| 1.0 - d))
        .collect()
}

#[derive(Args, Debug)]
pub struct StsArgs {
    #[arg(long, value_name = "FILE")]
    pub src_emb: PathBuf,

    #[arg(long, value_name = "FILE")]
    pub tgt_emb: PathBuf,

    /// Gold similarity scores, one per embedded pair.
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
}

fn run_sts(ctx: &Ctx<'_>, args: &StsArgs) -> Result<()> {
    let a = load_matrix(&args.src_emb)?;
    let b = load_matrix(&args.tgt_emb)?;
    let gold = read_values(&args.gold)?;
    if gold.len() != a.n() {
        return Err(Error::shape(format!(
            "gold scores ({}) do not align with embedding rows ({})",
            gold.len(),
            a.n()
        )));
    }
    let sims = paired_cosine_sims(&a, &b)?;
    let rho = spearman(&sims, &gold)?;
    let r = pearson(&sims, &gold)?;

    let mut human = String::new();
    kv(&mut human, "metric", "sts_spearman");
    kv(&mut human, "pairs", sims.len());
    kv(&mut human, "spearman", format!("{rho:.4}"));
    kv(&mut human, "pearson", format!("{r:.4}"));
    let report = serde_json::json!({
        "command": "eval sts",
        "metric": "sts_spearman",
        "n": sims.len(),
        "value": rho,
        "spearman": rho,
        "pearson": r,
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("eval sts")
        .config("src_emb", args.src_emb.display())
        .config("tgt_emb", args.tgt_emb.display())
        .config("gold", args.gold.display())
        .input(&args.src_emb)
        .input(&args.tgt_emb)
        .input(&args.gold)
        .output_opt(ctx.json_out())
        .detail("value", serde_json::json!(rho));
    finish(ctx, builder)
}

#[derive(Args, Debug)]
pub struct ApArgs {
    #[arg(long, value_name = "FILE")]
    pub src_emb: PathBuf,

    #[arg(long, value_name = "FILE")]
    pub tgt_emb: PathBuf,

    /// Binary labels (0/1), one per embedded pair.
    #[arg(long, value_name = "FILE")]
    pub labels: PathBuf,
}

fn run_ap(ctx: &Ctx<'_>, args: &ApArgs) -> Result<()> {
    let a = load_matrix(&args.src_emb)?;
    let b = load_matrix(&args.tgt_emb)?;
    let labels = read_labels(&args.labels)?;
    if labels.len() != a.n() {
        return Err(Error::shape(format!(
            "labels ({}) do not align with embedding rows ({})",
            labels.len(),
            a.n()
        )));
    }
    let sims = paired_cosine_sims(&a, &b)?;
    let ap = average_precision(&sims, &labels)?;
    let positives = labels.iter().filter(|&&l| l).count();

    let mut human = String::new();
    kv(&mut human, "metric", "average_precision");
    kv(&mut human, "pairs", sims.len());
    kv(&mut human, "positives", positives);
    kv(&mut human, "value", format!("{ap:.4}"));
    let report = serde_json::json!({
        "command": "eval ap",
        "metric": "average_precision",
        "n": sims.len(),
        "positives": positives,
        "value": ap,
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("eval ap")
        .config("src_emb", args.src_emb.display())
        .config("tgt_emb", args.tgt_emb.display())
        .config("labels", args.labels.display())
        .input(&args.src_emb)
        .input(&args.tgt_emb)
        .input(&args.labels)
        .output_opt(ctx.json_out())
        .detail("value", serde_json::json!(ap));
    finish(ctx, builder)
}
