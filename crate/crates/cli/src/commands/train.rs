//! `ugcbench train` and `ugcbench validate`: distill reference vectors
//! into a student encoder; score a saved student on a dev set.

use std::path::{Path, PathBuf};

use clap::Args;

use ugcbench_core::augment::SentencePair;
use ugcbench_core::corpus_io::{read_corpus, read_embeddings};
use ugcbench_core::distill::{
    select_best_checkpoint, train, validation_loss, write_checkpoint, FeatureMode, Student,
    StudentConfig, TrainConfig,
};
use ugcbench_core::{EmbeddingMatrix, Error, Result};

use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::kv;
use crate::Ctx;

fn parse_mode(s: &str) -> std::result::Result<FeatureMode, String> {
    match s {
        "word" | "word-hash" => Ok(FeatureMode::WordHash),
        "char" | "char-ngram" => Ok(FeatureMode::CharNgram),
        other => Err(format!(
            "unknown feature mode {other:?}; expected word or char"
        )),
    }
}

/// Reads two aligned one-sentence-per-line files into training pairs.
fn read_pairs(std_path: &Path, ugc_path: &Path) -> Result<Vec<SentencePair>> {
    let stds = read_corpus(std_path)?;
    let ugcs = read_corpus(ugc_path)?;
    if stds.len() != ugcs.len() {
        return Err(Error::shape(format!(
            "aligned pair files differ in length: {} ({}) vs {} ({})",
            std_path.display(),
            stds.len(),
            ugc_path.display(),
            ugcs.len()
        )));
    }
    Ok(stds
        .into_iter()
        .zip(ugcs)
        .map(|(std, ugc)| SentencePair {
            std,
            ugc,
            applied: Vec::new(),
        })
        .collect())
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Clean training sentences, one per line.
    #[arg(long, value_name = "FILE")]
    pub pairs_std: PathBuf,

    /// Noisy renderings aligned with --pairs-std.
    #[arg(long, value_name = "FILE")]
    pub pairs_ugc: PathBuf,

    /// Reference vectors for the clean side, one row per pair; the
    /// student's output dimension follows this file.
    #[arg(long, value_name = "FILE")]
    pub teacher_emb: PathBuf,

    /// Feature extraction: word or char.
    #[arg(long, default_value = "char", value_parser = parse_mode)]
    pub mode: FeatureMode,

    /// Checkpoints, learning curve, and manifest land here.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Feature-table size.
    #[arg(long, default_value_t = 4096, value_name = "N")]
    pub buckets: usize,

    /// Feature-vector dimension.
    #[arg(long, default_value_t = 64, value_name = "N")]
    pub hidden: usize,

    #[arg(long, default_value_t = 1e-3, value_name = "LR")]
    pub learning_rate: f64,

    /// Steps of linear learning-rate warm-up.
    #[arg(long, default_value_t = 10, value_name = "N")]
    pub warmup_steps: usize,

    /// Sentence pairs per optimizer step.
    #[arg(long, default_value_t = 16, value_name = "N")]
    pub batch_sentences: usize,

    /// Optional cap on tokens per batch (closes a batch early).
    #[arg(long, value_name = "N")]
    pub max_tokens_per_batch: Option<usize>,

    /// A checkpoint is recorded every this many steps.
    #[arg(long, default_value_t = 100, value_name = "N")]
    pub checkpoint_every: usize,

    /// Global-norm gradient clipping threshold.
    #[arg(long, default_value_t = 5.0, value_name = "C")]
    pub clip_norm: f64,

    /// Passes over the training pairs.
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub epochs: usize,
}

pub fn run_train(ctx: &Ctx<'_>, args: &TrainArgs) -> Result<()> {
    let pairs = read_pairs(&args.pairs_std, &args.pairs_ugc)?;
    let teacher = read_embeddings(&args.teacher_emb)?.to_f64();
    let sconf = StudentConfig {
        feature_mode: args.mode,
        buckets: args.buckets,
        hidden: args.hidden,
        out_dim: teacher.d(),
        seed: ctx.seed(),
    };
    let tconf = TrainConfig {
        learning_rate: args.learning_rate,
        adam_beta: TrainConfig::default().adam_beta,
        adam_eps: TrainConfig::default().adam_eps,
        warmup_steps: args.warmup_steps,
        batch_sentences: args.batch_sentences,
        max_tokens_per_batch: args.max_tokens_per_batch,
        checkpoint_every: args.checkpoint_every,
        clip_norm: args.clip_norm,
        epochs: args.epochs,
        seed: ctx.seed(),
    };
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;

    let checkpoints = train(&pairs, &teacher, &sconf, &tconf)?;
    let mut curve = String::from("step,validation_loss\n");
    let mut outputs: Vec<PathBuf> = Vec::new();
    for checkpoint in &checkpoints {
        write_checkpoint(&args.out_dir, checkpoint)?;
        curve.push_str(&format!(
            "{},{}\n",
            checkpoint.step, checkpoint.validation_loss
        ));
        outputs.push(args.out_dir.join(format!("ckpt_{}.bin", checkpoint.step)));
        outputs.push(args.out_dir.join(format!("ckpt_{}.meta.json", checkpoint.step)));
    }
    let curve_path = args.out_dir.join("curve.csv");
    std::fs::write(&curve_path, curve).map_err(|e| Error::io(&curve_path, e))?;

    let best = select_best_checkpoint(&checkpoints)?;
    let best_file = format!("ckpt_{}.bin", best.step);
    let best_json = serde_json::json!({
        "step": best.step,
        "validation_loss": best.validation_loss,
        "file": best_file,
        "params_digest": best.model.params_digest(),
        "config_digest": best.model.config_digest(),
    });
    let best_path = args.out_dir.join("best.json");
    crate::output::write_json(&best_path, &best_json)?;

    let last = checkpoints.last().expect("train returns checkpoints");
    let mut human = String::new();
    kv(&mut human, "pairs", pairs.len());
    kv(&mut human, "steps", last.step);
    kv(&mut human, "checkpoints", checkpoints.len());
    kv(&mut human, "best_step", best.step);
    kv(
        &mut human,
        "best_validation_loss",
        format!("{:.6e}", best.validation_loss),
    );
    kv(
        &mut human,
        "final_validation_loss",
        format!("{:.6e}", last.validation_loss),
    );
    let report = serde_json::json!({
        "command": "train",
        "pairs": pairs.len(),
        "steps": last.step,
        "checkpoints": checkpoints.len(),
        "best_step": best.step,
        "best_validation_loss": best.validation_loss,
        "final_validation_loss": last.validation_loss,
        "best_params_digest": best.model.params_digest(),
    });
    ctx.emit_report(&human, &report)?;

    let mut builder = ManifestBuilder::new("train")
        .config("pairs_std", args.pairs_std.display())
        .config("pairs_ugc", args.pairs_ugc.display())
        .config("teacher_emb", args.teacher_emb.display())
        .config("mode", args.mode)
        .config("out_dir", args.out_dir.display())
        .config("buckets", args.buckets)
        .config("hidden", args.hidden)
        .config("learning_rate", args.learning_rate)
        .config("warmup_steps", args.warmup_steps)
        .config("batch_sentences", args.batch_sentences)
        .config_opt("max_tokens_per_batch", args.max_tokens_per_batch)
        .config("checkpoint_every", args.checkpoint_every)
        .config("clip_norm", args.clip_norm)
        .config("epochs", args.epochs)
        .config("seed", ctx.seed())
        .seed(ctx.seed())
        .input(&args.pairs_std)
        .input(&args.pairs_ugc)
        .input(&args.teacher_emb)
        .detail("best_step", serde_json::json!(best.step))
        .detail(
            "best_validation_loss",
            serde_json::json!(best.validation_loss),
        )
        .detail("best_file", serde_json::json!(best_file))
        .detail(
            "best_params_digest",
            serde_json::json!(best.model.params_digest()),
        );
    for path in &outputs {
        builder = builder.output(path);
    }
    builder = builder
        .output(&curve_path)
        .output(&best_path)
        .output_opt(ctx.json_out());
    ctx.emit_manifest(builder, ManifestSink::At(args.out_dir.join("manifest.json")))
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Clean dev sentences, one per line.
    #[arg(long, value_name = "FILE")]
    pub pairs_std: PathBuf,

    /// Noisy renderings aligned with --pairs-std.
    #[arg(long, value_name = "FILE")]
    pub pairs_ugc: PathBuf,

    /// Saved student model to score.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    /// Reference vectors for the clean side, one row per dev pair.
    #[arg(long, value_name = "FILE")]
    pub teacher_emb: PathBuf,
}

pub fn run_validate(ctx: &Ctx<'_>, args: &ValidateArgs) -> Result<()> {
    let pairs = read_pairs(&args.pairs_std, &args.pairs_ugc)?;
    let teacher: EmbeddingMatrix<f64> = read_embeddings(&args.teacher_emb)?.to_f64();
    let model = Student::<f64>::load(&args.model)?;
    let loss = validation_loss(&model, &teacher, &pairs)?;

    let mut human = String::new();
    kv(&mut human, "pairs", pairs.len());
    kv(&mut human, "validation_loss", format!("{loss:.6e}"));
    let report = serde_json::json!({
        "command": "validate",
        "pairs": pairs.len(),
        "validation_loss": loss,
        "model_config_digest": model.config_digest(),
        "model_params_digest": model.params_digest(),
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("validate")
        .config("pairs_std", args.pairs_std.display())
        .config("pairs_ugc", args.pairs_ugc.display())
        .config("model", args.model.display())
        .config("teacher_emb", args.teacher_emb.display())
        .input(&args.pairs_std)
        .input(&args.pairs_ugc)
        .input(&args.model)
        .input(&args.teacher_emb)
        .output_opt(ctx.json_out())
        .detail("validation_loss", serde_json::json!(loss));
    match ctx.json_out() {
        Some(path) => ctx.emit_manifest(builder, ManifestSink::Beside(path)),
        None => ctx.emit_manifest(builder, ManifestSink::Stdout),
    }
}
