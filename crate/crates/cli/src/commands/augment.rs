//! `ugcbench augment`: pair a clean corpus with noisy renderings.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;

use ugcbench_core::augment::{augment_corpus, default_transforms_from_dir, MixAllConfig, TransformId};
use ugcbench_core::corpus_io::{read_corpus, write_corpus};
use ugcbench_core::{Error, Result};

use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::kv;
use crate::Ctx;

#[derive(Args, Debug)]
pub struct AugmentArgs {
    /// Input corpus, one sentence per line.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Where the clean side is written, aligned line-by-line with the input.
    #[arg(long, value_name = "FILE")]
    pub out_std: PathBuf,

    /// Where the noisy side is written, aligned with the clean side.
    #[arg(long, value_name = "FILE")]
    pub out_ugc: PathBuf,

    /// Per-family selection probability. Defaults to 0.1 for the full
    /// mix and to 1.0 when --transforms names an explicit subset.
    #[arg(long, value_name = "P")]
    pub p_all: Option<f64>,

    /// Sentences per parallel work unit; the output is identical for
    /// any chunk size and worker count.
    #[arg(long, default_value_t = 512, value_name = "N")]
    pub chunk_size: usize,

    /// `mix_all` (all twelve families) or a comma-separated subset of
    /// family ids, e.g. `leet` or `abr1,spel`, applied to every sentence.
    #[arg(long, default_value = "mix_all", value_name = "IDS")]
    pub transforms: String,
}

pub fn run(ctx: &Ctx<'_>, args: &AugmentArgs) -> Result<()> {
    let corpus = read_corpus(&args.input)?;
    let all = default_transforms_from_dir(ctx.data_dir().as_deref())?;

    let (specs, default_p) = if args.transforms == "mix_all" {
        (all, MixAllConfig::DEFAULT_P_ALL)
    } else {
        let mut wanted = Vec::new();
        for token in args.transforms.split(',') {
            wanted.push(TransformId::from_str(token.trim())?);
        }
        let subset = all
            .into_iter()
            .filter(|spec| wanted.contains(&spec.id))
            .collect();
        // An explicit subset is for per-family corpora, so it applies
        // everywhere unless --p-all dials that back down.
        (subset, 1.0)
    };

    let config = MixAllConfig {
        p_all: args.p_all.unwrap_or(default_p),
        transforms: specs,
        scale_choices: MixAllConfig::SCALE_CHOICES,
        scale_probs: MixAllConfig::SCALE_PROBS,
        global_seed: ctx.seed(),
    };
    config.validate()?;
    if args.chunk_size == 0 {
        return Err(Error::config("--chunk-size must be at least 1"));
    }

    let pairs = augment_corpus(&corpus, &config, args.chunk_size)?;

    let stds: Vec<String> = pairs.iter().map(|p| p.std.clone()).collect();
    let ugcs: Vec<String> = pairs.iter().map(|p| p.ugc.clone()).collect();
    write_corpus(&args.out_std, &stds)?;
    write_corpus(&args.out_ugc, &ugcs)?;

    // Sidecar: which families were selected for each line.
    let applied_path = super::with_suffix(&args.out_ugc, ".applied.tsv");
    let mut tsv = String::new();
    for (i, pair) in pairs.iter().enumerate() {
        let ids: Vec<&str> = pair.applied.iter().map(|id| id.as_str()).collect();
        tsv.push_str(&format!("{i}\t{}\n", ids.join(",")));
    }
    std::fs::write(&applied_path, tsv).map_err(|e| Error::io(&applied_path, e))?;

    let transformed = pairs.iter().filter(|p| !p.applied.is_empty()).count();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for pair in &pairs {
        for id in &pair.applied {
            *counts.entry(id.as_str()).or_default() += 1;
        }
    }

    let mut human = String::new();
    kv(&mut human, "sentences", pairs.len());
    kv(&mut human, "transformed", transformed);
    kv(
        &mut human,
        "untransformed_frac",
        format!(
            "{:.4}",
            (pairs.len() - transformed) as f64 / pairs.len().max(1) as f64
        ),
    );
    for (id, n) in &counts {
        kv(&mut human, &format!("applied_{id}"), n);
    }
    let report = serde_json::json!({
        "command": "augment",
        "n_sentences": pairs.len(),
        "transformed": transformed,
        "untransformed_fraction": (pairs.len() - transformed) as f64 / pairs.len().max(1) as f64,
        "applied_counts": counts,
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("augment")
        .config("input", args.input.display())
        .config("out_std", args.out_std.display())
        .config("out_ugc", args.out_ugc.display())
        .config("p_all", config.p_all)
        .config("chunk_size", args.chunk_size)
        .config("transforms", &args.transforms)
        .config("seed", ctx.seed())
        .config_opt("data_dir", ctx.data_dir().map(|p| p.display().to_string()))
        .seed(ctx.seed())
        .input(&args.input)
        .output(&args.out_std)
        .output(&args.out_ugc)
        .output(&applied_path)
        .output_opt(ctx.json_out())
        .detail("n_sentences", serde_json::json!(pairs.len()))
        .detail("transformed", serde_json::json!(transformed));
    ctx.emit_manifest(builder, ManifestSink::Beside(&args.out_std))
}
