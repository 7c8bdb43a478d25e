//! `ugcbench preprocess`: raw text to a clean one-sentence-per-line corpus.

use std::path::PathBuf;

use clap::Args;

use ugcbench_core::corpus_io::{
    filter_english, preprocess, replace_html_linebreaks, split_sentences, write_corpus,
    PreprocessConfig,
};
use ugcbench_core::{Error, Result};

use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::kv;
use crate::Ctx;

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    /// Raw UTF-8 text file.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Cleaned corpus, one sentence per line.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Split on sentence boundaries instead of treating each input
    /// line as one sentence. `<br>` tags count as line breaks either way.
    #[arg(long)]
    pub split: bool,

    /// Keep the original casing.
    #[arg(long)]
    pub keep_case: bool,

    /// Keep typographic punctuation and space runs as-is.
    #[arg(long)]
    pub keep_punctuation: bool,

    /// Keep control and zero-width characters.
    #[arg(long)]
    pub keep_nonprintable: bool,

    /// Drop sentences whose share of basic-Latin characters is below
    /// this fraction.
    #[arg(long, value_name = "FRACTION")]
    pub min_latin: Option<f64>,
}

pub fn run(ctx: &Ctx<'_>, args: &PreprocessArgs) -> Result<()> {
    if let Some(t) = args.min_latin {
        if !(0.0..=1.0).contains(&t) || t.is_nan() {
            return Err(Error::config(format!(
                "--min-latin must lie in [0, 1], got {t}"
            )));
        }
    }
    let raw = std::fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let text = replace_html_linebreaks(&raw);
    let sentences: Vec<String> = if args.split {
        split_sentences(&text)
    } else {
        text.lines().map(str::to_string).collect()
    };

    let config = PreprocessConfig {
        remove_nonprintable: !args.keep_nonprintable,
        normalize_punctuation: !args.keep_punctuation,
        lowercase: !args.keep_case,
    };
    let total = sentences.len();
    let mut kept = Vec::with_capacity(total);
    for sentence in &sentences {
        let clean = preprocess(sentence, &config);
        if clean.is_empty() {
            continue;
        }
        if let Some(t) = args.min_latin {
            if !filter_english(&clean, t) {
                continue;
            }
        }
        kept.push(clean);
    }
    write_corpus(&args.out, &kept)?;

    let mut human = String::new();
    kv(&mut human, "sentences_in", total);
    kv(&mut human, "sentences_out", kept.len());
    kv(&mut human, "dropped", total - kept.len());
    let report = serde_json::json!({
        "command": "preprocess",
        "sentences_in": total,
        "sentences_out": kept.len(),
        "dropped": total - kept.len(),
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("preprocess")
        .config("input", args.input.display())
        .config("out", args.out.display())
        .config("split", args.split)
        .config("keep_case", args.keep_case)
        .config("keep_punctuation", args.keep_punctuation)
        .config("keep_nonprintable", args.keep_nonprintable)
        .config_opt("min_latin", args.min_latin)
        .input(&args.input)
        .output(&args.out)
        .output_opt(ctx.json_out())
        .detail("sentences_out", serde_json::json!(kept.len()));
    ctx.emit_manifest(builder, ManifestSink::Beside(&args.out))
}
