//! `ugcbench stats`: token/type statistics, optionally as a noisy/clean
//! comparison with their type-token-ratio quotient.

use std::path::PathBuf;

use clap::Args;

use ugcbench_core::corpus_io::read_corpus;
use ugcbench_core::metrics::{ttr, ttr_ratio, CorpusStats};
use ugcbench_core::Result;

use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::kv;
use crate::Ctx;

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// The corpus to measure (the noisy side, when comparing).
    #[arg(long, value_name = "FILE")]
    pub ugc: PathBuf,

    /// Clean counterpart; adds its statistics and the TTR ratio.
    #[arg(long = "std", value_name = "FILE")]
    pub clean: Option<PathBuf>,
}

/// Type-token ratios are conventionally reported scaled by 100.
fn side_lines(human: &mut String, side: &str, stats: &CorpusStats) {
    kv(human, &format!("{side}_sentences"), stats.n_sentences);
    kv(human, &format!("{side}_tokens"), stats.n_tokens);
    kv(human, &format!("{side}_types"), stats.n_types);
    kv(
        human,
        &format!("{side}_ttr_x100"),
        format!("{:.2}", 100.0 * stats.ttr),
    );
}

pub fn run(ctx: &Ctx<'_>, args: &StatsArgs) -> Result<()> {
    let ugc_stats = ttr(&read_corpus(&args.ugc)?)?;
    let clean_stats = match &args.clean {
        Some(path) => Some(ttr(&read_corpus(path)?)?),
        None => None,
    };

    let mut human = String::new();
    side_lines(&mut human, "ugc", &ugc_stats);
    let mut report = serde_json::json!({
        "command": "stats",
        "ugc": ugc_stats,
    });
    if let Some(clean) = &clean_stats {
        side_lines(&mut human, "std", clean);
        let ratio = ttr_ratio(&ugc_stats, clean);
        kv(&mut human, "ttr_ratio", format!("{ratio:.4}"));
        report["std"] = serde_json::to_value(clean).expect("stats serialize");
        report["ttr_ratio"] = serde_json::json!(ratio);
    }
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("stats")
        .config("ugc", args.ugc.display())
        .config_opt("std", args.clean.as_ref().map(|p| p.display().to_string()))
        .input(&args.ugc)
        .output_opt(ctx.json_out())
        .detail("ugc_ttr", serde_json::json!(ugc_stats.ttr));
    let builder = match &args.clean {
        Some(path) => builder.input(path),
        None => builder,
    };
    match ctx.json_out() {
        Some(path) => ctx.emit_manifest(builder, ManifestSink::Beside(path)),
        None => ctx.emit_manifest(builder, ManifestSink::Stdout),
    }
}
