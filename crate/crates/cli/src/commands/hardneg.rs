//! `ugcbench hardneg`: grow a target pool with meaning-altering
//! near-duplicates of its sentences.

use std::path::PathBuf;

use clap::Args;

use ugcbench_core::corpus_io::{read_corpus, write_corpus};
use ugcbench_core::metrics::{build_hard_negatives, Gazetteer};
use ugcbench_core::Result;

use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::kv;
use crate::Ctx;

#[derive(Args, Debug)]
pub struct HardnegArgs {
    /// Gold target sentences, one per line.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Output pool: the originals first (same order), then every negative.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Distinct negatives requested per perturbation family and sentence.
    #[arg(long, default_value_t = 14, value_name = "N")]
    pub per_perturber: usize,

    /// Entity gazetteer TSV (`name<TAB>category`); defaults to
    /// `gazetteer.tsv` in the data directory, then the bundled one.
    #[arg(long, value_name = "FILE")]
    pub gazetteer: Option<PathBuf>,
}

fn resolve_gazetteer(ctx: &Ctx<'_>, args: &HardnegArgs) -> Result<(Gazetteer, String)> {
    if let Some(path) = &args.gazetteer {
        return Ok((Gazetteer::load(path)?, path.display().to_string()));
    }
    if let Some(dir) = ctx.data_dir() {
        let path = dir.join("gazetteer.tsv");
        if path.is_file() {
            return Ok((Gazetteer::load(&path)?, path.display().to_string()));
        }
    }
    Ok((Gazetteer::builtin(), "builtin".to_string()))
}

pub fn run(ctx: &Ctx<'_>, args: &HardnegArgs) -> Result<()> {
    let targets = read_corpus(&args.input)?;
    let (gazetteer, gazetteer_origin) = resolve_gazetteer(ctx, args)?;
    let set = build_hard_negatives(&targets, args.per_perturber, ctx.seed(), &gazetteer)?;
    write_corpus(&args.out, &set.augmented_pool())?;

    let mut human = String::new();
    kv(&mut human, "originals", set.originals.len());
    kv(&mut human, "negatives", set.total_negatives());
    kv(&mut human, "factor", format!("{:.4}", set.factor));
    kv(&mut human, "gazetteer", &gazetteer_origin);
    let report = serde_json::json!({
        "command": "hardneg",
        "originals": set.originals.len(),
        "negatives": set.total_negatives(),
        "factor": set.factor,
        "gazetteer": gazetteer_origin,
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("hardneg")
        .config("input", args.input.display())
        .config("out", args.out.display())
        .config("per_perturber", args.per_perturber)
        .config("gazetteer", &gazetteer_origin)
        .config("seed", ctx.seed())
        .seed(ctx.seed())
        .input(&args.input)
        .output(&args.out)
        .output_opt(ctx.json_out())
        .detail("factor", serde_json::json!(set.factor))
        .detail("negatives", serde_json::json!(set.total_negatives()));
    ctx.emit_manifest(builder, ManifestSink::Beside(&args.out))
}
