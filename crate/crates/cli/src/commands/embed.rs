//! `ugcbench embed`: encode a corpus into an embedding file, either
//! with a saved student model or with the deterministic reference
//! encoder.

use std::path::PathBuf;

use clap::Args;

use ugcbench_core::corpus_io::{read_corpus, write_embeddings};
use ugcbench_core::distill::{Student, SyntheticTeacher};
use ugcbench_core::Result;

use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::kv;
use crate::Ctx;

#[derive(Args, Debug)]
#[command(group(
    clap::ArgGroup::new("encoder")
        .required(true)
        .args(["model", "teacher_seed"]),
))]
pub struct EmbedArgs {
    /// Corpus to encode, one sentence per line.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Output embedding file (binary, with a JSON sidecar).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Encode with this saved student model.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,

    /// Encode with the deterministic reference encoder at this seed.
    #[arg(long, value_name = "SEED", requires = "dim")]
    pub teacher_seed: Option<u64>,

    /// Reference encoder output dimension.
    #[arg(long, value_name = "D", requires = "teacher_seed")]
    pub dim: Option<usize>,
}

pub fn run(ctx: &Ctx<'_>, args: &EmbedArgs) -> Result<()> {
    let corpus = read_corpus(&args.input)?;
    let (embeddings, encoder) = match (&args.model, args.teacher_seed) {
        (Some(path), _) => {
            let model = Student::<f64>::load(path)?;
            (
                model.encode_corpus(&corpus)?,
                format!("student:{}", model.config_digest()),
            )
        }
        (None, Some(seed)) => {
            let dim = args.dim.expect("clap enforces --dim with --teacher-seed");
            let teacher = SyntheticTeacher::new(seed, dim)?;
            (
                teacher.encode_corpus(&corpus)?,
                format!("teacher:{seed}"),
            )
        }
        (None, None) => unreachable!("clap enforces the encoder group"),
    };
    write_embeddings(&embeddings.to_f32(), &args.out)?;

    let mut human = String::new();
    kv(&mut human, "sentences", embeddings.n());
    kv(&mut human, "dim", embeddings.d());
    kv(&mut human, "encoder", &encoder);
    let report = serde_json::json!({
        "command": "embed",
        "n": embeddings.n(),
        "d": embeddings.d(),
        "encoder": encoder,
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("embed")
        .config("input", args.input.display())
        .config("out", args.out.display())
        .config_opt("model", args.model.as_ref().map(|p| p.display().to_string()))
        .config_opt("teacher_seed", args.teacher_seed)
        .config_opt("dim", args.dim)
        .input(&args.input)
        .output(&args.out)
        .output(super::with_suffix(&args.out, ".meta.json"))
        .output_opt(ctx.json_out())
        .detail("n", serde_json::json!(embeddings.n()))
        .detail("d", serde_json::json!(embeddings.d()));
    let builder = match &args.model {
        Some(path) => builder.input(path),
        None => builder,
    };
    ctx.emit_manifest(builder, ManifestSink::Beside(&args.out))
}
