//! `ugcbench pca`: two-dimensional projection of an embedding file,
//! with CSV output, an optional SVG scatter, and a check of how well
//! the plane preserves the original pairwise distances.

use std::path::PathBuf;

use clap::Args;

use ugcbench_core::corpus_io::read_corpus;
use ugcbench_core::metrics::{distance_preservation, pca_2d};
use ugcbench_core::{Error, Result};

use super::load_matrix;
use crate::manifest::{ManifestBuilder, ManifestSink};
use crate::output::kv;
use crate::{svg, Ctx};

#[derive(Args, Debug)]
pub struct PcaArgs {
    /// Embedding file to project.
    #[arg(long, value_name = "FILE")]
    pub emb: PathBuf,

    /// Optional labels, one per embedding row; grouped by color in the SVG.
    #[arg(long, value_name = "FILE")]
    pub labels: Option<PathBuf>,

    /// Projected points as `x,y,label` CSV.
    #[arg(long, value_name = "FILE")]
    pub out_csv: PathBuf,

    /// Optional scatter plot (deterministic bytes for fixed input).
    #[arg(long, value_name = "FILE")]
    pub out_svg: Option<PathBuf>,
}

/// Quotes a CSV field only when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn run(ctx: &Ctx<'_>, args: &PcaArgs) -> Result<()> {
    let matrix = load_matrix(&args.emb)?;
    let labels: Vec<String> = match &args.labels {
        Some(path) => {
            let lines = read_corpus(path)?;
            if lines.len() != matrix.n() {
                return Err(Error::shape(format!(
                    "labels ({}) do not align with embedding rows ({})",
                    lines.len(),
                    matrix.n()
                )));
            }
            lines
        }
        None => Vec::new(),
    };

    let projection = pca_2d(&matrix)?;
    let preservation = distance_preservation(&matrix, &projection.points)?;

    let mut csv = String::from("x,y,label\n");
    for (i, p) in projection.points.iter().enumerate() {
        let label = labels.get(i).map(String::as_str).unwrap_or("");
        csv.push_str(&format!("{},{},{}\n", p[0], p[1], csv_field(label)));
    }
    std::fs::write(&args.out_csv, csv).map_err(|e| Error::io(&args.out_csv, e))?;

    if let Some(path) = &args.out_svg {
        let plot = svg::scatter(&projection.points, &labels);
        std::fs::write(path, plot).map_err(|e| Error::io(path, e))?;
    }

    let ratio = projection.explained_variance_ratio();
    let mut human = String::new();
    kv(&mut human, "points", projection.points.len());
    kv(
        &mut human,
        "explained_variance",
        format!(
            "{:.6} {:.6}",
            projection.explained_variance[0], projection.explained_variance[1]
        ),
    );
    kv(
        &mut human,
        "explained_ratio",
        format!("{:.4} {:.4}", ratio[0], ratio[1]),
    );
    kv(
        &mut human,
        "distance_spearman",
        format!("{preservation:.4}"),
    );
    let report = serde_json::json!({
        "command": "pca",
        "n": projection.points.len(),
        "explained_variance": projection.explained_variance,
        "explained_ratio": ratio,
        "total_variance": projection.total_variance,
        "distance_spearman": preservation,
    });
    ctx.emit_report(&human, &report)?;

    let builder = ManifestBuilder::new("pca")
        .config("emb", args.emb.display())
        .config_opt("labels", args.labels.as_ref().map(|p| p.display().to_string()))
        .config("out_csv", args.out_csv.display())
        .config_opt("out_svg", args.out_svg.as_ref().map(|p| p.display().to_string()))
        .input(&args.emb)
        .output(&args.out_csv)
        .output_opt(args.out_svg.as_ref())
        .output_opt(ctx.json_out())
        .detail("distance_spearman", serde_json::json!(preservation));
    let builder = match &args.labels {
        Some(path) => builder.input(path),
        None => builder,
    };
    ctx.emit_manifest(builder, ManifestSink::Beside(&args.out_csv))
}
