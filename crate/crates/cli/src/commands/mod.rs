//! One module per subcommand; each takes the shared [`crate::Ctx`]
//! and its parsed arguments, runs the pipeline, and emits report and
//! manifest.

pub mod augment;
pub mod embed;
pub mod eval;
pub mod hardneg;
pub mod pca;
pub mod preprocess;
pub mod stats;
pub mod train;

use std::path::{Path, PathBuf};

use ugcbench_core::corpus_io::read_embeddings;
use ugcbench_core::{EmbeddingMatrix, Result};

/// Loads an embedding file at evaluation precision.
pub(crate) fn load_matrix(path: &Path) -> Result<EmbeddingMatrix<f64>> {
    Ok(read_embeddings(path)?.to_f64())
}

/// `<path><suffix>`, appended to the full file name (so `a.bin` with
/// `.meta.json` becomes `a.bin.meta.json`, not `a.meta.json`).
pub(crate) fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}
