//! Binary embedding interchange format.
//!
//! The payload file holds `n * d` IEEE-754 32-bit floats, little
//! endian, row-major, with no header. Shape travels in a JSON sidecar
//! at `<payload>.meta.json` holding `{"n": .., "d": .., "dtype":
//! "f32le"}`. Write-then-read round-trips bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Suffix appended to the payload path to name the sidecar.
pub const SIDECAR_SUFFIX: &str = ".meta.json";

const DTYPE: &str = "f32le";

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    n: usize,
    d: usize,
    dtype: String,
}

fn sidecar_path(payload: &Path) -> PathBuf {
    let mut name = payload.as_os_str().to_os_string();
    name.push(SIDECAR_SUFFIX);
    PathBuf::from(name)
}

/// Writes `matrix` to `path` plus its sidecar. Finiteness is
/// guaranteed by construction of [`EmbeddingMatrix`].
pub fn write_embeddings(matrix: &EmbeddingMatrix<f32>, path: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(matrix.n() * matrix.d() * 4);
    for v in matrix.as_slice() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let sidecar = Sidecar {
        n: matrix.n(),
        d: matrix.d(),
        dtype: DTYPE.to_string(),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    fs::write(sidecar_path(path), json).map_err(|e| Error::io(sidecar_path(path), e))
}

/// Reads a payload/sidecar pair back into a matrix.
///
/// Fails if the sidecar is missing or malformed, if the payload size
/// disagrees with `n * d * 4`, or if any value is NaN or infinite
/// (reported with its row index).
pub fn read_embeddings(path: &Path) -> Result<EmbeddingMatrix<f32>> {
    let meta_path = sidecar_path(path);
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let sidecar: Sidecar = serde_json::from_str(&meta_text).map_err(|e| Error::Parse {
        path: meta_path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if sidecar.dtype != DTYPE {
        return Err(Error::Parse {
            path: meta_path,
            line: 1,
            message: format!("unsupported dtype {:?}, expected {DTYPE:?}", sidecar.dtype),
        });
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let expected = (sidecar.n as u64) * (sidecar.d as u64) * 4;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            path: path.to_path_buf(),
            expected,
            actual: bytes.len() as u64,
        });
    }
    let mut data = Vec::with_capacity(sidecar.n * sidecar.d);
    for chunk in bytes.chunks_exact(4) {
        data.push(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]));
    }
    if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: bad / sidecar.d.max(1),
        });
    }
    EmbeddingMatrix::from_vec(sidecar.n, sidecar.d, data)
}
