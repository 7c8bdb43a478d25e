//! Margin-normalized similarity search over pre-aligned bitexts.
//!
//! Raw cosine retrieval suffers from hubness: a few target vectors are
//! near everything and soak up matches. Margin scoring corrects this by
//! normalizing each candidate cosine against the average of its k
//! nearest neighbors on both sides before taking the argmax.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::metrics::cosine::{dot, norm};
use crate::{cast, Scalar};

/// How a candidate cosine is combined with its neighborhood averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginKind {
    /// `cos / (avg_nn_x + avg_nn_y)` — the usual mining criterion.
    Ratio,
    /// `cos - (avg_nn_x + avg_nn_y)` — same ordering logic, additive.
    Distance,
    /// Plain cosine; neighborhoods are ignored.
    Absolute,
}

impl fmt::Display for MarginKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarginKind::Ratio => "ratio",
            MarginKind::Distance => "distance",
            MarginKind::Absolute => "absolute",
        })
    }
}

impl FromStr for MarginKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(MarginKind::Ratio),
            "distance" => Ok(MarginKind::Distance),
            "absolute" => Ok(MarginKind::Absolute),
            other => Err(Error::config(format!(
                "unknown margin kind {other:?}; expected ratio, distance or absolute"
            ))),
        }
    }
}

/// Neighborhood size and scoring variant for the alignment search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginConfig {
    /// Neighbors averaged on each side.
    pub k: usize,
    /// Scoring variant.
    pub kind: MarginKind,
}

impl Default for MarginConfig {
    fn default() -> Self {
        MarginConfig {
            k: 4,
            kind: MarginKind::Ratio,
        }
    }
}

impl MarginConfig {
    /// Checks `k` against the pool sizes it will index into.
    pub fn validate(&self, n_src: usize, n_tgt: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("margin neighborhood size k must be >= 1"));
        }
        let smaller = n_src.min(n_tgt);
        if self.k >= smaller {
            return Err(Error::config(format!(
                "margin k = {} must be smaller than both pools (smaller side has {} rows)",
                self.k, smaller
            )));
        }
        Ok(())
    }
}

/// Margin score for one candidate pair.
///
/// `nn_x` and `nn_y` are the cosines from `x` to its k nearest targets
/// and from `y` to its k nearest sources; both must have exactly
/// `cfg.k` entries. In `Absolute` mode the neighborhoods are ignored
/// (pass empty slices if no search has been run).
pub fn margin_score<T: Scalar>(
    x: &[T],
    y: &[T],
    nn_x: &[T],
    nn_y: &[T],
    cfg: &MarginConfig,
) -> Result<T> {
    let cos = crate::metrics::cosine::cosine_similarity(x, y)?;
    if cfg.kind == MarginKind::Absolute {
        return Ok(cos);
    }
    if nn_x.len() != cfg.k || nn_y.len() != cfg.k {
        return Err(Error::shape(format!(
            "margin neighborhoods must each hold k = {} cosines, got {} and {}",
            cfg.k,
            nn_x.len(),
            nn_y.len()
        )));
    }
    let sum_x = nn_x.iter().copied().fold(T::zero(), |a, b| a + b);
    let sum_y = nn_y.iter().copied().fold(T::zero(), |a, b| a + b);
    Ok(combine(cos, sum_x, sum_y, cfg)?)
}

/// Applies the margin formula given the two neighborhood cosine sums.
fn combine<T: Scalar>(cos: T, nn_sum_x: T, nn_sum_y: T, cfg: &MarginConfig) -> Result<T> {
    let two_k = cast::<T>(2.0 * cfg.k as f64);
    let avg = nn_sum_x / two_k + nn_sum_y / two_k;
    match cfg.kind {
        MarginKind::Absolute => Ok(cos),
        MarginKind::Distance => Ok(cos - avg),
        MarginKind::Ratio => {
            if avg == T::zero() {
                Err(Error::degenerate(
                    "ratio margin denominator is zero (neighborhood cosines cancel)",
                ))
            } else {
                Ok(cos / avg)
            }
        }
    }
}

/// Outcome of aligning each source row against the target pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentResult {
    /// Per-source argmax into the target pool.
    pub best_match: Vec<usize>,
    /// Source indices whose argmax is not their own index, ascending.
    pub errors: Vec<usize>,
}

impl AlignmentResult {
    /// Misalignment percentage in `[0, 100]`.
    pub fn error_rate(&self) -> f64 {
        100.0 * self.errors.len() as f64 / self.best_match.len() as f64
    }
}

/// Sum of the `k` largest values in `row`, added largest-first.
///
/// The descending summation order is part of the numeric contract: a
/// brute-force rescoring that sorts the same way reproduces the sum
/// bit for bit.
fn top_k_sum<T: Scalar>(row: &[T], k: usize) -> T {
    let mut vals = row.to_vec();
    vals.sort_unstable_by(|a, b| b.partial_cmp(a).expect("cosines are finite"));
    vals[..k].iter().copied().fold(T::zero(), |a, b| a + b)
}

/// Aligns every source row to its best-scoring target row.
///
/// Rows are scored with [`margin_score`]'s formula against the full
/// target pool (exact search, no index). The gold alignment is the
/// identity: source `i` should retrieve target `i`, and targets beyond
/// `src.n()` act as distractors. Ties in the argmax resolve to the
/// lowest target index.
///
/// The full cosine matrix is materialized (`src.n() * tgt.n()` values),
/// computed in parallel over blocks of source rows; every per-row
/// reduction has a fixed order, so results are identical for any
/// worker count.
pub fn xsim<T: Scalar>(
    src: &EmbeddingMatrix<T>,
    tgt: &EmbeddingMatrix<T>,
    cfg: &MarginConfig,
) -> Result<AlignmentResult> {
    if src.d() != tgt.d() {
        return Err(Error::shape(format!(
            "source dimension {} != target dimension {}",
            src.d(),
            tgt.d()
        )));
    }
    if tgt.n() < src.n() {
        return Err(Error::shape(format!(
            "target pool ({} rows) cannot be smaller than the source ({} rows)",
            tgt.n(),
            src.n()
        )));
    }
    if cfg.kind != MarginKind::Absolute {
        cfg.validate(src.n(), tgt.n())?;
    }

    let (n_src, n_tgt) = (src.n(), tgt.n());
    let src_norms: Vec<T> = src.rows().map(norm).collect();
    let tgt_norms: Vec<T> = tgt.rows().map(norm).collect();
    if src_norms.iter().chain(&tgt_norms).any(|&n| n <= T::zero()) {
        return Err(Error::degenerate("alignment over a zero-norm row"));
    }

    // Full similarity matrix, row-parallel; each entry clamped exactly
    // as in `cosine_similarity`.
    let mut cos = vec![T::zero(); n_src * n_tgt];
    cos.par_chunks_mut(n_tgt)
        .enumerate()
        .for_each(|(i, out_row)| {
            let u = src.row(i);
            for (j, out) in out_row.iter_mut().enumerate() {
                let c = dot(u, tgt.row(j)) / (src_norms[i] * tgt_norms[j]);
                *out = c.min(T::one()).max(-T::one());
            }
        });

    let best_match = match cfg.kind {
        MarginKind::Absolute => argmax_rows(&cos, n_tgt, |_, _, c| Ok(c))?,
        _ => {
            // Neighborhood sums: k best targets per source row, and k
            // best sources per target column.
            let nn_src: Vec<T> = (0..n_src)
                .into_par_iter()
                .map(|i| top_k_sum(&cos[i * n_tgt..(i + 1) * n_tgt], cfg.k))
                .collect();
            let nn_tgt: Vec<T> = (0..n_tgt)
                .into_par_iter()
                .map(|j| {
                    let col: Vec<T> = (0..n_src).map(|i| cos[i * n_tgt + j]).collect();
                    top_k_sum(&col, cfg.k)
                })
                .collect();
            argmax_rows(&cos, n_tgt, |i, j, c| combine(c, nn_src[i], nn_tgt[j], cfg))?
        }
    };

    let errors: Vec<usize> = best_match
        .iter()
        .enumerate()
        .filter(|&(i, &m)| m != i)
        .map(|(i, _)| i)
        .collect();
    Ok(AlignmentResult { best_match, errors })
}

/// Per-row argmax of `score(i, j, cos[i][j])`, lowest index on ties.
fn argmax_rows<T: Scalar>(
    cos: &[T],
    n_tgt: usize,
    score: impl Fn(usize, usize, T) -> Result<T> + Sync,
) -> Result<Vec<usize>> {
    cos.par_chunks(n_tgt)
        .enumerate()
        .map(|(i, row)| {
            let mut best = 0usize;
            let mut best_score = score(i, 0, row[0])?;
            for (j, &c) in row.iter().enumerate().skip(1) {
                let s = score(i, j, c)?;
                if s > best_score {
                    best = j;
                    best_score = s;
                }
            }
            Ok(best)
        })
        .collect()
}
