//! Evaluation metrics for embedding quality and corpus noisiness.
//!
//! The submodules cover four angles on "how well does an encoder cope
//! with noisy text":
//!
//! - [`cosine`]: how far apart are the noisy and clean embeddings of
//!   the same sentence;
//! - [`margin`]: can the clean counterpart be retrieved from a pool of
//!   candidates ([`xsim`]), optionally stress-tested with [`hardneg`]'s
//!   meaning-flipping distractors;
//! - [`ttr`]: lexical-diversity statistics of the raw text;
//! - [`stats`] and [`pca`]: significance tests, rank correlations, and
//!   2-D projections for reporting the above.

pub mod cosine;
pub mod hardneg;
pub mod margin;
pub mod pca;
pub mod stats;
pub mod ttr;

pub use cosine::{avg_pairwise_cosine_distance, cosine_distance, cosine_similarity};
pub use hardneg::{
    build_hard_negatives, perturb_causality, perturb_entities, perturb_numbers, Gazetteer,
    GazetteerEntry, HardNegativeSet, DEFAULT_PER_PERTURBER,
};
pub use margin::{margin_score, xsim, AlignmentResult, MarginConfig, MarginKind};
pub use pca::{distance_preservation, pca_2d, Pca2d};
pub use stats::{
    average_precision, pearson, quantiles, significance_stars, spearman, welch_t_test, TTest,
};
pub use ttr::{ttr, ttr_ratio, ttr_with, CorpusStats};
