//! Desk-scale toolkit for studying how sentence encoders cope with
//! noisy, user-generated text.
//!
//! The crate has four pillars:
//!
//! - [`augment`] — turns clean English sentences into realistic
//!   user-generated-content variants (abbreviations, typos, leetspeak,
//!   spacing noise, ...) with fully reproducible randomness.
//! - [`metrics`] — cosine and margin-based bitext mining scores,
//!   hard-negative generation, lexical diversity, significance tests,
//!   and 2-D projections for inspecting embedding spaces.
//! - [`distill`] — a small hashed-feature student encoder trained to
//!   imitate a frozen teacher on both clean and noisy inputs.
//! - [`corpus_io`] — text normalization, filtering, sentence
//!   splitting, and the binary embedding interchange format.
//!
//! Numeric code is generic over the scalar type through [`Scalar`]
//! (a [`num_traits::Float`] bound), with the concrete aliases
//! [`Embeddings`], [`RawEmbeddings`] and [`StudentModel`] covering the
//! two precisions that actually occur: 32-bit on disk, 64-bit in
//! computation.
//!
//! # Quick start
//!
//! ```
//! use ugcbench_core::augment::{mix_all, MixAllConfig};
//! use ugcbench_core::rng::Pcg32;
//!
//! let config = MixAllConfig::with_defaults(7).unwrap();
//! let mut stream = Pcg32::for_item(config.global_seed, 0);
//! let pair = mix_all("See you tomorrow because I am busy!", &config, &mut stream);
//! assert_eq!(pair.std, "See you tomorrow because I am busy!");
//! // `pair.ugc` holds the noisy variant, `pair.applied` the edits made.
//! ```

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, NumAssign};

pub mod augment;
pub mod corpus_io;
pub mod distill;
pub mod embedding;
pub mod error;
pub mod metrics;
pub mod rng;
pub mod text;

pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};

/// Floating-point scalar the numeric core is generic over.
///
/// Implemented by `f32` and `f64`; blanket-implemented for anything
/// satisfying the bounds, so downstream crates can plug in their own
/// float types.
pub trait Scalar:
    Float + NumAssign + Sum<Self> + Send + Sync + fmt::Debug + fmt::Display + 'static
{
}

impl<T> Scalar for T where
    T: Float + NumAssign + Sum<Self> + Send + Sync + fmt::Debug + fmt::Display + 'static
{
}

/// Casts an `f64` constant into the working scalar type.
pub(crate) fn cast<T: Scalar>(x: f64) -> T {
    T::from(x).expect("constant not representable in scalar type")
}

/// Working-precision embedding matrix (all in-memory math).
pub type Embeddings = EmbeddingMatrix<f64>;

/// Interchange-precision embedding matrix (the on-disk payload).
pub type RawEmbeddings = EmbeddingMatrix<f32>;

/// Working-precision student encoder.
pub type StudentModel = distill::Student<f64>;
