//! A deterministic stand-in teacher: a frozen random linear map
//! applied to a hashed bag-of-tokens, so any corpus gets reproducible
//! "reference" embeddings without a real pretrained encoder.

use rayon::prelude::*;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rng::Pcg32;
use crate::text::{fnv1a64, word_tokens};

/// Bag-of-tokens bucket count for [`SyntheticTeacher`].
pub const TEACHER_BUCKETS: usize = 256;

/// A frozen sentence encoder: `embed(s) = M * bag(s)` where `M` is a
/// fixed Gaussian `d x TEACHER_BUCKETS` matrix drawn from the seed and
/// `bag` counts hashed word tokens. Bucket 0 always receives an extra
/// count (a bias term), so no sentence — not even an empty one — maps
/// to the zero vector.
#[derive(Debug, Clone)]
pub struct SyntheticTeacher {
    /// `d x TEACHER_BUCKETS`, row-major.
    map: Vec<f64>,
    d: usize,
}

impl SyntheticTeacher {
    pub fn new(seed: u64, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::config("teacher dimension must be at least 1"));
        }
        let mut rng = Pcg32::for_item(seed, 2);
        let scale = 1.0 / (TEACHER_BUCKETS as f64).sqrt();
        let map = (0..d * TEACHER_BUCKETS)
            .map(|_| rng.next_gaussian() * scale)
            .collect();
        Ok(SyntheticTeacher { map, d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Embeds one sentence; deterministic in `(seed, sentence)` and
    /// invariant under token permutation.
    pub fn encode(&self, sentence: &str) -> Vec<f64> {
        let mut counts = vec![0u32; TEACHER_BUCKETS];
        for token in word_tokens(sentence) {
            counts[(fnv1a64(token.as_bytes()) % TEACHER_BUCKETS as u64) as usize] += 1;
        }
        counts[0] += 1;
        (0..self.d)
            .map(|j| {
                let row = &self.map[j * TEACHER_BUCKETS..(j + 1) * TEACHER_BUCKETS];
                counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(b, &c)| row[b] * f64::from(c))
                    .sum()
            })
            .collect()
    }

    /// Embeds a corpus row-per-sentence (parallel; output independent
    /// of worker count).
    pub fn encode_corpus<S: AsRef<str> + Sync>(
        &self,
        sentences: &[S],
    ) -> Result<EmbeddingMatrix<f64>> {
        let rows: Vec<Vec<f64>> = sentences
            .par_iter()
            .map(|s| self.encode(s.as_ref()))
            .collect();
        EmbeddingMatrix::from_rows(&rows)
    }
}
