//! Feature extraction for the student encoder: sentences become
//! multisets of feature-table ids, either one hashed id per word token
//! or hashed character n-grams of each token.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{fnv1a64, word_tokens};

/// The n-gram orders used in [`FeatureMode::CharNgram`] mode.
pub const NGRAM_ORDERS: [usize; 3] = [3, 4, 5];

/// Granularity of the student's input features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureMode {
    /// One feature per word token: `id = hash(token) mod buckets`.
    WordHash,
    /// Character n-grams (n in 3..=5) of each token wrapped in `<`/`>`
    /// boundary markers, hashed the same way.
    CharNgram,
}

impl FeatureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::WordHash => "word-hash",
            FeatureMode::CharNgram => "char-ngram",
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word-hash" => Ok(FeatureMode::WordHash),
            "char-ngram" => Ok(FeatureMode::CharNgram),
            other => Err(Error::config(format!(
                "unknown feature mode {other:?}; expected word-hash or char-ngram"
            ))),
        }
    }
}

/// Shape and seeding of a student encoder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentConfig {
    pub feature_mode: FeatureMode,
    /// Feature-table size; ids live in `0..buckets`.
    pub buckets: usize,
    /// Feature-vector dimension (rows of the table).
    pub hidden: usize,
    /// Output dimension; must match the teacher's.
    pub out_dim: usize,
    /// Governs parameter initialization.
    pub seed: u64,
}

impl StudentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.buckets == 0 || self.hidden == 0 || self.out_dim == 0 {
            return Err(Error::config(format!(
                "buckets, hidden, and out_dim must all be at least 1, got {}/{}/{}",
                self.buckets, self.hidden, self.out_dim
            )));
        }
        Ok(())
    }
}

fn bucket_of(text: &str, buckets: usize) -> usize {
    (fnv1a64(text.as_bytes()) % buckets as u64) as usize
}

/// Maps a sentence to its feature-id multiset (duplicates preserved,
/// in token order). Empty sentences produce an empty multiset.
pub fn featurize(sentence: &str, config: &StudentConfig) -> Vec<usize> {
    let tokens = word_tokens(sentence);
    let mut ids = Vec::new();
    match config.feature_mode {
        FeatureMode::WordHash => {
            for token in &tokens {
                ids.push(bucket_of(token, config.buckets));
            }
        }
        FeatureMode::CharNgram => {
            for token in &tokens {
                let wrapped: Vec<char> = std::iter::once('<')
                    .chain(token.chars())
                    .chain(std::iter::once('>'))
                    .collect();
                for n in NGRAM_ORDERS {
                    for window in wrapped.windows(n) {
                        let gram: String = window.iter().collect();
                        ids.push(bucket_of(&gram, config.buckets));
                    }
                }
            }
        }
    }
    ids
}
