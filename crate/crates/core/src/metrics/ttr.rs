//! Type/token statistics for comparing noisy and clean corpora.
//!
//! Spelling variation inflates the number of distinct tokens, so the
//! type-token ratio of a noisy corpus divided by that of its clean
//! counterpart is a cheap, model-free noisiness gauge.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::word_tokens;

/// Token-level summary of one corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Sentence count.
    pub n_sentences: usize,
    /// Total token count under the tokenizer used.
    pub n_tokens: usize,
    /// Distinct token count.
    pub n_types: usize,
    /// `n_types / n_tokens`, in `(0, 1]`.
    pub ttr: f64,
}

/// Computes [`CorpusStats`] with the default tokenizer (lowercased
/// maximal alphanumeric runs; whitespace and punctuation delimit).
pub fn ttr<S: AsRef<str>>(corpus: &[S]) -> Result<CorpusStats> {
    ttr_with(corpus, |s| word_tokens(s))
}

/// Computes [`CorpusStats`] under a caller-supplied tokenizer.
pub fn ttr_with<S, F>(corpus: &[S], tokenize: F) -> Result<CorpusStats>
where
    S: AsRef<str>,
    F: Fn(&str) -> Vec<String>,
{
    if corpus.is_empty() {
        return Err(Error::empty("type-token ratio of an empty corpus"));
    }
    let mut n_tokens = 0usize;
    let mut types: HashSet<String> = HashSet::new();
    for sentence in corpus {
        for token in tokenize(sentence.as_ref()) {
            n_tokens += 1;
            types.insert(token);
        }
    }
    if n_tokens == 0 {
        return Err(Error::degenerate(
            "corpus contains no tokens under the chosen tokenizer",
        ));
    }
    Ok(CorpusStats {
        n_sentences: corpus.len(),
        n_tokens,
        n_types: types.len(),
        ttr: types.len() as f64 / n_tokens as f64,
    })
}

/// Ratio of two type-token ratios (noisy over clean); > 1 means the
/// noisy rendering is lexically more dispersed.
pub fn ttr_ratio(ugc: &CorpusStats, std: &CorpusStats) -> f64 {
    ugc.ttr / std.ttr
}
