//! Synthetic user-generated-content augmentation.
//!
//! Twelve transformation families turn clean English into the kind of
//! text people actually type: slang and business abbreviations,
//! contractions, dyslexia-style and common misspellings, fat-finger
//! typos, homophone swaps, leetspeak, spacing noise, and calendar
//! abbreviations. [`mix_all`] composes a random subset of them per
//! sentence; [`augment_corpus`] scales that to whole corpora with
//! order-independent, worker-count-independent randomness.

mod data;
mod lexicon;
mod mix;
mod transforms;

pub use data::{
    builtin_lexicon, default_transforms, default_transforms_from_dir, lexicon_direction,
};
pub use lexicon::{apply_lexical, Direction, Lexicon, LexiconEntry};
pub use mix::{augment_corpus, mix_all, mix_all_traced, scale_probability, PlannedStep};
pub use transforms::{butter_fingers, leet, whitespace_perturb, KeyboardMap, LeetMap};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::Pcg32;

/// Identifier of one transformation family, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransformId {
    /// Web slang abbreviations (`people` -> `ppl`).
    Abr1,
    /// Generic and social-media abbreviations (`to` -> `2`).
    Abr2,
    /// Business abbreviations, both directions (`as soon as possible` <-> `ASAP`).
    Abr3,
    /// Contractions, both directions (`I am` <-> `I'm`).
    Cont,
    /// Dyslexia-style misspellings (`their` -> `thier`).
    Dysl,
    /// Fat-finger keyboard typos (`tried` -> `triwd`).
    Fing,
    /// Homophone swaps (`there` -> `their`).
    Homo,
    /// Leetspeak glyphs (`love` -> `l0V3`).
    Leet,
    /// Slang word substitutions (`friend` -> `homie`).
    Slng,
    /// Whitespace insertion/removal.
    Spac,
    /// Common misspellings (`tomorrow` -> `tommorow`).
    Spel,
    /// Weekday/month abbreviations, both directions (`Monday` <-> `Mon.`).
    Week,
}

impl TransformId {
    /// All families in canonical order.
    pub const ALL: [TransformId; 12] = [
        TransformId::Abr1,
        TransformId::Abr2,
        TransformId::Abr3,
        TransformId::Cont,
        TransformId::Dysl,
        TransformId::Fing,
        TransformId::Homo,
        TransformId::Leet,
        TransformId::Slng,
        TransformId::Spac,
        TransformId::Spel,
        TransformId::Week,
    ];

    /// Canonical lowercase name.
    pub fn as_str(self) -> &'static str {
        match self {
            TransformId::Abr1 => "abr1",
            TransformId::Abr2 => "abr2",
            TransformId::Abr3 => "abr3",
            TransformId::Cont => "cont",
            TransformId::Dysl => "dysl",
            TransformId::Fing => "fing",
            TransformId::Homo => "homo",
            TransformId::Leet => "leet",
            TransformId::Slng => "slng",
            TransformId::Spac => "spac",
            TransformId::Spel => "spel",
            TransformId::Week => "week",
        }
    }

    /// Position in [`TransformId::ALL`]; doubles as the sub-stream tag
    /// so per-transform randomness is independent of application order.
    pub fn ordinal(self) -> u64 {
        TransformId::ALL
            .iter()
            .position(|t| *t == self)
            .expect("id is in ALL") as u64
    }
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformId::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = TransformId::ALL.iter().map(|t| t.as_str()).collect();
                Error::config(format!(
                    "unknown transformation id {s:?}; valid ids: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// The mechanics behind one transformation, with its parameters.
#[derive(Debug, Clone)]
pub enum TransformKind {
    /// Dictionary replacement; `p = None` replaces every occurrence.
    Lexical {
        lexicon: Arc<Lexicon>,
        p: Option<f64>,
    },
    /// Keyboard-neighbor typos with per-character probability `p`.
    ButterFingers { p: f64, keyboard: Arc<KeyboardMap> },
    /// Leet glyphs with per-character probability `p`.
    LeetSpeak { p: f64, map: Arc<LeetMap> },
    /// Space insertion/removal probabilities.
    Whitespace { p_add: f64, p_remove: f64 },
}

/// One configured transformation: identifier plus mechanics.
#[derive(Debug, Clone)]
pub struct TransformSpec {
    pub id: TransformId,
    pub kind: TransformKind,
}

fn check_probability(name: &str, id: TransformId, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::config(format!(
            "{id}: probability {name} must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

impl TransformSpec {
    /// Validates probability domains.
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            TransformKind::Lexical { p: Some(p), .. } => check_probability("p", self.id, *p),
            TransformKind::Lexical { p: None, .. } => Ok(()),
            TransformKind::ButterFingers { p, .. } => check_probability("p", self.id, *p),
            TransformKind::LeetSpeak { p, .. } => check_probability("p", self.id, *p),
            TransformKind::Whitespace { p_add, p_remove } => {
                check_probability("p_add", self.id, *p_add)?;
                check_probability("p_remove", self.id, *p_remove)
            }
        }
    }

    /// Applies this transformation with draws from `rng`.
    pub fn apply(&self, sentence: &str, rng: &mut Pcg32) -> String {
        match &self.kind {
            TransformKind::Lexical { lexicon, p } => apply_lexical(sentence, lexicon, *p, rng),
            TransformKind::ButterFingers { p, keyboard } => {
                butter_fingers(sentence, *p, keyboard, rng)
            }
            TransformKind::LeetSpeak { p, map } => leet(sentence, *p, map, rng),
            TransformKind::Whitespace { p_add, p_remove } => {
                whitespace_perturb(sentence, *p_add, *p_remove, rng)
            }
        }
    }

    /// True when this transformation has probability parameters that
    /// participate in per-sentence rescaling.
    pub fn is_probability_parameterized(&self) -> bool {
        !matches!(self.kind, TransformKind::Lexical { p: None, .. })
    }
}

/// A sentence with its noisy counterpart and the edits that produced
/// it (`applied` lists, in application order, only transformations
/// that actually changed the text).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub std: String,
    pub ugc: String,
    pub applied: Vec<TransformId>,
}

/// Configuration for [`mix_all`].
///
/// Per sentence: each transformation is independently selected with
/// probability `p_all`; the selected subset is applied in a uniformly
/// shuffled order; every probability parameter `p` is first rescaled
/// to `scale_choices[i] * p` with probability `scale_probs[i]`
/// (clamped to `[0, 1]`).
#[derive(Debug, Clone)]
pub struct MixAllConfig {
    pub p_all: f64,
    pub transforms: Vec<TransformSpec>,
    /// Rescaling factors for probability parameters.
    pub scale_choices: [f64; 3],
    /// Probabilities of the three factors; must sum to 1.
    pub scale_probs: [f64; 3],
    pub global_seed: u64,
}

impl MixAllConfig {
    /// Canonical rescaling factors: half, unchanged, one-and-a-half.
    pub const SCALE_CHOICES: [f64; 3] = [0.5, 1.0, 1.5];
    /// Canonical factor probabilities: one quarter, one half, one quarter.
    pub const SCALE_PROBS: [f64; 3] = [0.25, 0.5, 0.25];
    /// Default per-transformation selection probability.
    pub const DEFAULT_P_ALL: f64 = 0.1;

    /// The default configuration: all twelve bundled transformations,
    /// selection probability 0.1, canonical rescaling.
    pub fn with_defaults(global_seed: u64) -> Result<Self> {
        let config = MixAllConfig {
            p_all: Self::DEFAULT_P_ALL,
            transforms: default_transforms(),
            scale_choices: Self::SCALE_CHOICES,
            scale_probs: Self::SCALE_PROBS,
            global_seed,
        };
        config.validate()?;
        Ok(config)
    }

    /// Validates probabilities and id uniqueness.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_all) || self.p_all.is_nan() {
            return Err(Error::config(format!(
                "p_all must lie in [0, 1], got {}",
                self.p_all
            )));
        }
        let sum: f64 = self.scale_probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || self.scale_probs.iter().any(|p| *p < 0.0) {
            return Err(Error::config(format!(
                "scale_probs must be nonnegative and sum to 1, got {:?}",
                self.scale_probs
            )));
        }
        if self.scale_choices.iter().any(|c| *c < 0.0 || c.is_nan()) {
            return Err(Error::config(format!(
                "scale_choices must be nonnegative, got {:?}",
                self.scale_choices
            )));
        }
        let mut ids: Vec<TransformId> = self.transforms.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.transforms.len() {
            return Err(Error::config(
                "transformation ids must be unique within a configuration",
            ));
        }
        for t in &self.transforms {
            t.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_through_strings() {
        for id in TransformId::ALL {
            assert_eq!(id.as_str().parse::<TransformId>().unwrap(), id);
        }
    }

    #[test]
    fn unknown_id_lists_valid_ones() {
        let err = "nope".parse::<TransformId>().unwrap_err().to_string();
        for id in TransformId::ALL {
            assert!(err.contains(id.as_str()), "{err} missing {id}");
        }
    }

    #[test]
    fn probabilities_outside_unit_interval_are_rejected() {
        let spec = TransformSpec {
            id: TransformId::Fing,
            kind: TransformKind::ButterFingers {
                p: 1.5,
                keyboard: Arc::new(KeyboardMap::qwerty()),
            },
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn default_config_is_valid_and_complete() {
        let config = MixAllConfig::with_defaults(0).unwrap();
        assert_eq!(config.transforms.len(), 12);
        let ids: Vec<TransformId> = config.transforms.iter().map(|t| t.id).collect();
        assert_eq!(ids, TransformId::ALL.to_vec());
        assert!((config.p_all - 0.1).abs() < 1e-15);
    }

    #[test]
    fn scale_probs_must_sum_to_one() {
        let mut config = MixAllConfig::with_defaults(0).unwrap();
        config.scale_probs = [0.4, 0.4, 0.4];
        assert!(config.validate().is_err());
    }
}
