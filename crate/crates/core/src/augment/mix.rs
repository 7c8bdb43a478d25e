//! Per-sentence transformation mixing and corpus-scale augmentation.

use rayon::prelude::*;

use super::{MixAllConfig, SentencePair, TransformKind, TransformSpec};
use crate::error::{Error, Result};
use crate::rng::{mix, Pcg32};

/// Rescales a default probability to one of `{p/2, p, 3p/2}` with
/// probabilities `{1/4, 1/2, 1/4}`, clamped to `[0, 1]`. One draw.
pub fn scale_probability(p_default: f64, rng: &mut Pcg32) -> f64 {
    scale_with(
        &MixAllConfig::SCALE_CHOICES,
        &MixAllConfig::SCALE_PROBS,
        p_default,
        rng,
    )
}

/// Rescaling with configurable factors/probabilities. One draw.
pub(crate) fn scale_with(
    choices: &[f64; 3],
    probs: &[f64; 3],
    p_default: f64,
    rng: &mut Pcg32,
) -> f64 {
    let u = rng.next_f64();
    let factor = if u < probs[0] {
        choices[0]
    } else if u < probs[0] + probs[1] {
        choices[1]
    } else {
        choices[2]
    };
    (p_default * factor).clamp(0.0, 1.0)
}

/// Rescales every probability parameter of `spec` using draws from
/// `rng` (in a fixed field order: `p`, then for spacing noise `p_add`
/// before `p_remove`). Always-apply lexical transforms are returned
/// unchanged without consuming draws.
fn rescaled(spec: &TransformSpec, config: &MixAllConfig, rng: &mut Pcg32) -> TransformSpec {
    let kind = match &spec.kind {
        TransformKind::Lexical { lexicon, p: Some(p) } => TransformKind::Lexical {
            lexicon: lexicon.clone(),
            p: Some(scale_with(&config.scale_choices, &config.scale_probs, *p, rng)),
        },
        TransformKind::Lexical { lexicon, p: None } => TransformKind::Lexical {
            lexicon: lexicon.clone(),
            p: None,
        },
        TransformKind::ButterFingers { p, keyboard } => TransformKind::ButterFingers {
            p: scale_with(&config.scale_choices, &config.scale_probs, *p, rng),
            keyboard: keyboard.clone(),
        },
        TransformKind::LeetSpeak { p, map } => TransformKind::LeetSpeak {
            p: scale_with(&config.scale_choices, &config.scale_probs, *p, rng),
            map: map.clone(),
        },
        TransformKind::Whitespace { p_add, p_remove } => TransformKind::Whitespace {
            p_add: scale_with(&config.scale_choices, &config.scale_probs, *p_add, rng),
            p_remove: scale_with(&config.scale_choices, &config.scale_probs, *p_remove, rng),
        },
    };
    TransformSpec { id: spec.id, kind }
}

/// One planned application inside a [`mix_all`] run: the rescaled
/// transformation and the tag of the sub-stream it consumed. Replaying
/// the steps that changed the text reproduces the noisy sentence.
#[derive(Debug, Clone)]
pub struct PlannedStep {
    pub spec: TransformSpec,
    pub stream_tag: u64,
}

/// Applies a random subset of the configured transformations to one
/// sentence, drawing all randomness from `stream` (the sentence's own
/// stream, see [`Pcg32::for_item`]).
///
/// Steps, in draw order: select each transformation with probability
/// `p_all`; shuffle the selection; rescale probability parameters;
/// apply in shuffled order, each on its own derived sub-stream (tagged
/// by the transformation's ordinal, so the sub-stream is independent
/// of application order). `applied` records, in application order,
/// the transformations that actually changed the text.
pub fn mix_all(sentence: &str, config: &MixAllConfig, stream: &mut Pcg32) -> SentencePair {
    mix_all_traced(sentence, config, stream).0
}

/// [`mix_all`] plus the full plan, for replay and inspection.
pub fn mix_all_traced(
    sentence: &str,
    config: &MixAllConfig,
    stream: &mut Pcg32,
) -> (SentencePair, Vec<PlannedStep>) {
    let mut selected: Vec<&TransformSpec> = config
        .transforms
        .iter()
        .filter(|_| stream.bernoulli(config.p_all))
        .collect();
    stream.shuffle(&mut selected);
    let plan: Vec<PlannedStep> = selected
        .into_iter()
        .map(|spec| PlannedStep {
            spec: rescaled(spec, config, stream),
            stream_tag: spec.id.ordinal(),
        })
        .collect();

    let mut current = sentence.to_string();
    let mut applied = Vec::new();
    for step in &plan {
        let mut sub = stream.derive(step.stream_tag);
        let next = step.spec.apply(&current, &mut sub);
        if next != current {
            applied.push(step.spec.id);
            current = next;
        }
    }
    (
        SentencePair {
            std: sentence.to_string(),
            ugc: current,
            applied,
        },
        plan,
    )
}

/// Augments a corpus in deterministic chunks.
///
/// The corpus is split into chunks of `chunk_size` sentences; chunk
/// `k` derives its seed as `mix(global_seed, k)`, and each sentence
/// gets its own stream from its index within the chunk. Output is
/// therefore identical regardless of scheduling or worker count, and
/// chunks are processed in parallel.
pub fn augment_corpus(
    corpus: &[String],
    config: &MixAllConfig,
    chunk_size: usize,
) -> Result<Vec<SentencePair>> {
    if chunk_size == 0 {
        return Err(Error::config("chunk_size must be at least 1"));
    }
    config.validate()?;
    let chunks: Vec<(usize, &[String])> = corpus.chunks(chunk_size).enumerate().collect();
    let nested: Vec<Vec<SentencePair>> = chunks
        .into_par_iter()
        .map(|(k, chunk)| {
            let chunk_seed = mix(config.global_seed, k as u64);
            chunk
                .iter()
                .enumerate()
                .map(|(j, sentence)| {
                    let mut stream = Pcg32::for_item(chunk_seed, j as u64);
                    mix_all(sentence, config, &mut stream)
                })
                .collect()
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}
