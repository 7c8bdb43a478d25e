//! The distillation trainer: Adam with linear warm-up, global-norm
//! gradient clipping, deterministic batch order, and periodic
//! checkpoints scored by validation loss.
//!
//! The trainer runs entirely in 64-bit floats; gradient-check
//! fidelity matters more than speed at this scale.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::SentencePair;
use crate::distill::features::StudentConfig;
use crate::distill::grad::gradients;
use crate::distill::loss::validation_loss;
use crate::distill::model::Student;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rng::Pcg32;
use crate::text::word_tokens;

/// Optimizer and schedule settings.
///
/// Batches are formed by sentence count (`batch_sentences`) unless
/// `max_tokens_per_batch` is set, which switches to a token budget:
/// each batch takes sentences (in the epoch's shuffled order) until
/// the next one would exceed the budget, always at least one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Adam's exponential-decay rates for the first and second moment.
    pub adam_beta: (f64, f64),
    pub adam_eps: f64,
    /// Steps over which the learning rate ramps linearly from zero;
    /// zero means no warm-up.
    pub warmup_steps: usize,
    pub batch_sentences: usize,
    pub max_tokens_per_batch: Option<usize>,
    /// A checkpoint is recorded every this many optimizer steps (and
    /// always after the final step).
    pub checkpoint_every: usize,
    /// Global-norm gradient clipping threshold; must be positive.
    pub clip_norm: f64,
    /// Passes over the training pairs.
    pub epochs: usize,
    /// Governs the per-epoch batch shuffle.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            adam_beta: (0.9, 0.98),
            adam_eps: 1e-6,
            warmup_steps: 10,
            batch_sentences: 16,
            max_tokens_per_batch: None,
            checkpoint_every: 100,
            clip_norm: 5.0,
            epochs: 4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        let (b1, b2) = self.adam_beta;
        if !(0.0..1.0).contains(&b1) || !(0.0..1.0).contains(&b2) {
            return Err(Error::config(format!(
                "adam_beta components must lie in [0, 1), got ({b1}, {b2})"
            )));
        }
        if !(self.adam_eps > 0.0) || !self.adam_eps.is_finite() {
            return Err(Error::config(format!(
                "adam_eps must be positive and finite, got {}",
                self.adam_eps
            )));
        }
        if self.batch_sentences == 0 {
            return Err(Error::config("batch_sentences must be at least 1"));
        }
        if self.max_tokens_per_batch == Some(0) {
            return Err(Error::config("max_tokens_per_batch must be at least 1"));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::config("checkpoint_every must be at least 1"));
        }
        if !(self.clip_norm > 0.0) || !self.clip_norm.is_finite() {
            return Err(Error::config(format!(
                "clip_norm must be positive and finite, got {}",
                self.clip_norm
            )));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1"));
        }
        Ok(())
    }
}

/// A model snapshot taken during training.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub step: usize,
    pub model: Student<f64>,
    /// Two-term loss over the training pairs at this step.
    pub validation_loss: f64,
}

/// Sidecar contents for a stored checkpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub step: usize,
    pub validation_loss: f64,
    pub config_digest: String,
}

/// First- and second-moment estimates for one parameter tensor.
struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }

    /// One bias-corrected update. `correction` holds `(1 - b1^t, 1 - b2^t)`.
    fn update(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        lr: f64,
        beta: (f64, f64),
        eps: f64,
        correction: (f64, f64),
    ) {
        let (b1, b2) = beta;
        let (c1, c2) = correction;
        for ((p, &g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(&mut self.v))
        {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

fn pair_tokens(pair: &SentencePair) -> usize {
    word_tokens(&pair.std).len() + word_tokens(&pair.ugc).len()
}

/// Splits a permuted index list into batches per the config.
fn plan_batches(order: &[usize], pairs: &[SentencePair], tconf: &TrainConfig) -> Vec<Vec<usize>> {
    match tconf.max_tokens_per_batch {
        None => order
            .chunks(tconf.batch_sentences)
            .map(|c| c.to_vec())
            .collect(),
        Some(budget) => {
            let mut batches = Vec::new();
            let mut current = Vec::new();
            let mut used = 0usize;
            for &i in order {
                let t = pair_tokens(&pairs[i]);
                if !current.is_empty() && used + t > budget {
                    batches.push(std::mem::take(&mut current));
                    used = 0;
                }
                current.push(i);
                used += t;
            }
            if !current.is_empty() {
                batches.push(current);
            }
            batches
        }
    }
}

/// Distills `teacher_std` (one row per pair, targets for both the
/// standard and the noisy side) into a fresh student. Returns every
/// recorded checkpoint, in step order; the last one always reflects
/// the final step. Bit-reproducible for a fixed seed, independent of
/// worker count (the step loop is strictly sequential).
pub fn train(
    pairs: &[SentencePair],
    teacher_std: &EmbeddingMatrix<f64>,
    sconf: &StudentConfig,
    tconf: &TrainConfig,
) -> Result<Vec<Checkpoint>> {
    sconf.validate()?;
    tconf.validate()?;
    if pairs.is_empty() {
        return Err(Error::empty("training pairs"));
    }
    if teacher_std.n() != pairs.len() {
        return Err(Error::shape(format!(
            "teacher rows ({}) do not align with training pairs ({})",
            teacher_std.n(),
            pairs.len()
        )));
    }
    if teacher_std.d() != sconf.out_dim {
        return Err(Error::shape(format!(
            "teacher dimension {} does not match out_dim {}",
            teacher_std.d(),
            sconf.out_dim
        )));
    }

    let mut model = Student::<f64>::new(sconf.clone())?;
    let mut table_state = AdamState::new(model.table.len());
    let mut proj_state = AdamState::new(model.projection.len());
    let (b1, b2) = tconf.adam_beta;
    let mut pow_b1 = 1.0;
    let mut pow_b2 = 1.0;
    let mut step = 0usize;
    let mut checkpoints: Vec<Checkpoint> = Vec::new();

    for epoch in 0..tconf.epochs {
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        let mut shuffle_rng = Pcg32::for_item(tconf.seed, epoch as u64);
        shuffle_rng.shuffle(&mut order);
        for batch_idx in plan_batches(&order, pairs, tconf) {
            let batch: Vec<SentencePair> =
                batch_idx.iter().map(|&i| pairs[i].clone()).collect();
            let sub_teacher = teacher_std.select_rows(&batch_idx)?;
            let mut g = gradients(&model, &batch, &sub_teacher)?;
            if !g.loss.is_finite() {
                return Err(Error::NonFiniteLoss {
                    step: step + 1,
                    message: format!("batch loss {} before update", g.loss),
                });
            }
            let norm = g.global_norm();
            if norm > tconf.clip_norm {
                g.scale(tconf.clip_norm / norm);
            }
            step += 1;
            let warm = if tconf.warmup_steps == 0 {
                1.0
            } else {
                (step as f64 / tconf.warmup_steps as f64).min(1.0)
            };
            let lr = tconf.learning_rate * warm;
            pow_b1 *= b1;
            pow_b2 *= b2;
            let correction = (1.0 - pow_b1, 1.0 - pow_b2);
            table_state.update(
                &mut model.table,
                &g.table,
                lr,
                tconf.adam_beta,
                tconf.adam_eps,
                correction,
            );
            proj_state.update(
                &mut model.projection,
                &g.projection,
                lr,
                tconf.adam_beta,
                tconf.adam_eps,
                correction,
            );
            if step % tconf.checkpoint_every == 0 {
                checkpoints.push(snapshot(&model, teacher_std, pairs, step)?);
            }
        }
    }
    if checkpoints.last().map(|c| c.step) != Some(step) {
        checkpoints.push(snapshot(&model, teacher_std, pairs, step)?);
    }
    Ok(checkpoints)
}

fn snapshot(
    model: &Student<f64>,
    teacher_std: &EmbeddingMatrix<f64>,
    pairs: &[SentencePair],
    step: usize,
) -> Result<Checkpoint> {
    let loss = validation_loss(model, teacher_std, pairs)?;
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss {
            step,
            message: format!("validation loss {loss} at checkpoint"),
        });
    }
    Ok(Checkpoint {
        step,
        model: model.clone(),
        validation_loss: loss,
    })
}

/// The checkpoint with the lowest validation loss; the earliest step
/// wins ties.
pub fn select_best_checkpoint(checkpoints: &[Checkpoint]) -> Result<&Checkpoint> {
    let mut best = checkpoints.first().ok_or_else(|| Error::empty("checkpoints"))?;
    for c in &checkpoints[1..] {
        if c.validation_loss < best.validation_loss {
            best = c;
        }
    }
    Ok(best)
}

fn checkpoint_bin(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("ckpt_{step}.bin"))
}

fn checkpoint_meta(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("ckpt_{step}.meta.json"))
}

/// Stores a checkpoint as `ckpt_<step>.bin` plus
/// `ckpt_<step>.meta.json` in `dir`.
pub fn write_checkpoint(dir: &Path, checkpoint: &Checkpoint) -> Result<()> {
    checkpoint.model.save(&checkpoint_bin(dir, checkpoint.step))?;
    let meta = CheckpointMeta {
        step: checkpoint.step,
        validation_loss: checkpoint.validation_loss,
        config_digest: checkpoint.model.config_digest(),
    };
    let path = checkpoint_meta(dir, checkpoint.step);
    let json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

/// Loads one stored checkpoint back, verifying that the sidecar's
/// config digest matches the model file.
pub fn read_checkpoint(dir: &Path, step: usize) -> Result<Checkpoint> {
    let meta_path = checkpoint_meta(dir, step);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: CheckpointMeta = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: meta_path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let model = Student::<f64>::load(&checkpoint_bin(dir, step))?;
    if model.config_digest() != meta.config_digest {
        return Err(Error::Parse {
            path: meta_path,
            line: 0,
            message: format!(
                "config digest mismatch: model {} vs sidecar {}",
                model.config_digest(),
                meta.config_digest
            ),
        });
    }
    Ok(Checkpoint {
        step: meta.step,
        model,
        validation_loss: meta.validation_loss,
    })
}

/// Steps of all checkpoints stored in `dir`, ascending.
pub fn list_checkpoint_steps(dir: &Path) -> Result<Vec<usize>> {
    let mut steps = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(stem) = name.strip_prefix("ckpt_").and_then(|s| s.strip_suffix(".bin")) {
            if let Ok(step) = stem.parse::<usize>() {
                steps.push(step);
            }
        }
    }
    steps.sort_unstable();
    Ok(steps)
}
