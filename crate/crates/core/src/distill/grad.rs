//! Exact gradients of the batch loss by manual backpropagation
//! through the projection and the max-pool.

use crate::augment::SentencePair;
use crate::distill::loss::squared_distance;
use crate::distill::model::Student;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::{cast, Scalar};

/// Gradients of the batch loss with respect to every parameter,
/// alongside the loss itself (computed in the same pass).
#[derive(Debug, Clone)]
pub struct Gradients<T> {
    /// Same layout as the model's feature table.
    pub table: Vec<T>,
    /// Same layout as the model's projection.
    pub projection: Vec<T>,
    pub loss: T,
}

impl<T: Scalar> Gradients<T> {
    /// Euclidean norm over all gradient entries (table and projection
    /// jointly).
    pub fn global_norm(&self) -> T {
        let sum: T = self
            .table
            .iter()
            .chain(&self.projection)
            .map(|&g| g * g)
            .sum();
        sum.sqrt()
    }

    /// Scales every entry in place.
    pub fn scale(&mut self, factor: T) {
        for g in self.table.iter_mut().chain(&mut self.projection) {
            *g *= factor;
        }
    }
}

/// Computes the exact gradient of the summed batch loss. Each pair
/// contributes two terms — the standard sentence and the noisy one —
/// both targeting the teacher's standard-sentence row. The max-pool
/// routes its subgradient to the feature that won each coordinate
/// (lowest feature id on ties, matching the forward pass).
pub fn gradients<T: Scalar>(
    model: &Student<T>,
    batch: &[SentencePair],
    teacher: &EmbeddingMatrix<T>,
) -> Result<Gradients<T>> {
    if teacher.n() != batch.len() {
        return Err(Error::shape(format!(
            "teacher rows ({}) do not align with batch size ({})",
            teacher.n(),
            batch.len()
        )));
    }
    let config = model.config();
    if teacher.d() != config.out_dim {
        return Err(Error::shape(format!(
            "teacher dimension {} does not match model output dimension {}",
            teacher.d(),
            config.out_dim
        )));
    }
    let h = config.hidden;
    let d = config.out_dim;
    let mut grads = Gradients {
        table: vec![T::zero(); config.buckets * h],
        projection: vec![T::zero(); d * h],
        loss: T::zero(),
    };
    let two: T = cast(2.0);
    for (i, pair) in batch.iter().enumerate() {
        let target = teacher.row(i);
        for sentence in [pair.std.as_str(), pair.ugc.as_str()] {
            let pooled = model.pool(sentence);
            let (hidden, winners) = match &pooled {
                Some((p, w)) => (p.as_slice(), Some(w)),
                None => (&[] as &[T], None),
            };
            let out = if hidden.is_empty() {
                vec![T::zero(); d]
            } else {
                model.project(hidden)
            };
            grads.loss += squared_distance(&out, target);
            // dL/d(out_j) = 2 (out_j - target_j)
            let g_out: Vec<T> = out
                .iter()
                .zip(target)
                .map(|(&o, &t)| two * (o - t))
                .collect();
            let Some(winners) = winners else {
                // No features: out does not depend on any parameter.
                continue;
            };
            for (j, &gj) in g_out.iter().enumerate() {
                let gp_row = &mut grads.projection[j * h..(j + 1) * h];
                for c in 0..h {
                    gp_row[c] += gj * hidden[c];
                }
            }
            for c in 0..h {
                let mut back = T::zero();
                for j in 0..d {
                    back += model.projection[j * h + c] * g_out[j];
                }
                grads.table[winners[c] * h + c] += back;
            }
        }
    }
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::TransformId;
    use crate::distill::features::{FeatureMode, StudentConfig};
    use crate::distill::loss::mse_sum_loss;
    use crate::rng::Pcg32;

    fn pair(std: &str, ugc: &str) -> SentencePair {
        SentencePair {
            std: std.to_string(),
            ugc: ugc.to_string(),
            applied: Vec::<TransformId>::new(),
        }
    }

    fn batch_loss(model: &Student<f64>, batch: &[SentencePair], teacher: &EmbeddingMatrix<f64>) -> f64 {
        let mut outs = Vec::new();
        let mut targets = Vec::new();
        for (i, p) in batch.iter().enumerate() {
            for s in [&p.std, &p.ugc] {
                outs.push(model.encode(s));
                targets.push(teacher.row(i).to_vec());
            }
        }
        mse_sum_loss(&outs, &targets).unwrap()
    }

    fn random_setup(seed: u64, mode: FeatureMode) -> (Student<f64>, Vec<SentencePair>, EmbeddingMatrix<f64>) {
        let config = StudentConfig {
            feature_mode: mode,
            buckets: 48,
            hidden: 5,
            out_dim: 3,
            seed,
        };
        let model = Student::new(config).unwrap();
        let words = ["red", "green", "blue", "cyan", "teal", "plum", "sand", "mint"];
        let mut rng = Pcg32::for_item(seed, 77);
        let mut pairs = Vec::new();
        for _ in 0..5 {
            let mut std = String::new();
            let mut ugc = String::new();
            for k in 0..4 {
                if k > 0 {
                    std.push(' ');
                    ugc.push(' ');
                }
                std.push_str(words[rng.next_below(words.len() as u32) as usize]);
                ugc.push_str(words[rng.next_below(words.len() as u32) as usize]);
            }
            pairs.push(pair(&std, &ugc));
        }
        let rows: Vec<Vec<f64>> = (0..pairs.len())
            .map(|_| (0..3).map(|_| rng.next_gaussian()).collect())
            .collect();
        let teacher = EmbeddingMatrix::from_rows(&rows).unwrap();
        (model, pairs, teacher)
    }

    #[test]
    fn zero_loss_means_zero_gradients() {
        let (model, _, _) = random_setup(1, FeatureMode::WordHash);
        let pairs = vec![pair("red green", "red green")];
        let rows = vec![model.encode("red green")];
        let teacher = EmbeddingMatrix::from_rows(&rows).unwrap();
        let g = gradients(&model, &pairs, &teacher).unwrap();
        assert_eq!(g.loss, 0.0);
        assert!(g.table.iter().all(|&v| v == 0.0));
        assert!(g.projection.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn loss_matches_the_forward_pass() {
        let (model, pairs, teacher) = random_setup(2, FeatureMode::WordHash);
        let g = gradients(&model, &pairs, &teacher).unwrap();
        let direct = batch_loss(&model, &pairs, &teacher);
        assert!((g.loss - direct).abs() < 1e-12 * direct.max(1.0));
    }

    #[test]
    fn unselected_features_get_zero_table_gradient() {
        let (model, pairs, teacher) = random_setup(3, FeatureMode::WordHash);
        let g = gradients(&model, &pairs, &teacher).unwrap();
        // Collect every feature id that appears in the batch.
        let mut used = std::collections::HashSet::new();
        for p in &pairs {
            for s in [&p.std, &p.ugc] {
                for id in crate::distill::features::featurize(s, model.config()) {
                    used.insert(id);
                }
            }
        }
        let h = model.config().hidden;
        for b in 0..model.config().buckets {
            if !used.contains(&b) {
                assert!(g.table[b * h..(b + 1) * h].iter().all(|&v| v == 0.0));
            }
        }
        // And something in-batch did receive gradient.
        assert!(g.global_norm() > 0.0);
    }

    #[test]
    fn finite_differences_agree_with_backprop() {
        // Central differences with step 1e-5 on every parameter, for
        // 20 random models across both feature modes. The loss is
        // piecewise smooth; the fixtures keep parameters away from
        // max-pool ties, so the analytic gradient must match closely.
        let step = 1e-5;
        let mut worst: f64 = 0.0;
        for seed in 0..20u64 {
            let mode = if seed % 2 == 0 {
                FeatureMode::WordHash
            } else {
                FeatureMode::CharNgram
            };
            let (mut model, pairs, teacher) = random_setup(seed, mode);
            let g = gradients(&model, &pairs, &teacher).unwrap();
            let scale = g.global_norm().max(1.0);
            let h = model.config().hidden;
            // Probe a deterministic sample of parameters: all of the
            // projection, plus the table rows the batch can touch.
            let mut used: Vec<usize> = pairs
                .iter()
                .flat_map(|p| {
                    let mut ids =
                        crate::distill::features::featurize(&p.std, model.config());
                    ids.extend(crate::distill::features::featurize(&p.ugc, model.config()));
                    ids
                })
                .collect();
            used.sort_unstable();
            used.dedup();
            for &b in &used {
                for c in 0..h {
                    let idx = b * h + c;
                    let orig = model.table[idx];
                    model.table[idx] = orig + step;
                    let up = batch_loss(&model, &pairs, &teacher);
                    model.table[idx] = orig - step;
                    let down = batch_loss(&model, &pairs, &teacher);
                    model.table[idx] = orig;
                    let fd = (up - down) / (2.0 * step);
                    let rel = (fd - g.table[idx]).abs() / scale;
                    worst = worst.max(rel);
                }
            }
            for idx in 0..model.projection.len() {
                let orig = model.projection[idx];
                model.projection[idx] = orig + step;
                let up = batch_loss(&model, &pairs, &teacher);
                model.projection[idx] = orig - step;
                let down = batch_loss(&model, &pairs, &teacher);
                model.projection[idx] = orig;
                let fd = (up - down) / (2.0 * step);
                let rel = (fd - g.projection[idx]).abs() / scale;
                worst = worst.max(rel);
            }
        }
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn pairs_with_empty_sides_contribute_loss_but_no_gradient_blowup() {
        let (model, _, _) = random_setup(4, FeatureMode::WordHash);
        let pairs = vec![pair("", "")];
        let teacher = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let g = gradients(&model, &pairs, &teacher).unwrap();
        // Both sides encode to zero: loss is 2 * |target|^2; the
        // output does not depend on any parameter, so gradients vanish.
        assert!((g.loss - 2.0 * 14.0).abs() < 1e-12);
        assert_eq!(g.global_norm(), 0.0);
    }

    #[test]
    fn misaligned_teacher_is_rejected() {
        let (model, pairs, _) = random_setup(5, FeatureMode::WordHash);
        let wrong_n = EmbeddingMatrix::from_rows(&[vec![0.0; 3]]).unwrap();
        assert!(gradients(&model, &pairs, &wrong_n).is_err());
    }
}
