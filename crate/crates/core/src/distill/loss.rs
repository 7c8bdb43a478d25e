//! Sum-reduced MSE between student and teacher embeddings, and the
//! two-term validation loss over development pairs.

use crate::augment::SentencePair;
use crate::distill::model::Student;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::Scalar;

pub(crate) fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let r = x - y;
            r * r
        })
        .sum()
}

/// Sum over the batch, then over dimensions, of squared differences.
/// Zero exactly when the batches are elementwise equal.
pub fn mse_sum_loss<T: Scalar>(student_out: &[Vec<T>], teacher_out: &[Vec<T>]) -> Result<T> {
    if student_out.len() != teacher_out.len() {
        return Err(Error::shape(format!(
            "batch sizes differ: {} vs {}",
            student_out.len(),
            teacher_out.len()
        )));
    }
    let mut total = T::zero();
    for (i, (s, t)) in student_out.iter().zip(teacher_out).enumerate() {
        if s.len() != t.len() {
            return Err(Error::shape(format!(
                "batch entry {i} dimensions differ: {} vs {}",
                s.len(),
                t.len()
            )));
        }
        total += squared_distance(s, t);
    }
    Ok(total)
}

/// The two-term development loss: for each pair the teacher's
/// standard-sentence embedding is the target of both the student's
/// standard encoding and its noisy encoding, each term sum-reduced
/// over the whole set. When every pair has `ugc == std`, the result
/// is exactly twice the first term.
pub fn validation_loss<T: Scalar>(
    model: &Student<T>,
    teacher_std: &EmbeddingMatrix<T>,
    dev_pairs: &[SentencePair],
) -> Result<T> {
    if teacher_std.n() != dev_pairs.len() {
        return Err(Error::shape(format!(
            "teacher rows ({}) do not align with dev pairs ({})",
            teacher_std.n(),
            dev_pairs.len()
        )));
    }
    if teacher_std.d() != model.config().out_dim {
        return Err(Error::shape(format!(
            "teacher dimension {} does not match model output dimension {}",
            teacher_std.d(),
            model.config().out_dim
        )));
    }
    let mut std_term = T::zero();
    for (i, pair) in dev_pairs.iter().enumerate() {
        std_term += squared_distance(&model.encode(&pair.std), teacher_std.row(i));
    }
    let mut ugc_term = T::zero();
    for (i, pair) in dev_pairs.iter().enumerate() {
        ugc_term += squared_distance(&model.encode(&pair.ugc), teacher_std.row(i));
    }
    Ok(std_term + ugc_term)
}
