//! Cosine similarity and distance over embedding rows.
//!
//! All dot products and norms accumulate left-to-right in the order the
//! coordinates are stored, so every caller — including the blocked
//! nearest-neighbor search and its brute-force counterpart in the test
//! suite — produces bit-identical values for the same inputs.

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::{cast, Scalar};

/// Plain sequential dot product (fixed summation order).
pub(crate) fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = T::zero();
    for (a, b) in u.iter().zip(v) {
        acc += *a * *b;
    }
    acc
}

/// Euclidean norm of a vector.
pub(crate) fn norm<T: Scalar>(u: &[T]) -> T {
    dot(u, u).sqrt()
}

/// Cosine of the angle between `u` and `v`, clamped into `[-1, 1]` so
/// rounding can never push a downstream distance out of range.
///
/// Errors on zero-norm input, for which the angle is undefined.
pub fn cosine_similarity<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::shape(format!(
            "cosine over vectors of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu <= T::zero() || nv <= T::zero() {
        return Err(Error::degenerate("cosine of a zero-norm vector"));
    }
    let cos = dot(u, v) / (nu * nv);
    Ok(cos.min(T::one()).max(-T::one()))
}

/// Cosine distance `1 - cos(u, v)`, in `[0, 2]`: 0 for parallel
/// vectors, 1 for orthogonal, 2 for antipodal.
pub fn cosine_distance<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    Ok(T::one() - cosine_similarity(u, v)?)
}

/// Mean cosine distance between corresponding rows of `a` and `b`.
///
/// Row `i` of each matrix must embed the same sentence in its
/// respective rendering; the result is the average disagreement.
pub fn avg_pairwise_cosine_distance<T: Scalar>(
    a: &EmbeddingMatrix<T>,
    b: &EmbeddingMatrix<T>,
) -> Result<T> {
    if a.n() != b.n() || a.d() != b.d() {
        return Err(Error::shape(format!(
            "paired distance over {} x {} vs {} x {}",
            a.n(),
            a.d(),
            b.n(),
            b.d()
        )));
    }
    let mut total = T::zero();
    for (u, v) in a.rows().zip(b.rows()) {
        total += cosine_distance(u, v)?;
    }
    Ok(total / cast::<T>(a.n() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_vectors_have_near_zero_distance() {
        // sqrt(dot(u, u)) squared differs from dot(u, u) by at most one
        // ulp, so the self-distance is tiny but not always exactly zero.
        let u = [0.3, -1.2, 4.5];
        let d: f64 = cosine_distance(&u, &u).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn antipodal_vectors_have_distance_two() {
        let u = [0.3, -1.2, 4.5];
        let v: Vec<f64> = u.iter().map(|x| -x).collect();
        assert_eq!(cosine_distance(&u, &v).unwrap(), 2.0);
    }

    #[test]
    fn orthonormal_basis_vectors_have_distance_one() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert_eq!(cosine_distance(&e1, &e2).unwrap(), 1.0);
    }

    #[test]
    fn scale_invariance() {
        let u = [0.5, 2.0, -3.0, 0.25];
        let v = [1.0, -1.0, 0.5, 2.0];
        let scaled: Vec<f64> = u.iter().map(|x| x * 7.25).collect();
        let d1 = cosine_distance(&u, &v).unwrap();
        let d2 = cosine_distance(&scaled[..], &v).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
        assert!(cosine_distance(&u, &scaled[..]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn symmetry() {
        let u = [0.1, 0.9, -0.4];
        let v = [2.0, -0.3, 0.8];
        assert_eq!(
            cosine_distance(&u, &v).unwrap(),
            cosine_distance(&v, &u).unwrap()
        );
    }

    #[test]
    fn zero_norm_is_degenerate() {
        let z = [0.0, 0.0];
        let u = [1.0, 0.0];
        assert!(matches!(
            cosine_distance(&z, &u),
            Err(Error::DegenerateInput { .. })
        ));
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        assert!(matches!(
            cosine_distance(&[1.0, 0.0][..], &[1.0, 0.0, 0.0][..]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn avg_pairwise_of_matrix_with_itself_is_near_zero() {
        let m = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap();
        let d: f64 = avg_pairwise_cosine_distance(&m, &m).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn avg_pairwise_identical_plus_antipodal_row_is_one() {
        let a = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap();
        let b = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, -0.5]]).unwrap();
        assert_eq!(avg_pairwise_cosine_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn avg_pairwise_shape_mismatch() {
        let a = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let b = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(matches!(
            avg_pairwise_cosine_distance(&a, &b),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let u = [1.0f32, 0.0];
        let v = [0.0f32, 1.0];
        assert_eq!(cosine_distance(&u, &v).unwrap(), 1.0f32);
    }
}
