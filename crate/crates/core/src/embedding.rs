//! Dense row-major embedding matrices, generic over the scalar type.

use crate::error::{Error, Result};
use crate::Scalar;

/// An `n x d` matrix of finite values; row `i` is the embedding of
/// sentence `i`.
///
/// Construction validates shape (`n >= 1`, `d >= 1`) and finiteness,
/// so downstream numeric code can assume both.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T> {
    n: usize,
    d: usize,
    data: Vec<T>,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    /// Builds a matrix from a flat row-major buffer.
    pub fn from_vec(n: usize, d: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::shape(format!(
                "embedding matrix must have n >= 1 and d >= 1, got {n} x {d}"
            )));
        }
        if data.len() != n * d {
            return Err(Error::shape(format!(
                "buffer holds {} values but {n} x {d} requires {}",
                data.len(),
                n * d
            )));
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: bad / d });
        }
        Ok(EmbeddingMatrix { n, d, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::empty("embedding matrix needs at least one row"));
        }
        let d = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::shape(format!(
                    "row {i} has {} values, expected {d}",
                    row.len()
                )));
            }
        }
        let data: Vec<T> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingMatrix::from_vec(n, d, data)
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    /// Iterator over all rows.
    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.d)
    }

    /// Flat row-major view of the payload.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Takes `rows` (by index) into a new matrix.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * self.d);
        for &i in rows {
            if i >= self.n {
                return Err(Error::shape(format!(
                    "row index {i} out of range for {} rows",
                    self.n
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        EmbeddingMatrix::from_vec(rows.len(), self.d, data)
    }

    /// Stacks `other` below `self` (same width required).
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::shape(format!(
                "cannot stack widths {} and {}",
                self.d, other.d
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        EmbeddingMatrix::from_vec(self.n + other.n, self.d, data)
    }
}

impl EmbeddingMatrix<f32> {
    /// Widens the payload to 64-bit for numerically sensitive work.
    pub fn to_f64(&self) -> EmbeddingMatrix<f64> {
        EmbeddingMatrix {
            n: self.n,
            d: self.d,
            data: self.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

impl EmbeddingMatrix<f64> {
    /// Narrows to the 32-bit interchange format (round to nearest even).
    pub fn to_f32(&self) -> EmbeddingMatrix<f32> {
        EmbeddingMatrix {
            n: self.n,
            d: self.d,
            data: self.data.iter().map(|&v| v as f32).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_rows() {
        let m = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.d(), 2);
        assert_eq!(m.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(EmbeddingMatrix::<f64>::from_rows(&[]).is_err());
        assert!(EmbeddingMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(EmbeddingMatrix::<f64>::from_vec(0, 3, vec![]).is_err());
        assert!(EmbeddingMatrix::from_vec(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn rejects_non_finite_with_row_index() {
        let err =
            EmbeddingMatrix::from_vec(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]).unwrap_err();
        match err {
            crate::Error::NonFinite { row } => assert_eq!(row, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn widen_then_narrow_is_identity_for_f32_payloads() {
        let m = EmbeddingMatrix::from_vec(1, 3, vec![0.5f32, -2.25, 1e-20]).unwrap();
        assert_eq!(m.to_f64().to_f32(), m);
    }

    #[test]
    fn vstack_appends_rows() {
        let a = EmbeddingMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let b = EmbeddingMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let s = a.vstack(&b).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.row(2), &[2.0, 2.0]);
    }
}
