//! Two-component PCA for eyeballing embedding spaces, plus a rank
//! statistic quantifying how faithful the flattening is.
//!
//! The eigenproblem is solved with cyclic Jacobi rotations — exact
//! enough at desk scale, dependency-free, and deterministic. When the
//! dimension exceeds the row count the smaller Gram matrix is
//! decomposed instead and its eigenvectors are mapped back, so the
//! cost is `O(min(n, d)^3)` per sweep.

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::metrics::stats::spearman;
use crate::{cast, Scalar};

/// A 2-D projection with its variance bookkeeping.
#[derive(Debug, Clone)]
pub struct Pca2d<T> {
    /// Projected rows, one `[x, y]` per input row.
    pub points: Vec<[T; 2]>,
    /// Variance along each principal direction, non-increasing.
    pub explained_variance: [T; 2],
    /// Total variance of the (centered) input.
    pub total_variance: T,
    /// The two principal directions in the original space, unit length
    /// (all-zero when the data has no second direction of variance).
    pub directions: [Vec<T>; 2],
}

impl<T: Scalar> Pca2d<T> {
    /// Fraction of total variance captured by each component.
    pub fn explained_variance_ratio(&self) -> [T; 2] {
        [
            self.explained_variance[0] / self.total_variance,
            self.explained_variance[1] / self.total_variance,
        ]
    }
}

/// Jacobi eigendecomposition of a symmetric `n x n` matrix (row-major).
///
/// Returns eigenvalues and the matching eigenvectors as columns of a
/// row-major `n x n` matrix. Deterministic: fixed sweep order, fixed
/// iteration cap.
fn jacobi_eigen<T: Scalar>(mut a: Vec<T>, n: usize) -> (Vec<T>, Vec<T>) {
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    if n == 1 {
        return (a, v);
    }
    let scale: T = a.iter().map(|x| *x * *x).sum::<T>().sqrt().max(T::min_positive_value());
    let tol = T::epsilon() * T::epsilon() * scale * scale;
    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (cast::<T>(2.0) * apq);
                let t = {
                    let sign = if theta < T::zero() { -T::one() } else { T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[p * n + k] = a[k * n + p];
                    a[k * n + q] = s * akp + c * akq;
                    a[q * n + k] = a[k * n + q];
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    (eigenvalues, v)
}

/// Flips `direction` (and the matching projected coordinate) so its
/// largest-magnitude entry is positive; first index wins magnitude
/// ties. Keeps repeated runs and mirrored inputs comparable.
fn fix_sign<T: Scalar>(direction: &mut [T], coords: &mut [T]) {
    let mut best = 0usize;
    for (i, x) in direction.iter().enumerate() {
        if x.abs() > direction[best].abs() {
            best = i;
        }
    }
    if direction[best] < T::zero() {
        for x in direction.iter_mut() {
            *x = -*x;
        }
        for x in coords.iter_mut() {
            *x = -*x;
        }
    }
}

/// Projects `e` onto its top two principal directions.
///
/// Rows are centered first; directions come from the covariance
/// spectrum (or the Gram dual when `d > n`). Requires at least three
/// rows, at least two columns, and some variance.
pub fn pca_2d<T: Scalar>(e: &EmbeddingMatrix<T>) -> Result<Pca2d<T>> {
    let (n, d) = (e.n(), e.d());
    if n < 3 {
        return Err(Error::degenerate(format!(
            "2-D projection needs at least 3 rows, got {n}"
        )));
    }
    if d < 2 {
        return Err(Error::degenerate(
            "2-D projection needs at least 2 input dimensions",
        ));
    }

    // Center columns.
    let mut means = vec![T::zero(); d];
    for row in e.rows() {
        for (m, x) in means.iter_mut().zip(row) {
            *m += *x;
        }
    }
    let n_t = cast::<T>(n as f64);
    for m in means.iter_mut() {
        *m /= n_t;
    }
    let centered: Vec<T> = e
        .rows()
        .flat_map(|row| row.iter().zip(&means).map(|(x, m)| *x - *m))
        .collect();

    let denom = cast::<T>((n - 1) as f64);
    let total_variance = centered.iter().map(|x| *x * *x).sum::<T>() / denom;
    if total_variance <= T::zero() {
        return Err(Error::degenerate(
            "2-D projection of rank-0 data (all rows identical)",
        ));
    }

    // Top-2 eigenpairs of the covariance, via whichever of the two
    // dual matrices is smaller.
    let (mut eigenvalues, mut directions) = if d <= n {
        let mut cov = vec![T::zero(); d * d];
        for row in centered.chunks_exact(d) {
            for i in 0..d {
                for j in i..d {
                    cov[i * d + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..d {
            for j in i..d {
                let val = cov[i * d + j] / denom;
                cov[i * d + j] = val;
                cov[j * d + i] = val;
            }
        }
        let (vals, vecs) = jacobi_eigen(cov, d);
        let order = top_two(&vals);
        let dirs: Vec<Vec<T>> = order
            .iter()
            .map(|&c| (0..d).map(|r| vecs[r * d + c]).collect())
            .collect();
        ([vals[order[0]], vals[order[1]]], dirs)
    } else {
        let mut gram = vec![T::zero(); n * n];
        for i in 0..n {
            let ri = &centered[i * d..(i + 1) * d];
            for j in i..n {
                let rj = &centered[j * d..(j + 1) * d];
                let mut acc = T::zero();
                for (x, y) in ri.iter().zip(rj) {
                    acc += *x * *y;
                }
                gram[i * n + j] = acc / denom;
                gram[j * n + i] = gram[i * n + j];
            }
        }
        let (vals, vecs) = jacobi_eigen(gram, n);
        let order = top_two(&vals);
        let mut dirs = Vec::with_capacity(2);
        for &c in &order {
            // Map the Gram eigenvector back into feature space.
            let mut dir = vec![T::zero(); d];
            for (i, row) in centered.chunks_exact(d).enumerate() {
                let w = vecs[i * n + c];
                for (out, x) in dir.iter_mut().zip(row) {
                    *out += w * *x;
                }
            }
            let norm = dir.iter().map(|x| *x * *x).sum::<T>().sqrt();
            if norm > T::zero() {
                for x in dir.iter_mut() {
                    *x /= norm;
                }
            }
            dirs.push(dir);
        }
        ([vals[order[0]], vals[order[1]]], dirs)
    };

    // Numerical noise can push a zero eigenvalue slightly negative.
    for ev in eigenvalues.iter_mut() {
        if *ev < T::zero() {
            *ev = T::zero();
        }
    }

    // Project and fix signs.
    let mut coords = [vec![T::zero(); n], vec![T::zero(); n]];
    for axis in 0..2 {
        for (i, row) in centered.chunks_exact(d).enumerate() {
            let mut acc = T::zero();
            for (x, v) in row.iter().zip(&directions[axis]) {
                acc += *x * *v;
            }
            coords[axis][i] = acc;
        }
        fix_sign(&mut directions[axis], &mut coords[axis]);
    }
    let points: Vec<[T; 2]> = (0..n).map(|i| [coords[0][i], coords[1][i]]).collect();
    let [d0, d1] = <[Vec<T>; 2]>::try_from(directions).expect("two directions");
    Ok(Pca2d {
        points,
        explained_variance: eigenvalues,
        total_variance,
        directions: [d0, d1],
    })
}

/// Indices of the two largest values, descending (stable on ties).
fn top_two<T: Scalar>(vals: &[T]) -> [usize; 2] {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).expect("finite eigenvalues"));
    [order[0], order[1]]
}

/// Spearman correlation between all pairwise Euclidean distances in
/// the original space and in the 2-D reduction; 1.0 means the picture
/// preserves every distance ordering.
pub fn distance_preservation<T: Scalar>(
    original: &EmbeddingMatrix<T>,
    reduced: &[[T; 2]],
) -> Result<f64> {
    if original.n() != reduced.len() {
        return Err(Error::shape(format!(
            "distance preservation over {} original rows but {} reduced points",
            original.n(),
            reduced.len()
        )));
    }
    let n = original.n();
    if n < 3 {
        return Err(Error::degenerate(
            "distance preservation needs at least 3 rows",
        ));
    }
    let mut orig = Vec::with_capacity(n * (n - 1) / 2);
    let mut red = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let a = original.row(i);
            let b = original.row(j);
            let mut acc = 0.0f64;
            for (x, y) in a.iter().zip(b) {
                let diff = x.to_f64().expect("finite") - y.to_f64().expect("finite");
                acc += diff * diff;
            }
            orig.push(acc.sqrt());
            let dx = reduced[i][0].to_f64().expect("finite")
                - reduced[j][0].to_f64().expect("finite");
            let dy = reduced[i][1].to_f64().expect("finite")
                - reduced[j][1].to_f64().expect("finite");
            red.push((dx * dx + dy * dy).sqrt());
        }
    }
    spearman(&orig, &red)
}
