//! Principal component analysis of window features, for 3-D scatter export.
//!
//! The eigendecomposition is a cyclic Jacobi sweep over the covariance
//! matrix. Output is deterministic: eigenpairs are sorted by descending
//! eigenvalue and each eigenvector is signed so its largest-magnitude entry
//! is positive.

#![allow(clippy::needless_range_loop)]

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExploreError {
    #[error("need at least 2 rows, got {0}")]
    TooFewSamples(usize),
    #[error("expected {expected} columns, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("k must be in 1..={dim}, got {k}")]
    InvalidK { k: usize, dim: usize },
    #[error("matrix is not square and symmetric")]
    NotSymmetric,
    #[error("non-finite input")]
    NonFinite,
}

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenpairs of a symmetric matrix, eigenvalues descending; `vectors[i]`
/// belongs to `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
    /// Frobenius norm of the off-diagonal part at exit.
    pub off_diagonal: f64,
}

fn off_norm(a: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition. Iterates until the off-diagonal norm is
/// below `1e-12 * max(1, |A|_F)`.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> Result<SymmetricEigen, ExploreError> {
    let d = matrix.len();
    if matrix.iter().any(|r| r.len() != d) {
        return Err(ExploreError::NotSymmetric);
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ExploreError::NonFinite);
    }
    let scale = matrix.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for i in 0..d {
        for j in 0..i {
            if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * scale.max(1.0) {
                return Err(ExploreError::NotSymmetric);
            }
        }
    }

    let mut a = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let stop = OFF_DIAGONAL_TOL * scale.max(1.0);
    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off >= stop && sweeps < MAX_SWEEPS {
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[p][k] = a[k][p];
                    a[k][q] = s * akp + c * akq;
                    a[q][k] = a[k][q];
                }
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let mut e: Vec<f64> = v.iter().map(|row| row[col]).collect();
            orient(&mut e);
            e
        })
        .collect();
    Ok(SymmetricEigen { values, vectors, sweeps, off_diagonal: off })
}

/// Flips `e` so its largest-magnitude entry (first on ties) is positive.
pub fn orient(e: &mut [f64]) {
    let mut best = 0;
    for (i, x) in e.iter().enumerate() {
        if x.abs() > e[best].abs() {
            best = i;
        }
    }
    if e.get(best).is_some_and(|&x| x < 0.0) {
        e.iter_mut().for_each(|x| *x = -*x);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaProjection {
    pub means: Vec<f64>,
    /// `k` orthonormal rows, ordered by descending eigenvalue.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

impl PcaProjection {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// True when the input had no variance at all.
    pub fn is_degenerate(&self) -> bool {
        self.eigenvalues.iter().all(|&l| l <= 0.0)
    }

    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        let mut x = self.means.clone();
        for (s, comp) in scores.iter().zip(&self.components) {
            for (xi, ci) in x.iter_mut().zip(comp) {
                *xi += s * ci;
            }
        }
        x
    }
}

/// Population covariance (divide by n) of the rows of `x`, with column means.
pub fn covariance(x: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>), ExploreError> {
    if x.len() < 2 {
        return Err(ExploreError::TooFewSamples(x.len()));
    }
    let d = x[0].len();
    if let Some(r) = x.iter().find(|r| r.len() != d) {
        return Err(ExploreError::DimensionMismatch { expected: d, found: r.len() });
    }
    let n = x.len() as f64;
    let mut means = vec![0.0; d];
    for r in x {
        for (m, v) in means.iter_mut().zip(r) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut cov = vec![vec![0.0; d]; d];
    for r in x {
        for i in 0..d {
            let di = r[i] - means[i];
            for j in 0..=i {
                cov[i][j] += di * (r[j] - means[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }
    Ok((means, cov))
}

/// Top-`k` principal axes of `x`. All-identical rows are accepted: the
/// eigenvalues are then zero and the components are the coordinate axes.
pub fn pca_fit(x: &[Vec<f64>], k: usize) -> Result<PcaProjection, ExploreError> {
    let (means, cov) = covariance(x)?;
    let d = means.len();
    if k == 0 || k > d {
        return Err(ExploreError::InvalidK { k, dim: d });
    }
    let eig = jacobi_eigen(&cov)?;
    Ok(PcaProjection {
        means,
        components: eig.vectors.into_iter().take(k).collect(),
        // round-off can leave tiny negative eigenvalues of a PSD matrix
        eigenvalues: eig.values.into_iter().take(k).map(|l| l.max(0.0)).collect(),
    })
}

pub fn pca_transform(proj: &PcaProjection, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, ExploreError> {
    let d = proj.dim();
    if let Some(r) = x.iter().find(|r| r.len() != d) {
        return Err(ExploreError::DimensionMismatch { expected: d, found: r.len() });
    }
    Ok(x.iter()
        .map(|r| {
            proj.components
                .iter()
                .map(|c| c.iter().zip(r).zip(&proj.means).map(|((ci, xi), mi)| ci * (xi - mi)).sum())
                .collect()
        })
        .collect())
}

/// Scatter export: `pc1,…,pck,label`. Missing labels are left empty.
pub fn write_scores_csv(scores: &[Vec<f64>], labels: &[Option<u8>]) -> String {
    let k = scores.first().map_or(3, Vec::len);
    let mut out: Vec<String> = (1..=k).map(|i| format!("pc{i}")).collect();
    out.push("label".into());
    let mut text = out.join(",");
    text.push('\n');
    for (row, label) in scores.iter().zip(labels) {
        for v in row {
            let _ = write!(text, "{v},");
        }
        if let Some(l) = label {
            let _ = write!(text, "{l}");
        }
        text.push('\n');
    }
    text
}
