use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::{Dataset, LearnError};

/// Dual variables at or below this value are not kept as support vectors.
pub const SV_ALPHA_CUTOFF: f64 = 1e-8;

/// Above this many rows the Gram matrix is computed row by row on demand.
const FULL_GRAM_LIMIT: usize = 20_000;

/// Curvature floor for non-positive-definite pairs (duplicate points).
const TAU: f64 = 1e-12;

pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    pub c: f64,
    pub gamma: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    /// Iteration budget, in units of `n` pair updates.
    pub max_passes: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams { c: 250.0, gamma: 1.0 / crate::windows::NUM_FEATURES as f64, tol: 1e-3, max_passes: 200 }
    }
}

impl SmoParams {
    fn validate(&self) -> Result<(), LearnError> {
        let bad = |m: String| Err(LearnError::InvalidParameter(m));
        if !(self.c.is_finite() && self.c > 0.0) {
            return bad(format!("C must be > 0, got {}", self.c));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad(format!("gamma must be > 0, got {}", self.gamma));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("tol must be > 0, got {}", self.tol));
        }
        if self.max_passes == 0 {
            return bad("max_passes must be >= 1".into());
        }
        Ok(())
    }
}

/// RBF decision function `f(x) = sum_i coef_i * exp(-gamma * |x - sv_i|^2) + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub dim: usize,
    pub support_vectors: Vec<Vec<f64>>,
    /// Signed dual coefficients `alpha_i * y_i`, `y_i` in {-1, +1}.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    /// Decision cutoff used by [`predict`] when no explicit one is given.
    pub threshold: f64,
}

impl SvmModel {
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        let mut s = self.bias;
        for (sv, coef) in self.support_vectors.iter().zip(&self.dual_coefs) {
            s += coef * rbf_kernel(x, sv, self.gamma);
        }
        s
    }

    fn check_dim(&self, rows: &[Vec<f64>]) -> Result<(), LearnError> {
        match rows.iter().find(|r| r.len() != self.dim) {
            Some(r) => Err(LearnError::DimensionMismatch { expected: self.dim, found: r.len() }),
            None => Ok(()),
        }
    }
}

pub fn decision_values(model: &SvmModel, x: &[Vec<f64>]) -> Result<Vec<f64>, LearnError> {
    model.check_dim(x)?;
    Ok(x.iter().map(|r| model.decision_value(r)).collect())
}

/// Label 1 iff the decision value is at least `threshold` (the model's own
/// threshold when `None`).
pub fn predict(model: &SvmModel, x: &[Vec<f64>], threshold: Option<f64>) -> Result<Vec<u8>, LearnError> {
    let tau = threshold.unwrap_or(model.threshold);
    Ok(decision_values(model, x)?.into_iter().map(|s| u8::from(s >= tau)).collect())
}

/// Result of an SMO run. A fit that ran out of iterations is still usable
/// and is flagged through `converged`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit {
    pub model: SvmModel,
    /// Dual variables for every training row, in input order.
    pub alphas: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Final maximal violating-pair gap `m(alpha) - M(alpha)`.
    pub kkt_gap: f64,
    /// `sum(alpha) - 0.5 * alpha' Q alpha` at exit.
    pub dual_objective: f64,
}

impl SvmFit {
    pub fn into_converged(self) -> Result<SvmModel, LearnError> {
        if self.converged {
            Ok(self.model)
        } else {
            Err(LearnError::NoConvergence { iterations: self.iterations, gap: self.kkt_gap })
        }
    }

    /// Per-row KKT residual of the fitted decision function on the training
    /// data: `max(0, 1 - y f)` at the lower bound, `max(0, y f - 1)` at the
    /// upper bound and `|y f - 1|` for free variables.
    pub fn kkt_residuals(&self, data: &Dataset) -> Result<Vec<f64>, LearnError> {
        let f = decision_values(&self.model, data.x())?;
        let c = self.model.c;
        Ok(f.iter()
            .zip(data.y())
            .zip(&self.alphas)
            .map(|((f, &l), &a)| {
                let margin = sign(l) * f;
                if a <= SV_ALPHA_CUTOFF {
                    (1.0 - margin).max(0.0)
                } else if a >= c {
                    (margin - 1.0).max(0.0)
                } else {
                    (margin - 1.0).abs()
                }
            })
            .collect())
    }
}

fn sign(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

enum Gram<'a> {
    Full { n: usize, k: Vec<f64> },
    OnDemand { x: &'a [Vec<f64>], gamma: f64 },
}

impl<'a> Gram<'a> {
    fn new(x: &'a [Vec<f64>], gamma: f64) -> Self {
        let n = x.len();
        if n > FULL_GRAM_LIMIT {
            return Gram::OnDemand { x, gamma };
        }
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            k[i * n + i] = 1.0;
            for j in 0..i {
                let v = rbf_kernel(&x[i], &x[j], gamma);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        Gram::Full { n, k }
    }

    fn row(&self, i: usize) -> Cow<'_, [f64]> {
        match self {
            Gram::Full { n, k } => Cow::Borrowed(&k[i * n..(i + 1) * n]),
            Gram::OnDemand { x, gamma } => Cow::Owned(x.iter().map(|r| rbf_kernel(&x[i], r, *gamma)).collect()),
        }
    }
}

/// Trains an RBF-kernel SVM by sequential minimal optimization.
///
/// Each step picks the maximal KKT violator `i` and, among variables that can
/// move against it, the partner `j` with the largest second-order decrease of
/// the dual objective; ties go to the lower index. The run stops once the
/// maximal violation `m(alpha) - M(alpha)` falls below `tol`.
pub fn train_svm(train: &Dataset, params: &SmoParams) -> Result<SvmFit, LearnError> {
    params.validate()?;
    train.require_both_classes()?;
    let n = train.len();
    let x = train.x();
    let y: Vec<f64> = train.y().iter().map(|&l| sign(l)).collect();
    let c = params.c;
    let gram = Gram::new(x, params.gamma);

    let mut alpha = vec![0.0; n];
    // gradient of 0.5 a'Qa - e'a
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let in_low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let max_iter = params.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    while iterations < max_iter {
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(alpha[t], y[t]) && -y[t] * grad[t] > g_max {
                g_max = -y[t] * grad[t];
                i = t;
            }
        }
        if i == usize::MAX {
            gap = 0.0;
            converged = true;
            break;
        }
        let k_i = gram.row(i);

        let mut g_max2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = y[t] * grad[t];
            g_max2 = g_max2.max(v);
            let b = g_max + v;
            if b > 0.0 {
                let a = (2.0 - 2.0 * k_i[t]).max(TAU);
                let obj = -(b * b) / a;
                if obj < best {
                    best = obj;
                    j = t;
                }
            }
        }
        gap = g_max + g_max2;
        if gap < params.tol || j == usize::MAX {
            converged = true;
            break;
        }
        let k_j = gram.row(j);

        // move y_i a_i up by delta and y_j a_j down by delta
        let a = (2.0 - 2.0 * k_i[j]).max(TAU);
        let b = g_max + y[j] * grad[j];
        let room_i = if y[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if y[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        let delta = (b / a).min(room_i).min(room_j);
        let old_i = alpha[i];
        let old_j = alpha[j];
        alpha[i] = if delta == room_i {
            if y[i] > 0.0 {
                c
            } else {
                0.0
            }
        } else {
            (old_i + y[i] * delta).clamp(0.0, c)
        };
        alpha[j] = if delta == room_j {
            if y[j] > 0.0 {
                0.0
            } else {
                c
            }
        } else {
            (old_j - y[j] * delta).clamp(0.0, c)
        };
        let d_i = alpha[i] - old_i;
        let d_j = alpha[j] - old_j;
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k_i[t] * d_i + y[j] * k_j[t] * d_j);
        }
        iterations += 1;
    }
    if !converged {
        // recompute the gap at the final iterate
        let m_up = (0..n).filter(|&t| in_up(alpha[t], y[t])).map(|t| -y[t] * grad[t]).fold(f64::NEG_INFINITY, f64::max);
        let m_low = (0..n).filter(|&t| in_low(alpha[t], y[t])).map(|t| -y[t] * grad[t]).fold(f64::INFINITY, f64::min);
        gap = m_up - m_low;
    }

    let bias = bias_from_gradient(&alpha, &y, &grad, c);
    let dual_objective = -0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();

    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for t in 0..n {
        if alpha[t] > SV_ALPHA_CUTOFF {
            support_vectors.push(x[t].clone());
            dual_coefs.push(alpha[t] * y[t]);
        }
    }
    Ok(SvmFit {
        model: SvmModel { dim: train.dim(), support_vectors, dual_coefs, bias, gamma: params.gamma, c, threshold: 0.0 },
        alphas: alpha,
        converged,
        iterations,
        kkt_gap: gap,
        dual_objective,
    })
}

/// Bias from the free variables (`0 < alpha < C`), or the midpoint of the
/// feasible interval when every variable sits at a bound.
fn bias_from_gradient(alpha: &[f64], y: &[f64], grad: &[f64], c: f64) -> f64 {
    let mut sum = 0.0;
    let mut free = 0usize;
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < c {
            sum += v;
            free += 1;
        } else if (alpha[t] == 0.0) == (y[t] > 0.0) {
            // y*alpha can only grow from here: b >= v
            lower = lower.max(v);
        } else {
            upper = upper.min(v);
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    }
}
