#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use super::{Dataset, LearnError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogRegModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<u8>, LearnError> {
        if let Some(r) = x.iter().find(|r| r.len() != self.weights.len()) {
            return Err(LearnError::DimensionMismatch { expected: self.weights.len(), found: r.len() });
        }
        Ok(x.iter().map(|r| u8::from(self.score(r) >= 0.0)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegFit {
    pub model: LogRegModel,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
}

impl LogRegFit {
    pub fn into_converged(self) -> Result<LogRegModel, LearnError> {
        if self.converged {
            Ok(self.model)
        } else {
            Err(LearnError::NoConvergence { iterations: self.iterations, gap: self.grad_norm })
        }
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean negative log-likelihood plus `l2/2 * |w|^2`. The bias is not
/// penalized.
pub fn logistic_loss(model: &LogRegModel, data: &Dataset, l2: f64) -> f64 {
    let n = data.len().max(1) as f64;
    let nll: f64 = data
        .x()
        .iter()
        .zip(data.y())
        .map(|(x, &y)| {
            let z = model.score(x);
            softplus(z) - f64::from(y) * z
        })
        .sum();
    nll / n + 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`logistic_loss`]: weights first, bias last.
pub fn logistic_gradient(model: &LogRegModel, data: &Dataset, l2: f64) -> Vec<f64> {
    let d = model.weights.len();
    let n = data.len().max(1) as f64;
    let mut g = vec![0.0; d + 1];
    for (x, &y) in data.x().iter().zip(data.y()) {
        let r = sigmoid(model.score(x)) - f64::from(y);
        for k in 0..d {
            g[k] += r * x[k];
        }
        g[d] += r;
    }
    for k in 0..d {
        g[k] = g[k] / n + l2 * model.weights[k];
    }
    g[d] /= n;
    g
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// L2-regularized logistic regression by gradient descent with Armijo
/// backtracking. Stops when the gradient norm drops to `tol`.
pub fn train_logreg(train: &Dataset, l2_penalty: f64, max_iters: usize, tol: f64) -> Result<LogRegFit, LearnError> {
    train.require_both_classes()?;
    if !(l2_penalty.is_finite() && l2_penalty >= 0.0) {
        return Err(LearnError::InvalidParameter(format!("l2 penalty {l2_penalty}")));
    }
    let d = train.dim();
    let mut model = LogRegModel { weights: vec![0.0; d], bias: 0.0 };
    let mut loss = logistic_loss(&model, train, l2_penalty);
    let mut grad = logistic_gradient(&model, train, l2_penalty);
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    while iterations < max_iters && norm(&grad) > tol {
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        // let the step grow back a little after each accepted move
        step = (step * 2.0).min(1e6);
        let candidate = loop {
            let trial = LogRegModel {
                weights: model.weights.iter().zip(&grad).map(|(w, g)| w - step * g).collect(),
                bias: model.bias - step * grad[d],
            };
            let trial_loss = logistic_loss(&trial, train, l2_penalty);
            if trial_loss <= loss - 0.5 * step * g2 {
                break Some((trial, trial_loss));
            }
            step *= 0.5;
            if step < 1e-16 {
                break None;
            }
        };
        let Some((next, next_loss)) = candidate else { break };
        model = next;
        loss = next_loss;
        grad = logistic_gradient(&model, train, l2_penalty);
        iterations += 1;
    }
    let grad_norm = norm(&grad);
    Ok(LogRegFit { model, converged: grad_norm <= tol, iterations, grad_norm })
}
