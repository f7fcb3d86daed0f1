//! Binary classifiers over window features: an RBF-kernel SVM trained with
//! SMO, a logistic-regression baseline, and the evaluation tools around them
//! (confusion metrics, precision-recall curves, threshold and C sweeps).
//!
//! Public labels are `0`/`1`. The SVM dual works with `-1`/`+1` internally.

mod logreg;
mod metrics;
mod svm;
mod sweep;

pub use logreg::{logistic_gradient, logistic_loss, train_logreg, LogRegFit, LogRegModel};
pub use metrics::{choose_threshold, evaluate, pr_curve, EvalReport, PrCurve, PrPoint};
pub use svm::{decision_values, predict, rbf_kernel, train_svm, SmoParams, SvmFit, SvmModel, SV_ALPHA_CUTOFF};
pub use sweep::{sweep_c, SweepPoint};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::windows::{Scaler, Window};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("class {0} has no instances")]
    ClassMissing(u8),
    #[error("solver stopped after {iterations} iterations with KKT gap {gap}")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("expected {expected} columns, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("no positive labels")]
    NoPositives,
    #[error("no curve point reaches precision {0}")]
    Unattainable(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid dataset: {0}")]
    InvalidData(String),
}

/// Feature rows with 0/1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    y: Vec<u8>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<u8>) -> Result<Self, LearnError> {
        if x.len() != y.len() {
            return Err(LearnError::LengthMismatch(x.len(), y.len()));
        }
        if let Some(first) = x.first() {
            let d = first.len();
            if let Some(r) = x.iter().find(|r| r.len() != d) {
                return Err(LearnError::DimensionMismatch { expected: d, found: r.len() });
            }
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(LearnError::InvalidData("non-finite feature".into()));
        }
        if let Some(l) = y.iter().find(|&&l| l > 1) {
            return Err(LearnError::InvalidData(format!("label {l} is not 0 or 1")));
        }
        Ok(Dataset { x, y })
    }

    /// Scaled features of labeled windows. Unlabeled windows are an error.
    pub fn from_windows(windows: &[Window], scaler: Option<&Scaler>) -> Result<Self, LearnError> {
        let mut x = Vec::with_capacity(windows.len());
        let mut y = Vec::with_capacity(windows.len());
        for (i, w) in windows.iter().enumerate() {
            let label = w.label.ok_or_else(|| LearnError::InvalidData(format!("window {i} has no label")))?;
            let f = w.features.as_slice();
            x.push(match scaler {
                Some(s) => s.apply(f),
                None => f.to_vec(),
            });
            y.push(label);
        }
        Dataset::new(x, y)
    }

    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn count(&self, label: u8) -> usize {
        self.y.iter().filter(|&&l| l == label).count()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset { x: idx.iter().map(|&i| self.x[i].clone()).collect(), y: idx.iter().map(|&i| self.y[i]).collect() }
    }

    pub(crate) fn require_both_classes(&self) -> Result<(), LearnError> {
        for c in [0, 1] {
            if self.count(c) == 0 {
                return Err(LearnError::ClassMissing(c));
            }
        }
        Ok(())
    }
}

/// Stratified train/test index partition. Each class contributes
/// `round(test_fraction * n_class)` rows to the test side. Indices are
/// returned in ascending order.
pub fn stratified_indices(y: &[u8], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), LearnError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(LearnError::InvalidParameter(format!("test_fraction {test_fraction} not in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        if idx.is_empty() {
            return Err(LearnError::ClassMissing(class));
        }
        idx.shuffle(&mut rng);
        let n_test = (test_fraction * idx.len() as f64).round() as usize;
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_dataset(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), LearnError> {
    let (train, test) = stratified_indices(data.y(), test_fraction, seed)?;
    Ok((data.subset(&train), data.subset(&test)))
}
