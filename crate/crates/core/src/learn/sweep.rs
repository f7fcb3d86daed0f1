use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, predict, train_svm, Dataset, LearnError, SmoParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c: f64,
    pub train_error: f64,
    pub test_error: f64,
}

/// Fits one SVM per `C` (grid points run in parallel) and reports
/// `1 - accuracy` on both splits, in grid order.
pub fn sweep_c(
    train: &Dataset,
    test: &Dataset,
    c_grid: &[f64],
    base: &SmoParams,
) -> Result<Vec<SweepPoint>, LearnError> {
    if c_grid.is_empty() {
        return Err(LearnError::InvalidParameter("empty C grid".into()));
    }
    c_grid
        .par_iter()
        .map(|&c| {
            let model = train_svm(train, &SmoParams { c, ..*base })?.model;
            let err = |d: &Dataset| -> Result<f64, LearnError> {
                let pred = predict(&model, d.x(), Some(0.0))?;
                Ok(1.0 - evaluate(d.y(), &pred)?.accuracy)
            };
            Ok(SweepPoint { c, train_error: err(train)?, test_error: err(test)? })
        })
        .collect()
}
