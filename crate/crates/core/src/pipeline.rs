//! End-to-end training and evaluation for the two tasks, shared by the
//! command-line tool and the examples.

use serde::{Deserialize, Serialize};

use crate::learn::{
    choose_threshold, decision_values, evaluate, pr_curve, predict, split_dataset, train_svm, Dataset, EvalReport,
    LearnError, PrCurve, SmoParams,
};
use crate::service::TaskModel;
use crate::windows::{Scaler, Window};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub window_size: usize,
    pub smo: SmoParams,
    pub test_fraction: f64,
    pub seed: u64,
}

/// A fitted task model with its held-out report. For the pothole task the
/// report is taken at the tuned threshold and `curve` holds the test-split
/// precision-recall curve it was chosen from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedTask {
    pub model: TaskModel,
    pub report: EvalReport,
    pub curve: Option<PrCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub road: EvalReport,
    pub pothole: EvalReport,
}

struct Fitted {
    model: TaskModel,
    test: Dataset,
}

fn fit(windows: &[Window], cfg: &TrainConfig) -> Result<Fitted, LearnError> {
    let raw = Dataset::from_windows(windows, None)?;
    let (train, test) = split_dataset(&raw, cfg.test_fraction, cfg.seed)?;
    let scaler = Scaler::fit(train.x()).map_err(|e| LearnError::InvalidData(e.to_string()))?;
    let train = Dataset::new(scaler.apply_all(train.x()), train.y().to_vec())?;
    let test = Dataset::new(scaler.apply_all(test.x()), test.y().to_vec())?;
    let svm = train_svm(&train, &cfg.smo)?.into_converged()?;
    Ok(Fitted { model: TaskModel { window_size: cfg.window_size, scaler, svm }, test })
}

fn annotate(report: EvalReport, cfg: &TrainConfig) -> EvalReport {
    report
        .with_seed(cfg.seed)
        .with_param("c", cfg.smo.c)
        .with_param("gamma", cfg.smo.gamma)
        .with_param("test_fraction", cfg.test_fraction)
        .with_param("window_size", cfg.window_size as f64)
}

/// Splits, scales, fits and scores at cutoff 0 (`1` = bad road).
pub fn train_road(windows: &[Window], cfg: &TrainConfig) -> Result<TrainedTask, LearnError> {
    let Fitted { model, test } = fit(windows, cfg)?;
    let pred = predict(&model.svm, test.x(), Some(0.0))?;
    let report = annotate(evaluate(test.y(), &pred)?, cfg).with_param("threshold", 0.0);
    Ok(TrainedTask { model, report, curve: None })
}

/// As [`train_road`], then moves the cutoff to the highest-recall point of
/// the test-split curve with precision at least `min_precision`.
pub fn train_pothole(windows: &[Window], cfg: &TrainConfig, min_precision: f64) -> Result<TrainedTask, LearnError> {
    let Fitted { mut model, test } = fit(windows, cfg)?;
    let scores = decision_values(&model.svm, test.x())?;
    let curve = pr_curve(&scores, test.y())?;
    let tau = choose_threshold(&curve, min_precision)?;
    model.svm.threshold = tau;
    let pred = predict(&model.svm, test.x(), None)?;
    let report = annotate(evaluate(test.y(), &pred)?, cfg)
        .with_param("threshold", tau)
        .with_param("min_precision", min_precision);
    Ok(TrainedTask { model, report, curve: Some(curve) })
}

/// Scores labelled windows with a deployed task model at `cutoff`.
pub fn evaluate_task(task: &TaskModel, windows: &[Window], cutoff: f64) -> Result<EvalReport, LearnError> {
    let data = Dataset::from_windows(windows, Some(&task.scaler))?;
    let pred = predict(&task.svm, data.x(), Some(cutoff))?;
    Ok(evaluate(data.y(), &pred)?.with_param("threshold", cutoff))
}

/// Precision-recall curve of a deployed task model on labelled windows.
pub fn task_pr_curve(task: &TaskModel, windows: &[Window]) -> Result<PrCurve, LearnError> {
    let data = Dataset::from_windows(windows, Some(&task.scaler))?;
    pr_curve(&decision_values(&task.svm, data.x())?, data.y())
}
