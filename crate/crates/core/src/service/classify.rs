use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bundle::{ModelBundle, TaskModel};
use crate::telemetry::{validate_samples, SampleFault, SensorSample};
use crate::windows::{make_windows, Window};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("sample {index}: timestamp does not increase")]
    NonMonotonicTime { index: usize },
    #[error("sample {index}: {field} out of range ({value})")]
    OutOfRange { index: usize, field: &'static str, value: f64 },
}

impl ClassifyError {
    pub fn code(&self) -> &'static str {
        match self {
            ClassifyError::NonMonotonicTime { .. } => "non_monotonic_time",
            ClassifyError::OutOfRange { .. } => "out_of_range",
        }
    }

    pub fn index(&self) -> usize {
        match self {
            ClassifyError::NonMonotonicTime { index } | ClassifyError::OutOfRange { index, .. } => *index,
        }
    }
}

impl From<SampleFault> for ClassifyError {
    fn from(f: SampleFault) -> Self {
        match f {
            SampleFault::NonMonotonicTime { index } => ClassifyError::NonMonotonicTime { index },
            SampleFault::OutOfRange { index, field, value } => ClassifyError::OutOfRange { index, field, value },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRequest {
    pub samples: Vec<SensorSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoadLabel {
    Good,
    Bad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotholeLabel {
    Pothole,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadInterval {
    pub start_t: f64,
    pub end_t: f64,
    pub label: RoadLabel,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotholeInterval {
    pub start_t: f64,
    pub end_t: f64,
    pub label: PotholeLabel,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub road: Vec<RoadInterval>,
    pub potholes: Vec<PotholeInterval>,
    /// Samples that fell in no window of either task.
    pub dropped_samples: usize,
}

/// A window with its decision value and predicted class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedWindow {
    pub window: Window,
    pub score: f64,
    pub positive: bool,
}

fn classify_task(task: &TaskModel, samples: &[SensorSample], threshold: f64) -> Vec<ClassifiedWindow> {
    // too few samples for one window is not an error here: no intervals
    let Ok(windows) = make_windows(samples, task.window_size) else {
        return Vec::new();
    };
    windows
        .into_iter()
        .map(|window| {
            let x = task.scaler.apply(window.features.as_slice());
            let score = task.svm.decision_value(&x);
            ClassifiedWindow { window, score, positive: score >= threshold }
        })
        .collect()
}

/// Road-condition windows (cutoff 0) and pothole windows (the bundle's
/// pothole threshold), each cut independently from the same samples.
pub fn classify_windows(
    bundle: &ModelBundle,
    samples: &[SensorSample],
) -> Result<(Vec<ClassifiedWindow>, Vec<ClassifiedWindow>), ClassifyError> {
    validate_samples(samples)?;
    let road = classify_task(&bundle.road, samples, 0.0);
    let potholes = classify_task(&bundle.pothole, samples, bundle.pothole.svm.threshold);
    Ok((road, potholes))
}

pub fn classify_batch(bundle: &ModelBundle, samples: &[SensorSample]) -> Result<ClassifyResponse, ClassifyError> {
    let (road, potholes) = classify_windows(bundle, samples)?;
    let covered = (road.len() * bundle.road.window_size).max(potholes.len() * bundle.pothole.window_size);
    Ok(ClassifyResponse {
        road: road
            .into_iter()
            .map(|c| RoadInterval {
                start_t: c.window.start_t,
                end_t: c.window.end_t,
                label: if c.positive { RoadLabel::Bad } else { RoadLabel::Good },
                score: c.score,
            })
            .collect(),
        potholes: potholes
            .into_iter()
            .map(|c| PotholeInterval {
                start_t: c.window.start_t,
                end_t: c.window.end_t,
                label: if c.positive { PotholeLabel::Pothole } else { PotholeLabel::None },
                score: c.score,
            })
            .collect(),
        dropped_samples: samples.len() - covered,
    })
}
