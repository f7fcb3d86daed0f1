use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LearnError;

/// Confusion counts and the metrics derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// Absent when nothing was predicted positive.
    pub precision: Option<f64>,
    /// Absent when the truth has no positives.
    pub recall: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Accuracy of always predicting the majority class of the truth.
    pub base_rate: f64,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, f64>,
}

impl EvalReport {
    pub fn n(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }
}

pub fn evaluate(labels_true: &[u8], labels_pred: &[u8]) -> Result<EvalReport, LearnError> {
    if labels_true.len() != labels_pred.len() {
        return Err(LearnError::LengthMismatch(labels_true.len(), labels_pred.len()));
    }
    if labels_true.is_empty() {
        return Err(LearnError::EmptyInput);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&t, &p) in labels_true.iter().zip(labels_pred) {
        match (t == 1, p == 1) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
            (true, false) => fn_ += 1,
        }
    }
    let n = labels_true.len() as f64;
    let positives = tp + fn_;
    let negatives = tn + fp;
    Ok(EvalReport {
        accuracy: (tp + tn) as f64 / n,
        precision: (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64),
        recall: (positives > 0).then(|| tp as f64 / positives as f64),
        tp,
        fp,
        tn,
        fn_,
        base_rate: positives.max(negatives) as f64 / n,
        seed: None,
        params: BTreeMap::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision/recall at every distinct score, thresholds descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

impl PrCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,precision,recall\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.threshold, p.precision, p.recall));
        }
        out
    }
}

/// One point per distinct score, predicting 1 when `score >= threshold`.
pub fn pr_curve(scores: &[f64], labels_true: &[u8]) -> Result<PrCurve, LearnError> {
    if scores.len() != labels_true.len() {
        return Err(LearnError::LengthMismatch(scores.len(), labels_true.len()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(LearnError::InvalidData("NaN score".into()));
    }
    let positives = labels_true.iter().filter(|&&l| l == 1).count();
    if positives == 0 {
        return Err(LearnError::NoPositives);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = 0;
    while k < order.len() {
        let threshold = scores[order[k]];
        while k < order.len() && scores[order[k]] == threshold {
            if labels_true[order[k]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        points.push(PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    Ok(PrCurve { points })
}

/// Highest-recall point whose precision reaches `min_precision`; ties go to
/// higher precision, then to the lower threshold.
pub fn choose_threshold(curve: &PrCurve, min_precision: f64) -> Result<f64, LearnError> {
    if curve.points.is_empty() {
        return Err(LearnError::EmptyInput);
    }
    curve
        .points
        .iter()
        .filter(|p| p.precision >= min_precision)
        .max_by(|a, b| {
            a.recall
                .total_cmp(&b.recall)
                .then(a.precision.total_cmp(&b.precision))
                .then(b.threshold.total_cmp(&a.threshold))
        })
        .map(|p| p.threshold)
        .ok_or(LearnError::Unattainable(min_precision))
}
