//! Fixed-count intervals over a sample stream and their 26 aggregate features.
//!
//! Feature order is fixed: means of the six inertial axes and speed, then
//! population standard deviations of the same seven channels, then the maxima
//! and minima of the six inertial axes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::telemetry::{Condition, PotholeEvents, SensorSample};

pub const NUM_FEATURES: usize = 26;

/// Default interval length for road-condition classification (5 s at 5 Hz).
pub const ROAD_WINDOW: usize = 25;
/// Default interval length for pothole classification (2 s at 5 Hz).
pub const POTHOLE_WINDOW: usize = 10;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "mean_ax",
    "mean_ay",
    "mean_az",
    "mean_gx",
    "mean_gy",
    "mean_gz",
    "mean_speed",
    "std_ax",
    "std_ay",
    "std_az",
    "std_gx",
    "std_gy",
    "std_gz",
    "std_speed",
    "max_ax",
    "max_ay",
    "max_az",
    "max_gx",
    "max_gy",
    "max_gz",
    "min_ax",
    "min_ay",
    "min_az",
    "min_gx",
    "min_gy",
    "min_gz",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindowError {
    #[error("log has {have} samples, fewer than one window of {size}")]
    LogTooShort { have: usize, size: usize },
    #[error("need at least {need} rows, got {have}")]
    TooFewSamples { need: usize, have: usize },
    #[error("window size must be >= 2, got {0}")]
    InvalidSize(usize),
    #[error("feature csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; NUM_FEATURES]);

impl Default for FeatureVector {
    fn default() -> Self {
        FeatureVector([0.0; NUM_FEATURES])
    }
}

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn mean(&self, channel: usize) -> f64 {
        self.0[channel]
    }

    pub fn std(&self, channel: usize) -> f64 {
        self.0[7 + channel]
    }

    /// Maximum of inertial axis `axis` (0..6: ax, ay, az, gx, gy, gz).
    pub fn max(&self, axis: usize) -> f64 {
        self.0[14 + axis]
    }

    pub fn min(&self, axis: usize) -> f64 {
        self.0[20 + axis]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start_t: f64,
    pub end_t: f64,
    pub sample_count: usize,
    pub features: FeatureVector,
    pub centroid: GeoPoint,
    /// Positions of the first and last member samples. Absent for windows
    /// read back from a feature matrix.
    pub first_pos: Option<GeoPoint>,
    pub last_pos: Option<GeoPoint>,
    pub label: Option<u8>,
}

fn channels(s: &SensorSample) -> [f64; 7] {
    [s.ax, s.ay, s.az, s.gx, s.gy, s.gz, s.speed]
}

/// Aggregates a run of samples. Standard deviations divide by n.
pub fn extract_features(samples: &[SensorSample]) -> Result<FeatureVector, WindowError> {
    if samples.len() < 2 {
        return Err(WindowError::TooFewSamples { need: 2, have: samples.len() });
    }
    let n = samples.len() as f64;
    let mut sum = [0.0; 7];
    let mut max = [f64::NEG_INFINITY; 6];
    let mut min = [f64::INFINITY; 6];
    for s in samples {
        let c = channels(s);
        for k in 0..7 {
            sum[k] += c[k];
        }
        for k in 0..6 {
            max[k] = max[k].max(c[k]);
            min[k] = min[k].min(c[k]);
        }
    }
    let mean = sum.map(|v| v / n);
    let mut sq = [0.0; 7];
    for s in samples {
        let c = channels(s);
        for k in 0..7 {
            sq[k] += (c[k] - mean[k]).powi(2);
        }
    }

    let mut f = [0.0; NUM_FEATURES];
    f[..7].copy_from_slice(&mean);
    for k in 0..7 {
        f[7 + k] = (sq[k] / n).sqrt();
    }
    f[14..20].copy_from_slice(&max);
    f[20..26].copy_from_slice(&min);
    // rounding in the mean can push it a hair outside [min, max] on
    // near-constant input
    for k in 0..6 {
        f[k] = f[k].clamp(min[k], max[k]);
    }
    Ok(FeatureVector(f))
}

/// Cuts consecutive non-overlapping windows of exactly `size` samples. A
/// trailing partial group is dropped. Each window ends where the next one
/// starts; the last window ends one mean sample spacing after its last
/// sample.
pub fn make_windows(samples: &[SensorSample], size: usize) -> Result<Vec<Window>, WindowError> {
    if size < 2 {
        return Err(WindowError::InvalidSize(size));
    }
    if samples.len() < size {
        return Err(WindowError::LogTooShort { have: samples.len(), size });
    }
    let count = samples.len() / size;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let run = &samples[k * size..(k + 1) * size];
        let first = run[0];
        let last = run[size - 1];
        let end_t = match samples.get((k + 1) * size) {
            Some(next) => next.t,
            None => last.t + (last.t - first.t) / (size - 1) as f64,
        };
        let n = size as f64;
        let centroid = GeoPoint {
            lat: run.iter().map(|s| s.lat).sum::<f64>() / n,
            lon: run.iter().map(|s| s.lon).sum::<f64>() / n,
        };
        out.push(Window {
            start_t: first.t,
            end_t,
            sample_count: size,
            features: extract_features(run)?,
            centroid,
            first_pos: Some(GeoPoint { lat: first.lat, lon: first.lon }),
            last_pos: Some(GeoPoint { lat: last.lat, lon: last.lon }),
            label: None,
        });
    }
    Ok(out)
}

/// Overwrites every window's label with the drive-level condition.
pub fn attach_condition_label(windows: &mut [Window], condition: Condition) {
    for w in windows {
        w.label = Some(condition.label());
    }
}

/// Labels a window 1 iff some event lies in `[start_t, end_t)`, 0 otherwise.
/// Returns the number of events that fell in no window.
pub fn attach_pothole_labels(windows: &mut [Window], events: &PotholeEvents) -> usize {
    for w in windows.iter_mut() {
        w.label = Some(0);
    }
    let mut unmatched = 0;
    for &t in events.timestamps() {
        // last window starting at or before t
        let idx = windows.partition_point(|w| w.start_t <= t);
        match idx.checked_sub(1).map(|i| &mut windows[i]) {
            Some(w) if t < w.end_t => w.label = Some(1),
            _ => unmatched += 1,
        }
    }
    unmatched
}

/// Per-feature z-scoring fitted on training windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Scaler {
    /// Fits means and population standard deviations column-wise.
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, WindowError> {
        if rows.len() < 2 {
            return Err(WindowError::TooFewSamples { need: 2, have: rows.len() });
        }
        let d = rows[0].as_ref().len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        for r in rows {
            for (m, v) in means.iter_mut().zip(r.as_ref()) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in stds.iter_mut().zip(r.as_ref()).zip(&means) {
                *s += (v - m).powi(2);
            }
        }
        stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        Ok(Scaler { means, stds })
    }

    pub fn fit_windows(windows: &[Window]) -> Result<Self, WindowError> {
        let rows: Vec<&[f64]> = windows.iter().map(|w| w.features.as_slice()).collect();
        Self::fit(&rows)
    }

    /// `(x - mean) / std`, with zero-variance features mapped to 0.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    pub fn apply_all<R: AsRef<[f64]>>(&self, rows: &[R]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply(r.as_ref())).collect()
    }
}

/// Feature matrix CSV: the 26 canonical feature columns followed by
/// `label,start_t,end_t,lat,lon`. Unlabeled windows leave `label` empty.
pub fn write_feature_csv(windows: &[Window]) -> String {
    let mut out = FEATURE_NAMES.join(",");
    out.push_str(",label,start_t,end_t,lat,lon\n");
    for w in windows {
        for v in w.features.as_slice() {
            let _ = write!(out, "{v},");
        }
        if let Some(l) = w.label {
            let _ = write!(out, "{l}");
        }
        let _ = writeln!(out, ",{},{},{},{}", w.start_t, w.end_t, w.centroid.lat, w.centroid.lon);
    }
    out
}

/// Reads a feature matrix back. `sample_count` is not stored in the file and
/// is taken from the caller.
pub fn read_feature_csv(text: &str, sample_count: usize) -> Result<Vec<Window>, WindowError> {
    let mut lines = text.lines().enumerate();
    let expected = format!("{},label,start_t,end_t,lat,lon", FEATURE_NAMES.join(","));
    match lines.next() {
        Some((_, h)) if h.trim_end() == expected => {}
        _ => return Err(WindowError::Csv { line: 1, reason: "unexpected header".into() }),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != NUM_FEATURES + 5 {
            return Err(WindowError::Csv {
                line: line_no,
                reason: format!("expected {} fields, found {}", NUM_FEATURES + 5, fields.len()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| WindowError::Csv { line: line_no, reason: format!("bad number {s:?}") })
        };
        let mut f = [0.0; NUM_FEATURES];
        for k in 0..NUM_FEATURES {
            f[k] = num(fields[k])?;
        }
        let label = match fields[NUM_FEATURES] {
            "" => None,
            "0" => Some(0),
            "1" => Some(1),
            other => return Err(WindowError::Csv { line: line_no, reason: format!("bad label {other:?}") }),
        };
        out.push(Window {
            start_t: num(fields[NUM_FEATURES + 1])?,
            end_t: num(fields[NUM_FEATURES + 2])?,
            sample_count,
            features: FeatureVector(f),
            centroid: GeoPoint { lat: num(fields[NUM_FEATURES + 3])?, lon: num(fields[NUM_FEATURES + 4])? },
            first_pos: None,
            last_pos: None,
            label,
        });
    }
    Ok(out)
}
