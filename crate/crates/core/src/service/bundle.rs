use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learn::SvmModel;
use crate::windows::{Scaler, FEATURE_NAMES, NUM_FEATURES};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("bundle format version {found} is not supported (expected {FORMAT_VERSION})")]
    VersionMismatch { found: u64 },
    #[error("feature order checksum {found} does not match {expected}")]
    ChecksumMismatch { found: String, expected: String },
    #[error("corrupt bundle: {0}")]
    Corrupt(String),
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub(crate) fn feature_checksum() -> String {
    format!("{:016x}", fnv1a64(FEATURE_NAMES.join(",").as_bytes()))
}

/// One task's deployable model: window length, the scaler fitted on that
/// task's training windows, and the SVM. The SVM's own `threshold` is the
/// deployed decision cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskModel {
    pub window_size: usize,
    pub scaler: Scaler,
    pub svm: SvmModel,
}

impl TaskModel {
    fn check(&self, name: &str) -> Result<(), BundleError> {
        let bad = |m: String| Err(BundleError::Corrupt(format!("{name}: {m}")));
        if self.window_size < 2 {
            return bad(format!("window size {}", self.window_size));
        }
        if self.scaler.means.len() != NUM_FEATURES || self.scaler.stds.len() != NUM_FEATURES {
            return bad("scaler length".into());
        }
        if self.scaler.stds.iter().any(|s| *s < 0.0) {
            return bad("negative scaler std".into());
        }
        let svm = &self.svm;
        if svm.dim != NUM_FEATURES || svm.support_vectors.iter().any(|sv| sv.len() != NUM_FEATURES) {
            return bad("support vector dimension".into());
        }
        if svm.support_vectors.len() != svm.dual_coefs.len() {
            return bad("coefficient count".into());
        }
        if !(svm.gamma > 0.0 && svm.c > 0.0) {
            return bad("gamma and C must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMetadata {
    /// Unix seconds.
    pub trained_at: u64,
    pub seed: u64,
    /// FNV-1a of the comma-joined canonical feature names, 16 hex digits.
    pub feature_checksum: String,
    /// FNV-1a of the serialized task models; identifies the fitted weights.
    pub model_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub road: TaskModel,
    pub pothole: TaskModel,
    pub metadata: BundleMetadata,
}

impl ModelBundle {
    pub fn new(road: TaskModel, pothole: TaskModel, seed: u64, trained_at: u64) -> Self {
        let payload = serde_json::to_vec(&(&road, &pothole)).expect("task models serialize");
        ModelBundle {
            format_version: FORMAT_VERSION,
            metadata: BundleMetadata {
                trained_at,
                seed,
                feature_checksum: feature_checksum(),
                model_version: format!("{:016x}", fnv1a64(&payload)),
            },
            road,
            pothole,
        }
    }

    pub fn model_version(&self) -> &str {
        &self.metadata.model_version
    }
}

/// Serializes the bundle as a JSON document. Floats use the shortest
/// representation that parses back to the same value.
pub fn save_bundle(bundle: &ModelBundle) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(bundle).expect("bundle serializes");
    out.push(b'\n');
    out
}

pub fn load_bundle(bytes: &[u8]) -> Result<ModelBundle, BundleError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| BundleError::Corrupt(e.to_string()))?;
    match value.get("format_version").and_then(serde_json::Value::as_u64) {
        Some(v) if v == u64::from(FORMAT_VERSION) => {}
        Some(v) => return Err(BundleError::VersionMismatch { found: v }),
        None => return Err(BundleError::Corrupt("missing format_version".into())),
    }
    let bundle: ModelBundle = serde_json::from_value(value).map_err(|e| BundleError::Corrupt(e.to_string()))?;
    let expected = feature_checksum();
    if bundle.metadata.feature_checksum != expected {
        return Err(BundleError::ChecksumMismatch { found: bundle.metadata.feature_checksum, expected });
    }
    bundle.road.check("road")?;
    bundle.pothole.check("pothole")?;
    Ok(bundle)
}
