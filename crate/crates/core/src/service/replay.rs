use std::io::Write;
use std::thread;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use super::classify::{ClassifyRequest, ClassifyResponse};
use crate::telemetry::SensorSample;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("could not reach {url} after {attempts} attempts: {message}")]
    Connection { url: String, attempts: u32, message: String },
    #[error("server answered {status}: {body}")]
    Http { status: u16, body: String },
    #[error("bad response: {0}")]
    Decode(String),
    #[error("chunk length must be > 0")]
    InvalidChunk,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ReplayConfig {
    /// Base URL, e.g. `http://127.0.0.1:8080`.
    pub server_url: String,
    pub chunk_seconds: f64,
    /// Playback speed relative to real time. `None` sends as fast as the
    /// server answers.
    pub speedup: Option<f64>,
    pub attempts: u32,
    /// First retry delay; doubles on each further attempt.
    pub backoff: Duration,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig {
            server_url: "http://127.0.0.1:8080".into(),
            chunk_seconds: 5.0,
            speedup: None,
            attempts: 3,
            backoff: Duration::from_millis(250),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub requests: usize,
    pub responses: Vec<ClassifyResponse>,
}

/// Splits samples into consecutive chunks of `chunk_seconds` measured from
/// the first timestamp.
pub fn chunk_samples(samples: &[SensorSample], chunk_seconds: f64) -> Vec<&[SensorSample]> {
    let Some(first) = samples.first() else {
        return Vec::new();
    };
    let t0 = first.t;
    // absorbs float error in epoch-scale timestamps
    let slack = 1e-6;
    let bucket = |s: &SensorSample| ((s.t - t0 + slack) / chunk_seconds).floor() as i64;
    samples.chunk_by(|a, b| bucket(a) == bucket(b)).collect()
}

fn post_chunk(
    agent: &ureq::Agent,
    url: &str,
    body: &str,
    config: &ReplayConfig,
) -> Result<ClassifyResponse, ReplayError> {
    let mut delay = config.backoff;
    let attempts = config.attempts.max(1);
    let mut last_error = String::new();
    for attempt in 1..=attempts {
        match agent.post(url).header("content-type", "application/json").send(body) {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let text = resp.body_mut().read_to_string().map_err(|e| ReplayError::Decode(e.to_string()))?;
                if status != 200 {
                    return Err(ReplayError::Http { status, body: text });
                }
                return serde_json::from_str(&text).map_err(|e| ReplayError::Decode(e.to_string()));
            }
            Err(e) => {
                last_error = e.to_string();
                if attempt < attempts {
                    eprintln!("request failed ({last_error}); retrying in {delay:?}");
                    thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
    }
    Err(ReplayError::Connection { url: url.to_string(), attempts, message: last_error })
}

#[derive(Serialize)]
struct IntervalLine<L> {
    task: &'static str,
    start_t: f64,
    end_t: f64,
    label: L,
    score: f64,
}

fn write_line<L: Serialize>(
    out: &mut impl Write,
    task: &'static str,
    start_t: f64,
    end_t: f64,
    label: L,
    score: f64,
) -> Result<(), ReplayError> {
    let line = serde_json::to_string(&IntervalLine { task, start_t, end_t, label, score })
        .map_err(|e| ReplayError::Decode(e.to_string()))?;
    writeln!(out, "{line}")?;
    Ok(())
}

/// Streams `samples` to the server in `chunk_seconds` batches and writes one
/// JSON line per returned interval to `out`.
pub fn replay_client(
    samples: &[SensorSample],
    config: &ReplayConfig,
    out: &mut impl Write,
) -> Result<ReplayOutcome, ReplayError> {
    if !(config.chunk_seconds.is_finite() && config.chunk_seconds > 0.0) {
        return Err(ReplayError::InvalidChunk);
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(30)))
        .build()
        .into();
    let url = format!("{}/v1/classify", config.server_url.trim_end_matches('/'));
    let mut responses = Vec::new();
    for (k, chunk) in chunk_samples(samples, config.chunk_seconds).into_iter().enumerate() {
        if k > 0 {
            if let Some(speed) = config.speedup.filter(|s| *s > 0.0) {
                thread::sleep(Duration::from_secs_f64(config.chunk_seconds / speed));
            }
        }
        let body = serde_json::to_string(&ClassifyRequest { samples: chunk.to_vec() })
            .map_err(|e| ReplayError::Decode(e.to_string()))?;
        let resp = post_chunk(&agent, &url, &body, config)?;
        for r in &resp.road {
            write_line(out, "road", r.start_t, r.end_t, r.label, r.score)?;
        }
        for p in &resp.potholes {
            write_line(out, "pothole", p.start_t, p.end_t, p.label, p.score)?;
        }
        responses.push(resp);
    }
    Ok(ReplayOutcome { requests: responses.len(), responses })
}
