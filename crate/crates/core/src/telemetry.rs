//! Drive logs, pothole annotations and the seeded synthetic drive generator.
//!
//! A drive log is a CSV of 5 Hz readings with the exact header
//! `t,ax,ay,az,gx,gy,gz,lat,lon,speed`. Acceleration is in g, rotation rate
//! in rad/s, speed in m/s. Pothole annotations live in a sibling CSV with a
//! single `t` column.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DRIVE_HEADER: [&str; 10] = ["t", "ax", "ay", "az", "gx", "gy", "gz", "lat", "lon", "speed"];
pub const POTHOLE_HEADER: &str = "t";

const METERS_PER_DEGREE: f64 = 111_320.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TelemetryError {
    #[error("line {line}: expected header `{expected}`")]
    BadHeader { line: usize, expected: String },
    #[error("line {line}: malformed row ({reason})")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: timestamp does not increase")]
    NonMonotonicTime { line: usize },
    #[error("line {line}: {field} out of range ({value})")]
    OutOfRange { line: usize, field: &'static str, value: f64 },
    #[error("median sample gap {median_gap}s is outside [0.1, 1.0]")]
    IrregularSampling { median_gap: f64 },
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
}

/// One IMU/GPS reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSample {
    pub t: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
    pub gx: f64,
    pub gy: f64,
    pub gz: f64,
    pub lat: f64,
    pub lon: f64,
    pub speed: f64,
}

impl SensorSample {
    pub fn fields(&self) -> [f64; 10] {
        [self.t, self.ax, self.ay, self.az, self.gx, self.gy, self.gz, self.lat, self.lon, self.speed]
    }

    fn from_fields(v: [f64; 10]) -> Self {
        SensorSample {
            t: v[0],
            ax: v[1],
            ay: v[2],
            az: v[3],
            gx: v[4],
            gy: v[5],
            gz: v[6],
            lat: v[7],
            lon: v[8],
            speed: v[9],
        }
    }

    /// Checks finiteness and geographic/speed bounds. On failure returns the
    /// offending field name and value.
    pub fn check_ranges(&self) -> Result<(), (&'static str, f64)> {
        for (name, v) in DRIVE_HEADER.iter().zip(self.fields()) {
            if !v.is_finite() {
                return Err((name, v));
            }
        }
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(("lat", self.lat));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(("lon", self.lon));
        }
        if self.speed < 0.0 {
            return Err(("speed", self.speed));
        }
        Ok(())
    }
}

/// Validates a run of samples: every sample in range, timestamps strictly
/// increasing. Errors carry the zero-based index of the first bad sample.
pub fn validate_samples(samples: &[SensorSample]) -> Result<(), SampleFault> {
    for (i, s) in samples.iter().enumerate() {
        if let Err((field, value)) = s.check_ranges() {
            return Err(SampleFault::OutOfRange { index: i, field, value });
        }
        if i > 0 && s.t <= samples[i - 1].t {
            return Err(SampleFault::NonMonotonicTime { index: i });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleFault {
    NonMonotonicTime { index: usize },
    OutOfRange { index: usize, field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Good = 0,
    Bad = 1,
}

impl Condition {
    pub fn label(self) -> u8 {
        self as u8
    }
}

/// Regime of a synthetic road segment. Same two-way split as [`Condition`].
pub type Regime = Condition;

/// An ordered sensor stream, optionally tagged with a drive-level condition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DriveLog {
    samples: Vec<SensorSample>,
    pub condition_label: Option<Condition>,
}

impl DriveLog {
    /// Builds a log, enforcing ranges, strictly increasing time and a median
    /// sample gap within [0.1 s, 1.0 s].
    pub fn new(samples: Vec<SensorSample>) -> Result<Self, TelemetryError> {
        validate_samples(&samples).map_err(|f| match f {
            // data rows start on line 2
            SampleFault::NonMonotonicTime { index } => TelemetryError::NonMonotonicTime { line: index + 2 },
            SampleFault::OutOfRange { index, field, value } => {
                TelemetryError::OutOfRange { line: index + 2, field, value }
            }
        })?;
        if let Some(gap) = median_gap(&samples) {
            if !(0.1..=1.0).contains(&gap) {
                return Err(TelemetryError::IrregularSampling { median_gap: gap });
            }
        }
        Ok(DriveLog { samples, condition_label: None })
    }

    pub fn samples(&self) -> &[SensorSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn with_condition(mut self, condition: Condition) -> Self {
        self.condition_label = Some(condition);
        self
    }

    pub fn to_csv(&self) -> String {
        write_drive_csv(&self.samples)
    }
}

pub fn median_gap(samples: &[SensorSample]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let mut gaps: Vec<f64> = samples.windows(2).map(|w| w[1].t - w[0].t).collect();
    gaps.sort_by(f64::total_cmp);
    let m = gaps.len();
    Some(if m % 2 == 1 { gaps[m / 2] } else { 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]) })
}

/// Sorted pothole annotation timestamps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotholeEvents {
    timestamps: Vec<f64>,
}

impl PotholeEvents {
    /// Sorts the given timestamps. Non-finite values are rejected.
    pub fn new(mut timestamps: Vec<f64>) -> Result<Self, TelemetryError> {
        if let Some(i) = timestamps.iter().position(|t| !t.is_finite()) {
            return Err(TelemetryError::MalformedRow { line: i + 2, reason: "non-finite timestamp".into() });
        }
        timestamps.sort_by(f64::total_cmp);
        Ok(PotholeEvents { timestamps })
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t\n");
        for t in &self.timestamps {
            let _ = writeln!(out, "{t}");
        }
        out
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes())
}

fn record_line(rec: &csv::StringRecord, fallback: usize) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(fallback)
}

/// Parses a drive log CSV. Samples keep file order; line numbers in errors
/// are 1-based with the header on line 1.
pub fn parse_drive_log(csv_text: &str) -> Result<DriveLog, TelemetryError> {
    let mut rdr = reader(csv_text);
    let mut records = rdr.records();
    let expected = DRIVE_HEADER.join(",");
    match records.next() {
        Some(Ok(h)) if h.iter().map(str::trim).eq(DRIVE_HEADER.iter().copied()) => {}
        Some(Err(e)) => {
            return Err(TelemetryError::MalformedRow { line: 1, reason: e.to_string() });
        }
        _ => return Err(TelemetryError::BadHeader { line: 1, expected }),
    }

    let mut samples = Vec::new();
    for (row, rec) in records.enumerate() {
        let rec = rec.map_err(|e| TelemetryError::MalformedRow {
            line: e.position().map(|p| p.line() as usize).unwrap_or(row + 2),
            reason: e.to_string(),
        })?;
        let line = record_line(&rec, row + 2);
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != DRIVE_HEADER.len() {
            return Err(TelemetryError::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", DRIVE_HEADER.len(), rec.len()),
            });
        }
        let mut v = [0.0; 10];
        for (k, field) in rec.iter().enumerate() {
            v[k] = parse_number(field).ok_or_else(|| TelemetryError::MalformedRow {
                line,
                reason: format!("field `{}` is not a finite number: {field:?}", DRIVE_HEADER[k]),
            })?;
        }
        let s = SensorSample::from_fields(v);
        if let Err((field, value)) = s.check_ranges() {
            return Err(TelemetryError::OutOfRange { line, field, value });
        }
        if let Some(prev) = samples.last() {
            let prev: &SensorSample = prev;
            if s.t <= prev.t {
                return Err(TelemetryError::NonMonotonicTime { line });
            }
        }
        samples.push(s);
    }
    DriveLog::new(samples)
}

fn parse_number(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a pothole annotation CSV (`t` header). Output is sorted.
pub fn parse_pothole_labels(csv_text: &str) -> Result<PotholeEvents, TelemetryError> {
    let mut rdr = reader(csv_text);
    let mut records = rdr.records();
    match records.next() {
        Some(Ok(h)) if h.len() == 1 && h[0].trim() == POTHOLE_HEADER => {}
        _ => {
            return Err(TelemetryError::BadHeader { line: 1, expected: POTHOLE_HEADER.into() });
        }
    }
    let mut ts = Vec::new();
    for (row, rec) in records.enumerate() {
        let rec = rec.map_err(|e| TelemetryError::MalformedRow { line: row + 2, reason: e.to_string() })?;
        let line = record_line(&rec, row + 2);
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != 1 {
            return Err(TelemetryError::MalformedRow {
                line,
                reason: format!("expected 1 field, found {}", rec.len()),
            });
        }
        let t = parse_number(&rec[0]).ok_or_else(|| TelemetryError::MalformedRow {
            line,
            reason: format!("not a finite number: {:?}", &rec[0]),
        })?;
        ts.push(t);
    }
    PotholeEvents::new(ts)
}

/// Canonical CSV form: exact header, shortest round-trip float formatting,
/// LF endings.
pub fn write_drive_csv(samples: &[SensorSample]) -> String {
    let mut out = DRIVE_HEADER.join(",");
    out.push('\n');
    for s in samples {
        let f = s.fields();
        for (k, v) in f.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Parameters of the seeded synthetic drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    /// Ordered `(length_s, regime)` segments. The last segment extends to the
    /// end of the drive if the plan is shorter than `duration_s`.
    pub segments: Vec<(f64, Regime)>,
    pub pothole_count: usize,
    pub sigma_good: f64,
    pub sigma_bad: f64,
    pub pothole_impulse: f64,
    pub rng_seed: u64,
    pub start_t: f64,
    pub start_lat: f64,
    pub start_lon: f64,
    /// Direction of travel, degrees clockwise from north.
    pub heading_deg: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            duration_s: 60.0,
            sample_rate_hz: 5.0,
            segments: vec![(60.0, Regime::Good)],
            pothole_count: 0,
            sigma_good: 0.03,
            sigma_bad: 0.20,
            pothole_impulse: 1.0,
            rng_seed: 0,
            start_t: 1_476_000_000.0,
            start_lat: 40.4406,
            start_lon: -79.9959,
            heading_deg: 45.0,
        }
    }
}

impl SynthConfig {
    /// A drive entirely on one regime.
    pub fn uniform(duration_s: f64, regime: Regime, seed: u64) -> Self {
        SynthConfig { duration_s, segments: vec![(duration_s, regime)], rng_seed: seed, ..Default::default() }
    }

    pub fn sample_count(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).floor() as usize
    }

    pub fn validate(&self) -> Result<(), TelemetryError> {
        let bad = |m: &str| Err(TelemetryError::InvalidConfig(m.to_string()));
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return bad("duration must be > 0");
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return bad("sample rate must be > 0");
        }
        if !(self.sigma_good > 0.0 && self.sigma_bad > self.sigma_good && self.sigma_bad.is_finite()) {
            return bad("need sigma_bad > sigma_good > 0");
        }
        if !(self.pothole_impulse.is_finite() && self.pothole_impulse >= 0.0) {
            return bad("pothole impulse must be >= 0");
        }
        if self.segments.is_empty() {
            return bad("segment plan is empty");
        }
        if self.segments.iter().any(|(len, _)| !(len.is_finite() && *len > 0.0)) {
            return bad("segment lengths must be > 0");
        }
        if self.pothole_count > 0 && self.sample_count() < 2 {
            return bad("potholes need at least 2 samples");
        }
        if !(-90.0..=90.0).contains(&self.start_lat) || !(-180.0..=180.0).contains(&self.start_lon) {
            return bad("start position out of range");
        }
        Ok(())
    }

    fn regime_at(&self, offset_s: f64) -> Regime {
        let mut end = 0.0;
        for &(len, regime) in &self.segments {
            end += len;
            if offset_s < end {
                return regime;
            }
        }
        self.segments.last().map(|s| s.1).unwrap_or(Regime::Good)
    }

    fn sigma(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Good => self.sigma_good,
            Regime::Bad => self.sigma_bad,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDrive {
    pub log: DriveLog,
    pub potholes: PotholeEvents,
    /// Regime of each sample, aligned with `log.samples()`.
    pub regimes: Vec<Regime>,
}

/// Generates a deterministic drive from `config`. Identical configs produce
/// bit-identical output.
pub fn synth_drive(config: &SynthConfig) -> Result<SynthDrive, TelemetryError> {
    config.validate()?;
    let n = config.sample_count();
    let dt = 1.0 / config.sample_rate_hz;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let heading = config.heading_deg.to_radians();

    let mut samples = Vec::with_capacity(n);
    let mut regimes = Vec::with_capacity(n);
    let (mut lat, mut lon) = (config.start_lat, config.start_lon);
    for k in 0..n {
        let offset = k as f64 * dt;
        let regime = config.regime_at(offset);
        let sigma = config.sigma(regime);
        let mut draw = || unit.sample(&mut rng);
        let ax = sigma * draw();
        let ay = sigma * draw();
        let az = 1.0 + sigma * draw();
        let gx = sigma * draw();
        let gy = sigma * draw();
        let gz = sigma * draw();
        let speed = (10.0 + 0.5 * draw()).max(0.0);
        samples.push(SensorSample { t: config.start_t + offset, ax, ay, az, gx, gy, gz, lat, lon, speed });
        regimes.push(regime);

        let dist = speed * dt;
        lat += dist * heading.cos() / METERS_PER_DEGREE;
        lon += dist * heading.sin() / (METERS_PER_DEGREE * lat.to_radians().cos());
        lat = lat.clamp(-90.0, 90.0);
        lon = ((lon + 180.0).rem_euclid(360.0)) - 180.0;
    }

    let mut events = Vec::with_capacity(config.pothole_count);
    if config.pothole_count > 0 {
        // the impulse spans samples k and k+1, so k stops at n-2
        let last = (n - 2) as f64 * dt;
        for _ in 0..config.pothole_count {
            let offset = rng.random::<f64>() * last;
            let k = ((offset / dt).floor() as usize).min(n - 2);
            for s in &mut samples[k..k + 2] {
                let sigma = config.sigma(regimes[k]);
                s.az += config.pothole_impulse * s.az.signum();
                s.gx += 3.0 * sigma;
                s.gy += 3.0 * sigma;
                s.gz += 3.0 * sigma;
            }
            events.push(config.start_t + offset);
        }
    }

    let log = DriveLog::new(samples)?;
    Ok(SynthDrive { log, potholes: PotholeEvents::new(events)?, regimes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "t,ax,ay,az,gx,gy,gz,lat,lon,speed\n";

    #[test]
    fn header_only_is_empty() {
        let log = parse_drive_log(HEADER).unwrap();
        assert!(log.is_empty());
    }

    #[test]
    fn parses_rows_verbatim() {
        let text = format!(
            "{HEADER}0.0,0.1,0.2,1.0,0.01,0.02,0.03,40.0,-79.0,5.0\n\
             0.2,0.1,0.2,1.0,0.01,0.02,0.03,40.0,-79.0,5.5\n\
             0.4,-0.1,0.2,0.9,0.01,0.02,-0.03,40.1,-79.1,6.0\n"
        );
        let log = parse_drive_log(&text).unwrap();
        assert_eq!(log.len(), 3);
        let s = log.samples()[2];
        assert_eq!(s.t, 0.4);
        assert_eq!(s.ax, -0.1);
        assert_eq!(s.az, 0.9);
        assert_eq!(s.gz, -0.03);
        assert_eq!(s.lat, 40.1);
        assert_eq!(s.lon, -79.1);
        assert_eq!(s.speed, 6.0);
    }

    #[test]
    fn non_monotonic_reports_line() {
        let row = ",0,0,1,0,0,0,40,-79,5\n";
        let text = format!("{HEADER}0.0{row}0.2{row}0.1{row}");
        assert_eq!(parse_drive_log(&text), Err(TelemetryError::NonMonotonicTime { line: 4 }));
    }

    #[test]
    fn malformed_rows() {
        let text = format!("{HEADER}0.0,0,0,1,0,0,0,40,-79\n");
        assert!(matches!(parse_drive_log(&text), Err(TelemetryError::MalformedRow { line: 2, .. })));
        let text = format!("{HEADER}0.0,0,x,1,0,0,0,40,-79,5\n");
        assert!(matches!(parse_drive_log(&text), Err(TelemetryError::MalformedRow { line: 2, .. })));
        let text = format!("{HEADER}0.0,0,NaN,1,0,0,0,40,-79,5\n");
        assert!(matches!(parse_drive_log(&text), Err(TelemetryError::MalformedRow { line: 2, .. })));
        assert!(matches!(parse_drive_log("t,ax\n"), Err(TelemetryError::BadHeader { .. })));
    }

    #[test]
    fn out_of_range_fields() {
        for (row, field) in [
            ("0,0,0,1,0,0,0,91,-79,5", "lat"),
            ("0,0,0,1,0,0,0,40,-181,5", "lon"),
            ("0,0,0,1,0,0,0,40,-79,-1", "speed"),
        ] {
            let text = format!("{HEADER}{row}\n");
            match parse_drive_log(&text) {
                Err(TelemetryError::OutOfRange { line: 2, field: f, .. }) => assert_eq!(f, field),
                other => panic!("{row}: {other:?}"),
            }
        }
    }

    #[test]
    fn irregular_sampling_rejected() {
        let row = ",0,0,1,0,0,0,40,-79,5\n";
        let text = format!("{HEADER}0{row}5{row}10{row}");
        assert!(matches!(parse_drive_log(&text), Err(TelemetryError::IrregularSampling { .. })));
    }

    #[test]
    fn crlf_tolerated() {
        let text = "t,ax,ay,az,gx,gy,gz,lat,lon,speed\r\n0,0,0,1,0,0,0,40,-79,5\r\n";
        assert_eq!(parse_drive_log(text).unwrap().len(), 1);
    }

    #[test]
    fn pothole_labels() {
        assert!(parse_pothole_labels("t\n").unwrap().is_empty());
        let ev = parse_pothole_labels("t\n5.0\n2.0\n9.5\n").unwrap();
        assert_eq!(ev.timestamps(), &[2.0, 5.0, 9.5]);
        assert!(matches!(parse_pothole_labels("t\nabc\n"), Err(TelemetryError::MalformedRow { line: 2, .. })));
    }

    #[test]
    fn synth_counts_and_determinism() {
        let cfg = SynthConfig::uniform(60.0, Regime::Good, 42);
        let a = synth_drive(&cfg).unwrap();
        assert_eq!(a.log.len(), 300);
        assert!(a.potholes.is_empty());
        let b = synth_drive(&cfg).unwrap();
        assert_eq!(a.log.to_csv(), b.log.to_csv());

        let cfg = SynthConfig { pothole_count: 7, ..cfg };
        let c = synth_drive(&cfg).unwrap();
        assert_eq!(c.potholes.len(), 7);
        assert_eq!(c.potholes.to_csv(), synth_drive(&cfg).unwrap().potholes.to_csv());
    }

    #[test]
    fn synth_rejects_bad_config() {
        let base = SynthConfig::default();
        for cfg in [
            SynthConfig { duration_s: 0.0, ..base.clone() },
            SynthConfig { sigma_bad: 0.01, ..base.clone() },
            SynthConfig { sigma_good: 0.0, ..base.clone() },
            SynthConfig { segments: vec![], ..base.clone() },
        ] {
            assert!(matches!(synth_drive(&cfg), Err(TelemetryError::InvalidConfig(_))));
        }
    }

    #[test]
    fn synth_segments_follow_plan() {
        let cfg = SynthConfig {
            duration_s: 20.0,
            segments: vec![(10.0, Regime::Good), (10.0, Regime::Bad)],
            ..Default::default()
        };
        let d = synth_drive(&cfg).unwrap();
        assert_eq!(d.regimes[..50], [Regime::Good; 50]);
        assert_eq!(d.regimes[50..], [Regime::Bad; 50]);
    }

    #[test]
    fn pothole_impulse_lands_on_event_sample() {
        let cfg = SynthConfig { pothole_count: 1, rng_seed: 9, ..Default::default() };
        let d = synth_drive(&cfg).unwrap();
        let t = d.potholes.timestamps()[0];
        let k = d.log.samples().iter().rposition(|s| s.t <= t).unwrap();
        assert!(d.log.samples()[k].az > 1.5);
        assert!(d.log.samples()[k + 1].az > 1.5);
    }

    #[test]
    fn good_segment_std_near_sigma_over_seeds() {
        for seed in 0..100 {
            let cfg = SynthConfig::uniform(10.0, Regime::Good, seed);
            let d = synth_drive(&cfg).unwrap();
            let az: Vec<f64> = d.log.samples().iter().map(|s| s.az).collect();
            let n = az.len() as f64;
            let mean = az.iter().sum::<f64>() / n;
            let std = (az.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            assert!((0.5 * cfg.sigma_good..=2.0 * cfg.sigma_good).contains(&std), "seed {seed}: std {std}");
        }
    }

    fn sample_strategy() -> impl Strategy<Value = SensorSample> {
        (
            -4.0..4.0f64,
            -4.0..4.0f64,
            -4.0..4.0f64,
            -10.0..10.0f64,
            -10.0..10.0f64,
            -10.0..10.0f64,
            -90.0..=90.0f64,
            -180.0..=180.0f64,
            0.0..60.0f64,
        )
            .prop_map(|(ax, ay, az, gx, gy, gz, lat, lon, speed)| SensorSample {
                t: 0.0,
                ax,
                ay,
                az,
                gx,
                gy,
                gz,
                lat,
                lon,
                speed,
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in prop::collection::vec(sample_strategy(), 0..40), t0 in 0.0..2e9f64) {
            let samples: Vec<SensorSample> = rows
                .into_iter()
                .enumerate()
                .map(|(i, s)| SensorSample { t: t0 + 0.2 * i as f64, ..s })
                .collect();
            let text = write_drive_csv(&samples);
            let log = parse_drive_log(&text).unwrap();
            prop_assert_eq!(log.samples(), &samples[..]);
            prop_assert_eq!(log.to_csv(), text);
        }

        #[test]
        fn synth_sample_count(duration in 0.5..120.0f64, rate in 1.0..10.0f64, seed in any::<u64>()) {
            let cfg = SynthConfig {
                duration_s: duration,
                sample_rate_hz: rate,
                segments: vec![(duration, Regime::Bad)],
                rng_seed: seed,
                ..Default::default()
            };
            let d = synth_drive(&cfg).unwrap();
            prop_assert_eq!(d.log.len(), (duration * rate).floor() as usize);
        }
    }
}
