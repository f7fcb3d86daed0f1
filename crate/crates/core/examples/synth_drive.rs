//! Generate a mixed-regime drive with potholes and print a summary plus the
//! first rows of the CSV.
//!
//! cargo run --example synth_drive -- [seed]

use roadsense::telemetry::{synth_drive, Condition, SynthConfig};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let config = SynthConfig {
        duration_s: 180.0,
        segments: vec![(60.0, Condition::Good), (60.0, Condition::Bad), (60.0, Condition::Good)],
        pothole_count: 5,
        rng_seed: seed,
        ..Default::default()
    };
    let drive = synth_drive(&config).expect("valid config");
    let bad = drive.regimes.iter().filter(|r| **r == Condition::Bad).count();
    println!("{} samples ({bad} on bad road), potholes at {:?}", drive.log.len(), drive.potholes.timestamps());
    for line in drive.log.to_csv().lines().take(4) {
        println!("{line}");
    }
}
