//! Tune the pothole decision threshold for a minimum precision and write the
//! precision-recall curve.
//!
//! cargo run --release --example pothole_threshold -- [min_precision]

use roadsense::learn::SmoParams;
use roadsense::pipeline::{train_pothole, TrainConfig};
use roadsense::telemetry::{synth_drive, Condition, SynthConfig};
use roadsense::windows::{attach_pothole_labels, make_windows, POTHOLE_WINDOW};

fn main() {
    let min_precision: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.78);
    let config = SynthConfig {
        pothole_count: 60,
        pothole_impulse: 0.35,
        segments: vec![(900.0, Condition::Good), (900.0, Condition::Bad)],
        ..SynthConfig::uniform(1800.0, Condition::Good, 11)
    };
    let drive = synth_drive(&config).unwrap();
    let mut windows = make_windows(drive.log.samples(), POTHOLE_WINDOW).unwrap();
    attach_pothole_labels(&mut windows, &drive.potholes);

    let cfg = TrainConfig { window_size: POTHOLE_WINDOW, smo: SmoParams::default(), test_fraction: 0.3, seed: 11 };
    match train_pothole(&windows, &cfg, min_precision) {
        Ok(t) => {
            let r = &t.report;
            println!("threshold {:.4}", t.model.svm.threshold);
            println!(
                "precision {:.3} recall {:.3} accuracy {:.3} (base rate {:.3})",
                r.precision.unwrap_or(0.0),
                r.recall.unwrap_or(0.0),
                r.accuracy,
                r.base_rate
            );
            let path = std::env::temp_dir().join("roadsense_pr_curve.csv");
            std::fs::write(&path, t.curve.unwrap().to_csv()).unwrap();
            println!("curve written to {}", path.display());
        }
        Err(e) => eprintln!("no usable threshold: {e}"),
    }
}
