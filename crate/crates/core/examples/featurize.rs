//! Cut a synthetic drive into windows and show a few aggregate features.
//!
//! cargo run --example featurize

use roadsense::telemetry::{synth_drive, Condition, SynthConfig};
use roadsense::windows::{attach_pothole_labels, make_windows, Scaler, FEATURE_NAMES, POTHOLE_WINDOW, ROAD_WINDOW};

fn main() {
    let drive =
        synth_drive(&SynthConfig { pothole_count: 4, ..SynthConfig::uniform(120.0, Condition::Good, 3) }).unwrap();
    let samples = drive.log.samples();

    let road = make_windows(samples, ROAD_WINDOW).unwrap();
    let mut pothole = make_windows(samples, POTHOLE_WINDOW).unwrap();
    let unmatched = attach_pothole_labels(&mut pothole, &drive.potholes);
    let positives = pothole.iter().filter(|w| w.label == Some(1)).count();
    println!(
        "{} samples -> {} road windows, {} pothole windows ({positives} labelled, {unmatched} unmatched)",
        samples.len(),
        road.len(),
        pothole.len()
    );

    let scaler = Scaler::fit_windows(&pothole).unwrap();
    let std_az = FEATURE_NAMES.iter().position(|n| *n == "std_az").unwrap();
    println!("{:>14} {:>6} {:>9} {:>9}", "start_t", "label", "std_az", "z(std_az)");
    for w in pothole.iter().filter(|w| w.label == Some(1)).chain(pothole.iter().take(3)) {
        let z = scaler.apply(w.features.as_slice());
        println!(
            "{:>14.1} {:>6} {:>9.4} {:>9.3}",
            w.start_t,
            w.label.unwrap(),
            w.features.as_slice()[std_az],
            z[std_az]
        );
    }
}
