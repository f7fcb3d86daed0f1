//! Classify a drive with a freshly trained bundle and write a GeoJSON map
//! and an HTML viewer to the temp directory.
//!
//! cargo run --release --example road_map

use roadsense::learn::SmoParams;
use roadsense::mapgen::{build_html, build_map};
use roadsense::pipeline::{train_pothole, train_road, TrainConfig};
use roadsense::service::{classify_windows, ModelBundle};
use roadsense::telemetry::{synth_drive, Condition, SynthConfig};
use roadsense::windows::{attach_condition_label, attach_pothole_labels, make_windows};

fn main() {
    let cfg = TrainConfig { window_size: 25, smo: SmoParams::default(), test_fraction: 0.3, seed: 1 };
    let mut road = Vec::new();
    for (i, c) in [Condition::Good, Condition::Bad].into_iter().enumerate() {
        let mut w =
            make_windows(synth_drive(&SynthConfig::uniform(300.0, c, 10 + i as u64)).unwrap().log.samples(), 25)
                .unwrap();
        attach_condition_label(&mut w, c);
        road.extend(w);
    }
    let d =
        synth_drive(&SynthConfig { pothole_count: 40, ..SynthConfig::uniform(1200.0, Condition::Good, 12) }).unwrap();
    let mut pothole = make_windows(d.log.samples(), 10).unwrap();
    attach_pothole_labels(&mut pothole, &d.potholes);
    let bundle = ModelBundle::new(
        train_road(&road, &cfg).unwrap().model,
        train_pothole(&pothole, &TrainConfig { window_size: 10, ..cfg }, 0.78).unwrap().model,
        1,
        0,
    );

    // a ten-minute route: good, rough stretch, good again
    let route = SynthConfig {
        duration_s: 600.0,
        segments: vec![(200.0, Condition::Good), (200.0, Condition::Bad), (200.0, Condition::Good)],
        pothole_count: 8,
        rng_seed: 99,
        ..Default::default()
    };
    let drive = synth_drive(&route).unwrap();
    let (road_w, pothole_w) = classify_windows(&bundle, drive.log.samples()).unwrap();
    let geojson = build_map(&road_w, &pothole_w).unwrap();

    let dir = std::env::temp_dir();
    std::fs::write(dir.join("roadsense_map.geojson"), format!("{geojson}\n")).unwrap();
    std::fs::write(dir.join("roadsense_map.html"), build_html(&geojson, "Synthetic route")).unwrap();
    let bad = road_w.iter().filter(|c| c.positive).count();
    let holes = pothole_w.iter().filter(|c| c.positive).count();
    println!(
        "{} segments ({bad} bad), {holes} pothole markers -> {}",
        road_w.len(),
        dir.join("roadsense_map.html").display()
    );
}
