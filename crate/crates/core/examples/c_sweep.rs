//! Train and test error of the road-condition SVM across C.
//!
//! cargo run --release --example c_sweep

use roadsense::learn::{split_dataset, sweep_c, Dataset, SmoParams};
use roadsense::telemetry::{synth_drive, Condition, SynthConfig};
use roadsense::windows::{attach_condition_label, make_windows, Scaler};

fn main() {
    let mut windows = Vec::new();
    for (i, c) in [Condition::Good, Condition::Bad, Condition::Good, Condition::Bad].into_iter().enumerate() {
        let config = SynthConfig { sigma_good: 0.09, sigma_bad: 0.11, ..SynthConfig::uniform(300.0, c, 40 + i as u64) };
        let mut w = make_windows(synth_drive(&config).unwrap().log.samples(), 25).unwrap();
        attach_condition_label(&mut w, c);
        windows.extend(w);
    }
    let raw = Dataset::from_windows(&windows, None).unwrap();
    let (train, test) = split_dataset(&raw, 0.3, 2).unwrap();
    let scaler = Scaler::fit(train.x()).unwrap();
    let train = Dataset::new(scaler.apply_all(train.x()), train.y().to_vec()).unwrap();
    let test = Dataset::new(scaler.apply_all(test.x()), test.y().to_vec()).unwrap();

    let grid = [0.01, 0.1, 1.0, 10.0, 100.0, 250.0, 1000.0];
    println!("{:>8} {:>11} {:>10}", "C", "train_err", "test_err");
    for p in sweep_c(&train, &test, &grid, &SmoParams::default()).unwrap() {
        println!("{:>8} {:>11.4} {:>10.4}", p.c, p.train_error, p.test_error);
    }
}
