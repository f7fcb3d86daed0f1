//! Project standardized road windows onto three principal components and
//! print the variance each explains.
//!
//! cargo run --example pca_projection > scores.csv

use roadsense::explore::{pca_fit, pca_transform, write_scores_csv};
use roadsense::telemetry::{synth_drive, Condition, SynthConfig};
use roadsense::windows::{attach_condition_label, make_windows, Scaler};

fn main() {
    let mut windows = Vec::new();
    for (seed, c) in [(1, Condition::Good), (2, Condition::Bad)] {
        let mut w =
            make_windows(synth_drive(&SynthConfig::uniform(300.0, c, seed)).unwrap().log.samples(), 25).unwrap();
        attach_condition_label(&mut w, c);
        windows.extend(w);
    }
    let scaler = Scaler::fit_windows(&windows).unwrap();
    let x: Vec<Vec<f64>> = windows.iter().map(|w| scaler.apply(w.features.as_slice())).collect();

    let proj = pca_fit(&x, 3).unwrap();
    let total: f64 = roadsense::explore::covariance(&x).unwrap().1.iter().enumerate().map(|(i, r)| r[i]).sum();
    for (k, v) in proj.eigenvalues.iter().take(3).enumerate() {
        eprintln!("pc{}: {:.1}% of variance", k + 1, 100.0 * v / total);
    }
    let scores = pca_transform(&proj, &x).unwrap();
    let labels: Vec<Option<u8>> = windows.iter().map(|w| w.label).collect();
    print!("{}", write_scores_csv(&scores, &labels));
}
