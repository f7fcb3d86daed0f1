//! Train the road-condition SVM on synthetic drives and compare it with
//! logistic regression and the majority-class baseline.
//!
//! cargo run --release --example road_condition_svm

use roadsense::learn::{evaluate, split_dataset, train_logreg, train_svm, Dataset, SmoParams};
use roadsense::telemetry::{synth_drive, Condition, SynthConfig};
use roadsense::windows::{attach_condition_label, make_windows, Scaler, ROAD_WINDOW};

fn main() {
    let mut windows = Vec::new();
    for (i, c) in
        [Condition::Good, Condition::Bad, Condition::Good, Condition::Good, Condition::Bad].into_iter().enumerate()
    {
        let mut config = SynthConfig::uniform(300.0, c, 100 + i as u64);
        // make the two regimes overlap so the task is not trivial
        config.sigma_good = 0.08;
        config.sigma_bad = 0.11;
        let drive = synth_drive(&config).unwrap();
        let mut w = make_windows(drive.log.samples(), ROAD_WINDOW).unwrap();
        attach_condition_label(&mut w, c);
        windows.extend(w);
    }

    let raw = Dataset::from_windows(&windows, None).unwrap();
    let (train, test) = split_dataset(&raw, 0.3, 1).unwrap();
    let scaler = Scaler::fit(train.x()).unwrap();
    let train = Dataset::new(scaler.apply_all(train.x()), train.y().to_vec()).unwrap();
    let test = Dataset::new(scaler.apply_all(test.x()), test.y().to_vec()).unwrap();

    let fit = train_svm(&train, &SmoParams::default()).unwrap();
    println!(
        "SMO: converged={} after {} iterations, {} support vectors of {}",
        fit.converged,
        fit.iterations,
        fit.model.support_vectors.len(),
        train.len()
    );
    let svm_pred = roadsense::learn::predict(&fit.model, test.x(), Some(0.0)).unwrap();
    let svm = evaluate(test.y(), &svm_pred).unwrap();

    let logreg = train_logreg(&train, 1e-3, 5000, 1e-8).unwrap().model;
    let lr = evaluate(test.y(), &logreg.predict(test.x()).unwrap()).unwrap();

    println!("baseline accuracy  {:.3}", svm.base_rate);
    println!("logistic accuracy  {:.3}", lr.accuracy);
    println!("RBF SVM accuracy   {:.3} (precision {:?}, recall {:?})", svm.accuracy, svm.precision, svm.recall);
}
