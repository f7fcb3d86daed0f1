//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use roadsense::explore::{jacobi_eigen, pca_fit, pca_transform};
use roadsense::learn::{
    evaluate, logistic_gradient, logistic_loss, pr_curve, train_svm, Dataset, LogRegModel, SmoParams,
};
use roadsense::pipeline::{train_pothole, train_road};
use roadsense::service::{classify_batch, classify_windows, load_bundle, save_bundle, ClassifyRequest, ModelBundle};
use roadsense::telemetry::{Condition, PotholeEvents, SensorSample};
use roadsense::windows::{attach_pothole_labels, make_windows};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit {
        Ok(())
    } else {
        Err(format!("took {:.1}s, limit {limit}s", elapsed.as_secs_f64()))
    }
}

// ---------------------------------------------------------------- 1

fn road_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut accs = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for seed in 0..20 {
        let t = train_road(&common::road_windows(seed), &common::config(25, seed)).map_err(|e| e.to_string())?;
        accs.push(t.report.accuracy);
        worst_margin = worst_margin.min(t.report.accuracy - t.report.base_rate);
    }
    within(start.elapsed(), 60.0)?;
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    check(
        mean >= 0.95 && worst_margin > 0.0,
        format!(
            "mean test accuracy {mean:.4} over 20 seeds, min margin over base rate {worst_margin:.4}, {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 2

fn pothole_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut passing = 0;
    let mut worst = (1.0f64, 1.0f64);
    for seed in 0..20 {
        match train_pothole(&common::pothole_windows(seed, 50), &common::config(10, seed), 0.78) {
            Ok(t) => {
                let p = t.report.precision.unwrap_or(0.0);
                let r = t.report.recall.unwrap_or(0.0);
                worst = (worst.0.min(p), worst.1.min(r));
                if p >= 0.78 && r >= 0.40 {
                    passing += 1;
                }
            }
            Err(e) => eprintln!("  seed {seed}: {e}"),
        }
    }
    within(start.elapsed(), 60.0)?;
    check(
        passing >= 18,
        format!(
            "{passing}/20 seeds at precision >= 0.78 and recall >= 0.40 (worst precision {:.3}, worst recall {:.3}), {:.1}s",
            worst.0,
            worst.1,
            start.elapsed().as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 3

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    (-gamma * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()).exp()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

struct DualOptimum {
    alpha: Vec<f64>,
    objective: f64,
}

/// Exact dual maximum by enumerating every face of the box: each variable
/// at 0, at C, or free. On a face the free variables solve the equality
/// constrained stationarity system; the best feasible face point wins.
fn brute_force_dual(q: &[Vec<f64>], y: &[f64], c: f64) -> DualOptimum {
    let n = y.len();
    let objective = |a: &[f64]| -> f64 {
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += a[i] * a[j] * q[i][j];
            }
        }
        a.iter().sum::<f64>() - 0.5 * quad
    };
    let mut best: Option<DualOptimum> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut k = code;
        for s in state.iter_mut() {
            *s = (k % 3) as u8;
            k /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        let fixed_balance: f64 = (0..n).filter(|&i| state[i] != 2).map(|i| y[i] * alpha[i]).sum();
        if free.is_empty() {
            if fixed_balance.abs() > 1e-12 {
                continue;
            }
        } else {
            // unknowns: alpha_F then the multiplier of y'alpha = 0
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = q[i][j];
                }
                a[r][m] = y[i];
                a[m][r] = y[i];
                b[r] = 1.0 - (0..n).filter(|&j| state[j] != 2).map(|j| q[i][j] * alpha[j]).sum::<f64>();
            }
            b[m] = -fixed_balance;
            let Some(sol) = solve(a, b) else { continue };
            if sol[..m].iter().any(|&v| v < -1e-12 || v > c + 1e-12) {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r].clamp(0.0, c);
            }
        }
        let obj = objective(&alpha);
        if best.as_ref().is_none_or(|b| obj > b.objective) {
            best = Some(DualOptimum { alpha, objective: obj });
        }
    }
    best.expect("alpha = 0 is always feasible")
}

fn smo_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_gap = 0.0f64;
    let mut sign_mismatches = 0;
    for case in 0..200 {
        let n = rng.random_range(2..=6);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..2).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let mut y: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        y[0] = 0;
        y[1] = 1;
        y.shuffle(&mut rng);
        let c = rng.random_range(0.1..10.0);
        let gamma = rng.random_range(0.1..2.0);
        let data = Dataset::new(x.clone(), y.clone()).unwrap();
        let fit = train_svm(&data, &SmoParams { c, gamma, tol: 1e-10, max_passes: 100_000 }).unwrap();
        if !fit.converged {
            return Err(format!("case {case}: solver did not converge"));
        }
        let ys: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let q: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| ys[i] * ys[j] * rbf(&x[i], &x[j], gamma)).collect()).collect();
        let oracle = brute_force_dual(&q, &ys, c);
        let smo_obj = {
            let a = &fit.alphas;
            let quad: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i] * a[j] * q[i][j]).sum();
            a.iter().sum::<f64>() - 0.5 * quad
        };
        worst_gap = worst_gap.max((smo_obj - oracle.objective).abs());

        // oracle decision function; bias from a free variable, else the
        // midpoint of the feasible interval
        let g = |i: usize| -> f64 { (0..n).map(|j| oracle.alpha[j] * ys[j] * rbf(&x[i], &x[j], gamma)).sum() };
        let free: Vec<usize> = (0..n).filter(|&i| oracle.alpha[i] > 1e-9 && oracle.alpha[i] < c - 1e-9).collect();
        let bias = if free.is_empty() {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..n {
                let v = ys[i] - g(i);
                let at_lower = oracle.alpha[i] <= 1e-9;
                if (ys[i] > 0.0) == at_lower {
                    lo = lo.max(v);
                } else {
                    hi = hi.min(v);
                }
            }
            0.5 * (lo + hi)
        } else {
            free.iter().map(|&i| ys[i] - g(i)).sum::<f64>() / free.len() as f64
        };
        for i in 0..n {
            let f_oracle = g(i) + bias;
            let f_smo = fit.model.decision_value(&x[i]);
            if (f_oracle >= 0.0) != (f_smo >= 0.0) && f_oracle.abs().max(f_smo.abs()) > 1e-6 {
                sign_mismatches += 1;
            }
        }
    }
    within(start.elapsed(), 30.0)?;
    check(
        worst_gap <= 1e-4 && sign_mismatches == 0,
        format!(
            "200 datasets, worst dual objective gap {worst_gap:.2e}, {sign_mismatches} sign mismatches, {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 4

fn logreg_gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(5..60);
        let d = rng.random_range(1..10);
        let x: Vec<Vec<f64>> =
            (0..n).map(|_| (0..d).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect()).collect();
        let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let data = Dataset::new(x, y).unwrap();
        let l2 = rng.random_range(0.0..1.0);
        let model = LogRegModel {
            weights: (0..d).map(|_| rng.sample(StandardNormal)).collect(),
            bias: rng.sample(StandardNormal),
        };
        let analytic = logistic_gradient(&model, &data, l2);
        let h = 1e-5;
        let mut numeric = Vec::with_capacity(d + 1);
        for k in 0..=d {
            let shifted = |delta: f64| {
                let mut m = model.clone();
                if k < d {
                    m.weights[k] += delta;
                } else {
                    m.bias += delta;
                }
                logistic_loss(&m, &data, l2)
            };
            numeric.push((shifted(h) - shifted(-h)) / (2.0 * h));
        }
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(diff / norm.max(1e-300));
    }
    check(worst <= 1e-5, format!("100 instances, worst relative error {worst:.2e}"))
}

// ---------------------------------------------------------------- 5

fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for u in &q {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        q.push(v);
    }
    q
}

fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Leading eigenpairs by power iteration, deflating after each one.
fn power_deflation(a: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<(f64, Vec<f64>)> {
    let d = a.len();
    let mut m = a.to_vec();
    let mut out = Vec::new();
    for _ in 0..d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut lambda = 0.0;
        for _ in 0..20_000 {
            let w = mat_vec(&m, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let dot: f64 = next.iter().zip(&v).map(|(a, b)| a * b).sum();
            let step: f64 = next.iter().zip(&v).map(|(a, b)| (a - dot.signum() * b).powi(2)).sum::<f64>().sqrt();
            v = next;
            lambda = v.iter().zip(mat_vec(&m, &v)).map(|(a, b)| a * b).sum();
            if step < 1e-15 {
                break;
            }
        }
        for i in 0..d {
            for j in 0..d {
                m[i][j] -= lambda * v[i] * v[j];
            }
        }
        out.push((lambda, v));
    }
    out
}

fn pca_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = 26;
    let (mut worst_pair, mut worst_ortho, mut worst_recon) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        // eigenvalues with ratio <= 0.7 * 1.05 / 0.95 between neighbours
        let lambdas: Vec<f64> =
            (0..d).map(|i| 10.0 * 0.7f64.powi(i as i32) * (1.0 + rng.random_range(-0.05..0.05))).collect();
        let q = random_orthogonal(&mut rng, d);
        let cov: Vec<Vec<f64>> =
            (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| q[k][i] * lambdas[k] * q[k][j]).sum()).collect()).collect();
        let eig = jacobi_eigen(&cov).map_err(|e| e.to_string())?;
        let reference = power_deflation(&cov, &mut rng);
        for (k, (lambda, v)) in reference.iter().enumerate() {
            let sign = if eig.vectors[k].iter().zip(v).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            let vec_err = eig.vectors[k].iter().zip(v).map(|(a, b)| (a - sign * b).abs()).fold(0.0, f64::max);
            worst_pair = worst_pair.max(vec_err).max((eig.values[k] - lambda).abs());
        }
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = eig.vectors[i].iter().zip(&eig.vectors[j]).map(|(a, b)| a * b).sum();
                worst_ortho = worst_ortho.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }

        let n = 120;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let z: Vec<f64> = (0..d).map(|k| lambdas[k].sqrt() * rng.sample::<f64, _>(StandardNormal)).collect();
                (0..d).map(|i| (0..d).map(|k| q[k][i] * z[k]).sum::<f64>() + 3.0).collect()
            })
            .collect();
        let proj = pca_fit(&x, d).map_err(|e| e.to_string())?;
        let scores = pca_transform(&proj, &x).map_err(|e| e.to_string())?;
        for (row, s) in x.iter().zip(&scores) {
            let back = proj.reconstruct(s);
            worst_recon = worst_recon.max(row.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    check(
        worst_pair <= 1e-6 && worst_ortho < 1e-9 && worst_recon <= 1e-9,
        format!(
            "100 covariances, eigenpair error {worst_pair:.2e}, orthonormality {worst_ortho:.2e}, k=26 reconstruction {worst_recon:.2e}, {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 6

fn window_arithmetic() -> Outcome {
    let samples: Vec<SensorSample> = (0..21_300)
        .map(|i| SensorSample {
            t: 1_476_000_000.0 + i as f64 * 0.2,
            ax: (i as f64 * 0.37).sin() * 0.1,
            ay: (i as f64 * 0.11).cos() * 0.1,
            az: 1.0,
            gx: 0.0,
            gy: 0.0,
            gz: 0.01,
            lat: 40.44,
            lon: -79.99,
            speed: 12.0,
        })
        .collect();
    let road = make_windows(&samples, 25).map_err(|e| e.to_string())?;
    let mut pothole = make_windows(&samples, 10).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut picks: Vec<usize> = (0..pothole.len()).collect();
    picks.shuffle(&mut rng);
    let events: Vec<f64> = picks[..96]
        .iter()
        .map(|&w| pothole[w].start_t + rng.random_range(0.0..(pothole[w].end_t - pothole[w].start_t)))
        .collect();
    let unmatched = attach_pothole_labels(&mut pothole, &PotholeEvents::new(events).map_err(|e| e.to_string())?);
    let positives = pothole.iter().filter(|w| w.label == Some(1)).count();
    check(
        road.len() == 852 && pothole.len() == 2130 && positives == 96 && unmatched == 0,
        format!("{} road windows, {} pothole windows, {positives} positive", road.len(), pothole.len()),
    )
}

// ---------------------------------------------------------------- 7

fn base_rates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.random_range(1..2000);
        let truth: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.3))).collect();
        let negatives = truth.iter().filter(|&&l| l == 0).count();
        let r = evaluate(&truth, &vec![0; n]).map_err(|e| e.to_string())?;
        if r.accuracy != negatives as f64 / n as f64 {
            return Err(format!("n={n}: accuracy {} != {}", r.accuracy, negatives as f64 / n as f64));
        }
    }
    let mut quoted = Vec::new();
    for (n, neg, expect) in [(1000usize, 820usize, 0.82), (1000, 898, 0.898), (500, 449, 0.898)] {
        let mut truth: Vec<u8> = (0..n).map(|i| u8::from(i >= neg)).collect();
        truth.shuffle(&mut rng);
        let r = evaluate(&truth, &vec![0; n]).map_err(|e| e.to_string())?;
        if r.accuracy != expect || r.base_rate != expect {
            return Err(format!("{neg}/{n}: accuracy {}", r.accuracy));
        }
        quoted.push(r.accuracy);
    }
    Ok(format!("all-negative accuracy equals negative fraction on 200 sets; quoted baselines {quoted:?}"))
}

// ---------------------------------------------------------------- 8

fn same_decision_values(a: &ModelBundle, b: &ModelBundle, samples: &[SensorSample]) -> Result<(), String> {
    let (ra, pa) = classify_windows(a, samples).map_err(|e| e.to_string())?;
    let (rb, pb) = classify_windows(b, samples).map_err(|e| e.to_string())?;
    let bits = |v: &[roadsense::service::ClassifiedWindow]| v.iter().map(|c| c.score.to_bits()).collect::<Vec<_>>();
    if bits(&ra) == bits(&rb) && bits(&pa) == bits(&pb) {
        Ok(())
    } else {
        Err("decision values changed across save/load".into())
    }
}

fn service_consistency() -> Outcome {
    let bundle = common::trained_bundle(8);
    let reloaded = load_bundle(&save_bundle(&bundle)).map_err(|e| e.to_string())?;
    if reloaded != bundle {
        return Err("bundle changed across save/load".into());
    }
    let server = common::spawn_server(reloaded.clone());
    let agent = common::agent();
    let url = format!("{}/v1/classify", server.url());
    let mut requests = 0;
    for seed in 0..10u64 {
        let d = common::drive(30.0 + 13.0 * seed as f64, Condition::Bad, 2, 100 + seed, 1_476_000_000.0);
        let samples = d.log.samples();
        let offline = serde_json::to_vec(&classify_batch(&bundle, samples).map_err(|e| e.to_string())?).unwrap();
        same_decision_values(&bundle, &reloaded, samples).map_err(|e| format!("seed {seed}: {e}"))?;
        let body = serde_json::to_vec(&ClassifyRequest { samples: samples.to_vec() }).unwrap();
        let (status, online) = common::post_json(&agent, &url, &body);
        requests += 1;
        if status != 200 || online != offline {
            return Err(format!("seed {seed}: status {status}, bodies differ"));
        }
    }
    let d = common::drive(120.0, Condition::Good, 3, 999, 1_476_000_000.0);
    let body = serde_json::to_vec(&ClassifyRequest { samples: d.log.samples().to_vec() }).unwrap();
    let handles: Vec<_> = (0..2)
        .map(|_| {
            let (url, body) = (url.clone(), body.clone());
            std::thread::spawn(move || common::post_json(&common::agent(), &url, &body))
        })
        .collect();
    let results: Vec<(u16, Vec<u8>)> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    check(
        results[0].0 == 200 && results[0] == results[1],
        format!(
            "{requests} logs matched offline bytes; save/load decision values identical; concurrent bodies identical"
        ),
    )
}

// ---------------------------------------------------------------- 9

fn pr_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for case in 0..300 {
        let n = rng.random_range(1..=1000);
        // coarse rounding in some cases forces tied scores
        let levels = [0.0, 10.0, 1e6][case % 3];
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                let s: f64 = rng.sample(StandardNormal);
                if levels > 0.0 {
                    (s * levels).round() / levels
                } else {
                    s
                }
            })
            .collect();
        let mut labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.2))).collect();
        labels[rng.random_range(0..n)] = 1;
        let curve = pr_curve(&scores, &labels).map_err(|e| e.to_string())?;

        let mut thresholds = scores.clone();
        thresholds.sort_by(|a, b| b.total_cmp(a));
        thresholds.dedup();
        let positives = labels.iter().filter(|&&l| l == 1).count();
        if curve.points.len() != thresholds.len() {
            return Err(format!("case {case}: {} points, {} distinct scores", curve.points.len(), thresholds.len()));
        }
        for (p, &t) in curve.points.iter().zip(&thresholds) {
            let (mut tp, mut fp) = (0, 0);
            for (&s, &l) in scores.iter().zip(&labels) {
                if s >= t {
                    if l == 1 {
                        tp += 1
                    } else {
                        fp += 1
                    }
                }
            }
            let precision = tp as f64 / (tp + fp) as f64;
            let recall = tp as f64 / positives as f64;
            if p.threshold != t || p.precision != precision || p.recall != recall {
                return Err(format!("case {case}: point at {t} differs"));
            }
        }
        if curve.points.windows(2).any(|w| w[1].recall < w[0].recall) {
            return Err(format!("case {case}: recall not monotone"));
        }
        checked += 1;
    }
    Ok(format!("{checked} curves equal exhaustive confusion counts; recall monotone"))
}

// ---------------------------------------------------------------- 10

fn map_validity() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_roadsense");
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        if out.status.success() {
            Ok(())
        } else {
            Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
        }
    };
    run(&["synth", "--seed", "1", "--duration", "600", "--condition", "good", "--out", &p("good.csv")])?;
    run(&["synth", "--seed", "2", "--duration", "600", "--condition", "bad", "--out", &p("bad.csv")])?;
    run(&[
        "synth",
        "--seed",
        "3",
        "--duration",
        "1800",
        "--potholes",
        "50",
        "--out",
        &p("ph.csv"),
        "--labels",
        &p("ph_labels.csv"),
    ])?;
    run(&["featurize", "--log", &p("good.csv"), "--condition", "good", "--out", &p("good_f.csv")])?;
    run(&["featurize", "--log", &p("bad.csv"), "--condition", "bad", "--out", &p("bad_f.csv")])?;
    run(&[
        "featurize",
        "--log",
        &p("ph.csv"),
        "--task",
        "pothole",
        "--labels",
        &p("ph_labels.csv"),
        "--out",
        &p("ph_f.csv"),
    ])?;
    run(&[
        "train",
        "--road",
        &p("good_f.csv"),
        "--road",
        &p("bad_f.csv"),
        "--pothole",
        &p("ph_f.csv"),
        "--seed",
        "10",
        "--trained-at",
        "0",
        "--out",
        &p("bundle.json"),
    ])?;
    run(&["synth", "--seed", "11", "--duration", "300", "--potholes", "6", "--out", &p("drive.csv")])?;
    run(&["classify", "--bundle", &p("bundle.json"), "--log", &p("drive.csv"), "--out", &p("classified.json")])?;
    run(&["map", "--classified", &p("classified.json"), "--log", &p("drive.csv"), "--out", &p("map1.geojson")])?;
    run(&["map", "--classified", &p("classified.json"), "--log", &p("drive.csv"), "--out", &p("map2.geojson")])?;

    let first = std::fs::read_to_string(p("map1.geojson")).map_err(|e| e.to_string())?;
    let second = std::fs::read_to_string(p("map2.geojson")).map_err(|e| e.to_string())?;
    let parsed: geojson::GeoJson = first.trim_end().parse().map_err(|e: geojson::Error| e.to_string())?;
    let geojson::GeoJson::FeatureCollection(fc) = parsed else {
        return Err("not a FeatureCollection".into());
    };
    let classified: roadsense::service::ClassifyResponse =
        serde_json::from_str(&std::fs::read_to_string(p("classified.json")).unwrap()).unwrap();
    let positives = classified.potholes.iter().filter(|p| p.label == roadsense::service::PotholeLabel::Pothole).count();
    let lines = fc
        .features
        .iter()
        .filter(|f| matches!(f.geometry.as_ref().map(|g| &g.value), Some(geojson::Value::LineString(_))))
        .count();
    let points = fc
        .features
        .iter()
        .filter(|f| matches!(f.geometry.as_ref().map(|g| &g.value), Some(geojson::Value::Point(_))))
        .count();
    let lon_lat_ok = fc.features.iter().all(|f| match f.geometry.as_ref().map(|g| &g.value) {
        Some(geojson::Value::Point(c)) => (-80.1..-79.8).contains(&c[0]) && (40.3..40.6).contains(&c[1]),
        Some(geojson::Value::LineString(cs)) => cs.len() >= 2 && cs.iter().all(|c| (-80.1..-79.8).contains(&c[0])),
        _ => false,
    });
    check(
        first == second && lines == classified.road.len() && points == positives && lon_lat_ok && !fc.features.is_empty(),
        format!(
            "{lines} segments for {} road windows, {points} points for {positives} pothole windows, identical bytes: {}",
            classified.road.len(),
            first == second
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("synthetic end-to-end, road condition", road_end_to_end),
        ("synthetic end-to-end, pothole", pothole_end_to_end),
        ("SMO against brute-force dual", smo_oracle),
        ("logistic gradient against finite differences", logreg_gradient_check),
        ("PCA against power iteration", pca_oracle),
        ("window and label arithmetic", window_arithmetic),
        ("base-rate identities", base_rates),
        ("service consistency", service_consistency),
        ("PR curve against exhaustive counts", pr_oracle),
        ("map validity", map_validity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
