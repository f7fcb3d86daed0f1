mod common;

use std::sync::OnceLock;
use std::time::Duration;

use roadsense::service::{classify_batch, replay_client, ErrorBody, ModelBundle, ReplayConfig};
use roadsense::telemetry::Condition;

fn bundle() -> &'static ModelBundle {
    static B: OnceLock<ModelBundle> = OnceLock::new();
    B.get_or_init(|| common::trained_bundle(21))
}

#[test]
fn health_reports_model_version() {
    let server = common::spawn_server(bundle().clone());
    let mut resp = common::agent().get(format!("{}/v1/health", server.url())).call().unwrap();
    assert_eq!(resp.status().as_u16(), 200);
    let v: serde_json::Value = serde_json::from_str(&resp.body_mut().read_to_string().unwrap()).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["model_version"], bundle().model_version());
}

#[test]
fn error_statuses() {
    let server = common::spawn_server(bundle().clone());
    let url = format!("{}/v1/classify", server.url());
    let agent = common::agent();

    let (status, body) = common::post_json(&agent, &url, b"{\"samples\": [");
    assert_eq!(status, 400);
    let err: ErrorBody = serde_json::from_slice(&body).unwrap();
    assert_eq!(err.error.code, "malformed_json");

    let d = common::drive(10.0, Condition::Good, 0, 1, 1_476_000_000.0);
    let mut samples = d.log.samples().to_vec();
    samples[12].t = samples[11].t - 0.1;
    let (status, body) =
        common::post_json(&agent, &url, &serde_json::to_vec(&serde_json::json!({ "samples": samples })).unwrap());
    assert_eq!(status, 422);
    let err: ErrorBody = serde_json::from_slice(&body).unwrap();
    assert_eq!((err.error.code.as_str(), err.error.line_or_index), ("non_monotonic_time", Some(12)));

    let mut samples = d.log.samples().to_vec();
    samples[4].lon = 200.0;
    let (status, body) =
        common::post_json(&agent, &url, &serde_json::to_vec(&serde_json::json!({ "samples": samples })).unwrap());
    assert_eq!(status, 422);
    let err: ErrorBody = serde_json::from_slice(&body).unwrap();
    assert_eq!((err.error.code.as_str(), err.error.line_or_index), ("out_of_range", Some(4)));
}

#[test]
fn short_batches_are_dropped_not_rejected() {
    let server = common::spawn_server(bundle().clone());
    let d = common::drive(1.6, Condition::Good, 0, 2, 1_476_000_000.0);
    let body = serde_json::to_vec(&serde_json::json!({ "samples": d.log.samples() })).unwrap();
    let (status, body) = common::post_json(&common::agent(), &format!("{}/v1/classify", server.url()), &body);
    assert_eq!(status, 200);
    let v: serde_json::Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(v, serde_json::json!({ "road": [], "potholes": [], "dropped_samples": 8 }));
}

#[test]
fn replay_sends_one_request_per_chunk() {
    let server = common::spawn_server(bundle().clone());
    let d = common::drive(60.0, Condition::Bad, 1, 3, 1_476_000_000.0);
    let config = ReplayConfig { server_url: server.url(), ..Default::default() };
    let mut out = Vec::new();
    let outcome = replay_client(d.log.samples(), &config, &mut out).unwrap();
    assert_eq!(outcome.requests, 12);

    // every chunk is exactly one road window and 2.5 pothole windows
    for (resp, chunk) in outcome.responses.iter().zip(d.log.samples().chunks(25)) {
        assert_eq!(resp, &classify_batch(bundle(), chunk).unwrap());
        assert_eq!((resp.road.len(), resp.potholes.len(), resp.dropped_samples), (1, 2, 0));
    }
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 12 * 3);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["task"] == "road" || v["task"] == "pothole");
    }
}

#[test]
fn many_concurrent_requests_agree() {
    let server = common::spawn_server(bundle().clone());
    let url = format!("{}/v1/classify", server.url());
    let d = common::drive(90.0, Condition::Good, 4, 5, 1_476_000_000.0);
    let body = serde_json::to_vec(&serde_json::json!({ "samples": d.log.samples() })).unwrap();
    let expected = serde_json::to_vec(&classify_batch(bundle(), d.log.samples()).unwrap()).unwrap();
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let (url, body) = (url.clone(), body.clone());
            std::thread::spawn(move || common::post_json(&common::agent(), &url, &body))
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), (200, expected.clone()));
    }
}

#[test]
fn server_stops_on_shutdown_signal() {
    let server = common::spawn_server(bundle().clone());
    let addr = server.addr;
    drop(server);
    let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(2))).build().into();
    assert!(agent.get(format!("http://{addr}/v1/health")).call().is_err());
}
