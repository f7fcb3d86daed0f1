#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::{mpsc, Arc};
use std::thread::JoinHandle;

use roadsense::learn::SmoParams;
use roadsense::pipeline::{train_pothole, train_road, TrainConfig};
use roadsense::service::{serve_on, ModelBundle};
use roadsense::telemetry::{synth_drive, Condition, SynthConfig, SynthDrive};
use roadsense::windows::{attach_condition_label, attach_pothole_labels, make_windows, Window};

pub fn drive(duration: f64, condition: Condition, potholes: usize, seed: u64, start_t: f64) -> SynthDrive {
    let config = SynthConfig { pothole_count: potholes, start_t, ..SynthConfig::uniform(duration, condition, seed) };
    synth_drive(&config).unwrap()
}

/// Six five-minute drives, four good and two bad, labelled per drive.
pub fn road_windows(seed: u64) -> Vec<Window> {
    let plan = [Condition::Good, Condition::Good, Condition::Good, Condition::Good, Condition::Bad, Condition::Bad];
    let mut all = Vec::new();
    for (k, &c) in plan.iter().enumerate() {
        let d = drive(300.0, c, 0, seed * 16 + k as u64, 1_476_000_000.0 + 300.0 * k as f64);
        let mut w = make_windows(d.log.samples(), 25).unwrap();
        attach_condition_label(&mut w, c);
        all.extend(w);
    }
    all
}

/// A 30-minute drive with `potholes` events, cut into 10-sample windows.
pub fn pothole_windows(seed: u64, potholes: usize) -> Vec<Window> {
    let d = drive(1800.0, Condition::Good, potholes, seed, 1_476_000_000.0);
    let mut w = make_windows(d.log.samples(), 10).unwrap();
    attach_pothole_labels(&mut w, &d.potholes);
    w
}

pub fn config(window_size: usize, seed: u64) -> TrainConfig {
    TrainConfig { window_size, smo: SmoParams::default(), test_fraction: 0.3, seed }
}

pub fn trained_bundle(seed: u64) -> ModelBundle {
    let road = train_road(&road_windows(seed), &config(25, seed)).unwrap();
    let pothole = train_pothole(&pothole_windows(seed, 50), &config(10, seed), 0.78).unwrap();
    ModelBundle::new(road.model, pothole.model, seed, 0)
}

pub struct TestServer {
    pub addr: SocketAddr,
    stop: mpsc::Sender<()>,
    thread: Option<JoinHandle<()>>,
}

impl TestServer {
    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        let _ = self.stop.send(());
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Runs the service on an ephemeral port in a background thread.
pub fn spawn_server(bundle: ModelBundle) -> TestServer {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let addr = listener.local_addr().unwrap();
    let (stop, stopped) = mpsc::channel::<()>();
    let thread = std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).unwrap();
            let shutdown = async move {
                let _ = tokio::task::spawn_blocking(move || stopped.recv()).await;
            };
            serve_on(listener, Arc::new(bundle), shutdown).await.unwrap();
        });
    });
    TestServer { addr, stop, thread: Some(thread) }
}

pub fn agent() -> ureq::Agent {
    ureq::Agent::config_builder().http_status_as_error(false).build().into()
}

/// Returns status and body bytes.
pub fn post_json(agent: &ureq::Agent, url: &str, body: &[u8]) -> (u16, Vec<u8>) {
    let mut resp = agent.post(url).header("content-type", "application/json").send(body).unwrap();
    let status = resp.status().as_u16();
    (status, resp.body_mut().read_to_vec().unwrap())
}
