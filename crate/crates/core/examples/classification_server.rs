//! Train a bundle, serve it on a local port and replay a drive against it.
//!
//! cargo run --release --example classification_server

use std::sync::Arc;

use roadsense::learn::SmoParams;
use roadsense::pipeline::{train_pothole, train_road, TrainConfig};
use roadsense::service::{replay_client, serve_on, ModelBundle, ReplayConfig};
use roadsense::telemetry::{synth_drive, Condition, SynthConfig};
use roadsense::windows::{attach_condition_label, attach_pothole_labels, make_windows};

fn bundle() -> ModelBundle {
    let mut road = Vec::new();
    for (i, c) in [Condition::Good, Condition::Bad, Condition::Good].into_iter().enumerate() {
        let mut w =
            make_windows(synth_drive(&SynthConfig::uniform(300.0, c, i as u64)).unwrap().log.samples(), 25).unwrap();
        attach_condition_label(&mut w, c);
        road.extend(w);
    }
    let d =
        synth_drive(&SynthConfig { pothole_count: 40, ..SynthConfig::uniform(1200.0, Condition::Good, 9) }).unwrap();
    let mut pothole = make_windows(d.log.samples(), 10).unwrap();
    attach_pothole_labels(&mut pothole, &d.potholes);

    let cfg = TrainConfig { window_size: 25, smo: SmoParams::default(), test_fraction: 0.3, seed: 5 };
    let road = train_road(&road, &cfg).unwrap();
    let pothole = train_pothole(&pothole, &TrainConfig { window_size: 10, ..cfg }, 0.78).unwrap();
    ModelBundle::new(road.model, pothole.model, 5, 0)
}

fn main() {
    let bundle = Arc::new(bundle());
    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let (stop, stopped) = std::sync::mpsc::channel::<()>();
    let server = rt.spawn(serve_on(listener, bundle, async move {
        let _ = tokio::task::spawn_blocking(move || stopped.recv()).await;
    }));
    eprintln!("serving on {url}");

    let drive =
        synth_drive(&SynthConfig { pothole_count: 2, ..SynthConfig::uniform(30.0, Condition::Bad, 77) }).unwrap();
    let config = ReplayConfig { server_url: url, ..Default::default() };
    let outcome = replay_client(drive.log.samples(), &config, &mut std::io::stdout()).unwrap();
    eprintln!("{} requests answered", outcome.requests);

    let _ = stop.send(());
    rt.block_on(server).unwrap().unwrap();
}
