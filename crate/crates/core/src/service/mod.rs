//! Deployment side: the model bundle file, batch classification of raw
//! samples, the HTTP classification server and a replay client that streams a
//! drive log to it.
//!
//! The server is stateless. Every request is windowed on its own and trailing
//! samples that do not fill a window are dropped and counted, so clients that
//! want windows spanning two requests must send overlapping batches.

mod bundle;
mod classify;
mod replay;
mod server;

pub use bundle::{
    fnv1a64, load_bundle, save_bundle, BundleError, BundleMetadata, ModelBundle, TaskModel, FORMAT_VERSION,
};
pub use classify::{
    classify_batch, classify_windows, ClassifiedWindow, ClassifyError, ClassifyRequest, ClassifyResponse,
    PotholeInterval, PotholeLabel, RoadInterval, RoadLabel,
};
pub use replay::{chunk_samples, replay_client, ReplayConfig, ReplayError, ReplayOutcome};
pub use server::{router, serve, serve_on, ErrorBody, ErrorDetail, ServeConfig, ServeError};
