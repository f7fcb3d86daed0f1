//! Road condition and pothole classification from 5 Hz smartphone IMU/GPS
//! logs.
//!
//! Logs are cut into fixed-count windows ([`windows`]), summarised by 26
//! aggregate features, and classified with an RBF-kernel SVM trained by SMO
//! ([`learn`]). [`pipeline`] ties training together, [`service`] serves the
//! fitted models over HTTP and [`mapgen`] draws the results as GeoJSON.

pub mod cli;
pub mod explore;
pub mod learn;
pub mod mapgen;
pub mod pipeline;
pub mod service;
pub mod telemetry;
pub mod windows;
