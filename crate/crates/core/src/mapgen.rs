//! GeoJSON road-condition maps from classified windows.
//!
//! Each road window becomes a straight `LineString` between its first and
//! last sample positions, coloured by condition. Each positive pothole window
//! adds a `Point` at its centroid. Coordinates are `[lon, lat]`.

use serde::Serialize;
use thiserror::Error;

use crate::service::{ClassifiedWindow, ClassifyResponse, PotholeLabel, RoadLabel};
use crate::telemetry::SensorSample;
use crate::windows::{GeoPoint, Window};

pub const COLOR_BAD: &str = "#d73027";
pub const COLOR_GOOD: &str = "#1a9850";
pub const COLOR_POTHOLE: &str = "#7b3294";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("window starting at t={start_t} has no recorded position")]
    MissingPosition { start_t: f64 },
    #[error("interval [{start_t}, {end_t}) covers no samples of the log")]
    NoSamples { start_t: f64, end_t: f64 },
}

#[derive(Serialize)]
struct FeatureCollection<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    features: Vec<Feature<'a>>,
}

#[derive(Serialize)]
struct Feature<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    geometry: Geometry,
    properties: Properties<'a>,
}

#[derive(Serialize)]
#[serde(tag = "type", content = "coordinates")]
enum Geometry {
    LineString(Vec<[f64; 2]>),
    Point([f64; 2]),
}

#[derive(Serialize)]
#[serde(untagged)]
enum Properties<'a> {
    Segment {
        kind: &'static str,
        condition: &'static str,
        pothole: bool,
        score: f64,
        start_t: f64,
        end_t: f64,
        color: &'a str,
    },
    Pothole {
        kind: &'static str,
        score: f64,
        start_t: f64,
        end_t: f64,
        color: &'a str,
    },
}

fn lon_lat(p: GeoPoint) -> [f64; 2] {
    [p.lon, p.lat]
}

fn overlaps(a: &Window, b: &Window) -> bool {
    a.start_t < b.end_t && b.start_t < a.end_t
}

/// Builds a FeatureCollection from road windows (`positive` means bad) and
/// pothole windows. Identical input gives identical bytes.
pub fn build_map(road: &[ClassifiedWindow], potholes: &[ClassifiedWindow]) -> Result<String, MapError> {
    // (start_t, 0 = line / 1 = point, input order) sorts lines ahead of points on ties
    let mut keyed: Vec<(f64, u8, usize, Feature)> = Vec::with_capacity(road.len() + potholes.len());

    for (i, c) in road.iter().enumerate() {
        let w = &c.window;
        let (Some(first), Some(last)) = (w.first_pos, w.last_pos) else {
            return Err(MapError::MissingPosition { start_t: w.start_t });
        };
        let pothole = potholes.iter().any(|p| p.positive && overlaps(&p.window, w));
        let (condition, color) = if c.positive { ("bad", COLOR_BAD) } else { ("good", COLOR_GOOD) };
        let feature = Feature {
            kind: "Feature",
            geometry: Geometry::LineString(vec![lon_lat(first), lon_lat(last)]),
            properties: Properties::Segment {
                kind: "segment",
                condition,
                pothole,
                score: c.score,
                start_t: w.start_t,
                end_t: w.end_t,
                color,
            },
        };
        keyed.push((w.start_t, 0, i, feature));
    }

    for (i, c) in potholes.iter().enumerate().filter(|(_, c)| c.positive) {
        let w = &c.window;
        let feature = Feature {
            kind: "Feature",
            geometry: Geometry::Point(lon_lat(w.centroid)),
            properties: Properties::Pothole {
                kind: "pothole",
                score: c.score,
                start_t: w.start_t,
                end_t: w.end_t,
                color: COLOR_POTHOLE,
            },
        };
        keyed.push((w.start_t, 1, i, feature));
    }

    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let collection =
        FeatureCollection { kind: "FeatureCollection", features: keyed.into_iter().map(|k| k.3).collect() };
    Ok(serde_json::to_string(&collection).expect("map serializes"))
}

fn window_from_samples(samples: &[SensorSample], start_t: f64, end_t: f64) -> Result<Window, MapError> {
    let lo = samples.partition_point(|s| s.t < start_t);
    let hi = samples.partition_point(|s| s.t < end_t);
    let members = &samples[lo..hi];
    let (Some(first), Some(last)) = (members.first(), members.last()) else {
        return Err(MapError::NoSamples { start_t, end_t });
    };
    let n = members.len() as f64;
    Ok(Window {
        start_t,
        end_t,
        sample_count: members.len(),
        features: Default::default(),
        centroid: GeoPoint {
            lat: members.iter().map(|s| s.lat).sum::<f64>() / n,
            lon: members.iter().map(|s| s.lon).sum::<f64>() / n,
        },
        first_pos: Some(GeoPoint { lat: first.lat, lon: first.lon }),
        last_pos: Some(GeoPoint { lat: last.lat, lon: last.lon }),
        label: None,
    })
}

/// Recovers window positions for a classification response from the drive
/// log it was computed on. Features are left zeroed.
pub fn locate_response(
    response: &ClassifyResponse,
    samples: &[SensorSample],
) -> Result<(Vec<ClassifiedWindow>, Vec<ClassifiedWindow>), MapError> {
    let road = response
        .road
        .iter()
        .map(|r| {
            Ok(ClassifiedWindow {
                window: window_from_samples(samples, r.start_t, r.end_t)?,
                score: r.score,
                positive: r.label == RoadLabel::Bad,
            })
        })
        .collect::<Result<_, MapError>>()?;
    let potholes = response
        .potholes
        .iter()
        .map(|p| {
            Ok(ClassifiedWindow {
                window: window_from_samples(samples, p.start_t, p.end_t)?,
                score: p.score,
                positive: p.label == PotholeLabel::Pothole,
            })
        })
        .collect::<Result<_, MapError>>()?;
    Ok((road, potholes))
}

/// A standalone HTML page that draws `geojson` over OpenStreetMap tiles with
/// Leaflet (loaded from unpkg).
pub fn build_html(geojson: &str, title: &str) -> String {
    let title = title.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
    // keep "</script>" in embedded strings from closing the tag
    let data = geojson.replace("</", "<\\/");
    format!(
        r#"<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>{title}</title>
<link rel="stylesheet" href="https://unpkg.com/leaflet@1.9.4/dist/leaflet.css">
<script src="https://unpkg.com/leaflet@1.9.4/dist/leaflet.js"></script>
<style>html, body, #map {{ height: 100%; margin: 0; }}</style>
</head>
<body>
<div id="map"></div>
<script>
const data = {data};
const map = L.map("map");
L.tileLayer("https://tile.openstreetmap.org/{{z}}/{{x}}/{{y}}.png", {{
  maxZoom: 19,
  attribution: "&copy; OpenStreetMap contributors"
}}).addTo(map);
const layer = L.geoJSON(data, {{
  style: f => ({{ color: f.properties.color, weight: 5 }}),
  pointToLayer: (f, latlng) => L.circleMarker(latlng, {{ radius: 6, color: f.properties.color, fillOpacity: 0.9 }}),
  onEachFeature: (f, l) => l.bindPopup(Object.entries(f.properties).map(([k, v]) => k + ": " + v).join("<br>"))
}}).addTo(map);
if (data.features.length) {{ map.fitBounds(layer.getBounds()); }} else {{ map.setView([0, 0], 2); }}
</script>
</body>
</html>
"#
    )
}
