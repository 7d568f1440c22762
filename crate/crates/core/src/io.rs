//! JSON file formats for geometries, waveforms, and scenes.
//!
//! Formats are plain structured text so they can be written by hand:
//!
//! - geometry: `{"tx":[0,1,2],"rx":[0,1,3,5]}`
//! - waveform: `{"t":2,"n_tx":3,"entries":[[re,im], ...]}`, row-major
//! - scene: `{"v":16,"support":[1,4,9],"amplitudes":[[re,im], ...]}`
//!
//! Scene support indices are 1-based on disk and 0-based in memory. Floats
//! round-trip exactly through serialization.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::identifiability::Scene;
use crate::linalg::CMat;
use crate::sensing::WaveformMatrix;

#[derive(Debug, Serialize, Deserialize)]
struct GeometryFile {
    tx: Vec<u32>,
    rx: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WaveformFile {
    t: usize,
    n_tx: usize,
    entries: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SceneFile {
    v: usize,
    support: Vec<usize>,
    amplitudes: Vec<(f64, f64)>,
}

pub fn geometry_to_json(geom: &ArrayGeometry) -> String {
    serde_json::to_string_pretty(&GeometryFile {
        tx: geom.tx_positions().to_vec(),
        rx: geom.rx_positions().to_vec(),
    })
    .expect("geometry serializes")
}

pub fn geometry_from_json(text: &str) -> Result<ArrayGeometry> {
    let file: GeometryFile = serde_json::from_str(text)?;
    ArrayGeometry::new(file.tx, file.rx)
}

pub fn read_geometry(path: &Path) -> Result<ArrayGeometry> {
    geometry_from_json(&fs::read_to_string(path)?)
}

pub fn write_geometry(path: &Path, geom: &ArrayGeometry) -> Result<()> {
    Ok(fs::write(path, geometry_to_json(geom))?)
}

pub fn waveform_to_json(s: &WaveformMatrix) -> String {
    serde_json::to_string_pretty(&WaveformFile {
        t: s.snapshots(),
        n_tx: s.n_tx(),
        entries: s.entries().iter().map(|z| (z.re, z.im)).collect(),
    })
    .expect("waveform serializes")
}

pub fn waveform_from_json(text: &str) -> Result<WaveformMatrix> {
    let file: WaveformFile = serde_json::from_str(text)?;
    if file.entries.len() != file.t * file.n_tx {
        return Err(Error::InvalidWaveform(format!(
            "{} entries do not fill a {} x {} matrix",
            file.entries.len(),
            file.t,
            file.n_tx
        )));
    }
    let entries = CMat::from_shape_vec(
        (file.t, file.n_tx),
        file.entries
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
    )
    .expect("shape matches entry count");
    WaveformMatrix::new(entries)
}

pub fn read_waveform(path: &Path) -> Result<WaveformMatrix> {
    waveform_from_json(&fs::read_to_string(path)?)
}

pub fn write_waveform(path: &Path, s: &WaveformMatrix) -> Result<()> {
    Ok(fs::write(path, waveform_to_json(s))?)
}

pub fn scene_to_json(scene: &Scene) -> String {
    serde_json::to_string_pretty(&SceneFile {
        v: scene.v(),
        support: scene.support().iter().map(|&i| i + 1).collect(),
        amplitudes: scene.amplitudes().iter().map(|z| (z.re, z.im)).collect(),
    })
    .expect("scene serializes")
}

pub fn scene_from_json(text: &str) -> Result<Scene> {
    let file: SceneFile = serde_json::from_str(text)?;
    if file.support.contains(&0) {
        return Err(Error::InvalidScene(
            "scene files use 1-based support indices".into(),
        ));
    }
    Scene::new(
        file.v,
        file.support.into_iter().map(|i| i - 1).collect(),
        file.amplitudes
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
    )
}

pub fn read_scene(path: &Path) -> Result<Scene> {
    scene_from_json(&fs::read_to_string(path)?)
}

pub fn write_scene(path: &Path, scene: &Scene) -> Result<()> {
    Ok(fs::write(path, scene_to_json(scene))?)
}

/// Dense 0/1 CSV rendering of a redundancy pattern, one row per Tx-Rx pair.
pub fn upsilon_to_csv(pattern: &crate::geometry::RedundancyPattern) -> String {
    let mut out = String::new();
    for row in pattern.matrix().rows() {
        let cells: Vec<String> = row.iter().map(|&x| format!("{}", x as u8)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// CSV rendering of a manifold matrix as interleaved (re, im) pairs, one row
/// per sensor position.
pub fn manifold_to_csv(m: &crate::manifold::ManifoldMatrix) -> String {
    let mut out = String::new();
    for row in m.entries().rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
