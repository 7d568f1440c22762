//! Regenerates the committed recovery fixtures: an ambiguous scene pair for
//! the first built-in example array on the default 16-point grid. The truth
//! scene and its alias produce identical measurements through array I, so
//! exhaustive recovery there is non-unique, while array II recovers the
//! truth exactly.
//!
//! Usage: cargo run -p coarray --example generate_fixtures [OUT_DIR]

use std::path::PathBuf;

use coarray::io::write_scene;
use coarray::{
    array_i, find_ambiguous_scene, proof_waveform, sensing_matrix, simulate, AngularGrid,
    DEFAULT_RANK_TOL,
};

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures".into())
        .into();
    std::fs::create_dir_all(&out).expect("create output directory");

    let grid = AngularGrid::uniform(16).unwrap();
    let b = sensing_matrix(&proof_waveform(), &array_i(), &grid).unwrap();
    let (truth, alias) = find_ambiguous_scene(&b, 4, DEFAULT_RANK_TOL)
        .unwrap()
        .expect("array I is rank deficient at waveform rank 2");

    let y_truth = simulate(&b, &truth).unwrap();
    let y_alias = simulate(&b, &alias).unwrap();
    let diff = (&y_truth - &y_alias)
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    println!(
        "truth support {:?}, alias support {:?}, max measurement deviation {diff:.3e}",
        truth.support(),
        alias.support()
    );

    write_scene(&out.join("ambiguous_scene.json"), &truth).unwrap();
    write_scene(&out.join("ambiguous_scene_alias.json"), &alias).unwrap();
    println!("wrote {}", out.display());
}
