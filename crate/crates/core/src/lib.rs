//! Identifiability analysis for active sensing arrays built on the sum
//! co-array.
//!
//! A colocated MIMO sensing system with transmit positions `D_tx`, receive
//! positions `D_rx`, and a spatio-temporal waveform `S` observes a K-sparse
//! angular scene `x` through
//!
//! ```text
//! y = (S (x) I) (A_tx . A_rx) x = (S (x) I) Upsilon A x = B x
//! ```
//!
//! where `Upsilon` is the binary redundancy pattern mapping physical Tx-Rx
//! pairs onto the sum co-array and `A` is the virtual-array manifold. How
//! many scatterers are identifiable from noiseless data is governed by the
//! Kruskal rank of `B`: recovery of a K-sparse scene is unique exactly when
//! `K <= krank(B) / 2`.
//!
//! The crate provides:
//!
//! - [`geometry`]: array geometries, sum co-arrays, redundancy patterns;
//! - [`manifold`]: angular grids, steering matrices, the Khatri-Rao
//!   factorization through the redundancy pattern;
//! - [`sensing`]: waveform matrices and assembly of `W = (S (x) I) Upsilon`
//!   and `B = W A`;
//! - [`rank_analysis`]: numerical rank, exact Kruskal rank by exhaustive
//!   enumeration, the waveform-rank trade-off, the redundancy-limited rank
//!   equivalence, structural infeasibility certificates, and array-informed
//!   waveform search;
//! - [`identifiability`]: measurement simulation, exhaustive l0 recovery,
//!   the uniqueness bound, and construction of ambiguous scenes;
//! - [`io`]: JSON file formats for geometries, waveforms, and scenes;
//! - [`repro`]: the named check suite reproducing every quantitative claim
//!   about the built-in example arrays.

pub mod error;
pub mod geometry;
pub mod identifiability;
pub mod io;
mod linalg;
pub mod manifold;
pub mod rank_analysis;
pub mod repro;
pub mod sensing;

pub use error::{Error, Result};
pub use geometry::{array_i, array_ii, ArrayGeometry, RedundancyPattern, SumCoarray};
pub use identifiability::{
    find_ambiguous_scene, find_ambiguous_scene_with_budget, l0_recover, l0_recover_with_budget,
    random_scene, scenes_match, simulate, uniqueness_bound, RecoveryResult, Scene,
    DEFAULT_FEASIBILITY_TOL,
};
pub use manifold::{factorization_residual, khatri_rao, manifold, AngularGrid, ManifoldMatrix};
pub use rank_analysis::{
    kruskal_rank, kruskal_rank_with_budget, max_krank_bound, numerical_rank, redundancy_limited_equivalence,
    structural_certificate, tradeoff_curve, waveform_search, InfeasibilityCertificate,
    RankEquivalenceCheck, TradeoffCurve, WaveformSearchOutcome, DEFAULT_RANK_TOL,
    DEFAULT_SUBSET_BUDGET,
};
pub use repro::{CheckRecord, ReproReport};
pub use sensing::{
    effective_pattern, kron_with_identity, proof_waveform, random_waveform, sensing_matrix,
    SensingMatrix, WaveformMatrix,
};
