//! Angular grids and array manifold (steering) matrices, including the
//! Khatri-Rao Tx-Rx manifold and its factorization through the redundancy
//! pattern.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::RngExt;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::linalg::CMat;

/// Grid of candidate directions, stored as `u = sin(theta)` values, strictly
/// increasing within `[-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    u: Vec<f64>,
}

impl AngularGrid {
    /// Uniform grid in `u`: `u_i = -1 + 2i/V` for `i = 0..V`. For integer
    /// sensor positions the resulting steering vectors sample the unit circle
    /// at `V`-th roots of unity, i.e. a DFT-like beamspace.
    pub fn uniform(v: usize) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidGrid("grid size must be positive".into()));
        }
        Ok(Self {
            u: (0..v).map(|i| 2.0 * i as f64 / v as f64 - 1.0).collect(),
        })
    }

    /// Grid from explicit `u` values; must be strictly increasing in `[-1, 1)`.
    pub fn from_u_values(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::InvalidGrid("grid size must be positive".into()));
        }
        if u.iter().any(|x| !(-1.0..1.0).contains(x)) {
            return Err(Error::InvalidGrid(
                "u values must lie in [-1, 1)".into(),
            ));
        }
        if u.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "u values must be strictly increasing".into(),
            ));
        }
        Ok(Self { u })
    }

    /// Random grid of `v` distinct directions drawn uniformly from `[-1, 1)`.
    /// Draws are rejected until all pairwise gaps exceed 1e-9, so the nodes
    /// are distinct well beyond working precision.
    pub fn random<R: rand::Rng>(v: usize, rng: &mut R) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidGrid("grid size must be positive".into()));
        }
        loop {
            let mut u: Vec<f64> = (0..v).map(|_| rng.random_range(-1.0..1.0)).collect();
            u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if u.windows(2).all(|w| w[1] - w[0] > 1e-9) {
                return Ok(Self { u });
            }
        }
    }

    /// Grid size `V`.
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u_values(&self) -> &[f64] {
        &self.u
    }

    /// Directions in radians, `theta_i = asin(u_i)`.
    pub fn theta_values(&self) -> Vec<f64> {
        self.u.iter().map(|x| x.asin()).collect()
    }
}

/// Steering matrix of a set of integer sensor positions on a grid: entry
/// `(l, i)` is `exp(j pi position[l] u_i)`, unit modulus by construction.
///
/// For a contiguous position set `{0..N-1}` the rows are consecutive powers
/// of the nodes `exp(j pi u_i)`, i.e. a Vandermonde matrix.
#[derive(Debug, Clone)]
pub struct ManifoldMatrix {
    entries: CMat,
    positions: Vec<u32>,
}

impl ManifoldMatrix {
    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }
}

/// Manifold matrix of arbitrary integer positions on `grid`.
pub fn manifold(positions: &[u32], grid: &AngularGrid) -> ManifoldMatrix {
    let entries = Array2::from_shape_fn((positions.len(), grid.len()), |(l, i)| {
        Complex64::from_polar(1.0, PI * positions[l] as f64 * grid.u_values()[i])
    });
    ManifoldMatrix {
        entries,
        positions: positions.to_vec(),
    }
}

/// Columnwise Kronecker product of the Tx and Rx manifolds. Row order is
/// Tx-major: row `t * N_rx + r` carries `A_tx[t, i] * A_rx[r, i]`, matching
/// the redundancy pattern's row pairing.
pub fn khatri_rao(a_tx: &ManifoldMatrix, a_rx: &ManifoldMatrix) -> Result<CMat> {
    if a_tx.ncols() != a_rx.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "Khatri-Rao factors must share the grid: {} vs {} columns",
            a_tx.ncols(),
            a_rx.ncols()
        )));
    }
    let (nt, nr, v) = (a_tx.nrows(), a_rx.nrows(), a_tx.ncols());
    let mut out = CMat::zeros((nt * nr, v));
    for t in 0..nt {
        for r in 0..nr {
            for i in 0..v {
                out[(t * nr + r, i)] = a_tx.entries()[(t, i)] * a_rx.entries()[(r, i)];
            }
        }
    }
    Ok(out)
}

/// Largest entrywise deviation between the Tx-Rx Khatri-Rao manifold and its
/// factorization through the redundancy pattern and the virtual manifold.
/// Both sides evaluate the same phase sums, so the deviation stays at
/// rounding level (<= 1e-12) for every valid geometry and grid.
pub fn factorization_residual(geom: &ArrayGeometry, grid: &AngularGrid) -> f64 {
    let a_tx = manifold(geom.tx_positions(), grid);
    let a_rx = manifold(geom.rx_positions(), grid);
    let kr = khatri_rao(&a_tx, &a_rx).expect("factors share the grid");

    let pattern = geom.redundancy_pattern();
    let a = manifold(pattern.coarray().positions(), grid);

    // Each pattern row selects exactly one virtual-manifold row, so the
    // product collapses to a row lookup.
    let mut worst: f64 = 0.0;
    for (row, &col) in pattern.row_column().iter().enumerate() {
        for i in 0..grid.len() {
            let diff = (kr[(row, i)] - a.entries()[(col, i)]).norm();
            worst = worst.max(diff);
        }
    }
    worst
}
