//! Noiseless measurement simulation, exhaustive l0 sparse recovery, the
//! half-Kruskal-rank uniqueness bound, and construction of ambiguous
//! scatterer configurations when the bound is violated.

use itertools::Itertools;
use ndarray_linalg::Norm;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    binomial, least_squares, select_columns, singular_values, smallest_singular_pair, CVec,
};
use crate::rank_analysis::DEFAULT_SUBSET_BUDGET;
use crate::sensing::SensingMatrix;

/// Relative-residual cutoff deciding whether a support explains a noiseless
/// measurement.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-8;

/// Entries of a numerical null vector below this fraction of its largest
/// entry are treated as structural zeros when reading off a support.
const NULL_SUPPORT_CUTOFF: f64 = 1e-12;

/// A K-sparse complex amplitude configuration on a V-point angular grid.
/// Support indices are 0-based, strictly increasing; amplitudes are nonzero.
/// The empty scene (K = 0) is valid.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    v: usize,
    support: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl Scene {
    pub fn new(v: usize, support: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if support.len() != amplitudes.len() {
            return Err(Error::InvalidScene(format!(
                "{} support indices vs {} amplitudes",
                support.len(),
                amplitudes.len()
            )));
        }
        if support.len() > v {
            return Err(Error::InvalidScene(format!(
                "sparsity {} exceeds grid size {v}",
                support.len()
            )));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidScene(
                "support must be strictly increasing".into(),
            ));
        }
        if support.last().is_some_and(|&i| i >= v) {
            return Err(Error::InvalidScene(format!(
                "support index {} outside grid of size {v}",
                support.last().unwrap()
            )));
        }
        if amplitudes.iter().any(|a| a.norm() == 0.0) {
            return Err(Error::InvalidScene("amplitudes must be nonzero".into()));
        }
        Ok(Self {
            v,
            support,
            amplitudes,
        })
    }

    pub fn empty(v: usize) -> Self {
        Self {
            v,
            support: Vec::new(),
            amplitudes: Vec::new(),
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Sparsity K.
    pub fn k(&self) -> usize {
        self.support.len()
    }

    /// Dense length-V embedding.
    pub fn dense(&self) -> CVec {
        let mut x = CVec::zeros(self.v);
        for (&i, &a) in self.support.iter().zip(&self.amplitudes) {
            x[i] = a;
        }
        x
    }
}

/// Seeded random K-sparse scene: uniform support, amplitudes with magnitude
/// in `[0.5, 1.5)` and uniform phase, so they stay well clear of zero.
pub fn random_scene<R: rand::Rng>(v: usize, k: usize, rng: &mut R) -> Scene {
    use rand::RngExt;
    let mut support = rand::seq::index::sample(rng, v, k).into_vec();
    support.sort_unstable();
    let amplitudes = (0..k)
        .map(|_| {
            let mag = rng.random_range(0.5..1.5);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(mag, phase)
        })
        .collect();
    Scene::new(v, support, amplitudes).expect("generated scene is valid")
}

/// True when both scenes have the same grid, the same support, and
/// entrywise amplitude difference at most `amp_tol`.
pub fn scenes_match(a: &Scene, b: &Scene, amp_tol: f64) -> bool {
    a.v == b.v
        && a.support == b.support
        && a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .all(|(x, y)| (x - y).norm() <= amp_tol)
}

/// Noiseless measurement `y = B x`.
pub fn simulate(b: &SensingMatrix, scene: &Scene) -> Result<CVec> {
    if scene.v() != b.v() {
        return Err(Error::DimensionMismatch(format!(
            "scene lives on a {}-point grid, sensing matrix has {} columns",
            scene.v(),
            b.v()
        )));
    }
    Ok(b.matrix().dot(&scene.dense()))
}

/// Result of an exhaustive l0 search.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub estimate: Scene,
    /// The sparsity level at which the first feasible support appeared.
    pub sparsity_found: usize,
    /// Exactly one feasible support at that level, with all amplitudes
    /// nonzero.
    pub unique: bool,
    /// Relative residual of the reported support.
    pub residual: f64,
}

/// Exhaustive l0 recovery with the default subset budget. See
/// [`l0_recover_with_budget`].
pub fn l0_recover(
    y: &CVec,
    b: &SensingMatrix,
    k_max: usize,
    tol: f64,
) -> Result<RecoveryResult> {
    l0_recover_with_budget(y, b, k_max, tol, DEFAULT_SUBSET_BUDGET)
}

/// Minimizes support size subject to `y = B z` by scanning sparsity levels
/// upward and solving least squares on every column subset. A support is
/// feasible when its relative residual is at most `tol`. The first level
/// with a feasible support wins; ties at that level are reported as
/// non-unique and resolved to the lexicographically smallest support.
pub fn l0_recover_with_budget(
    y: &CVec,
    b: &SensingMatrix,
    k_max: usize,
    tol: f64,
    budget: u64,
) -> Result<RecoveryResult> {
    if y.len() != b.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "measurement has {} entries, sensing matrix has {} rows",
            y.len(),
            b.n_rows()
        )));
    }
    let v = b.v();
    if k_max > v {
        return Err(Error::DimensionMismatch(format!(
            "sparsity cap {k_max} exceeds grid size {v}"
        )));
    }

    let y_norm = y.norm_l2();
    if y_norm == 0.0 {
        return Ok(RecoveryResult {
            estimate: Scene::empty(v),
            sparsity_found: 0,
            unique: true,
            residual: 0.0,
        });
    }

    let mut spent: u64 = 0;
    for k in 1..=k_max {
        let level = binomial(v, k).unwrap_or(u64::MAX);
        let required = spent.saturating_add(level);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        spent = required;

        let combos: Vec<Vec<usize>> = (0..v).combinations(k).collect();
        let evaluate = |cols: &Vec<usize>| -> Option<(Vec<usize>, CVec, f64)> {
            let sub = select_columns(b.matrix(), cols);
            let (solution, residual) = least_squares(&sub, y);
            (residual <= tol).then(|| (cols.clone(), solution, residual))
        };
        // The whole level is always evaluated: uniqueness needs the count of
        // feasible supports, not just the first hit.
        let feasible: Vec<(Vec<usize>, CVec, f64)> = if combos.len() > 256 {
            combos.par_iter().filter_map(evaluate).collect()
        } else {
            combos.iter().filter_map(evaluate).collect()
        };

        if let Some((support, solution, residual)) = feasible.first().cloned() {
            let max_amp = solution.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
            let all_nonzero = solution.iter().all(|c| c.norm() > tol * max_amp);
            let (support, amplitudes): (Vec<usize>, Vec<Complex64>) = support
                .into_iter()
                .zip(solution)
                .filter(|(_, c)| c.norm() > 0.0)
                .unzip();
            return Ok(RecoveryResult {
                estimate: Scene::new(v, support, amplitudes)?,
                sparsity_found: k,
                unique: feasible.len() == 1 && all_nonzero,
                residual,
            });
        }
    }
    Err(Error::NoFeasibleSupport { k_max, tol })
}

/// Sparsity up to which noiseless recovery is unique: `floor(krank / 2)`.
pub fn uniqueness_bound(krank: usize) -> usize {
    krank / 2
}

/// See [`find_ambiguous_scene_with_budget`].
pub fn find_ambiguous_scene(
    b: &SensingMatrix,
    k: usize,
    tol: f64,
) -> Result<Option<(Scene, Scene)>> {
    find_ambiguous_scene_with_budget(b, k, tol, DEFAULT_SUBSET_BUDGET)
}

/// Searches for two distinct scenes of sparsity at most `k` with identical
/// measurements, by finding a column subset of size at most `2k` carrying a
/// numerical null vector (smallest singular value at most `tol * sigma_max`
/// of the full matrix) and splitting the null vector's support in half.
///
/// Subset sizes are scanned from `2k` downward, so rank-deficient sensing
/// matrices yield witnesses of the largest admissible sparsity. Returns
/// `None` exactly when every subset of size up to `2k` is independent, i.e.
/// when `krank(B) >= 2k`.
pub fn find_ambiguous_scene_with_budget(
    b: &SensingMatrix,
    k: usize,
    tol: f64,
    budget: u64,
) -> Result<Option<(Scene, Scene)>> {
    assert!(k >= 1, "sparsity must be at least 1");
    let v = b.v();
    let m_max = (2 * k).min(v);
    let sigma_max = singular_values(b.matrix())
        .first()
        .copied()
        .unwrap_or(0.0);

    let mut spent: u64 = 0;
    for m in (2..=m_max).rev() {
        let level = binomial(v, m).unwrap_or(u64::MAX);
        let required = spent.saturating_add(level);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        spent = required;

        for cols in (0..v).combinations(m) {
            let sub = select_columns(b.matrix(), &cols);
            let (sigma_min, null_vec) = smallest_singular_pair(&sub);
            if sigma_min <= tol * sigma_max {
                return Ok(Some(split_null_vector(v, &cols, &null_vec, k)));
            }
        }
    }
    Ok(None)
}

/// Splits a null vector `B[:, cols] v = 0` into two scenes with identical
/// measurements: the first half of the support keeps its amplitudes, the
/// second half is negated and moved to the other side of the equation.
/// The vector is normalized to a canonical phase and unit peak magnitude so
/// the output does not depend on the SVD backend's sign conventions.
fn split_null_vector(v_len: usize, cols: &[usize], null_vec: &CVec, k: usize) -> (Scene, Scene) {
    let max_mag = null_vec.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let peak = null_vec
        .iter()
        .position(|c| c.norm() == max_mag)
        .expect("null vector is nonzero");
    let scale = null_vec[peak].conj() / (max_mag * max_mag);
    let canonical: Vec<Complex64> = null_vec.iter().map(|c| c * scale).collect();

    let entries: Vec<(usize, Complex64)> = cols
        .iter()
        .zip(&canonical)
        .filter(|(_, c)| c.norm() > NULL_SUPPORT_CUTOFF)
        .map(|(&i, &c)| (i, c))
        .collect();
    let half = entries.len().div_ceil(2);
    debug_assert!(half <= k && entries.len() - half <= k);

    let build = |slice: &[(usize, Complex64)], negate: bool| {
        let support: Vec<usize> = slice.iter().map(|&(i, _)| i).collect();
        let amplitudes: Vec<Complex64> = slice
            .iter()
            .map(|&(_, c)| if negate { -c } else { c })
            .collect();
        Scene::new(v_len, support, amplitudes).expect("split scenes are valid")
    };
    (build(&entries[..half], false), build(&entries[half..], true))
}
