//! Numerical rank, exact Kruskal rank by exhaustive subset enumeration, the
//! waveform-rank trade-off curve, the redundancy-limited rank equivalence
//! check, and structural infeasibility certificates for reduced-rank
//! waveform design.

use itertools::Itertools;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, RedundancyPattern};
use crate::linalg::{binomial, rank_from_singular_values, select_columns, singular_values};
use crate::manifold::AngularGrid;
use crate::sensing::{effective_pattern, random_waveform, sensing_matrix, WaveformMatrix};

/// Relative singular-value cutoff used wherever a caller does not supply one.
/// Matrices in this domain have unit-order entries and exactly zero singular
/// values when rank-deficient, so the cutoff is uncritical across many orders
/// of magnitude.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Default cap on the number of column subsets an exhaustive scan may
/// evaluate before it refuses the instance.
pub const DEFAULT_SUBSET_BUDGET: u64 = 5_000_000;

/// Numerical rank: singular values above `tol * sigma_max`. The zero matrix
/// has rank 0.
pub fn numerical_rank(m: &Array2<Complex64>, tol: f64) -> usize {
    let s = singular_values(m);
    rank_from_singular_values(s.as_slice().unwrap(), tol)
}

/// Exact Kruskal rank with the default subset budget. See
/// [`kruskal_rank_with_budget`].
pub fn kruskal_rank(m: &Array2<Complex64>, tol: f64) -> Result<usize> {
    kruskal_rank_with_budget(m, tol, DEFAULT_SUBSET_BUDGET)
}

/// Largest `r` such that every `r`-column submatrix has numerical rank `r`,
/// found by scanning `r` upward and checking all subsets at each level.
/// Returns `min(rows, cols)` when every level passes.
///
/// The scan stops with [`Error::BudgetExceeded`] before starting any level
/// that would push the cumulative number of subset evaluations past `budget`;
/// exact enumeration is intended for desk-scale instances only.
pub fn kruskal_rank_with_budget(
    m: &Array2<Complex64>,
    tol: f64,
    budget: u64,
) -> Result<usize> {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return Ok(0);
    }
    let cap = m.nrows().min(n);
    let mut spent: u64 = 0;
    for r in 1..=cap {
        let level = binomial(n, r).unwrap_or(u64::MAX);
        let required = spent.saturating_add(level);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        spent = required;
        if !all_subsets_independent(m, r, tol) {
            return Ok(r - 1);
        }
    }
    Ok(cap)
}

/// True when every `r`-column subset of `m` has full rank `r`. Large levels
/// are scanned in parallel; the verdict does not depend on scan order.
fn all_subsets_independent(m: &Array2<Complex64>, r: usize, tol: f64) -> bool {
    let full_rank = |cols: &Vec<usize>| {
        let sub = select_columns(m, cols);
        let s = singular_values(&sub);
        rank_from_singular_values(s.as_slice().unwrap(), tol) == r
    };
    let combos: Vec<Vec<usize>> = (0..m.ncols()).combinations(r).collect();
    if combos.len() > 512 {
        combos.par_iter().all(full_rank)
    } else {
        combos.iter().all(full_rank)
    }
}

/// Upper bound on the Kruskal rank of the sensing matrix:
/// `min(N_s * N_rx, N_sigma)`.
pub fn max_krank_bound(n_s: usize, n_rx: usize, n_sigma: usize) -> usize {
    (n_s * n_rx).min(n_sigma)
}

/// The waveform-rank trade-off: maximal attainable Kruskal rank per waveform
/// rank, and the smallest waveform rank at which the co-array size becomes
/// reachable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TradeoffCurve {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_sigma: usize,
    /// `(N_s, max_krank)` for `N_s = 1..=N_tx`.
    pub points: Vec<(usize, usize)>,
    /// `ceil(N_sigma / N_rx)`: minimum waveform rank with maximal bound.
    pub optimal_n_s: usize,
}

impl TradeoffCurve {
    pub fn is_optimal(&self, n_s: usize) -> bool {
        n_s == self.optimal_n_s
    }
}

pub fn tradeoff_curve(geom: &ArrayGeometry) -> TradeoffCurve {
    let n_tx = geom.n_tx();
    let n_rx = geom.n_rx();
    let n_sigma = geom.sum_coarray().n_sigma();
    TradeoffCurve {
        n_tx,
        n_rx,
        n_sigma,
        points: (1..=n_tx)
            .map(|n_s| (n_s, max_krank_bound(n_s, n_rx, n_sigma)))
            .collect(),
        optimal_n_s: n_sigma.div_ceil(n_rx),
    }
}

/// Outcome of the redundancy-limited rank equivalence: in the regime
/// `N_s >= N_sigma / N_rx`, the sensing matrix attains full Kruskal rank
/// `N_sigma` exactly when the virtual manifold does and the effective
/// pattern has full column rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankEquivalenceCheck {
    /// Whether the waveform rank reaches the redundancy-limited regime.
    pub applicable: bool,
    /// `krank(B) == N_sigma`.
    pub lhs: bool,
    /// `krank(A) == N_sigma`.
    pub cond_a: bool,
    /// `rank(W) == N_sigma`.
    pub cond_w: bool,
    pub n_sigma: usize,
    pub krank_b: usize,
    pub krank_a: usize,
    pub rank_w: usize,
}

impl RankEquivalenceCheck {
    /// The equivalence contract: whenever applicable, `lhs == cond_a && cond_w`.
    pub fn equivalence_holds(&self) -> bool {
        !self.applicable || (self.lhs == (self.cond_a && self.cond_w))
    }
}

pub fn redundancy_limited_equivalence(
    geom: &ArrayGeometry,
    grid: &AngularGrid,
    s: &WaveformMatrix,
    tol: f64,
) -> Result<RankEquivalenceCheck> {
    let sm = sensing_matrix(s, geom, grid)?;
    let n_sigma = sm.n_sigma();
    // N_s >= N_sigma / N_rx, in exact integer form.
    let applicable = s.rank(tol) * geom.n_rx() >= n_sigma;
    let krank_b = kruskal_rank(sm.matrix(), tol)?;
    let krank_a = kruskal_rank(sm.virtual_manifold().entries(), tol)?;
    let rank_w = numerical_rank(sm.effective_pattern(), tol);
    Ok(RankEquivalenceCheck {
        applicable,
        lhs: krank_b == n_sigma,
        cond_a: krank_a == n_sigma,
        cond_w: rank_w == n_sigma,
        n_sigma,
        krank_b,
        krank_a,
        rank_w,
    })
}

/// Witness that no waveform of rank at most `waveform_rank` can give the
/// effective pattern full column rank: an Rx subset `R` such that the
/// co-array columns supported entirely by `R` outnumber `N_s |R|`.
///
/// Those columns lie in the span of the `N_s |R|` vectors (waveform row space
/// basis) x (Rx basis vectors of `R`), so they are linearly dependent for
/// every such waveform. The condition is sufficient for infeasibility, not
/// claimed necessary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfeasibilityCertificate {
    /// Rx indices `R`, 0-based.
    pub rx_indices: Vec<usize>,
    /// Physical positions of those Rx sensors.
    pub rx_positions: Vec<u32>,
    /// Co-array column indices `L`, 0-based.
    pub coarray_columns: Vec<usize>,
    /// Virtual sensor positions of those columns.
    pub coarray_positions: Vec<u32>,
    /// The waveform rank the certificate refutes.
    pub waveform_rank: usize,
}

impl std::fmt::Display for InfeasibilityCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rx sensors at {:?} fully support {} co-array columns (positions {:?}) > N_s * |R| = {} * {}",
            self.rx_positions,
            self.coarray_columns.len(),
            self.coarray_positions,
            self.waveform_rank,
            self.rx_indices.len(),
        )
    }
}

/// Searches all non-empty Rx subsets, smallest first and lexicographic within
/// a size, for a counting violation `|L(R)| > N_s |R|`. Returns the first
/// witness found, or `None` when the counting condition rules nothing out.
///
/// Enumeration is `2^N_rx`; geometries beyond 24 Rx sensors are outside the
/// intended desk scale and are rejected.
pub fn structural_certificate(
    pattern: &RedundancyPattern,
    n_s: usize,
) -> Option<InfeasibilityCertificate> {
    let n_rx = pattern.n_rx();
    assert!(n_rx <= 24, "Rx subset enumeration capped at 24 sensors");
    assert!(
        (1..=pattern.n_tx()).contains(&n_s),
        "waveform rank must lie in 1..=N_tx"
    );

    let col_masks: Vec<u32> = (0..pattern.n_sigma())
        .map(|c| pattern.column_rx_mask(c))
        .collect();

    for size in 1..=n_rx {
        for subset in (0..n_rx).combinations(size) {
            let mask = subset.iter().fold(0u32, |m, &i| m | 1 << i);
            let columns: Vec<usize> = col_masks
                .iter()
                .enumerate()
                .filter(|&(_, &cm)| cm & !mask == 0)
                .map(|(c, _)| c)
                .collect();
            if columns.len() > n_s * size {
                let coarray = pattern.coarray().positions();
                let rx = pattern.geometry().rx_positions();
                return Some(InfeasibilityCertificate {
                    rx_positions: subset.iter().map(|&i| rx[i]).collect(),
                    rx_indices: subset,
                    coarray_positions: columns.iter().map(|&c| coarray[c]).collect(),
                    coarray_columns: columns,
                    waveform_rank: n_s,
                });
            }
        }
    }
    None
}

/// Result of searching for a rank-`N_s` waveform with full-column-rank
/// effective pattern.
#[derive(Debug, Clone)]
pub struct WaveformSearchOutcome {
    /// A waveform achieving `rank(W) = N_sigma`, when one was found.
    pub waveform: Option<WaveformMatrix>,
    /// Structural witness that no waveform of this rank can succeed.
    pub certificate: Option<InfeasibilityCertificate>,
    /// Random candidates actually drawn.
    pub trials_attempted: usize,
}

/// Array-informed waveform search at rank `n_s`: refuse immediately when a
/// structural certificate exists, otherwise draw seeded random rank-`n_s`
/// candidates (trial `i` uses seed `seed + i`) and return the first whose
/// effective pattern reaches full column rank.
///
/// A generic draw fails only on a measure-zero set, so the first trial
/// succeeds whenever success is possible at all for generic waveforms;
/// `trials` merely guards against degenerate seeds.
pub fn waveform_search(
    geom: &ArrayGeometry,
    n_s: usize,
    trials: usize,
    seed: u64,
) -> Result<WaveformSearchOutcome> {
    let n_tx = geom.n_tx();
    if !(1..=n_tx).contains(&n_s) {
        return Err(Error::InvalidWaveform(format!(
            "waveform rank {n_s} outside 1..=N_tx = {n_tx}"
        )));
    }
    let pattern = geom.redundancy_pattern();
    if let Some(certificate) = structural_certificate(&pattern, n_s) {
        return Ok(WaveformSearchOutcome {
            waveform: None,
            certificate: Some(certificate),
            trials_attempted: 0,
        });
    }
    let n_sigma = pattern.n_sigma();
    for trial in 0..trials {
        let s = random_waveform(n_s, n_tx, n_s, seed.wrapping_add(trial as u64))?;
        let w = effective_pattern(&s, &pattern)?;
        if numerical_rank(&w, DEFAULT_RANK_TOL) == n_sigma {
            return Ok(WaveformSearchOutcome {
                waveform: Some(s),
                certificate: None,
                trials_attempted: trial + 1,
            });
        }
    }
    Ok(WaveformSearchOutcome {
        waveform: None,
        certificate: None,
        trials_attempted: trials,
    })
}
