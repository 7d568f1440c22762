//! Spatio-temporal waveform matrices and assembly of the effective waveform
//! pattern `W = (S (x) I) Upsilon` and the sensing matrix `B = W A`.

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, RedundancyPattern};
use crate::linalg::{self, CMat};
use crate::manifold::{manifold, AngularGrid, ManifoldMatrix};

/// Space-time code: a complex `T x N_tx` matrix whose columns are the length-T
/// signals launched by the transmitters. Its rank (the waveform rank `N_s`)
/// ranges from 1 (phased array) to `N_tx` (orthogonal MIMO).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformMatrix {
    entries: CMat,
}

impl WaveformMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidWaveform(
                "waveform matrix must have at least one snapshot and one transmitter".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    /// Snapshot count `T`.
    pub fn snapshots(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.entries.ncols()
    }

    /// Waveform rank `N_s`: singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let s = linalg::singular_values(&self.entries);
        linalg::rank_from_singular_values(s.as_slice().unwrap(), tol)
    }
}

/// The canonical rank-2 waveform for three transmitters: entries (1,1), (2,2)
/// and (1,3) equal to `1/sqrt(3)`, the rest zero. Certifies that the second
/// built-in example array attains a full-rank effective pattern at waveform
/// rank 2.
pub fn proof_waveform() -> WaveformMatrix {
    let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let z = Complex64::new(0.0, 0.0);
    WaveformMatrix {
        entries: ndarray::array![[a, z, a], [z, a, z]],
    }
}

/// Seeded random waveform of exact rank `n_s`, built as a product of `t x n_s`
/// and `n_s x n_tx` standard complex Gaussian factors. Deterministic for a
/// given seed.
pub fn random_waveform(n_s: usize, n_tx: usize, t: usize, seed: u64) -> Result<WaveformMatrix> {
    if n_s == 0 || n_s > t.min(n_tx) {
        return Err(Error::InvalidWaveform(format!(
            "requested rank {n_s} outside 1..=min(T, N_tx) = {}",
            t.min(n_tx)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left = complex_gaussian(&mut rng, t, n_s);
    let right = complex_gaussian(&mut rng, n_s, n_tx);
    Ok(WaveformMatrix {
        entries: left.dot(&right),
    })
}

pub(crate) fn complex_gaussian<R: rand::RngExt>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    Array2::from_shape_simple_fn((rows, cols), || {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Kronecker product `s (x) I_n`: the block operator a waveform becomes when
/// applied identically across `n` receivers.
pub fn kron_with_identity(s: &CMat, n: usize) -> CMat {
    let (t, cols) = s.dim();
    let mut out = CMat::zeros((t * n, cols * n));
    for ((i, j), &val) in s.indexed_iter() {
        for k in 0..n {
            out[(i * n + k, j * n + k)] = val;
        }
    }
    out
}

/// Effective waveform pattern `W = (S (x) I_{N_rx}) Upsilon`, of shape
/// `(T N_rx) x N_sigma`.
///
/// Each pattern column has at most one contributing pair per Rx index (two
/// pairs sharing an Rx sensor and a pair sum would need equal Tx positions),
/// so the per-column accumulation never actually adds two terms.
pub fn effective_pattern(s: &WaveformMatrix, pattern: &RedundancyPattern) -> Result<CMat> {
    if s.n_tx() != pattern.n_tx() {
        return Err(Error::DimensionMismatch(format!(
            "waveform drives {} transmitters but the pattern encodes {}",
            s.n_tx(),
            pattern.n_tx()
        )));
    }
    let t = s.snapshots();
    let n_rx = pattern.n_rx();
    let mut w = CMat::zeros((t * n_rx, pattern.n_sigma()));
    for (row, &(tx_idx, rx_idx)) in pattern.row_pairing().iter().enumerate() {
        let col = pattern.row_column()[row];
        for time in 0..t {
            w[(time * n_rx + rx_idx, col)] += s.entries()[(time, tx_idx)];
        }
    }
    Ok(w)
}

/// Full noiseless sensing matrix `B = (S (x) I) Upsilon A` together with the
/// factors it was assembled from.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    b: CMat,
    w: CMat,
    waveform: WaveformMatrix,
    pattern: RedundancyPattern,
    virtual_manifold: ManifoldMatrix,
}

impl SensingMatrix {
    /// The `(T N_rx) x V` measurement matrix `B`.
    pub fn matrix(&self) -> &CMat {
        &self.b
    }

    /// The `(T N_rx) x N_sigma` effective pattern `W`.
    pub fn effective_pattern(&self) -> &CMat {
        &self.w
    }

    pub fn waveform(&self) -> &WaveformMatrix {
        &self.waveform
    }

    pub fn pattern(&self) -> &RedundancyPattern {
        &self.pattern
    }

    /// Virtual (sum co-array) manifold `A`.
    pub fn virtual_manifold(&self) -> &ManifoldMatrix {
        &self.virtual_manifold
    }

    /// Grid size `V` (columns of `B`).
    pub fn v(&self) -> usize {
        self.b.ncols()
    }

    pub fn n_sigma(&self) -> usize {
        self.pattern.n_sigma()
    }

    pub fn n_rows(&self) -> usize {
        self.b.nrows()
    }

    /// Singular values of `B`, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.b).to_vec()
    }
}

/// Assembles the sensing matrix for a waveform, geometry, and angular grid.
pub fn sensing_matrix(
    s: &WaveformMatrix,
    geom: &ArrayGeometry,
    grid: &AngularGrid,
) -> Result<SensingMatrix> {
    let pattern = geom.redundancy_pattern();
    let w = effective_pattern(s, &pattern)?;
    let a = manifold(pattern.coarray().positions(), grid);
    let b = w.dot(a.entries());
    Ok(SensingMatrix {
        b,
        w,
        waveform: s.clone(),
        pattern,
        virtual_manifold: a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{array_i, array_ii};
    use rand::RngExt;

    const TOL: f64 = 1e-10;

    fn generic_s() -> WaveformMatrix {
        let c = Complex64::new;
        WaveformMatrix::new(ndarray::array![
            [c(1.0, 0.5), c(2.0, -1.0), c(3.0, 0.0)],
            [c(4.0, 0.0), c(5.0, 2.0), c(6.0, -1.0)],
        ])
        .unwrap()
    }

    #[test]
    fn proof_waveform_values_and_rank() {
        let s = proof_waveform();
        let a = 1.0 / 3f64.sqrt();
        assert_eq!(s.snapshots(), 2);
        assert_eq!(s.n_tx(), 3);
        assert_eq!(s.entries()[(0, 0)], Complex64::new(a, 0.0));
        assert_eq!(s.entries()[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(s.entries()[(0, 2)], Complex64::new(a, 0.0));
        assert_eq!(s.entries()[(1, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(s.entries()[(1, 1)], Complex64::new(a, 0.0));
        assert_eq!(s.entries()[(1, 2)], Complex64::new(0.0, 0.0));
        assert_eq!(s.rank(TOL), 2);
    }

    #[test]
    fn waveform_rank_examples() {
        let ones = WaveformMatrix::new(CMat::from_elem((1, 3), Complex64::new(1.0, 0.0))).unwrap();
        assert_eq!(ones.rank(TOL), 1);
        let eye = WaveformMatrix::new(CMat::eye(3)).unwrap();
        assert_eq!(eye.rank(TOL), 3);
    }

    #[test]
    fn random_waveform_has_requested_rank_and_is_deterministic() {
        for (n_s, n_tx, t, seed) in [(2, 3, 2, 7u64), (1, 3, 1, 0), (3, 3, 3, 1), (2, 4, 6, 42)] {
            let s = random_waveform(n_s, n_tx, t, seed).unwrap();
            assert_eq!(s.entries().dim(), (t, n_tx));
            assert_eq!(s.rank(TOL), n_s, "rank mismatch for seed {seed}");
            let again = random_waveform(n_s, n_tx, t, seed).unwrap();
            assert_eq!(s, again);
        }
        assert!(random_waveform(0, 3, 2, 0).is_err());
        assert!(random_waveform(3, 3, 2, 0).is_err());
        assert!(random_waveform(4, 3, 8, 0).is_err());
    }

    // Column index of the single 1 for each (tx row, rx index) of the two
    // example arrays; mirrors the pattern matrices checked in geometry.
    const COLS_I: [[usize; 3]; 4] = [[0, 1, 2], [1, 2, 3], [2, 3, 4], [5, 6, 7]];
    const COLS_II: [[usize; 3]; 4] = [[0, 1, 2], [1, 2, 3], [3, 4, 5], [5, 6, 7]];

    fn assert_effective_pattern_structure(w: &CMat, s: &WaveformMatrix, cols: &[[usize; 3]; 4]) {
        assert_eq!(w.dim(), (8, 8));
        let mut expect = CMat::zeros((8, 8));
        for time in 0..2 {
            for rx in 0..4 {
                for (j, &col) in cols[rx].iter().enumerate() {
                    expect[(time * 4 + rx, col)] = s.entries()[(time, j)];
                }
            }
        }
        let diff = (w - &expect).map(|z| z.norm()).fold(0.0f64, |a, &b| a.max(b));
        assert!(diff == 0.0, "effective pattern deviates by {diff}");
    }

    #[test]
    fn effective_pattern_of_array_i_matches_reference_structure() {
        let s = generic_s();
        let w = effective_pattern(&s, &array_i().redundancy_pattern()).unwrap();
        assert_effective_pattern_structure(&w, &s, &COLS_I);
        // The last three columns live entirely on the rows of the outlying
        // Rx sensor (0-based rows 3 and 7).
        for col in 5..8 {
            for row in 0..8 {
                if row != 3 && row != 7 {
                    assert_eq!(w[(row, col)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn effective_pattern_of_array_ii_matches_reference_structure() {
        let s = generic_s();
        let w = effective_pattern(&s, &array_ii().redundancy_pattern()).unwrap();
        assert_effective_pattern_structure(&w, &s, &COLS_II);
    }

    #[test]
    fn effective_pattern_of_nonredundant_array_is_kronecker_block() {
        // tx {0,3}, rx {0,1}: all four pair sums distinct, Upsilon = I.
        let geom = ArrayGeometry::new(vec![0, 3], vec![0, 1]).unwrap();
        let pattern = geom.redundancy_pattern();
        assert!(!geom.is_redundant());
        let s = WaveformMatrix::new(complex_gaussian(
            &mut ChaCha8Rng::seed_from_u64(5),
            3,
            2,
        ))
        .unwrap();
        let w = effective_pattern(&s, &pattern).unwrap();
        let expect = kron_with_identity(s.entries(), 2);
        assert_eq!(w, expect);
    }

    #[test]
    fn effective_pattern_rejects_transmitter_mismatch() {
        let s = WaveformMatrix::new(CMat::eye(2)).unwrap();
        assert!(effective_pattern(&s, &array_i().redundancy_pattern()).is_err());
    }

    #[test]
    fn proof_waveform_fills_array_ii_pattern() {
        let w = effective_pattern(&proof_waveform(), &array_ii().redundancy_pattern()).unwrap();
        let s = linalg::singular_values(&w);
        assert_eq!(
            linalg::rank_from_singular_values(s.as_slice().unwrap(), TOL),
            8
        );
    }

    #[test]
    fn sensing_matrix_shapes_and_factorization() {
        let grid = AngularGrid::uniform(16).unwrap();
        let b = sensing_matrix(&proof_waveform(), &array_ii(), &grid).unwrap();
        assert_eq!(b.matrix().dim(), (8, 16));
        assert_eq!(b.v(), 16);
        assert_eq!(b.n_sigma(), 8);
        // B = W A holds to rounding.
        let recomputed = b.effective_pattern().dot(b.virtual_manifold().entries());
        let diff = (b.matrix() - &recomputed)
            .map(|z| z.norm())
            .fold(0.0f64, |a, &b| a.max(b));
        assert!(diff <= 1e-12);
    }

    #[test]
    fn singular_value_split_between_example_arrays() {
        let grid = AngularGrid::uniform(16).unwrap();
        let s_i = sensing_matrix(&proof_waveform(), &array_i(), &grid)
            .unwrap()
            .singular_values();
        let s_ii = sensing_matrix(&proof_waveform(), &array_ii(), &grid)
            .unwrap()
            .singular_values();
        assert!(s_i[7] <= 1e-12 * s_i[0], "array I must lose a dimension");
        assert!(s_ii[7] > 1e-4 * s_ii[0], "array II must stay full rank");
    }

    #[test]
    fn identity_factors_reduce_to_khatri_rao_manifold() {
        // Upsilon = I and S = I: B collapses to the Tx-Rx Khatri-Rao manifold.
        let geom = ArrayGeometry::new(vec![0], vec![0, 1]).unwrap();
        let grid = AngularGrid::uniform(2).unwrap();
        let s = WaveformMatrix::new(CMat::eye(1)).unwrap();
        let b = sensing_matrix(&s, &geom, &grid).unwrap();
        let kr = crate::manifold::khatri_rao(
            &manifold(geom.tx_positions(), &grid),
            &manifold(geom.rx_positions(), &grid),
        )
        .unwrap();
        let diff = (b.matrix() - &kr).map(|z| z.norm()).fold(0.0f64, |a, &b| a.max(b));
        assert!(diff <= 1e-12);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn accumulation_route_matches_dense_kronecker_product(
            tx in proptest::collection::btree_set(0u32..8, 1..5),
            rx in proptest::collection::btree_set(0u32..8, 1..5),
            t in 1usize..4,
            seed in 0u64..1000,
        ) {
            let mut tx: Vec<u32> = tx.into_iter().collect();
            let mut rx: Vec<u32> = rx.into_iter().collect();
            tx[0] = 0;
            rx[0] = 0;
            let geom = ArrayGeometry::new(tx, rx).unwrap();
            let pattern = geom.redundancy_pattern();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = WaveformMatrix::new(complex_gaussian(&mut rng, t, geom.n_tx())).unwrap();

            let fast = effective_pattern(&s, &pattern).unwrap();
            let ups = pattern.matrix().mapv(|x| Complex64::new(x, 0.0));
            let dense = kron_with_identity(s.entries(), geom.n_rx()).dot(&ups);
            let diff = (&fast - &dense).map(|z| z.norm()).fold(0.0f64, |a, &b| a.max(b));
            proptest::prop_assert!(diff <= 1e-12);
        }

        #[test]
        fn kronecker_identity_respects_products(
            rows_u in 1usize..4,
            inner in 1usize..4,
            cols_s in 1usize..4,
            n in 1usize..4,
            seed in 0u64..1000,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = complex_gaussian(&mut rng, rows_u, inner);
            let s = complex_gaussian(&mut rng, inner, cols_s);
            let lhs = kron_with_identity(&u, n).dot(&kron_with_identity(&s, n));
            let rhs = kron_with_identity(&u.dot(&s), n);
            let diff = (&lhs - &rhs).map(|z| z.norm()).fold(0.0f64, |a, &b| a.max(b));
            proptest::prop_assert!(diff <= 1e-12);
        }

        #[test]
        fn effective_pattern_rank_is_invariant_under_rank_revealing_factors(
            tx in proptest::collection::btree_set(0u32..8, 1..5),
            rx in proptest::collection::btree_set(0u32..8, 1..5),
            extra_rows in 0usize..3,
            seed in 0u64..1000,
        ) {
            let mut tx: Vec<u32> = tx.into_iter().collect();
            let mut rx: Vec<u32> = rx.into_iter().collect();
            tx[0] = 0;
            rx[0] = 0;
            let geom = ArrayGeometry::new(tx, rx).unwrap();
            let pattern = geom.redundancy_pattern();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n_s = rng.random_range(1..=geom.n_tx());
            let s = WaveformMatrix::new(
                complex_gaussian(&mut rng, n_s, n_s).dot(&complex_gaussian(&mut rng, n_s, geom.n_tx())),
            )
            .unwrap();
            // U has full column rank with probability 1.
            let u = complex_gaussian(&mut rng, n_s + extra_rows, n_s);
            let lifted = WaveformMatrix::new(u.dot(s.entries())).unwrap();

            let rank = |w: &CMat| {
                let sv = linalg::singular_values(w);
                linalg::rank_from_singular_values(sv.as_slice().unwrap(), TOL)
            };
            let w_s = effective_pattern(&s, &pattern).unwrap();
            let w_lifted = effective_pattern(&lifted, &pattern).unwrap();
            proptest::prop_assert_eq!(rank(&w_s), rank(&w_lifted));
        }
    }
}
