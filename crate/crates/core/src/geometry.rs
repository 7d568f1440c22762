//! Physical Tx/Rx array geometries, their sum co-array, and the redundancy
//! pattern matrix mapping physical sensor pairs to virtual sensors.
//!
//! Positions are exact non-negative integers in units of half the carrier
//! wavelength, so co-array computation involves no floating point at all.

use std::collections::BTreeSet;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Transmit and receive sensor positions of a colocated active sensing array.
///
/// Both position sets are normalized on construction: sorted ascending and
/// deduplicated. Each set must contain position 0; rejecting geometries
/// without it avoids a hidden translation silently relabeling the co-array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayGeometry {
    tx: Vec<u32>,
    rx: Vec<u32>,
}

impl ArrayGeometry {
    pub fn new(tx: Vec<u32>, rx: Vec<u32>) -> Result<Self> {
        let tx = normalize("tx", tx)?;
        let rx = normalize("rx", rx)?;
        Ok(Self { tx, rx })
    }

    pub fn tx_positions(&self) -> &[u32] {
        &self.tx
    }

    pub fn rx_positions(&self) -> &[u32] {
        &self.rx
    }

    pub fn n_tx(&self) -> usize {
        self.tx.len()
    }

    pub fn n_rx(&self) -> usize {
        self.rx.len()
    }

    /// Set of pairwise position sums `{d_tx + d_rx}`, the virtual array this
    /// geometry synthesizes.
    pub fn sum_coarray(&self) -> SumCoarray {
        let positions: BTreeSet<u32> = self
            .tx
            .iter()
            .flat_map(|&t| self.rx.iter().map(move |&r| t + r))
            .collect();
        SumCoarray {
            positions: positions.into_iter().collect(),
        }
    }

    /// Binary matrix assigning each physical Tx-Rx pair (rows, Tx-major) to
    /// the virtual sensor it synthesizes (columns, sorted co-array order).
    pub fn redundancy_pattern(&self) -> RedundancyPattern {
        let coarray = self.sum_coarray();
        let n_tx = self.n_tx();
        let n_rx = self.n_rx();
        let n_sigma = coarray.n_sigma();

        let mut matrix = Array2::<f64>::zeros((n_tx * n_rx, n_sigma));
        let mut row_pairing = Vec::with_capacity(n_tx * n_rx);
        let mut row_column = Vec::with_capacity(n_tx * n_rx);
        let mut multiplicities = vec![0usize; n_sigma];
        let mut column_rows = vec![Vec::new(); n_sigma];

        for t in 0..n_tx {
            for r in 0..n_rx {
                let row = t * n_rx + r;
                let col = coarray
                    .index_of(self.tx[t] + self.rx[r])
                    .expect("pair sum is in the co-array by construction");
                matrix[(row, col)] = 1.0;
                row_pairing.push((t, r));
                row_column.push(col);
                multiplicities[col] += 1;
                column_rows[col].push(row);
            }
        }

        RedundancyPattern {
            matrix,
            row_pairing,
            row_column,
            multiplicities,
            column_rows,
            coarray,
            geometry: self.clone(),
        }
    }

    /// An array is redundant when distinct Tx-Rx pairs synthesize the same
    /// virtual sensor, i.e. the co-array is smaller than the number of pairs.
    pub fn is_redundant(&self) -> bool {
        self.sum_coarray().n_sigma() < self.n_tx() * self.n_rx()
    }
}

fn normalize(label: &str, mut positions: Vec<u32>) -> Result<Vec<u32>> {
    if positions.is_empty() {
        return Err(Error::InvalidGeometry(format!(
            "{label} position set is empty"
        )));
    }
    positions.sort_unstable();
    positions.dedup();
    if positions[0] != 0 {
        return Err(Error::InvalidGeometry(format!(
            "{label} position set must contain 0 (got minimum {})",
            positions[0]
        )));
    }
    Ok(positions)
}

/// Built-in 3x4 example geometry with co-array {0..7}: Tx {0,1,2}, Rx {0,1,2,5}.
///
/// Shares its contiguous sum co-array and sensor counts with [`array_ii`],
/// yet its redundancy pattern blocks full effective-pattern rank at waveform
/// rank 2. The pair makes a canonical regression fixture.
pub fn array_i() -> ArrayGeometry {
    ArrayGeometry::new(vec![0, 1, 2], vec![0, 1, 2, 5]).expect("valid by construction")
}

/// Built-in 3x4 example geometry with co-array {0..7}: Tx {0,1,2}, Rx {0,1,3,5}.
pub fn array_ii() -> ArrayGeometry {
    ArrayGeometry::new(vec![0, 1, 2], vec![0, 1, 3, 5]).expect("valid by construction")
}

/// Sorted distinct virtual sensor positions synthesized by a geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumCoarray {
    positions: Vec<u32>,
}

impl SumCoarray {
    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    /// Number of distinct virtual sensors, `N_sigma`.
    pub fn n_sigma(&self) -> usize {
        self.positions.len()
    }

    /// True when the co-array is exactly `{0, 1, ..., N_sigma - 1}`. A
    /// contiguous co-array makes the virtual manifold a Vandermonde matrix
    /// with full Kruskal rank for any grid of distinct directions.
    pub fn is_contiguous(&self) -> bool {
        self.positions
            .iter()
            .enumerate()
            .all(|(i, &p)| p == i as u32)
    }

    fn index_of(&self, position: u32) -> Option<usize> {
        self.positions.binary_search(&position).ok()
    }
}

/// Binary redundancy pattern: rows are physical Tx-Rx pairs in Tx-major
/// order (row `n` pairs Tx index `n / N_rx` with Rx index `n % N_rx`), and
/// each row carries a single 1 in the column of the virtual sensor that pair
/// synthesizes. Columns therefore have disjoint row supports.
#[derive(Debug, Clone)]
pub struct RedundancyPattern {
    matrix: Array2<f64>,
    row_pairing: Vec<(usize, usize)>,
    row_column: Vec<usize>,
    multiplicities: Vec<usize>,
    column_rows: Vec<Vec<usize>>,
    coarray: SumCoarray,
    geometry: ArrayGeometry,
}

impl RedundancyPattern {
    /// Dense 0/1 matrix of shape `(N_tx * N_rx) x N_sigma`.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// `(tx index, rx index)` encoded by each row, 0-based.
    pub fn row_pairing(&self) -> &[(usize, usize)] {
        &self.row_pairing
    }

    /// Co-array column each row maps to.
    pub fn row_column(&self) -> &[usize] {
        &self.row_column
    }

    /// Column sums: how many physical pairs synthesize each virtual sensor.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Rows supporting each column (disjoint across columns).
    pub fn column_rows(&self) -> &[Vec<usize>] {
        &self.column_rows
    }

    pub fn coarray(&self) -> &SumCoarray {
        &self.coarray
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn n_tx(&self) -> usize {
        self.geometry.n_tx()
    }

    pub fn n_rx(&self) -> usize {
        self.geometry.n_rx()
    }

    pub fn n_sigma(&self) -> usize {
        self.coarray.n_sigma()
    }

    /// Rx indices contributing to column `col`, as a bit mask.
    pub(crate) fn column_rx_mask(&self, col: usize) -> u32 {
        self.column_rows[col]
            .iter()
            .fold(0u32, |mask, &row| mask | 1 << self.row_pairing[row].1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarray_of_array_i_is_contiguous_0_to_7() {
        let ca = array_i().sum_coarray();
        assert_eq!(ca.positions(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(ca.n_sigma(), 8);
        assert!(ca.is_contiguous());
    }

    #[test]
    fn coarray_of_array_ii_is_contiguous_0_to_7() {
        let ca = array_ii().sum_coarray();
        assert_eq!(ca.positions(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(ca.n_sigma(), 8);
        assert!(ca.is_contiguous());
    }

    #[test]
    fn coarray_of_singleton_arrays() {
        let g = ArrayGeometry::new(vec![0], vec![0]).unwrap();
        let ca = g.sum_coarray();
        assert_eq!(ca.positions(), &[0]);
        assert_eq!(ca.n_sigma(), 1);
        assert!(ca.is_contiguous());
    }

    #[test]
    fn gap_breaks_contiguity() {
        let g = ArrayGeometry::new(vec![0], vec![0, 2]).unwrap();
        assert!(!g.sum_coarray().is_contiguous());
    }

    // Reference patterns transcribed as (row -> column of the single 1),
    // 0-based. Row order is Tx-major.
    const UPSILON_I_COLUMNS: [usize; 12] = [0, 1, 2, 5, 1, 2, 3, 6, 2, 3, 4, 7];
    const UPSILON_II_COLUMNS: [usize; 12] = [0, 1, 3, 5, 1, 2, 4, 6, 2, 3, 5, 7];

    fn assert_pattern_matches(pattern: &RedundancyPattern, expected: &[usize; 12]) {
        assert_eq!(pattern.matrix().dim(), (12, 8));
        for (row, &col) in expected.iter().enumerate() {
            for c in 0..8 {
                let want = if c == col { 1.0 } else { 0.0 };
                assert_eq!(pattern.matrix()[(row, c)], want, "row {row} col {c}");
            }
            assert_eq!(pattern.row_column()[row], col);
        }
    }

    #[test]
    fn pattern_of_array_i_matches_reference() {
        let p = array_i().redundancy_pattern();
        assert_pattern_matches(&p, &UPSILON_I_COLUMNS);
        // Spot values called out in the reference rendering (1-based rows 3, 4).
        assert_eq!(p.matrix()[(2, 2)], 1.0);
        assert_eq!(p.matrix()[(3, 5)], 1.0);
    }

    #[test]
    fn pattern_of_array_ii_matches_reference() {
        let p = array_ii().redundancy_pattern();
        assert_pattern_matches(&p, &UPSILON_II_COLUMNS);
        // 1-based row 3 carries its 1 in column 4.
        assert_eq!(p.matrix()[(2, 3)], 1.0);
    }

    #[test]
    fn pattern_of_singleton_is_one_by_one() {
        let p = ArrayGeometry::new(vec![0], vec![0]).unwrap().redundancy_pattern();
        assert_eq!(p.matrix().dim(), (1, 1));
        assert_eq!(p.matrix()[(0, 0)], 1.0);
    }

    #[test]
    fn redundancy_classification() {
        assert!(array_i().is_redundant()); // 8 < 12
        assert!(array_ii().is_redundant());
        let g = ArrayGeometry::new(vec![0], vec![0, 1]).unwrap();
        assert!(!g.is_redundant()); // 2 = 1 * 2
    }

    #[test]
    fn multiplicities_match_pair_sum_counts() {
        // Independent count of pairwise sums, bypassing the pattern matrix.
        for geom in [array_i(), array_ii()] {
            let pattern = geom.redundancy_pattern();
            for (col, &pos) in pattern.coarray().positions().iter().enumerate() {
                let count = geom
                    .tx_positions()
                    .iter()
                    .flat_map(|&t| geom.rx_positions().iter().map(move |&r| t + r))
                    .filter(|&s| s == pos)
                    .count();
                assert_eq!(pattern.multiplicities()[col], count);
            }
        }
        assert_eq!(
            array_i().redundancy_pattern().multiplicities(),
            &[1, 2, 3, 2, 1, 1, 1, 1]
        );
        assert_eq!(
            array_ii().redundancy_pattern().multiplicities(),
            &[1, 2, 2, 2, 1, 2, 1, 1]
        );
    }

    #[test]
    fn construction_normalizes_and_validates() {
        let g = ArrayGeometry::new(vec![2, 0, 1, 1], vec![5, 0]).unwrap();
        assert_eq!(g.tx_positions(), &[0, 1, 2]);
        assert_eq!(g.rx_positions(), &[0, 5]);

        assert!(ArrayGeometry::new(vec![1, 2], vec![0]).is_err());
        assert!(ArrayGeometry::new(vec![], vec![0]).is_err());
    }

    #[test]
    fn coarray_is_symmetric_in_tx_and_rx() {
        let a = ArrayGeometry::new(vec![0, 1, 4], vec![0, 2, 3]).unwrap();
        let b = ArrayGeometry::new(vec![0, 2, 3], vec![0, 1, 4]).unwrap();
        assert_eq!(a.sum_coarray(), b.sum_coarray());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn pattern_row_and_column_sums(
            tx in proptest::collection::btree_set(0u32..10, 1..5),
            rx in proptest::collection::btree_set(0u32..10, 1..5),
        ) {
            let mut tx: Vec<u32> = tx.into_iter().collect();
            let mut rx: Vec<u32> = rx.into_iter().collect();
            tx[0] = 0;
            rx[0] = 0;
            let geom = ArrayGeometry::new(tx, rx).unwrap();
            let p = geom.redundancy_pattern();

            // Every row has exactly one 1.
            for row in p.matrix().rows() {
                proptest::prop_assert_eq!(row.sum(), 1.0);
            }
            // Column sums >= 1 and total to the number of pairs.
            let total: usize = p.multiplicities().iter().sum();
            proptest::prop_assert_eq!(total, geom.n_tx() * geom.n_rx());
            proptest::prop_assert!(p.multiplicities().iter().all(|&m| m >= 1));
            // Columns have disjoint supports, hence are orthogonal.
            let gram = p.matrix().t().dot(p.matrix());
            for ((i, j), &v) in gram.indexed_iter() {
                if i != j {
                    proptest::prop_assert_eq!(v, 0.0);
                }
            }
            // Set addition commutes.
            let swapped = ArrayGeometry::new(
                geom.rx_positions().to_vec(),
                geom.tx_positions().to_vec(),
            )
            .unwrap();
            proptest::prop_assert_eq!(geom.sum_coarray(), swapped.sum_coarray());
        }
    }
}
