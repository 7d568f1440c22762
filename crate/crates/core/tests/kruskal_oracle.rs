//! Cross-checks the Kruskal rank implementation against an independently
//! coded oracle: the largest r such that the minimum smallest singular value
//! over all r-column subsets exceeds tol times sigma_max of the full matrix.

use itertools::Itertools;
use ndarray::{Array2, Axis};
use ndarray_linalg::SVD;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use coarray::{
    array_i, array_ii, kruskal_rank, manifold, proof_waveform, sensing_matrix, AngularGrid,
    DEFAULT_RANK_TOL,
};

fn sigma(m: &Array2<Complex64>) -> Vec<f64> {
    let (_, s, _) = m.svd(false, false).unwrap();
    s.to_vec()
}

fn oracle_kruskal_rank(m: &Array2<Complex64>, tol: f64) -> usize {
    let sigma_max = sigma(m)[0];
    let cap = m.nrows().min(m.ncols());
    let mut best = 0;
    for r in 1..=cap {
        let worst = (0..m.ncols())
            .combinations(r)
            .map(|cols| {
                let sub = m.select(Axis(1), &cols);
                *sigma(&sub).last().unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        if worst > tol * sigma_max {
            best = r;
        } else {
            break;
        }
    }
    best
}

fn random_low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> Array2<Complex64> {
    let mut draw = |r: usize, c: usize| {
        Array2::from_shape_simple_fn((r, c), || {
            Complex64::new(
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            )
        })
    };
    let left = draw(rows, rank);
    let right = draw(rank, cols);
    left.dot(&right)
}

#[test]
fn oracle_agrees_on_example_sensing_matrices() {
    let s = proof_waveform();
    let uniform = AngularGrid::uniform(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0A11A7);
    let generic = AngularGrid::random(16, &mut rng).unwrap();

    for (geom, grid, expected) in [
        (array_ii(), &uniform, 8),
        (array_i(), &uniform, 5),
        (array_i(), &generic, 7),
    ] {
        let b = sensing_matrix(&s, &geom, grid).unwrap();
        let implementation = kruskal_rank(b.matrix(), DEFAULT_RANK_TOL).unwrap();
        let oracle = oracle_kruskal_rank(b.matrix(), DEFAULT_RANK_TOL);
        assert_eq!(implementation, oracle);
        assert_eq!(implementation, expected);
    }
}

#[test]
fn oracle_agrees_on_virtual_manifold() {
    let grid = AngularGrid::uniform(16).unwrap();
    let positions: Vec<u32> = (0..8).collect();
    let a = manifold(&positions, &grid);
    assert_eq!(kruskal_rank(a.entries(), DEFAULT_RANK_TOL).unwrap(), 8);
    assert_eq!(oracle_kruskal_rank(a.entries(), DEFAULT_RANK_TOL), 8);
}

#[test]
fn oracle_agrees_on_random_low_rank_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..10 {
        let rank = 1 + trial % 3;
        let m = random_low_rank(&mut rng, 4, 6, rank);
        assert_eq!(
            kruskal_rank(&m, DEFAULT_RANK_TOL).unwrap(),
            oracle_kruskal_rank(&m, DEFAULT_RANK_TOL),
            "trial {trial}"
        );
    }
}
