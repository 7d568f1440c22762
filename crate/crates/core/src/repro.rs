//! Reproduction harness: every quantitative claim the artifact makes about
//! the two built-in example arrays, plus the randomized property suites,
//! packaged as named pass/fail checks. The CLI's `paper-repro` command and
//! the acceptance test suite both run these.

use ndarray_linalg::Norm;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{array_i, array_ii, ArrayGeometry};
use crate::identifiability::{
    find_ambiguous_scene, l0_recover, random_scene, scenes_match, simulate,
    DEFAULT_FEASIBILITY_TOL,
};
use crate::manifold::AngularGrid;
use crate::rank_analysis::{
    kruskal_rank, max_krank_bound, redundancy_limited_equivalence, structural_certificate, tradeoff_curve,
    waveform_search, DEFAULT_RANK_TOL,
};
use crate::sensing::{proof_waveform, random_waveform, sensing_matrix};

/// One named check with its expected and observed outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn rec(name: &str, expected: impl ToString, observed: impl ToString, pass: bool) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        expected: expected.to_string(),
        observed: observed.to_string(),
        pass,
    }
}

/// Full reproduction report.
#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl ReproReport {
    /// Passes exactly when every individual check passes.
    pub fn overall_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs all checks. `seed` drives every randomized ingredient (grids,
/// waveforms, scenes, property-suite instances); results are deterministic
/// per seed.
pub fn run_all(seed: u64) -> ReproReport {
    let mut checks = Vec::new();
    checks.extend(check_pattern_fidelity());
    checks.extend(check_tradeoff_curves());
    checks.extend(check_singular_value_profile(seed));
    checks.extend(check_rank_counterexample(seed));
    checks.extend(check_ambiguity_and_recovery(seed));
    checks.extend(check_rank_equivalence_properties(seed));
    checks.extend(check_full_rank_waveforms(seed));
    checks.extend(check_rank_revealing_invariance(seed));
    ReproReport { seed, checks }
}

// Reference redundancy patterns for the example arrays, transcribed row by
// row as the column index of each row's single 1 (Tx-major rows).
const UPSILON_I_COLUMNS: [usize; 12] = [0, 1, 2, 5, 1, 2, 3, 6, 2, 3, 4, 7];
const UPSILON_II_COLUMNS: [usize; 12] = [0, 1, 3, 5, 1, 2, 4, 6, 2, 3, 5, 7];

/// Criterion 1: co-array and redundancy-pattern fidelity of both example
/// arrays, entry for entry.
pub fn check_pattern_fidelity() -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (label, geom, reference) in [
        ("array I", array_i(), &UPSILON_I_COLUMNS),
        ("array II", array_ii(), &UPSILON_II_COLUMNS),
    ] {
        let ca = geom.sum_coarray();
        out.push(rec(
            &format!("1. {label}: co-array {{0..7}}, contiguous, 12 pairs"),
            "N_sigma=8 contiguous, N_tx*N_rx=12",
            format!(
                "N_sigma={} contiguous={}, N_tx*N_rx={}",
                ca.n_sigma(),
                ca.is_contiguous(),
                geom.n_tx() * geom.n_rx()
            ),
            ca.n_sigma() == 8 && ca.is_contiguous() && geom.n_tx() * geom.n_rx() == 12,
        ));

        let pattern = geom.redundancy_pattern();
        let mut mismatches = 0usize;
        let mut ones = 0usize;
        for (row, &col) in reference.iter().enumerate() {
            for c in 0..8 {
                let want = if c == col { 1.0 } else { 0.0 };
                let got = pattern.matrix()[(row, c)];
                if got != want {
                    mismatches += 1;
                }
                if got == 1.0 {
                    ones += 1;
                }
            }
        }
        out.push(rec(
            &format!("1. {label}: pattern matrix matches reference"),
            "0 mismatching entries, 12 ones",
            format!("{mismatches} mismatching entries, {ones} ones"),
            mismatches == 0 && ones == 12,
        ));
    }
    out
}

/// Criterion 2: waveform-rank trade-off curve of both example arrays.
pub fn check_tradeoff_curves() -> Vec<CheckRecord> {
    let expected = vec![(1usize, 4usize), (2, 8), (3, 8)];
    [("array I", array_i()), ("array II", array_ii())]
        .into_iter()
        .map(|(label, geom)| {
            let curve = tradeoff_curve(&geom);
            rec(
                &format!("2. {label}: max krank (4, 8, 8), optimal N_s = 2"),
                "points [(1,4),(2,8),(3,8)], optimal 2",
                format!("points {:?}, optimal {}", curve.points, curve.optimal_n_s),
                curve.points == expected && curve.optimal_n_s == 2,
            )
        })
        .collect()
}

/// Thresholds for the singular-value profile check; the defaults are the
/// acceptance values.
#[derive(Debug, Clone, Copy)]
pub struct SingularValueThresholds {
    /// sigma_8(B_I) must fall below this times sigma_1(B_I).
    pub zero_rel: f64,
    /// sigma_8(B_II) must stay above this times sigma_1(B_II).
    pub nonzero_rel: f64,
    /// sigma_7(B_I) must exceed this times sigma_8(B_I).
    pub gap: f64,
}

impl Default for SingularValueThresholds {
    fn default() -> Self {
        Self {
            zero_rel: 1e-10,
            nonzero_rel: 1e-4,
            gap: 1e6,
        }
    }
}

/// Criterion 3: singular-value profile of the two sensing matrices under the
/// reference rank-2 waveform, on the default grid and on a randomized
/// distinct-node grid.
pub fn check_singular_value_profile(seed: u64) -> Vec<CheckRecord> {
    check_singular_value_profile_with(seed, SingularValueThresholds::default())
}

pub fn check_singular_value_profile_with(
    seed: u64,
    th: SingularValueThresholds,
) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let s = proof_waveform();
    let grids = [
        ("default grid", AngularGrid::uniform(16).unwrap()),
        ("random grid", random_grid_16(seed)),
    ];
    for (label, grid) in grids {
        let sv_i = sensing_matrix(&s, &array_i(), &grid).unwrap().singular_values();
        let sv_ii = sensing_matrix(&s, &array_ii(), &grid)
            .unwrap()
            .singular_values();
        out.push(rec(
            &format!("3. sigma_8(B_I) vanishes [{label}]"),
            format!("sigma_8 <= {:e} * sigma_1", th.zero_rel),
            format!("sigma_8/sigma_1 = {:.3e}", sv_i[7] / sv_i[0]),
            sv_i[7] <= th.zero_rel * sv_i[0],
        ));
        out.push(rec(
            &format!("3. clean rank gap in B_I [{label}]"),
            format!("sigma_7 > {:e} * sigma_8", th.gap),
            format!("sigma_7 = {:.3e}, sigma_8 = {:.3e}", sv_i[6], sv_i[7]),
            sv_i[6] > th.gap * sv_i[7],
        ));
        out.push(rec(
            &format!("3. sigma_8(B_II) stays away from zero [{label}]"),
            format!("sigma_8 >= {:e} * sigma_1", th.nonzero_rel),
            format!("sigma_8/sigma_1 = {:.3e}", sv_ii[7] / sv_ii[0]),
            sv_ii[7] >= th.nonzero_rel * sv_ii[0],
        ));
    }
    out
}

fn random_grid_16(seed: u64) -> AngularGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6714d);
    AngularGrid::random(16, &mut rng).unwrap()
}

/// Criterion 4: exact Kruskal ranks of the two sensing matrices, the
/// structural certificates at waveform rank 2, and the waveform search
/// outcomes.
pub fn check_rank_counterexample(seed: u64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let s = proof_waveform();
    let tol = DEFAULT_RANK_TOL;

    let uniform = AngularGrid::uniform(16).unwrap();
    let b_ii = sensing_matrix(&s, &array_ii(), &uniform).unwrap();
    let krank_ii = kruskal_rank(b_ii.matrix(), tol).expect("within budget");
    out.push(rec(
        "4. krank(B_II) = 8 [default grid, all C(16,8) subsets]",
        8,
        krank_ii,
        krank_ii == 8,
    ));

    // The deficient value krank(B_I) = 7 is a generic-grid statement; the
    // default uniform grid is a partial DFT beamspace with extra exact
    // dependencies (krank drops to 5 there), so the brute force runs on a
    // randomized distinct-node grid.
    let generic = random_grid_16(seed);
    let b_i = sensing_matrix(&s, &array_i(), &generic).unwrap();
    let krank_i = kruskal_rank(b_i.matrix(), tol).expect("within budget");
    out.push(rec(
        "4. krank(B_I) = 7 [randomized distinct-node grid]",
        7,
        krank_i,
        krank_i == 7,
    ));

    // Rank decisions must be tolerance-robust: a clean spectral gap at the
    // decided rank of the deficient effective pattern.
    let w_i = sensing_matrix(&s, &array_i(), &uniform).unwrap();
    let sv_w = crate::linalg::singular_values(w_i.effective_pattern());
    out.push(rec(
        "4. spectral gap at the rank decision of W_I",
        "sigma_7 > 1e4 * sigma_8",
        format!("sigma_7 = {:.3e}, sigma_8 = {:.3e}", sv_w[6], sv_w[7]),
        sv_w[6] > 1e4 * sv_w[7],
    ));

    let cert = structural_certificate(&array_i().redundancy_pattern(), 2);
    let (observed, pass) = match &cert {
        Some(c) => (
            format!(
                "R = rx indices {:?} (positions {:?}), |L| = {}",
                c.rx_indices,
                c.rx_positions,
                c.coarray_columns.len()
            ),
            c.rx_indices == vec![3] && c.rx_positions == vec![5] && c.coarray_columns.len() == 3,
        ),
        None => ("no certificate".to_string(), false),
    };
    out.push(rec(
        "4. certificate for array I at N_s = 2: R = {rx@5}, |L| = 3",
        "rx subset {position 5}, 3 columns",
        observed,
        pass,
    ));

    let cert_ii = structural_certificate(&array_ii().redundancy_pattern(), 2);
    out.push(rec(
        "4. no certificate for array II at N_s = 2",
        "none",
        format!("{:?}", cert_ii.as_ref().map(|c| c.to_string())),
        cert_ii.is_none(),
    ));

    let search_ii = waveform_search(&array_ii(), 2, 5, seed).expect("valid rank");
    out.push(rec(
        "4. waveform search succeeds on array II at N_s = 2",
        "rank-8 effective pattern found",
        format!(
            "found = {}, trials = {}",
            search_ii.waveform.is_some(),
            search_ii.trials_attempted
        ),
        search_ii.waveform.is_some(),
    ));

    let search_i = waveform_search(&array_i(), 2, 5, seed).expect("valid rank");
    out.push(rec(
        "4. waveform search refuses array I at N_s = 2 with certificate",
        "no waveform, certificate attached",
        format!(
            "found = {}, certificate = {}",
            search_i.waveform.is_some(),
            search_i.certificate.is_some()
        ),
        search_i.waveform.is_none() && search_i.certificate.is_some(),
    ));
    out
}

/// Criterion 5: an ambiguous scene pair exists for array I, and exhaustive
/// recovery on array II is exact for 100 seeded random 4-sparse scenes.
pub fn check_ambiguity_and_recovery(seed: u64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let grid = AngularGrid::uniform(16).unwrap();
    let s = proof_waveform();
    let b_i = sensing_matrix(&s, &array_i(), &grid).unwrap();
    let b_ii = sensing_matrix(&s, &array_ii(), &grid).unwrap();

    match find_ambiguous_scene(&b_i, 4, DEFAULT_RANK_TOL).expect("within budget") {
        Some((s1, s2)) => {
            let y1 = simulate(&b_i, &s1).unwrap();
            let y2 = simulate(&b_i, &s2).unwrap();
            let rel = (&y1 - &y2).norm_l2() / y1.norm_l2();
            out.push(rec(
                "5. ambiguous scene pair for array I (K = 4)",
                "distinct scenes, relative measurement difference <= 1e-10",
                format!(
                    "supports {:?} vs {:?}, rel diff = {:.3e}",
                    s1.support(),
                    s2.support(),
                    rel
                ),
                s1 != s2 && rel <= 1e-10 && s1.k() <= 4 && s2.k() <= 4,
            ));
        }
        None => out.push(rec(
            "5. ambiguous scene pair for array I (K = 4)",
            "a pair exists",
            "none found",
            false,
        )),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ce9e5);
    let scenes: Vec<_> = (0..100).map(|_| random_scene(16, 4, &mut rng)).collect();
    let exact = scenes
        .par_iter()
        .filter(|scene| {
            let y = simulate(&b_ii, scene).unwrap();
            match l0_recover(&y, &b_ii, 4, DEFAULT_FEASIBILITY_TOL) {
                Ok(r) => r.unique && scenes_match(&r.estimate, scene, 1e-8),
                Err(_) => false,
            }
        })
        .count();
    out.push(rec(
        "5. exact recovery of 100 random 4-sparse scenes on array II",
        "100/100 unique with amplitude error <= 1e-8",
        format!("{exact}/100"),
        exact == 100,
    ));
    out
}

struct EquivalenceInstance {
    geom: ArrayGeometry,
    v: usize,
    random_grid_seed: Option<u64>,
    n_s: usize,
    waveform_seed: u64,
}

impl EquivalenceInstance {
    fn grid(&self) -> AngularGrid {
        match self.random_grid_seed {
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                AngularGrid::random(self.v, &mut rng).unwrap()
            }
            None => AngularGrid::uniform(self.v).unwrap(),
        }
    }
}

/// Random geometry with N_tx, N_rx in {2,3,4}, a contiguous sum co-array,
/// and N_sigma <= 12 so exhaustive Kruskal ranks stay cheap.
fn random_contiguous_geometry(rng: &mut ChaCha8Rng) -> ArrayGeometry {
    loop {
        let geom = random_geometry(rng, 6);
        let ca = geom.sum_coarray();
        if ca.is_contiguous() && ca.n_sigma() <= 12 {
            return geom;
        }
    }
}

fn random_geometry(rng: &mut ChaCha8Rng, max_position: usize) -> ArrayGeometry {
    let n_tx = rng.random_range(2..=4usize);
    let n_rx = rng.random_range(2..=4usize);
    let positions = |rng: &mut ChaCha8Rng, n: usize| -> Vec<u32> {
        let mut p = vec![0u32];
        p.extend(
            rand::seq::index::sample(rng, max_position, n - 1)
                .into_iter()
                .map(|i| i as u32 + 1),
        );
        p
    };
    let tx = positions(rng, n_tx);
    let rx = positions(rng, n_rx);
    ArrayGeometry::new(tx, rx).expect("sampled geometry is valid")
}

/// Criterion 6: the redundancy-limited rank equivalence holds on 200 seeded
/// random instances, and the Kruskal-rank upper bound is never violated
/// (including instances below the redundancy-limited regime).
pub fn check_rank_equivalence_properties(seed: u64) -> Vec<CheckRecord> {
    let tol = DEFAULT_RANK_TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe91);

    let mut draw = |redundancy_limited: bool| -> EquivalenceInstance {
        let geom = random_contiguous_geometry(&mut rng);
        let n_sigma = geom.sum_coarray().n_sigma();
        let n_rx = geom.n_rx();
        let n_s_lo = if redundancy_limited {
            n_sigma.div_ceil(n_rx)
        } else {
            1
        };
        let n_s = rng.random_range(n_s_lo..=geom.n_tx());
        let v = rng.random_range(n_sigma..=(n_sigma + 2).min(14));
        let random_grid_seed = rng.random_range(0..2u32).eq(&1).then(|| rng.next_u64());
        EquivalenceInstance {
            geom,
            v,
            random_grid_seed,
            n_s,
            waveform_seed: rng.next_u64(),
        }
    };

    let limited: Vec<_> = (0..200).map(|_| draw(true)).collect();
    let unrestricted: Vec<_> = (0..60).map(|_| draw(false)).collect();

    let evaluate = |inst: &EquivalenceInstance| -> (bool, bool, bool) {
        let grid = inst.grid();
        let s = random_waveform(inst.n_s, inst.geom.n_tx(), inst.n_s, inst.waveform_seed)
            .expect("rank within range");
        let check = redundancy_limited_equivalence(&inst.geom, &grid, &s, tol).expect("within budget");
        let bound = max_krank_bound(s.rank(tol), inst.geom.n_rx(), check.n_sigma);
        (check.applicable, check.equivalence_holds(), check.krank_b <= bound)
    };

    let limited_results: Vec<_> = limited.par_iter().map(evaluate).collect();
    let unrestricted_results: Vec<_> = unrestricted.par_iter().map(evaluate).collect();

    let applicable = limited_results.iter().filter(|r| r.0).count();
    let equivalence_ok = limited_results.iter().filter(|r| r.0 && r.1).count();
    let bound_ok = limited_results
        .iter()
        .chain(&unrestricted_results)
        .filter(|r| r.2)
        .count();
    let total = limited_results.len() + unrestricted_results.len();

    vec![
        rec(
            "6. rank equivalence on 200 redundancy-limited random instances",
            "equivalence holds in 200/200 applicable instances",
            format!("{equivalence_ok}/{applicable} (applicable {applicable}/200)"),
            applicable == 200 && equivalence_ok == 200,
        ),
        rec(
            "6. krank(B) <= min(N_s N_rx, N_sigma) on all instances",
            format!("{total}/{total}"),
            format!("{bound_ok}/{total}"),
            bound_ok == total,
        ),
    ]
}

/// Criterion 7: full waveform rank always attains krank(B) = N_sigma on
/// contiguous-co-array geometries.
pub fn check_full_rank_waveforms(seed: u64) -> Vec<CheckRecord> {
    let tol = DEFAULT_RANK_TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf117);
    let instances: Vec<(ArrayGeometry, usize, u64)> = (0..20)
        .map(|_| {
            let geom = random_contiguous_geometry(&mut rng);
            let n_sigma = geom.sum_coarray().n_sigma();
            let v = rng.random_range(n_sigma..=(n_sigma + 2).min(14));
            (geom, v, rng.next_u64())
        })
        .collect();

    let full = instances
        .par_iter()
        .filter(|(geom, v, wseed)| {
            let grid = AngularGrid::uniform(*v).unwrap();
            let n_tx = geom.n_tx();
            let s = random_waveform(n_tx, n_tx, n_tx, *wseed).unwrap();
            let b = sensing_matrix(&s, geom, &grid).unwrap();
            kruskal_rank(b.matrix(), tol).expect("within budget") == b.n_sigma()
        })
        .count();

    vec![rec(
        "7. full-rank waveforms reach krank(B) = N_sigma on 20 random contiguous geometries",
        "20/20",
        format!("{full}/20"),
        full == 20,
    )]
}

/// Criterion 8: rank of the effective pattern is invariant under left
/// multiplication of the waveform by any full-column-rank factor.
pub fn check_rank_revealing_invariance(seed: u64) -> Vec<CheckRecord> {
    let tol = DEFAULT_RANK_TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1417);
    let mut matches = 0usize;
    for _ in 0..50 {
        let geom = random_geometry(&mut rng, 7);
        let pattern = geom.redundancy_pattern();
        let n_tx = geom.n_tx();
        let n_s = rng.random_range(1..=n_tx);
        let extra = rng.random_range(0..=2usize);
        let s = random_waveform(n_s, n_tx, n_s, rng.next_u64()).unwrap();
        let u = crate::sensing::complex_gaussian(&mut rng, n_s + extra, n_s);
        let lifted = crate::sensing::WaveformMatrix::new(u.dot(s.entries())).unwrap();

        let rank_of = |w: &crate::sensing::WaveformMatrix| {
            let pattern_matrix = crate::sensing::effective_pattern(w, &pattern).unwrap();
            crate::rank_analysis::numerical_rank(&pattern_matrix, tol)
        };
        if rank_of(&s) == rank_of(&lifted) {
            matches += 1;
        }
    }
    vec![rec(
        "8. rank((US x I) Upsilon) = rank((S x I) Upsilon) on 50 seeded pairs",
        "50/50",
        format!("{matches}/50"),
        matches == 50,
    )]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_passes_iff_every_check_passes() {
        let mut report = ReproReport {
            seed: 0,
            checks: vec![
                rec("a", 1, 1, true),
                rec("b", 2, 2, true),
            ],
        };
        assert!(report.overall_pass());
        report.checks.push(rec("c", 3, 4, false));
        assert!(!report.overall_pass());
    }

    #[test]
    fn misconfigured_tolerance_fails_the_gap_check() {
        // Harness sanity: loosening the zero threshold to 1e-2 must not make
        // the profile trivially pass, and tightening the nonzero threshold
        // beyond reason must fail array II.
        let th = SingularValueThresholds {
            zero_rel: 1e-10,
            nonzero_rel: 1e-2 * 1e2, // demands sigma_8 >= sigma_1
            gap: 1e6,
        };
        let checks = check_singular_value_profile_with(0, th);
        assert!(checks.iter().any(|c| !c.pass));
    }

    #[test]
    fn pattern_and_tradeoff_checks_pass() {
        assert!(check_pattern_fidelity().iter().all(|c| c.pass));
        assert!(check_tradeoff_curves().iter().all(|c| c.pass));
    }
}
