//! Command implementations and output rendering.

use std::fs;
use std::path::Path;

use serde::Serialize;

use coarray::io::{
    manifold_to_csv, read_geometry, read_scene, read_waveform, upsilon_to_csv, waveform_to_json,
};
use coarray::{
    array_i, array_ii, kruskal_rank_with_budget, manifold, max_krank_bound, numerical_rank,
    proof_waveform, random_waveform, sensing_matrix, simulate, structural_certificate,
    tradeoff_curve, uniqueness_bound, ArrayGeometry, AngularGrid, InfeasibilityCertificate,
    Scene, TradeoffCurve, WaveformMatrix,
};

use crate::{Failure, Format, EXIT_AMBIGUOUS, EXIT_BUDGET, EXIT_CHECK_FAILED};

fn resolve_geometry(spec: &str) -> Result<ArrayGeometry, Failure> {
    match spec.to_ascii_lowercase().as_str() {
        "paper:array-i" => Ok(array_i()),
        "paper:array-ii" => Ok(array_ii()),
        _ => Ok(read_geometry(Path::new(spec))?),
    }
}

/// Waveform spec: `proof`, `random:N_S[:SEED]`, or a file path. For generated
/// waveforms the seed actually used is returned so runs stay reproducible.
fn resolve_waveform(
    spec: &str,
    n_tx: usize,
    default_seed: u64,
) -> Result<(WaveformMatrix, Option<u64>), Failure> {
    if spec == "proof" {
        return Ok((proof_waveform(), None));
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let mut parts = rest.split(':');
        let n_s: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Failure::input(format!("bad waveform spec `{spec}`")))?;
        let seed: u64 = match parts.next() {
            Some(p) => p
                .parse()
                .map_err(|_| Failure::input(format!("bad seed in waveform spec `{spec}`")))?,
            None => default_seed,
        };
        if parts.next().is_some() {
            return Err(Failure::input(format!("bad waveform spec `{spec}`")));
        }
        // Canonical reduced form: T = N_s suffices for every rank question.
        return Ok((random_waveform(n_s, n_tx, n_s, seed)?, Some(seed)));
    }
    Ok((read_waveform(Path::new(spec))?, None))
}

fn ensure_out_dir(out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out)
        .map_err(|e| Failure::input(format!("cannot create {}: {e}", out.display())))
}

fn write_out(out: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::write(out.join(name), contents)
        .map_err(|e| Failure::input(format!("cannot write {name}: {e}")))
}

#[derive(Serialize)]
struct CertificateEntry {
    n_s: usize,
    certificate: Option<InfeasibilityCertificate>,
}

#[derive(Serialize)]
struct WaveformReport {
    t: usize,
    n_tx: usize,
    waveform_rank: usize,
    /// Seed of a generated waveform (`random:` specs), absent otherwise.
    seed: Option<u64>,
    rank_w: usize,
    achievable_bound: usize,
    krank_b: Option<usize>,
    krank_b_error: Option<String>,
    uniqueness_bound: Option<usize>,
    singular_values: Vec<f64>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    tx: Vec<u32>,
    rx: Vec<u32>,
    n_tx: usize,
    n_rx: usize,
    n_sigma: usize,
    coarray: Vec<u32>,
    contiguous: bool,
    redundant: bool,
    multiplicities: Vec<usize>,
    grid_v: usize,
    tol: f64,
    tradeoff: TradeoffCurve,
    certificates: Vec<CertificateEntry>,
    waveform: Option<WaveformReport>,
}

#[allow(clippy::too_many_arguments)]
pub fn analyze(
    geometry_spec: &str,
    waveform_spec: Option<&str>,
    grid_v: usize,
    tol: f64,
    seed: u64,
    budget: u64,
    dump_manifold: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let geom = resolve_geometry(geometry_spec)?;
    let grid = AngularGrid::uniform(grid_v)?;
    let pattern = geom.redundancy_pattern();
    let coarray = pattern.coarray().clone();
    let curve = tradeoff_curve(&geom);
    let certificates: Vec<CertificateEntry> = (1..=geom.n_tx())
        .map(|n_s| CertificateEntry {
            n_s,
            certificate: structural_certificate(&pattern, n_s),
        })
        .collect();

    let mut budget_hit = false;
    let mut generated_waveform: Option<WaveformMatrix> = None;
    let waveform = match waveform_spec {
        None => None,
        Some(spec) => {
            let (s, generated_seed) = resolve_waveform(spec, geom.n_tx(), seed)?;
            let b = sensing_matrix(&s, &geom, &grid)?;
            let waveform_rank = s.rank(tol);
            let rank_w = numerical_rank(b.effective_pattern(), tol);
            let (krank_b, krank_b_error) = match kruskal_rank_with_budget(b.matrix(), tol, budget)
            {
                Ok(k) => (Some(k), None),
                Err(e @ coarray::Error::BudgetExceeded { .. }) => {
                    budget_hit = true;
                    (None, Some(e.to_string()))
                }
                Err(e) => return Err(e.into()),
            };
            if generated_seed.is_some() {
                generated_waveform = Some(s.clone());
            }
            Some(WaveformReport {
                t: s.snapshots(),
                n_tx: s.n_tx(),
                waveform_rank,
                seed: generated_seed,
                rank_w,
                achievable_bound: max_krank_bound(waveform_rank, geom.n_rx(), coarray.n_sigma()),
                krank_b,
                krank_b_error,
                uniqueness_bound: krank_b.map(uniqueness_bound),
                singular_values: b.singular_values(),
            })
        }
    };

    let report = AnalyzeReport {
        tx: geom.tx_positions().to_vec(),
        rx: geom.rx_positions().to_vec(),
        n_tx: geom.n_tx(),
        n_rx: geom.n_rx(),
        n_sigma: coarray.n_sigma(),
        coarray: coarray.positions().to_vec(),
        contiguous: coarray.is_contiguous(),
        redundant: geom.is_redundant(),
        multiplicities: pattern.multiplicities().to_vec(),
        grid_v,
        tol,
        tradeoff: curve,
        certificates,
        waveform,
    };

    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Table => print_analyze_table(&report),
        Format::Csv => {
            return Err(Failure::input(
                "csv output is not defined for analyze; use --out to write CSV files",
            ))
        }
    }

    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_out(dir, "report.json", &serde_json::to_string_pretty(&report).unwrap())?;
        write_out(dir, "tradeoff.csv", &tradeoff_csv(&report.tradeoff))?;
        write_out(dir, "upsilon.csv", &upsilon_to_csv(&pattern))?;
        if let Some(w) = &report.waveform {
            write_out(dir, "singular_values.csv", &singular_values_csv(&w.singular_values))?;
        }
        if let Some(s) = &generated_waveform {
            write_out(dir, "waveform.json", &waveform_to_json(s))?;
        }
        if dump_manifold {
            let a = manifold(coarray.positions(), &grid);
            write_out(dir, "virtual_manifold.csv", &manifold_to_csv(&a))?;
        }
    } else if dump_manifold {
        return Err(Failure::input("--dump-manifold requires --out"));
    }

    Ok(if budget_hit { EXIT_BUDGET } else { 0 })
}

fn print_analyze_table(r: &AnalyzeReport) {
    println!("geometry          tx = {:?}, rx = {:?}", r.tx, r.rx);
    println!(
        "sensors           N_tx = {}, N_rx = {}, pairs = {}",
        r.n_tx,
        r.n_rx,
        r.n_tx * r.n_rx
    );
    println!(
        "sum co-array      {:?}  (N_sigma = {}, {})",
        r.coarray,
        r.n_sigma,
        if r.contiguous { "contiguous" } else { "with holes" }
    );
    println!(
        "redundant         {}",
        if r.redundant {
            format!("yes ({} < {})", r.n_sigma, r.n_tx * r.n_rx)
        } else {
            "no".to_string()
        }
    );
    println!("multiplicities    {:?}", r.multiplicities);
    let points = r
        .tradeoff
        .points
        .iter()
        .map(|&(n_s, bound)| {
            let mark = if r.tradeoff.is_optimal(n_s) { " (optimal)" } else { "" };
            format!("N_s = {n_s} -> {bound}{mark}")
        })
        .collect::<Vec<_>>()
        .join(" | ");
    println!("trade-off         {points}");
    for entry in &r.certificates {
        match &entry.certificate {
            Some(c) => println!("certificate       N_s = {}: {c}", entry.n_s),
            None => println!("certificate       N_s = {}: none", entry.n_s),
        }
    }
    if let Some(w) = &r.waveform {
        let origin = match w.seed {
            Some(seed) => format!(" (random, seed {seed})"),
            None => String::new(),
        };
        println!(
            "waveform          T = {}, N_tx = {}, rank N_s = {}{origin}",
            w.t, w.n_tx, w.waveform_rank
        );
        println!("rank(W)           {} of {}", w.rank_w, r.n_sigma);
        match (&w.krank_b, &w.krank_b_error) {
            (Some(k), _) => println!("krank(B)          {k}  (grid V = {})", r.grid_v),
            (None, Some(e)) => println!("krank(B)          unavailable: {e}"),
            (None, None) => unreachable!(),
        }
        println!(
            "bound             min(N_s N_rx, N_sigma) = {}",
            w.achievable_bound
        );
        if let Some(k) = w.uniqueness_bound {
            println!("identifiable K    {k}  (K <= krank(B)/2)");
        }
        let sv = w
            .singular_values
            .iter()
            .map(|v| format!("{v:.4e}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!("singular values   [{sv}]");
    }
}

fn tradeoff_csv(curve: &TradeoffCurve) -> String {
    let mut out = String::from("N_s,max_krank,is_optimal_point\n");
    for &(n_s, bound) in &curve.points {
        out.push_str(&format!("{n_s},{bound},{}\n", curve.is_optimal(n_s)));
    }
    out
}

fn singular_values_csv(values: &[f64]) -> String {
    let mut out = String::from("index,sigma\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{v}\n", i + 1));
    }
    out
}

pub fn tradeoff(geometry_spec: &str, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let geom = resolve_geometry(geometry_spec)?;
    let curve = tradeoff_curve(&geom);
    match format {
        Format::Csv => print!("{}", tradeoff_csv(&curve)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&curve).unwrap()),
        Format::Table => {
            println!(
                "N_tx = {}, N_rx = {}, N_sigma = {}",
                curve.n_tx, curve.n_rx, curve.n_sigma
            );
            println!("N_s   max krank(B)   optimal");
            for &(n_s, bound) in &curve.points {
                println!(
                    "{n_s:<5} {bound:<14} {}",
                    if curve.is_optimal(n_s) { "*" } else { "" }
                );
            }
        }
    }
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_out(dir, "tradeoff.csv", &tradeoff_csv(&curve))?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct RecoverRow {
    index: usize,
    u: f64,
    truth_re: f64,
    truth_im: f64,
    truth_mag: f64,
    estimate_re: f64,
    estimate_im: f64,
    estimate_mag: f64,
}

#[derive(Serialize)]
struct RecoverReport {
    v: usize,
    k_max: usize,
    sparsity_found: usize,
    unique: bool,
    residual: f64,
    exact: bool,
    rows: Vec<RecoverRow>,
}

#[allow(clippy::too_many_arguments)]
pub fn recover(
    geometry_spec: &str,
    waveform_spec: &str,
    scene_path: &Path,
    kmax: Option<usize>,
    grid_v: Option<usize>,
    tol: f64,
    seed: u64,
    budget: u64,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let scene = read_scene(scene_path)?;
    let v = grid_v.unwrap_or_else(|| scene.v());
    if v != scene.v() {
        return Err(Failure::input(format!(
            "scene lives on a {}-point grid but --grid {v} was requested",
            scene.v()
        )));
    }
    let geom = resolve_geometry(geometry_spec)?;
    let (s, _) = resolve_waveform(waveform_spec, geom.n_tx(), seed)?;
    let grid = AngularGrid::uniform(v)?;
    let b = sensing_matrix(&s, &geom, &grid)?;
    let y = simulate(&b, &scene)?;
    let k_max = kmax.unwrap_or_else(|| scene.k());
    let result = coarray::l0_recover_with_budget(&y, &b, k_max, tol, budget)?;
    let exact = result.unique && coarray::scenes_match(&result.estimate, &scene, 1e-8);

    let report = recover_report(&grid, &scene, &result.estimate, &result, k_max, exact);
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => print!("{}", recovery_csv(&report)),
        Format::Table => {
            println!("index  u        |truth|    |estimate|");
            for row in &report.rows {
                let marker = if row.truth_mag > 0.0 || row.estimate_mag > 0.0 {
                    "  <-"
                } else {
                    ""
                };
                println!(
                    "{:<6} {:<8.4} {:<10.6} {:<10.6}{marker}",
                    row.index, row.u, row.truth_mag, row.estimate_mag
                );
            }
            println!(
                "sparsity found = {}, unique = {}, residual = {:.3e}",
                report.sparsity_found, report.unique, report.residual
            );
            println!(
                "recovery: {}",
                if exact { "exact" } else { "ambiguous or mismatched" }
            );
        }
    }
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_out(dir, "recovery.csv", &recovery_csv(&report))?;
    }
    Ok(if exact { 0 } else { EXIT_AMBIGUOUS })
}

fn recover_report(
    grid: &AngularGrid,
    truth: &Scene,
    estimate: &Scene,
    result: &coarray::RecoveryResult,
    k_max: usize,
    exact: bool,
) -> RecoverReport {
    let t = truth.dense();
    let e = estimate.dense();
    let rows = grid
        .u_values()
        .iter()
        .enumerate()
        .map(|(i, &u)| RecoverRow {
            index: i + 1,
            u,
            truth_re: t[i].re,
            truth_im: t[i].im,
            truth_mag: t[i].norm(),
            estimate_re: e[i].re,
            estimate_im: e[i].im,
            estimate_mag: e[i].norm(),
        })
        .collect();
    RecoverReport {
        v: truth.v(),
        k_max,
        sparsity_found: result.sparsity_found,
        unique: result.unique,
        residual: result.residual,
        exact,
        rows,
    }
}

fn recovery_csv(report: &RecoverReport) -> String {
    let mut out =
        String::from("index,u,truth_re,truth_im,truth_mag,estimate_re,estimate_im,estimate_mag\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.index, r.u, r.truth_re, r.truth_im, r.truth_mag, r.estimate_re, r.estimate_im,
            r.estimate_mag
        ));
    }
    out
}

pub fn paper_repro(seed: u64, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let report = coarray::repro::run_all(seed);
    let json = serde_json::json!({
        "seed": report.seed,
        "overall_pass": report.overall_pass(),
        "checks": report.checks,
    });
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&json).unwrap()),
        _ => {
            println!("reproduction report (seed {seed})");
            for c in &report.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                println!(
                    "[{status}] {} | expected: {} | observed: {}",
                    c.name, c.expected, c.observed
                );
            }
            let passed = report.checks.iter().filter(|c| c.pass).count();
            println!(
                "overall: {} ({passed}/{} checks passed)",
                if report.overall_pass() { "PASS" } else { "FAIL" },
                report.checks.len()
            );
        }
    }
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_out(dir, "report.json", &serde_json::to_string_pretty(&json).unwrap())?;
    }
    Ok(if report.overall_pass() {
        0
    } else {
        EXIT_CHECK_FAILED
    })
}
