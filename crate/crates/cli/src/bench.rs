//! Benchmark campaigns: per-(dimension, repetition) cells with derived
//! seeds, method runs scored by the permutation metric, label-oracle
//! sampling errors, and mean(std) aggregation. Cells are independent and
//! run in parallel; results are keyed, so execution order never shows.

use rayon::prelude::*;
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rgmm::em::EmConfig;
use rgmm::estimator::{make_estimator, EstimatorParams};
use rgmm::model::{estimation_error_split, Dataset, Label};
use rgmm::synth::{generate, GenerationConfig};

use crate::config::ResolvedBench;
use crate::io::format_f64;
use crate::{CliError, CliResult};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for cell (n, rep): master xor a stable hash, so adding dimensions
/// or reps never shifts existing cells' randomness.
pub fn cell_seed(master: u64, n: usize, rep: usize) -> u64 {
    master ^ splitmix64(((n as u64) << 32) ^ rep as u64)
}

fn em_seed(cell: u64) -> u64 {
    splitmix64(cell ^ 0x00e5_7e57_ee0d_5eed)
}

#[derive(Debug, Clone)]
pub struct BenchmarkRecord {
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub method: String,
    pub status: String,
    pub err_mu1: Option<f64>,
    pub err_mu2: Option<f64>,
    pub err_total: Option<f64>,
    pub sampling_err_mu1: Option<f64>,
    pub sampling_err_mu2: Option<f64>,
    pub runtime_ms: f64,
}

fn labeled_mean_errors(ds: &Dataset, model: &rgmm::model::MixtureModel) -> (Option<f64>, Option<f64>) {
    let mean_err = |label: Label, mu: &nalgebra::DVector<f64>| {
        let pts = ds.points_with_label(label);
        if pts.is_empty() {
            return None;
        }
        let mut sum = nalgebra::DVector::zeros(ds.dim());
        for p in &pts {
            sum += *p;
        }
        Some((sum / pts.len() as f64 - mu).norm())
    };
    (
        mean_err(Label::G1, &model.mu1),
        mean_err(Label::G2, &model.mu2),
    )
}

fn run_cell(
    cfg: &ResolvedBench,
    n: usize,
    rep: usize,
    w1_input: Option<f64>,
) -> CliResult<Vec<BenchmarkRecord>> {
    let model = cfg.model_for_dim(n)?;
    let seed = cell_seed(cfg.seed, n, rep);
    let gen_cfg = GenerationConfig {
        model: model.clone(),
        m: cfg.m,
        noise: cfg.noise_model(n),
        seed,
        allocation: cfg.allocation,
    };
    let ds = generate(&gen_cfg)?;
    let (samp1, samp2) = labeled_mean_errors(&ds, &model);

    let mut alg1_knobs = cfg.alg1;
    if w1_input.is_some() {
        alg1_knobs.w1_input = w1_input;
    }
    let params = EstimatorParams {
        alg1: alg1_knobs.to_config(model.w1),
        em: EmConfig {
            seed: em_seed(seed),
            ..cfg.em
        },
    };

    let mut records = Vec::with_capacity(cfg.methods.len());
    for method in &cfg.methods {
        let estimator = make_estimator(method, &params)?;
        let start = Instant::now();
        let outcome = estimator.estimate(&ds.points);
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let record = match outcome {
            Ok(est) => {
                let (e1, e2) = estimation_error_split(&est, &model)?;
                BenchmarkRecord {
                    n,
                    rep,
                    seed,
                    method: method.clone(),
                    status: "ok".into(),
                    err_mu1: Some(e1),
                    err_mu2: Some(e2),
                    err_total: Some(e1 + e2),
                    sampling_err_mu1: samp1,
                    sampling_err_mu2: samp2,
                    runtime_ms,
                }
            }
            Err(e) => BenchmarkRecord {
                n,
                rep,
                seed,
                method: method.clone(),
                status: error_tag(&e),
                err_mu1: None,
                err_mu2: None,
                err_total: None,
                sampling_err_mu1: samp1,
                sampling_err_mu2: samp2,
                runtime_ms,
            },
        };
        records.push(record);
    }
    Ok(records)
}

fn error_tag(e: &rgmm::Error) -> String {
    match e {
        rgmm::Error::NonFiniteLikelihood { .. } => "non_finite_likelihood".into(),
        rgmm::Error::DegenerateComponent { .. } => "degenerate_component".into(),
        other => format!("error: {other}"),
    }
}

/// Runs the full campaign; records come back sorted by (n, rep, method).
pub fn run_benchmark(cfg: &ResolvedBench) -> CliResult<Vec<BenchmarkRecord>> {
    let cells: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&n| (0..cfg.reps).map(move |rep| (n, rep)))
        .collect();
    let mut records: Vec<BenchmarkRecord> = cells
        .par_iter()
        .map(|&(n, rep)| run_cell(cfg, n, rep, None))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by(|a, b| (a.n, a.rep, &a.method).cmp(&(b.n, b.rep, &b.method)));
    Ok(records)
}

/// One row of the aggregate table: mean(std) per (n, method).
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub n: usize,
    pub method: String,
    pub reps_ok: usize,
    pub reps_failed: usize,
    pub mean_err_mu1: Option<f64>,
    pub std_err_mu1: Option<f64>,
    pub mean_err_mu2: Option<f64>,
    pub std_err_mu2: Option<f64>,
    pub mean_err_total: Option<f64>,
    pub std_err_total: Option<f64>,
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (Some(m), None);
    }
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (Some(m), Some(var.sqrt()))
}

pub fn aggregate(records: &[BenchmarkRecord]) -> Vec<AggregateRow> {
    let mut keys: Vec<(usize, String)> = records
        .iter()
        .map(|r| (r.n, r.method.clone()))
        .collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|(n, method)| {
            let group: Vec<&BenchmarkRecord> = records
                .iter()
                .filter(|r| r.n == *n && &r.method == method)
                .collect();
            let ok: Vec<&&BenchmarkRecord> =
                group.iter().filter(|r| r.status == "ok").collect();
            let collect = |f: fn(&BenchmarkRecord) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            let (m1, s1) = mean_std(&collect(|r| r.err_mu1));
            let (m2, s2) = mean_std(&collect(|r| r.err_mu2));
            let (mt, st) = mean_std(&collect(|r| r.err_total));
            AggregateRow {
                n: *n,
                method: method.clone(),
                reps_ok: ok.len(),
                reps_failed: group.len() - ok.len(),
                mean_err_mu1: m1,
                std_err_mu1: s1,
                mean_err_mu2: m2,
                std_err_mu2: s2,
                mean_err_total: mt,
                std_err_total: st,
            }
        })
        .collect()
}

/// Sensitivity sweep row: mean(std) of err_total at one (alpha, n).
#[derive(Debug, Clone)]
pub struct SensitivityRow {
    pub alpha: f64,
    pub n: usize,
    pub w1_input: f64,
    pub reps_ok: usize,
    pub mean_err_total: Option<f64>,
    pub std_err_total: Option<f64>,
}

/// Runs the alpha sweep. Cell seeds depend only on (n, rep), so every
/// alpha sees the same datasets and the curves are paired.
pub fn run_sensitivity(cfg: &ResolvedBench) -> CliResult<(Vec<BenchmarkRecord>, Vec<SensitivityRow>)> {
    let w1 = cfg.weights[0];
    let mut all_records = Vec::new();
    let mut rows = Vec::new();
    for &alpha in &cfg.alpha_grid {
        let w1_input = 1.0 - alpha * (1.0 - w1);
        let sweep_cfg = ResolvedBench {
            methods: vec!["alg1".into()],
            ..cfg.clone()
        };
        let cells: Vec<(usize, usize)> = sweep_cfg
            .dims
            .iter()
            .flat_map(|&n| (0..sweep_cfg.reps).map(move |rep| (n, rep)))
            .collect();
        let mut records: Vec<BenchmarkRecord> = cells
            .par_iter()
            .map(|&(n, rep)| run_cell(&sweep_cfg, n, rep, Some(w1_input)))
            .collect::<CliResult<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        records.sort_by(|a, b| (a.n, a.rep).cmp(&(b.n, b.rep)));
        for &n in &sweep_cfg.dims {
            let totals: Vec<f64> = records
                .iter()
                .filter(|r| r.n == n && r.status == "ok")
                .filter_map(|r| r.err_total)
                .collect();
            let (mean, std) = mean_std(&totals);
            rows.push(SensitivityRow {
                alpha,
                n,
                w1_input,
                reps_ok: totals.len(),
                mean_err_total: mean,
                std_err_total: std,
            });
        }
        all_records.extend(records);
    }
    Ok((all_records, rows))
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

pub fn write_records_csv(path: &Path, records: &[BenchmarkRecord], echo: &Value) -> CliResult<()> {
    let mut out = String::new();
    writeln!(out, "# config_echo: {echo}").ok();
    writeln!(
        out,
        "n,rep,seed,method,status,err_mu1,err_mu2,err_total,sampling_err_mu1,sampling_err_mu2,runtime_ms"
    )
    .ok();
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{:.3}",
            r.n,
            r.rep,
            r.seed,
            r.method,
            r.status,
            opt(r.err_mu1),
            opt(r.err_mu2),
            opt(r.err_total),
            opt(r.sampling_err_mu1),
            opt(r.sampling_err_mu2),
            r.runtime_ms
        )
        .ok();
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_aggregate_csv(path: &Path, rows: &[AggregateRow], echo: &Value) -> CliResult<()> {
    let mut out = String::new();
    writeln!(out, "# config_echo: {echo}").ok();
    writeln!(
        out,
        "n,method,reps_ok,reps_failed,mean_err_mu1,std_err_mu1,mean_err_mu2,std_err_mu2,mean_err_total,std_err_total"
    )
    .ok();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.method,
            r.reps_ok,
            r.reps_failed,
            opt(r.mean_err_mu1),
            opt(r.std_err_mu1),
            opt(r.mean_err_mu2),
            opt(r.std_err_mu2),
            opt(r.mean_err_total),
            opt(r.std_err_total)
        )
        .ok();
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_sensitivity_csv(path: &Path, rows: &[SensitivityRow], echo: &Value) -> CliResult<()> {
    let mut out = String::new();
    writeln!(out, "# config_echo: {echo}").ok();
    writeln!(out, "alpha,n,w1_input,reps_ok,mean_err_total,std_err_total").ok();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.alpha,
            r.n,
            format_f64(r.w1_input),
            r.reps_ok,
            opt(r.mean_err_total),
            opt(r.std_err_total)
        )
        .ok();
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_seeds_stable_and_distinct() {
        let a = cell_seed(42, 10, 0);
        assert_eq!(a, cell_seed(42, 10, 0));
        assert_ne!(a, cell_seed(42, 10, 1));
        assert_ne!(a, cell_seed(42, 12, 0));
        assert_ne!(a, cell_seed(43, 10, 0));
    }

    #[test]
    fn mean_std_matches_hand_computation() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, Some(2.0));
        assert!((s.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(mean_std(&[]), (None, None));
    }
}
