//! Benchmark harness: closed form vs dense Cholesky.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use repdet_core::{build_information_matrix, cholesky, closed_form_logdet, sparse_to_dense, DenseSymMatrix, ModelSpec};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] =
    ["n", "N", "closed_form_ns", "oracle_ns", "log_det_primal", "oracle_log_det", "abs_diff"];

/// One row of the bench CSV. Oracle columns are `None` when `N` exceeded the cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub variable_count: usize,
    pub closed_form_ns: u64,
    pub oracle_ns: Option<u64>,
    pub log_det_primal: f64,
    pub oracle_log_det: Option<f64>,
    pub abs_diff: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub rho: f64,
    pub sigma_sq: f64,
    pub s_sq: f64,
    /// Timed trials per cell, after one untimed warm-up.
    pub trials: usize,
    pub oracle_cap: usize,
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2
    }
}

/// Median wall time of `trials` calls to `f`, after one warm-up call whose
/// result is returned.
pub fn time_median<T>(trials: usize, mut f: impl FnMut() -> T) -> (u64, T) {
    let warm = f();
    let samples = (0..trials.max(1))
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(f());
            t.elapsed().as_nanos() as u64
        })
        .collect();
    (median(samples), warm)
}

/// Runs one record per size, in the order given.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.trials < 5 {
        return Err(Error::Arg(format!("at least 5 trials per cell required, got {}", cfg.trials)));
    }
    let mut records = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        let spec = ModelSpec::homogeneous(n, cfg.rho, cfg.sigma_sq, cfg.s_sq)?;
        let (closed_ns, closed) = time_median(cfg.trials, || closed_form_logdet(&spec));
        let closed = closed?;

        let (oracle_ns, oracle_log_det) = if spec.dim() <= cfg.oracle_cap {
            let m = build_information_matrix(&spec);
            let (ns, value) = time_median(cfg.trials, || {
                sparse_to_dense(&m, cfg.oracle_cap).and_then(|d| cholesky(&d)).map(|f| -f.log_det())
            });
            (Some(ns), Some(value?))
        } else {
            (None, None)
        };

        records.push(BenchRecord {
            n,
            variable_count: spec.dim(),
            closed_form_ns: closed_ns,
            oracle_ns,
            log_det_primal: closed,
            oracle_log_det,
            abs_diff: oracle_log_det.map(|o| (o - closed).abs()),
        });
    }
    Ok(records)
}

/// Least-squares slope of `ln y` against `ln x`: the exponent `b` in `y ~ a x^b`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Dense SPD test matrix with entries `1 / (1 + |r - c|)` plus `2` on the
/// diagonal. Every entry is nonzero, so factorization cost is the full cubic.
pub fn dense_spd(dim: usize) -> DenseSymMatrix {
    let mut m = DenseSymMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..=r {
            let v = 1.0 / (1.0 + (r - c) as f64);
            m.set(r, c, if r == c { v + 2.0 } else { v });
        }
    }
    m
}

/// Median Cholesky time for each dimension, as `(dim, ns)` pairs.
pub fn cholesky_timings(dims: &[usize], trials: usize) -> Result<Vec<(usize, u64)>> {
    dims.iter()
        .map(|&d| {
            let m = dense_spd(d);
            let (ns, f) = time_median(trials, || cholesky(&m));
            f?;
            Ok((d, ns))
        })
        .collect()
}
