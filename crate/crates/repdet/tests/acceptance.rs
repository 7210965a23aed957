//! Acceptance criteria, one PASS/FAIL line each. Runs sequentially (no test
//! harness) so timing criteria are not disturbed by parallel work.

#![allow(clippy::needless_range_loop)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repdet::bench::{cholesky_timings, fit_power_law};
use repdet_core::{
    apply_permutation, asymptotic_logdet_per_variable, build_information_matrix, closed_form_logdet, duality_residual,
    homogeneous_logdet, oracle_logdet, sparse_to_dense, ModelSpec, Permutation, SparseSymMatrix, DEFAULT_ORACLE_CAP,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_info_logdet(m: &SparseSymMatrix) -> f64 {
    oracle_logdet(&sparse_to_dense(m, DEFAULT_ORACLE_CAP).expect("within cap")).expect("positive definite")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn ln_big(x: &BigUint) -> f64 {
    let shift = x.bits().saturating_sub(60);
    let top: BigUint = x >> shift;
    (top.iter_u64_digits().next().unwrap_or(0) as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact `ln det Sigma_x` for rho = -0.8, sigma^2 = s^2 = 1, from integers:
/// `3^{n(n-1)} / ((n+4) (5n+4)^{n-1} 5^{n(n-2)})`.
fn exact_family(n: u32) -> f64 {
    let num = BigUint::from(3u32).pow(n * (n - 1));
    let den = BigUint::from(n + 4) * BigUint::from(5 * n + 4).pow(n - 1) * BigUint::from(5u32).pow(n * (n - 2));
    ln_big(&num) - ln_big(&den)
}

fn worked_example() -> Outcome {
    let spec = ModelSpec::new(4, 0.5, 2.0 / 3.0, vec![1.0, 0.5, 1.0 / 3.0, 0.25]).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let closed = closed_form_logdet(&spec).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let oracle = oracle_info_logdet(&build_information_matrix(&spec));
    ensure(
        (closed + 13.35).abs() <= 0.01 && (oracle - 13.35).abs() <= 0.01 && elapsed < Duration::from_millis(10),
        format!("closed form {closed:.6}, oracle ln det J {oracle:.6}, {elapsed:?}"),
    )
}

fn exact_rational_family() -> Outcome {
    let start = Instant::now();
    let mut worst_exact: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for n in 3..=12u32 {
        let spec = ModelSpec::homogeneous(n as usize, -0.8, 1.0, 1.0).unwrap();
        let want = exact_family(n);
        let closed = closed_form_logdet(&spec).unwrap();
        worst_exact = worst_exact.max((closed - want).abs() / want.abs());
        let oracle = -oracle_info_logdet(&build_information_matrix(&spec));
        worst_oracle = worst_oracle.max(rel(oracle, want));
    }
    let elapsed = start.elapsed();
    ensure(
        worst_exact <= 1e-12 && worst_oracle <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max rel err vs exact {worst_exact:.2e}, oracle {worst_oracle:.2e}, {elapsed:?}"),
    )
}

#[rustfmt::skip]
const TWELVE: [[i32; 12]; 12] = [
    [ 3,  1,  1, -1,  0,  0,  0,  0,  0,  0,  0,  0],
    [ 1,  3,  1,  0,  0,  0, -1,  0,  0,  0,  0,  0],
    [ 1,  1,  3,  0,  0,  0,  0,  0,  0, -1,  0,  0],
    [-1,  0,  0,  4,  2,  2,  0,  0,  0,  0,  0,  0],
    [ 0,  0,  0,  2,  4,  2,  0, -1,  0,  0,  0,  0],
    [ 0,  0,  0,  2,  2,  4,  0,  0,  0,  0, -1,  0],
    [ 0, -1,  0,  0,  0,  0,  5,  3,  3,  0,  0,  0],
    [ 0,  0,  0,  0, -1,  0,  3,  5,  3,  0,  0,  0],
    [ 0,  0,  0,  0,  0,  0,  3,  3,  5,  0,  0, -1],
    [ 0,  0, -1,  0,  0,  0,  0,  0,  0,  6,  4,  4],
    [ 0,  0,  0,  0,  0, -1,  0,  0,  0,  4,  6,  4],
    [ 0,  0,  0,  0,  0,  0,  0,  0, -1,  4,  4,  6],
];

/// Ninths.
#[rustfmt::skip]
const SIX: [[i32; 6]; 6] = [
    [34,  9, 20,  0,  0,  0],
    [ 9, 34,  0,  0, 20,  0],
    [20,  0, 34,  9,  0,  0],
    [ 0,  0,  9, 34,  0, 20],
    [ 0, 20,  0,  0, 34,  9],
    [ 0,  0,  0, 20,  9, 34],
];

fn golden_matrices() -> Outcome {
    let a = build_information_matrix(&ModelSpec::new(4, 0.5, 2.0 / 3.0, vec![1.0, 0.5, 1.0 / 3.0, 0.25]).unwrap());
    let b = build_information_matrix(&ModelSpec::homogeneous(3, -0.8, 1.0, 1.0).unwrap());
    let mut worst: f64 = 0.0;
    for r in 0..12 {
        for c in 0..12 {
            worst = worst.max((a.get(r, c) - TWELVE[r][c] as f64).abs());
        }
    }
    for r in 0..6 {
        for c in 0..6 {
            worst = worst.max((b.get(r, c) - SIX[r][c] as f64 / 9.0).abs());
        }
    }
    ensure(a.dim() == 12 && b.dim() == 6 && worst <= 1e-12, format!("max entry error {worst:.2e}"))
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let n = 2 + k % 29;
        let spec = ModelSpec::sample(n, &mut rng).unwrap();
        worst = worst.max(duality_residual(&spec).unwrap());
    }
    ensure(worst <= 1e-10, format!("500 specs, max residual {worst:.2e}"))
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 2..=30 {
        for _ in 0..50 {
            let spec = ModelSpec::sample(n, &mut rng).unwrap();
            let oracle = -oracle_info_logdet(&build_information_matrix(&spec));
            worst = worst.max(rel(closed_form_logdet(&spec).unwrap(), oracle));
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(
        worst <= 1e-8 && elapsed < Duration::from_secs(120),
        format!("{count} specs, max rel err {worst:.2e}, {elapsed:.1?}"),
    )
}

fn permutation_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for n in [4, 8, 12] {
        let m = build_information_matrix(&ModelSpec::sample(n, &mut rng).unwrap());
        let base = oracle_info_logdet(&m);
        for seed in 0..10 {
            let p = Permutation::random(m.dim(), seed);
            let permuted = apply_permutation(&m, &p).unwrap();
            worst = worst.max(rel(oracle_info_logdet(&permuted), base));
        }
    }
    ensure(worst <= 1e-10, format!("30 permutations, max rel change {worst:.2e}"))
}

fn asymptotic_limit() -> Outcome {
    let limit = asymptotic_logdet_per_variable(-0.8, 1.0).unwrap();
    let gaps: Vec<f64> = [8usize, 16, 32, 64, 128, 200]
        .iter()
        .map(|&n| (homogeneous_logdet(n, -0.8, 1.0, 1.0).unwrap() / (n * (n - 1)) as f64 - limit).abs())
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = *gaps.last().unwrap();
    ensure(decreasing && last <= 0.05, format!("limit {limit:.6}, gap at n=200 {last:.4}, decreasing {decreasing}"))
}

fn scaling() -> Outcome {
    let spec = ModelSpec::homogeneous(100_000, -0.8, 1.0, 1.0).unwrap();
    let start = Instant::now();
    let v = closed_form_logdet(&spec).unwrap();
    let closed_time = start.elapsed();

    let timings = cholesky_timings(&[100, 200, 400, 800], 5).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = timings.iter().map(|&(d, ns)| (d as f64, ns as f64)).collect();
    let exponent = fit_power_law(&pts).unwrap_or(f64::NAN);
    ensure(
        v.is_finite() && closed_time < Duration::from_secs(1) && exponent >= 2.7,
        format!("n=1e5 closed form {closed_time:?}, Cholesky exponent {exponent:.2}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked example n=4", worked_example),
        ("exact rational family n=3..12", exact_rational_family),
        ("golden 12x12 and 6x6 matrices", golden_matrices),
        ("duality residual", duality),
        ("closed form vs Cholesky n=2..30", oracle_agreement),
        ("permutation invariance", permutation_invariance),
        ("asymptotic limit", asymptotic_limit),
        ("scaling", scaling),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
