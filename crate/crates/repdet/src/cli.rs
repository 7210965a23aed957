//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use repdet_core::{
    apply_permutation, asymptotic_logdet_per_variable, build_dual_information_matrix, build_information_matrix,
    covariance_selection_graph, homogeneous_logdet, oracle_logdet, sparse_to_dense, LogDetReport, ModelSpec,
    Permutation, SparseSymMatrix, DEFAULT_ORACLE_CAP,
};

use crate::bench::{fit_power_law, run_bench, BenchConfig};
use crate::error::{Error, Result};
use crate::io;

/// Duality residual bound; the identity is exact, so this only absorbs rounding.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Permutation invariance bound on the oracle log-determinant.
pub const PERMUTATION_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "repdet", version, about = "Exact log-determinants for Gaussian models on K_n (r) K_(n-1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the primal information matrix as Matrix Market.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the covariance selection graph as a `u v` edge list.
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Closed-form log-determinant report.
    Det {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        check: CheckArgs,
        #[arg(long, value_enum, default_value_t = DetMethod::ClosedForm)]
        method: DetMethod,
        /// Compare against dense Cholesky when N <= oracle cap.
        #[arg(long)]
        check_oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the dual information matrix as Matrix Market.
    Dual {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oracle, duality and permutation checks.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        check: CheckArgs,
        /// Number of seeded random permutations to test.
        #[arg(long, default_value_t = 0)]
        perms: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Corrupt one matrix entry before the oracle check (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Per-variable log-determinant limit as n grows.
    Limit {
        #[arg(long, default_value_t = -0.8, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Unary variance used for the trace.
        #[arg(long, default_value_t = 1.0)]
        s2: f64,
        /// Comma-separated n values to print ln det / N for.
        #[arg(long, value_delimiter = ',')]
        trace: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Time the closed form against dense Cholesky; CSV output.
    Bench {
        /// Comma-separated n values.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = -0.8, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 1.0)]
        s2: f64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[command(flatten)]
        check: CheckArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of clouds (N = n(n-1) variables).
    #[arg(long)]
    pub n: usize,
    /// Pairwise correlation, strictly inside (-1, 1).
    #[arg(long, default_value_t = -0.8, allow_negative_numbers = true)]
    pub rho: f64,
    /// Pairwise variance sigma^2.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Unary variances s_i^2: one value (broadcast) or a comma-separated list of n.
    #[arg(long, default_value = "1")]
    pub s2: UnaryVariances,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<ModelSpec> {
        let s_sq = match &self.s2 {
            UnaryVariances::Scalar(v) => vec![*v; self.n],
            UnaryVariances::List(list) => {
                if list.len() != self.n {
                    return Err(Error::Arg(format!("--s2 lists {} values but n = {}", list.len(), self.n)));
                }
                list.clone()
            }
        };
        Ok(ModelSpec::new(self.n, self.rho, self.sigma2, s_sq)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Tolerance for oracle comparisons.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Largest N the dense oracle will factor.
    #[arg(long, env = "REPDET_ORACLE_CAP", default_value_t = DEFAULT_ORACLE_CAP)]
    pub oracle_cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnaryVariances {
    Scalar(f64),
    List(Vec<f64>),
}

impl FromStr for UnaryVariances {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(match values.as_slice() {
            [v] if !s.contains(',') => UnaryVariances::Scalar(*v),
            _ => UnaryVariances::List(values),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetMethod {
    ClosedForm,
    Homogeneous,
    Oracle,
}

/// Six significant digits for human-readable output.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    if (1e-4..1e6).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn write_report_text(out: &mut dyn Write, r: &LogDetReport) -> Result<()> {
    writeln!(out, "n                               {}", r.n)?;
    writeln!(out, "N                               {}", r.variable_count)?;
    writeln!(out, "ln det Sigma_x (covariance)      {}", sig6(r.log_det_primal))?;
    writeln!(out, "ln det Sigma_w (dual covariance) {}", sig6(r.log_det_dual))?;
    writeln!(out, "ln det K                         {}", sig6(r.log_det_k))?;
    writeln!(out, "duality residual                 {}", sig6(r.duality_residual))?;
    writeln!(out, "method                           {}", r.method.as_str())?;
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn spec_comment(spec: &ModelSpec) -> String {
    let s2: Vec<String> = spec.s_sq().iter().map(|&v| io::format_value(v)).collect();
    format!(
        "n={} rho={} sigma2={} s2={}",
        spec.n(),
        io::format_value(spec.rho()),
        io::format_value(spec.sigma_sq()),
        s2.join(",")
    )
}

fn emit_matrix(m: &SparseSymMatrix, comment: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => io::export_matrix_market(m, &[comment], p),
        None => io::write_matrix_market(m, &[comment], &mut *out),
    }
}

/// Outcome of one named verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub tol: f64,
    pub oracle_cap: usize,
    pub permutations: Vec<Permutation>,
    pub inject_fault: bool,
}

/// Oracle agreement, duality identity and permutation invariance for one model.
///
/// The oracle check compares `|closed - oracle| / max(1, |oracle|)` against
/// `tol`.
pub fn verify(spec: &ModelSpec, opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let report = LogDetReport::closed_form(spec)?;
    let mut matrix = build_information_matrix(spec);
    if opts.inject_fault {
        let mut entries = matrix.entries().to_vec();
        entries[0].2 *= 1.5;
        matrix = SparseSymMatrix::from_sorted_upper(matrix.dim(), entries)?;
    }
    let dense = sparse_to_dense(&matrix, opts.oracle_cap)?;
    let oracle_info = oracle_logdet(&dense)?;
    let oracle_primal = -oracle_info;

    let mut checks = Vec::new();
    let rel = (report.log_det_primal - oracle_primal).abs() / oracle_primal.abs().max(1.0);
    checks.push(CheckOutcome { name: "oracle".into(), value: rel, bound: opts.tol, passed: rel <= opts.tol });

    let dual_oracle = -oracle_logdet(&build_dual_information_matrix(spec))?;
    let rel = (report.log_det_dual - dual_oracle).abs() / dual_oracle.abs().max(1.0);
    checks.push(CheckOutcome { name: "dual-oracle".into(), value: rel, bound: opts.tol, passed: rel <= opts.tol });

    checks.push(CheckOutcome {
        name: "duality-residual".into(),
        value: report.duality_residual,
        bound: RESIDUAL_TOL,
        passed: report.duality_residual <= RESIDUAL_TOL,
    });

    for (k, p) in opts.permutations.iter().enumerate() {
        let permuted = apply_permutation(&matrix, p)?;
        let v = oracle_logdet(&sparse_to_dense(&permuted, opts.oracle_cap)?)?;
        let diff = (v - oracle_info).abs() / oracle_info.abs().max(1.0);
        checks.push(CheckOutcome {
            name: format!("permutation-{k}"),
            value: diff,
            bound: PERMUTATION_TOL,
            passed: diff <= PERMUTATION_TOL,
        });
    }
    Ok(checks)
}

/// Runs a parsed command. Returns the process exit code: 0 when every
/// requested check passed, 1 when a check failed. Invalid input surfaces as
/// `Err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Build { model, out: path, edges } => {
            let spec = model.spec()?;
            let m = build_information_matrix(&spec);
            emit_matrix(&m, &spec_comment(&spec), path.as_ref(), out)?;
            if let Some(edge_path) = edges {
                io::export_edge_list(&covariance_selection_graph(spec.n())?, &edge_path)?;
            }
            let summary = format!("N = {}, nnz = {} ({} stored)", m.dim(), m.logical_nnz(), m.stored_nnz());
            if path.is_some() {
                writeln!(out, "{summary}")?;
            } else {
                writeln!(err, "{summary}")?;
            }
            Ok(0)
        }

        Command::Det { model, check, method, check_oracle, format, out: path } => {
            let spec = model.spec()?;
            let report = match method {
                DetMethod::ClosedForm => LogDetReport::closed_form(&spec)?,
                DetMethod::Homogeneous => LogDetReport::homogeneous(&spec)?,
                DetMethod::Oracle => LogDetReport::oracle(&spec, check.oracle_cap)?,
            };
            match format {
                Format::Text => write_report_text(out, &report)?,
                Format::Json => out.write_all(io::report_json(&report)?.as_bytes())?,
            }
            if let Some(p) = path {
                io::write_report_json(&report, &p)?;
            }
            let mut code = 0;
            if check_oracle {
                if spec.dim() > check.oracle_cap {
                    writeln!(err, "oracle skipped: N = {} exceeds cap {}", spec.dim(), check.oracle_cap)?;
                } else {
                    let dense = sparse_to_dense(&build_information_matrix(&spec), check.oracle_cap)?;
                    let oracle = -oracle_logdet(&dense)?;
                    let abs_diff = (oracle - report.log_det_primal).abs();
                    let ok = abs_diff <= check.tol;
                    let sink: &mut dyn Write = if format == Format::Text { out } else { err };
                    writeln!(sink, "oracle ln det Sigma_x            {}", sig6(oracle))?;
                    writeln!(sink, "abs_diff                         {abs_diff:e} (tol {:e}) {}", check.tol, pass(ok))?;
                    if !ok {
                        code = 1;
                    }
                }
            }
            Ok(code)
        }

        Command::Dual { model, out: path } => {
            let spec = model.spec()?;
            let m = build_dual_information_matrix(&spec).to_sparse();
            emit_matrix(&m, &spec_comment(&spec), path.as_ref(), out)?;
            let summary = format!("n = {}, nnz = {} ({} stored)", m.dim(), m.logical_nnz(), m.stored_nnz());
            if path.is_some() {
                writeln!(out, "{summary}")?;
            } else {
                writeln!(err, "{summary}")?;
            }
            Ok(0)
        }

        Command::Verify { model, check, perms, seed, inject_fault } => {
            let spec = model.spec()?;
            let permutations =
                (0..perms as u64).map(|k| Permutation::random(spec.dim(), seed.wrapping_add(k))).collect();
            let opts = VerifyOptions { tol: check.tol, oracle_cap: check.oracle_cap, permutations, inject_fault };
            let checks = verify(&spec, &opts)?;
            for c in &checks {
                writeln!(out, "{:<20} {:<4} {:e} (bound {:e})", c.name, pass(c.passed), c.value, c.bound)?;
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
        }

        Command::Limit { rho, sigma2, s2, trace, format } => {
            let limit = asymptotic_logdet_per_variable(rho, sigma2)?;
            let rows = trace
                .iter()
                .map(|&n| {
                    let a = homogeneous_logdet(n, rho, sigma2, s2)? / (n * (n - 1)) as f64;
                    Ok((n, a, (a - limit).abs()))
                })
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Text => {
                    writeln!(out, "limit ln det Sigma_x / N = {}", sig6(limit))?;
                    for (n, a, gap) in &rows {
                        writeln!(out, "n = {n:<8} ln det / N = {:<12} gap = {}", sig6(*a), sig6(*gap))?;
                    }
                }
                Format::Json => {
                    let trace: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(n, a, gap)| serde_json::json!({ "n": n, "log_det_per_variable": a, "gap": gap }))
                        .collect();
                    let doc = serde_json::json!({ "limit": limit, "trace": trace });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
                }
            }
            Ok(0)
        }

        Command::Bench { sizes, rho, sigma2, s2, trials, check, out: path } => {
            let cfg = BenchConfig { sizes, rho, sigma_sq: sigma2, s_sq: s2, trials, oracle_cap: check.oracle_cap };
            let records = run_bench(&cfg)?;
            match &path {
                Some(p) => {
                    let file = std::fs::File::create(p).map_err(|e| Error::Path { path: p.clone(), source: e })?;
                    io::write_bench_csv(&records, file)?;
                }
                None => io::write_bench_csv(&records, &mut *out)?,
            }
            for r in records.iter().filter(|r| r.oracle_ns.is_none()) {
                writeln!(err, "n = {}: oracle skipped (N = {} > cap {})", r.n, r.variable_count, cfg.oracle_cap)?;
            }
            let pts: Vec<(f64, f64)> =
                records.iter().filter_map(|r| r.oracle_ns.map(|ns| (r.variable_count as f64, ns as f64))).collect();
            if let Some(b) = fit_power_law(&pts) {
                writeln!(err, "oracle time ~ N^{b:.2}")?;
            }
            let failed = records.iter().filter(|r| r.abs_diff.is_some_and(|d| d > check.tol)).count();
            if failed > 0 {
                writeln!(err, "{failed} size(s) exceed tol {:e}", check.tol)?;
                return Ok(1);
            }
            Ok(0)
        }
    }
}
