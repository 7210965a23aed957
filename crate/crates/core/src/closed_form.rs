//! Closed-form log-determinants via the dual model.
//!
//! The Fourier-dual model has `n` variables and information matrix
//! `D + rho sigma^2 J_n`. The matrix determinant lemma with
//! `u = v = sqrt(rho) sigma 1_n` gives
//!
//! ```text
//! det(Sigma_w^-1) = (1 + rho sigma^2 tr(D^-1)) det(D)
//! ```
//!
//! and equating the two partition functions ties it to the primal model:
//!
//! ```text
//! det(Sigma_x) = det(Sigma_w) det(K)^|E| prod_i s_i^2
//! ```
//!
//! Everything here is evaluated in the log domain: `det(K)^|E|` alone
//! underflows a double for `det(K) < 1` once `n` reaches a few dozen.

use core::f64::consts::{E as EULER, PI};

use crate::error::{Error, Result};
use crate::model::{build_d, build_dual_information_matrix, build_information_matrix, check_pairwise, ModelSpec};
use crate::oracle::{oracle_logdet, sparse_to_dense};
use crate::sum::{compensated_sum, NeumaierSum};

/// `ln(1 + x)`, switching to `log1p` near zero.
fn ln_one_plus(x: f64) -> f64 {
    if x.abs() < 0.5 {
        libm::log1p(x)
    } else {
        libm::log(1.0 + x)
    }
}

/// `ln det K = ln(sigma^4 (1 - rho^2))`.
fn ln_det_pairwise_covariance(rho: f64, sigma_sq: f64) -> f64 {
    2.0 * libm::log(sigma_sq) + libm::log1p(-rho * rho)
}

/// Logs of the pieces shared by the primal and dual determinants.
#[derive(Debug, Clone, Copy)]
struct Terms {
    edges: f64,
    ln_det_k: f64,
    sum_ln_s_sq: f64,
    /// `ln(1 + rho sigma^2 tr(D^-1))`
    ln_rank_one: f64,
    sum_ln_d: f64,
}

impl Terms {
    fn general(spec: &ModelSpec) -> Result<Self> {
        let d = build_d(spec);
        let trace_inv = compensated_sum(d.as_slice().iter().map(|&x| 1.0 / x));
        let x = spec.rho() * spec.sigma_sq() * trace_inv;
        if (1.0 + x).is_nan() || 1.0 + x <= 0.0 {
            return Err(Error::NonPositiveRankOneFactor(1.0 + x));
        }
        Ok(Self {
            edges: spec.edge_count() as f64,
            ln_det_k: ln_det_pairwise_covariance(spec.rho(), spec.sigma_sq()),
            sum_ln_s_sq: compensated_sum(spec.s_sq().iter().map(|&s| libm::log(s))),
            ln_rank_one: ln_one_plus(x),
            sum_ln_d: compensated_sum(d.as_slice().iter().map(|&x| libm::log(x))),
        })
    }

    fn homogeneous(n: usize, rho: f64, sigma_sq: f64, s_sq: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain { name: "n", reason: "need at least 2 clouds" });
        }
        check_pairwise(rho, sigma_sq)?;
        if !(s_sq > 0.0 && s_sq.is_finite()) {
            return Err(Error::Domain { name: "s_sq", reason: "unary variance must be positive and finite" });
        }
        let nf = n as f64;
        let d = s_sq + (nf - 1.0 - rho) * sigma_sq;
        let x = nf * rho * sigma_sq / d;
        if (1.0 + x).is_nan() || 1.0 + x <= 0.0 {
            return Err(Error::NonPositiveRankOneFactor(1.0 + x));
        }
        Ok(Self {
            edges: (n * (n - 1) / 2) as f64,
            ln_det_k: ln_det_pairwise_covariance(rho, sigma_sq),
            sum_ln_s_sq: nf * libm::log(s_sq),
            ln_rank_one: ln_one_plus(x),
            sum_ln_d: nf * libm::log(d),
        })
    }

    /// `ln det(Sigma_x)`
    fn primal(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        acc += self.edges * self.ln_det_k;
        acc += self.sum_ln_s_sq;
        acc += -self.ln_rank_one;
        acc += -self.sum_ln_d;
        acc.value()
    }

    /// `ln det(Sigma_w)`
    fn dual(&self) -> f64 {
        -(self.ln_rank_one + self.sum_ln_d)
    }

    /// `ln(det(K)^|E| prod s_i^2)`, the log of the duality scale.
    fn scale(&self) -> f64 {
        self.edges * self.ln_det_k + self.sum_ln_s_sq
    }
}

fn residual(primal: f64, dual: f64, scale: f64) -> f64 {
    (primal - dual - scale).abs()
}

/// `ln det(Sigma_x)` in `O(n)`:
/// `|E| ln det K + sum ln s_i^2 - ln(1 + rho sigma^2 tr D^-1) - sum ln d_i`.
pub fn closed_form_logdet(spec: &ModelSpec) -> Result<f64> {
    Terms::general(spec).map(|t| t.primal())
}

/// Same quantity for a homogeneous model (`s_i^2 = s_sq` for every cloud),
/// with `D = d I_n`, `d = s^2 + (n - rho - 1) sigma^2`:
/// `|E| ln det K + n ln s^2 - ln(1 + n rho sigma^2 / d) - n ln d`.
pub fn homogeneous_logdet(n: usize, rho: f64, sigma_sq: f64, s_sq: f64) -> Result<f64> {
    Terms::homogeneous(n, rho, sigma_sq, s_sq).map(|t| t.primal())
}

/// `lim ln det(Sigma_x) / N = 2 ln sigma + ln(1 - rho^2) / 2`.
pub fn asymptotic_logdet_per_variable(rho: f64, sigma_sq: f64) -> Result<f64> {
    check_pairwise(rho, sigma_sq)?;
    Ok(ln_det_pairwise_covariance(rho, sigma_sq) / 2.0)
}

/// `ln det(Sigma_w) = -ln(1 + rho sigma^2 tr D^-1) - sum ln d_i`.
pub fn dual_logdet(spec: &ModelSpec) -> Result<f64> {
    Terms::general(spec).map(|t| t.dual())
}

/// `|ln det Sigma_x - ln det Sigma_w - |E| ln det K - sum ln s_i^2|`.
/// Zero in exact arithmetic.
pub fn duality_residual(spec: &ModelSpec) -> Result<f64> {
    let t = Terms::general(spec)?;
    Ok(residual(t.primal(), t.dual(), t.scale()))
}

/// Differential entropy of the primal Gaussian, `(N ln(2 pi e) + ln det Sigma_x) / 2`.
pub fn differential_entropy(spec: &ModelSpec) -> Result<f64> {
    let log_det = closed_form_logdet(spec)?;
    Ok(0.5 * spec.dim() as f64 * libm::log(2.0 * PI * EULER) + 0.5 * log_det)
}

/// Which evaluation produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    ClosedForm,
    Homogeneous,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Homogeneous => "homogeneous",
            Method::Oracle => "oracle",
        }
    }
}

/// Primal and dual log-determinants of one model. All logs are natural logs of
/// covariance determinants (not of information matrices).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogDetReport {
    pub n: usize,
    #[cfg_attr(feature = "serde", serde(rename = "N"))]
    pub variable_count: usize,
    pub log_det_primal: f64,
    pub log_det_dual: f64,
    #[cfg_attr(feature = "serde", serde(rename = "log_det_K"))]
    pub log_det_k: f64,
    pub duality_residual: f64,
    pub method: Method,
}

impl LogDetReport {
    fn from_parts(spec: &ModelSpec, primal: f64, dual: f64, t: &Terms, method: Method) -> Self {
        Self {
            n: spec.n(),
            variable_count: spec.dim(),
            log_det_primal: primal,
            log_det_dual: dual,
            log_det_k: t.ln_det_k,
            duality_residual: residual(primal, dual, t.scale()),
            method,
        }
    }

    pub fn closed_form(spec: &ModelSpec) -> Result<Self> {
        let t = Terms::general(spec)?;
        Ok(Self::from_parts(spec, t.primal(), t.dual(), &t, Method::ClosedForm))
    }

    /// Uses the homogeneous formulas; fails unless every `s_i^2` is equal.
    pub fn homogeneous(spec: &ModelSpec) -> Result<Self> {
        if !spec.is_homogeneous() {
            return Err(Error::Domain { name: "s_sq", reason: "model is not homogeneous" });
        }
        let t = Terms::homogeneous(spec.n(), spec.rho(), spec.sigma_sq(), spec.s_sq()[0])?;
        Ok(Self::from_parts(spec, t.primal(), t.dual(), &t, Method::Homogeneous))
    }

    /// Primal and dual determinants from dense Cholesky of the assembled
    /// matrices. Fails with [`Error::OracleCapExceeded`] when `N > cap`.
    pub fn oracle(spec: &ModelSpec, cap: usize) -> Result<Self> {
        let t = Terms::general(spec)?;
        let primal = -oracle_logdet(&sparse_to_dense(&build_information_matrix(spec), cap)?)?;
        let dual = -oracle_logdet(&build_dual_information_matrix(spec))?;
        Ok(Self::from_parts(spec, primal, dual, &t, Method::Oracle))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;

    fn example1() -> ModelSpec {
        ModelSpec::new(4, 0.5, 2.0 / 3.0, vec![1.0, 0.5, 1.0 / 3.0, 0.25]).unwrap()
    }

    fn example2(n: usize) -> ModelSpec {
        ModelSpec::homogeneous(n, -0.8, 1.0, 1.0).unwrap()
    }

    #[test]
    fn example1_value() {
        let v = closed_form_logdet(&example1()).unwrap();
        assert!((v + 13.35).abs() < 0.01, "{v}");
    }

    #[test]
    fn example2_n3_value() {
        let want = libm::log(729.0 / 315875.0);
        assert!((closed_form_logdet(&example2(3)).unwrap() - want).abs() < 1e-13);
        assert!((homogeneous_logdet(3, -0.8, 1.0, 1.0).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn trivial_n2() {
        let spec = ModelSpec::homogeneous(2, 0.0, 1.0, 1.0).unwrap();
        assert!((closed_form_logdet(&spec).unwrap() - libm::log(0.25)).abs() < 1e-15);
        assert!((homogeneous_logdet(2, 0.0, 1.0, 1.0).unwrap() - libm::log(0.25)).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_n10_against_integer_formula() {
        // ln(3^90 / (14 * 54^9 * 5^80))
        let want = 90.0 * libm::log(3.0) - libm::log(14.0) - 9.0 * libm::log(54.0) - 80.0 * libm::log(5.0);
        let got = homogeneous_logdet(10, -0.8, 1.0, 1.0).unwrap();
        assert!((got - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn asymptotic_examples() {
        assert!((asymptotic_logdet_per_variable(-0.8, 1.0).unwrap() - libm::log(0.6)).abs() < 1e-15);
        assert_eq!(asymptotic_logdet_per_variable(0.0, 1.0).unwrap(), 0.0);
        let v = asymptotic_logdet_per_variable(0.5, 2.0 / 3.0).unwrap();
        assert!((v - 0.5 * libm::log(1.0 / 3.0)).abs() < 1e-15);
        let a200 = homogeneous_logdet(200, 0.5, 2.0 / 3.0, 1.0).unwrap() / (200.0 * 199.0);
        // Gap is dominated by ln(d) / (n - 1), about 0.025 here.
        assert!((a200 - v).abs() < 0.05);
        assert!(asymptotic_logdet_per_variable(1.0, 1.0).is_err());
        assert!(asymptotic_logdet_per_variable(0.0, -1.0).is_err());
    }

    #[test]
    fn dual_examples() {
        // (1 + rho sigma^2 tr D^-1) det D = (7/19) (19/5)^3
        let want = -libm::log(7.0 / 19.0 * (19.0f64 / 5.0).powi(3));
        assert!((dual_logdet(&example2(3)).unwrap() - want).abs() < 1e-14);

        let spec = ModelSpec::new(3, 0.0, 2.0, vec![1.0, 2.0, 3.0]).unwrap();
        let want = -(libm::log(5.0) + libm::log(6.0) + libm::log(7.0));
        assert!((dual_logdet(&spec).unwrap() - want).abs() < 1e-14);

        let tr = 3.0 / 8.0 + 6.0 / 13.0 + 0.5 + 12.0 / 23.0;
        let want = -libm::log((1.0 + tr / 3.0) * 4784.0 / 216.0);
        assert!((dual_logdet(&example1()).unwrap() - want).abs() < 1e-6);
        assert!((1.0 + tr / 3.0 - 1.619426).abs() < 1e-6);
    }

    #[test]
    fn dual_matches_dense_cholesky() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for &n in &[2usize, 3, 10, 100, 400] {
            let spec = ModelSpec::sample(n, &mut rng).unwrap();
            let oracle = -oracle_logdet(&build_dual_information_matrix(&spec)).unwrap();
            let got = dual_logdet(&spec).unwrap();
            assert!((got - oracle).abs() <= 1e-10 * oracle.abs().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn residual_bounds() {
        assert!(duality_residual(&example1()).unwrap() < 1e-12);
        assert!(duality_residual(&ModelSpec::homogeneous(500, 0.3, 2.0, 1.5).unwrap()).unwrap() < 1e-9);
        let r = LogDetReport::closed_form(&ModelSpec::homogeneous(3, 0.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(r.duality_residual < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let ln2pie = libm::log(2.0 * PI * EULER);
        let spec = ModelSpec::homogeneous(2, 0.0, 1.0, 1.0).unwrap();
        assert!((differential_entropy(&spec).unwrap() - (ln2pie + 0.5 * libm::log(0.25))).abs() < 1e-14);
        let h = differential_entropy(&example1()).unwrap();
        assert!((h - (6.0 * ln2pie - 13.35 / 2.0)).abs() < 0.005);
        let h = differential_entropy(&example2(3)).unwrap();
        assert!((h - (3.0 * ln2pie + 0.5 * libm::log(729.0 / 315875.0))).abs() < 1e-13);
    }

    #[test]
    fn reports() {
        let spec = example2(3);
        let a = LogDetReport::closed_form(&spec).unwrap();
        let b = LogDetReport::homogeneous(&spec).unwrap();
        let c = LogDetReport::oracle(&spec, 100).unwrap();
        assert_eq!(a.variable_count, 6);
        assert_eq!(a.method, Method::ClosedForm);
        assert!((a.log_det_primal - b.log_det_primal).abs() < 1e-13);
        assert!((a.log_det_primal - c.log_det_primal).abs() < 1e-12);
        assert!((a.log_det_dual - c.log_det_dual).abs() < 1e-12);
        assert!(c.duality_residual < 1e-12);
        assert!((a.log_det_k - libm::log(0.36)).abs() < 1e-15);
        assert!(LogDetReport::homogeneous(&example1()).is_err());
        assert_eq!(LogDetReport::oracle(&spec, 5), Err(Error::OracleCapExceeded { dim: 6, cap: 5 }));
    }

    #[test]
    fn finite_at_a_million_clouds() {
        let v = homogeneous_logdet(1_000_000, -0.8, 1.0, 1.0).unwrap();
        assert!(v.is_finite());
        let spec = example2(1_000_000);
        let r = LogDetReport::closed_form(&spec).unwrap();
        assert!(r.log_det_primal.is_finite() && r.log_det_dual.is_finite());
        assert!((r.log_det_primal - v).abs() <= 1e-12 * v.abs());
    }
}
