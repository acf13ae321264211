//! Numerical verification that `ν ↦ c(ν, k)` is increasing for `k = 1`,
//! constant for `k = 2` and decreasing for `k >= 3`.
//!
//! Classification is read off the sign of the analytic derivative
//! `d/dν ln c(ν, k) = (ψ((ν+k)/2) - ψ(ν/2) - k/ν) / 2` on a grid. Differences
//! of consecutive values are only checked for `ν <= 100`, where they are
//! still resolvable in double precision.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::psi;
use crate::tdist::{log_mode_value, mode_value, Dim, Dof};

/// Derivatives with `|d| <=` this count as zero by default.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;
/// Largest `ν` at which consecutive value differences are still compared.
pub const VALUE_CHECK_MAX_NU: f64 = 100.0;
/// Relative step `h = ν * FD_STEP` of the central finite difference.
pub const FD_STEP: f64 = 1e-6;
/// Floor on `|derivative|` when forming the relative finite-difference residual.
pub const FD_RESIDUAL_FLOOR: f64 = 1e-8;
/// Acceptable relative finite-difference residual.
pub const FD_REL_TOL: f64 = 1e-5;
/// Acceptable relative gap between the even-k product form and [`mode_value`].
pub const PRODUCT_FORM_REL_TOL: f64 = 1e-13;
/// Slack allowed in the induction chain `lhs(k + 2) <= lhs(k)`.
pub const INDUCTION_SLACK: f64 = 1e-12;

/// Strictly increasing grid of positive, finite `ν` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NuGrid {
    points: Vec<f64>,
}

impl NuGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument("a grid needs at least two points".into()));
        }
        if let Some(bad) = points.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Argument(format!(
                "grid point {bad} is not finite and positive"
            )));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument(
                "grid points must be strictly increasing".into(),
            ));
        }
        Ok(NuGrid { points })
    }

    /// `count` points evenly spaced in `ln ν` from `start` to `stop`.
    pub fn log_spaced(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !(start > 0.0 && stop > 0.0) {
            return Err(Error::Argument(
                "log-spaced grid needs positive endpoints".into(),
            ));
        }
        let (a, b) = (start.ln(), stop.ln());
        Self::spaced(count, |t| (a + (b - a) * t).exp(), start, stop)
    }

    /// `count` points evenly spaced from `start` to `stop`.
    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        Self::spaced(count, |t| start + (stop - start) * t, start, stop)
    }

    fn spaced(count: usize, at: impl Fn(f64) -> f64, start: f64, stop: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::Argument("a grid needs at least two points".into()));
        }
        let last = (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| at(i as f64 / last)).collect();
        // Pin the endpoints exactly.
        points[0] = start;
        points[count - 1] = stop;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for NuGrid {
    /// 200 log-spaced points on `[0.01, 1e4]`.
    fn default() -> Self {
        NuGrid::log_spaced(0.01, 1e4, 200).expect("static grid is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Increasing,
    Constant,
    Decreasing,
}

impl Classification {
    /// What the theorem predicts for dimension `k`.
    pub fn expected_for(k: Dim) -> Self {
        match k.get() {
            1 => Classification::Increasing,
            2 => Classification::Constant,
            _ => Classification::Decreasing,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Increasing => "increasing",
            Classification::Constant => "constant",
            Classification::Decreasing => "decreasing",
        })
    }
}

/// A grid location where a check contradicted the classification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub nu: f64,
    /// For value checks, the right end of the offending pair.
    pub nu_next: Option<f64>,
    pub kind: WitnessKind,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// Sign of the analytic derivative.
    DerivativeSign,
    /// Difference of `ln c` between consecutive grid points.
    ValueDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub k: Dim,
    pub classification: Classification,
    /// Largest `|d - fd| / max(1e-8, |d|)` over the grid.
    pub max_derivative_residual: f64,
    pub max_abs_derivative: f64,
    pub grid: NuGrid,
    pub witness_violations: Vec<Witness>,
}

/// `d/dν ln c(ν, k)` for finite `ν > 0`.
pub fn dlog_mode_value(nu: f64, k: Dim) -> Result<f64> {
    check_nu(nu)?;
    Ok(dlog_unchecked(nu, k))
}

fn dlog_unchecked(nu: f64, k: Dim) -> f64 {
    0.5 * (psi(0.5 * (nu + k.as_f64())) - psi(0.5 * nu) - k.as_f64() / nu)
}

fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function: "degrees of freedom",
            value: nu,
            expected: "finite and > 0",
        })
    }
}

/// Central finite difference of `ln c(·, k)` at `ν` with step `ν * FD_STEP`.
pub fn dlog_mode_value_fd(nu: f64, k: Dim) -> Result<f64> {
    check_nu(nu)?;
    let h = nu * FD_STEP;
    let at = |v: f64| log_mode_value(Dof::new(v).expect("positive"), k);
    Ok((at(nu + h) - at(nu - h)) / (2.0 * h))
}

/// `c(ν, k)` for even `k` as the finite product
/// `π^{-k/2} (1/2 + (k/2-1)/ν) (1/2 + (k/2-2)/ν) ⋯ (1/2 + 1/ν) (1/2)`.
pub fn mode_value_even_product(nu: f64, k: Dim) -> Result<f64> {
    check_nu(nu)?;
    if !k.is_even() {
        return Err(Error::Argument(format!(
            "product form needs even k, got {k}"
        )));
    }
    let half_k = k.get() / 2;
    let product: f64 = (1..half_k).map(|j| 0.5 + j as f64 / nu).product();
    Ok(product * 0.5 / PI.powi(half_k as i32))
}

/// `½ (1/(ν+1) - 1/ν)`, the bound on `d/dν ln c(ν, 3)` obtained from the
/// concavity of ψ; equal to `-1/(2ν(ν+1))`.
pub fn base_case_bound(nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(0.5 * (1.0 / (nu + 1.0) - 1.0 / nu))
}

/// Both sides of one induction step over odd dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InductionStep {
    /// `ψ((ν+k+2)/2) - ψ(ν/2) - (k+2)/ν`
    pub next: f64,
    /// `ψ((ν+k)/2) - ψ(ν/2) - k/ν`
    pub current: f64,
}

fn induction_lhs(nu: f64, k: f64) -> f64 {
    psi(0.5 * (nu + k)) - psi(0.5 * nu) - k / nu
}

/// Evaluates the chain `lhs(k + 2) <= lhs(k) <= 0` for odd `k >= 3`.
///
/// Fails with [`Error::Inconsistent`] when `lhs(k + 2) > lhs(k) + 1e-12`.
pub fn induction_step_check(nu: f64, k: Dim) -> Result<InductionStep> {
    check_nu(nu)?;
    if k.get() < 3 || k.is_even() {
        return Err(Error::Argument(format!(
            "induction step needs odd k >= 3, got {k}"
        )));
    }
    let step = InductionStep {
        next: induction_lhs(nu, k.as_f64() + 2.0),
        current: induction_lhs(nu, k.as_f64()),
    };
    if step.next > step.current + INDUCTION_SLACK {
        return Err(Error::Inconsistent {
            k: k.get(),
            detail: format!(
                "induction chain broken at nu = {nu}: lhs(k+2) = {:e} > lhs(k) = {:e}",
                step.next, step.current
            ),
        });
    }
    Ok(step)
}

fn sign(d: f64, tol: f64) -> i8 {
    if d > tol {
        1
    } else if d < -tol {
        -1
    } else {
        0
    }
}

/// Classifies `ν ↦ c(ν, k)` on `grid` from derivative signs, with
/// `|d| <= tol` read as zero.
///
/// Strictly positive and strictly negative derivatives on the same grid
/// yield [`Error::Inconsistent`]; that would contradict the theorem.
pub fn classify_monotonicity(k: Dim, grid: &NuGrid, tol: f64) -> Result<MonotonicityReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Argument(format!(
            "zero tolerance must be positive, got {tol}"
        )));
    }
    let evals: Vec<(f64, f64, f64)> = grid
        .points()
        .par_iter()
        .map(|&nu| {
            let d = dlog_unchecked(nu, k);
            let fd = dlog_mode_value_fd(nu, k).expect("grid points are valid");
            (nu, d, (d - fd).abs() / d.abs().max(FD_RESIDUAL_FLOOR))
        })
        .collect();

    let positives: Vec<&(f64, f64, f64)> = evals.iter().filter(|e| sign(e.1, tol) > 0).collect();
    let negatives: Vec<&(f64, f64, f64)> = evals.iter().filter(|e| sign(e.1, tol) < 0).collect();
    let classification = match (positives.is_empty(), negatives.is_empty()) {
        (true, true) => Classification::Constant,
        (false, true) => Classification::Increasing,
        (true, false) => Classification::Decreasing,
        (false, false) => {
            let (minority, label) = if positives.len() < negatives.len() {
                (&positives, "positive")
            } else {
                (&negatives, "negative")
            };
            let listed: Vec<String> = minority
                .iter()
                .take(5)
                .map(|e| format!("nu={} d={:e}", e.0, e.1))
                .collect();
            return Err(Error::Inconsistent {
                k: k.get(),
                detail: format!(
                    "{} positive and {} negative derivatives; {label} witnesses: {}",
                    positives.len(),
                    negatives.len(),
                    listed.join(", ")
                ),
            });
        }
    };

    let mut witness_violations = Vec::new();
    let log_values: Vec<(f64, f64)> = grid
        .points()
        .iter()
        .take_while(|&&nu| nu <= VALUE_CHECK_MAX_NU)
        .map(|&nu| (nu, log_mode_value(Dof::new(nu).expect("valid"), k)))
        .collect();
    for pair in log_values.windows(2) {
        let diff = pair[1].1 - pair[0].1;
        let consistent = match classification {
            Classification::Increasing => diff > 0.0,
            Classification::Decreasing => diff < 0.0,
            Classification::Constant => diff.abs() <= 1e-13 * pair[0].1.abs().max(1.0),
        };
        if !consistent {
            witness_violations.push(Witness {
                nu: pair[0].0,
                nu_next: Some(pair[1].0),
                kind: WitnessKind::ValueDifference,
                value: diff,
            });
        }
    }

    Ok(MonotonicityReport {
        k,
        classification,
        max_derivative_residual: evals.iter().map(|e| e.2).fold(0.0, f64::max),
        max_abs_derivative: evals.iter().map(|e| e.1.abs()).fold(0.0, f64::max),
        grid: grid.clone(),
        witness_violations,
    })
}

/// Outcome of checking one dimension against the theorem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionCheck {
    pub k: Dim,
    pub expected: Classification,
    pub observed: Option<Classification>,
    pub max_derivative_residual: Option<f64>,
    pub max_abs_derivative: Option<f64>,
    /// Largest relative gap between the even-k product and [`mode_value`].
    pub product_form_residual: Option<f64>,
    pub witness_violations: Vec<Witness>,
    pub error: Option<String>,
    pub passed: bool,
}

/// Theorem check over `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub dimensions: Vec<DimensionCheck>,
    pub max_derivative_residual: f64,
    pub passed: bool,
}

/// Runs [`classify_monotonicity`] for every `k` in `1..=k_max` (which must be
/// at least 3) together with the finite-difference and product-form checks.
pub fn verify_theorem(k_max: u32, grid: &NuGrid, tol: f64) -> Result<TheoremCheck> {
    if k_max < 3 {
        return Err(Error::Argument(format!(
            "k_max must be at least 3 to cover every case of the theorem, got {k_max}"
        )));
    }
    let dimensions: Vec<DimensionCheck> = (1..=k_max)
        .map(|kk| check_dimension(Dim::new(kk).expect("k >= 1"), grid, tol))
        .collect::<Result<_>>()?;
    let max_derivative_residual = dimensions
        .iter()
        .filter_map(|d| d.max_derivative_residual)
        .fold(0.0, f64::max);
    let passed = dimensions.iter().all(|d| d.passed);
    Ok(TheoremCheck {
        dimensions,
        max_derivative_residual,
        passed,
    })
}

fn check_dimension(k: Dim, grid: &NuGrid, tol: f64) -> Result<DimensionCheck> {
    let expected = Classification::expected_for(k);
    let product_form_residual = if k.is_even() {
        let mut worst: f64 = 0.0;
        for &nu in grid.points() {
            let product = mode_value_even_product(nu, k)?;
            let reference = mode_value(Dof::new(nu)?, k);
            worst = worst.max((product - reference).abs() / reference);
        }
        Some(worst)
    } else {
        None
    };
    let product_ok = product_form_residual.is_none_or(|r| r <= PRODUCT_FORM_REL_TOL);

    match classify_monotonicity(k, grid, tol) {
        Ok(report) => {
            let zero_ok =
                expected != Classification::Constant || report.max_abs_derivative <= 1e-13;
            let passed = report.classification == expected
                && report.witness_violations.is_empty()
                && report.max_derivative_residual <= FD_REL_TOL
                && product_ok
                && zero_ok;
            Ok(DimensionCheck {
                k,
                expected,
                observed: Some(report.classification),
                max_derivative_residual: Some(report.max_derivative_residual),
                max_abs_derivative: Some(report.max_abs_derivative),
                product_form_residual,
                witness_violations: report.witness_violations,
                error: None,
                passed,
            })
        }
        Err(e @ Error::Inconsistent { .. }) => Ok(DimensionCheck {
            k,
            expected,
            observed: None,
            max_derivative_residual: None,
            max_abs_derivative: None,
            product_form_residual,
            witness_violations: Vec::new(),
            error: Some(e.to_string()),
            passed: false,
        }),
        Err(e) => Err(e),
    }
}
