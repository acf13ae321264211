//! The standard (isotropic) k-variate Student t distribution
//!
//! `f(x) = c(ν, k) (1 + |x|²/ν)^{-(ν+k)/2}` with value at the mode
//! `c(ν, k) = Γ((ν+k)/2) / ((πν)^{k/2} Γ(ν/2))`, and its Gaussian limit
//! `(2π)^{-k/2} exp(-|x|²/2)` as `ν → ∞`.
//!
//! Products and quotients of gamma functions are always formed in log space.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::specfun::{ln_gamma, ln_gamma_ratio, stirling_remainder, STIRLING_THRESHOLD};

/// Degrees of freedom: a finite positive real, or the Gaussian limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Dof(Option<f64>);

impl Dof {
    /// The `ν = ∞` (Gaussian) member of the family.
    pub const INFINITY: Dof = Dof(None);

    /// `+∞` maps to [`Dof::INFINITY`]; everything else must be finite and positive.
    pub fn new(nu: f64) -> Result<Self> {
        if nu == f64::INFINITY {
            Ok(Self::INFINITY)
        } else if nu > 0.0 && nu.is_finite() {
            Ok(Dof(Some(nu)))
        } else {
            Err(Error::Domain {
                function: "Dof::new",
                value: nu,
                expected: "nu > 0 or +inf",
            })
        }
    }

    /// Compile-time constructor; `nu` must be finite and positive.
    pub const fn finite_const(nu: f64) -> Self {
        assert!(nu > 0.0 && nu < f64::INFINITY);
        Dof(Some(nu))
    }

    pub fn finite(&self) -> Option<f64> {
        self.0
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_none()
    }

    /// `ν` as an `f64`, with the Gaussian limit mapped to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        self.0.unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(nu) => write!(f, "{nu}"),
            None => f.write_str("inf"),
        }
    }
}

impl FromStr for Dof {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(Dof::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("cannot parse degrees of freedom from {s:?}")))
                .and_then(Dof::new),
        }
    }
}

impl Serialize for Dof {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(nu) => serializer.serialize_f64(nu),
            None => serializer.serialize_str("inf"),
        }
    }
}

/// Dimension `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Dim(u32);

impl Dim {
    pub fn new(k: u32) -> Result<Self> {
        if k >= 1 {
            Ok(Dim(k))
        } else {
            Err(Error::Argument("dimension k must be >= 1".into()))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `ln (2π)^{-k/2}`, the log value at the mode of the k-variate standard normal.
pub fn gaussian_log_mode_value(k: Dim) -> f64 {
    -0.5 * k.as_f64() * (2.0 * PI).ln()
}

/// `ln c(ν, k)`.
///
/// Evaluated as the Gaussian value plus [`log_mode_excess`], which carries the
/// whole ν-dependence without cancellation. For `k = 2` the result is the
/// same floating-point number for every `ν`.
pub fn log_mode_value(nu: Dof, k: Dim) -> f64 {
    match nu.finite() {
        None => gaussian_log_mode_value(k),
        Some(nu) => gaussian_log_mode_value(k) + log_mode_excess(nu, k),
    }
}

/// `ln c(ν, k)` straight from `ln Γ((ν+k)/2) - ln Γ(ν/2) - (k/2) ln(πν)`.
///
/// Mathematically identical to [`log_mode_value`]; kept as an independent
/// route for cross-checks.
pub fn log_mode_value_gamma_ratio(nu: f64, k: Dim) -> f64 {
    let half_k = 0.5 * k.as_f64();
    ln_gamma_ratio(0.5 * nu, half_k) - half_k * (PI * nu).ln()
}

/// `ln c(ν, k) - ln c(∞, k)` for finite `ν > 0`.
///
/// Even `k`: repeated use of `Γ(x + 1) = x Γ(x)` gives
/// `c(ν, k) = π^{-k/2} (1/2) Π_{j=1}^{k/2-1} (1/2 + j/ν)`, hence
/// `Σ_j ln(1 + 2j/ν)`.
///
/// Odd `k`, `ν/2 >= 10`: with `x = ν/2`, `δ = k/2`, `u = δ/x`, the Stirling
/// series gives `x (ln(1+u) - u) + (δ - 1/2) ln(1+u) + R(x+δ) - R(x)` where
/// `R` is the Stirling remainder.
///
/// Odd `k`, small `ν`: the log-gamma difference directly.
pub fn log_mode_excess(nu: f64, k: Dim) -> f64 {
    let kk = k.get();
    if kk % 2 == 0 {
        return (1..kk / 2).map(|j| (2.0 * j as f64 / nu).ln_1p()).sum();
    }
    let x = 0.5 * nu;
    let delta = 0.5 * k.as_f64();
    if x >= STIRLING_THRESHOLD {
        let u = delta / x;
        x * ln1p_minus_identity(u)
            + (delta - 0.5) * u.ln_1p()
            + (stirling_remainder(x + delta) - stirling_remainder(x))
    } else {
        ln_gamma_ratio(x, delta) - delta * (PI * nu).ln() + delta * (2.0 * PI).ln()
    }
}

// ln(1 + u) - u for u >= 0 without cancellation at small u.
fn ln1p_minus_identity(u: f64) -> f64 {
    if u >= 0.25 {
        return u.ln_1p() - u;
    }
    // -u²/2 + u³/3 - u⁴/4 + ...
    let mut term = -u * u;
    let mut sum = 0.0;
    let mut n = 2.0;
    loop {
        let add = term / n;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() {
            return sum;
        }
        term *= -u;
        n += 1.0;
    }
}

/// The value at the mode `c(ν, k)`, i.e. the density at the origin.
pub fn mode_value(nu: Dof, k: Dim) -> f64 {
    log_mode_value(nu, k).exp()
}

/// Log density as a function of the radius `|x|`.
pub fn log_density_radial(nu: Dof, k: Dim, radius: f64) -> f64 {
    let r2 = radius * radius;
    match nu.finite() {
        None => gaussian_log_mode_value(k) - 0.5 * r2,
        Some(nu) => log_mode_value(Dof(Some(nu)), k) - 0.5 * (nu + k.as_f64()) * (r2 / nu).ln_1p(),
    }
}

/// `ln f(x)` at a point `x` of length `k`.
pub fn log_density(nu: Dof, k: Dim, x: &[f64]) -> Result<f64> {
    if x.len() != k.get() as usize {
        return Err(Error::Argument(format!(
            "point has {} coordinates, expected k = {}",
            x.len(),
            k
        )));
    }
    if let Some(bad) = x.iter().find(|c| !c.is_finite()) {
        return Err(Error::Argument(format!("non-finite coordinate {bad}")));
    }
    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(log_density_radial(nu, k, norm))
}

pub fn density(nu: Dof, k: Dim, x: &[f64]) -> Result<f64> {
    log_density(nu, k, x).map(f64::exp)
}

/// `ln` of the surface area of the unit sphere in `R^k`, `2 π^{k/2} / Γ(k/2)`.
pub fn log_sphere_area(k: Dim) -> f64 {
    let half_k = 0.5 * k.as_f64();
    std::f64::consts::LN_2 + half_k * PI.ln() - ln_gamma(half_k)
}

fn check_moment_order(m: f64) -> Result<()> {
    if m >= 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function: "moment order",
            value: m,
            expected: "finite and >= 0",
        })
    }
}

// ln E|X|^m minus its ν-free part ln Γ((k+m)/2) - ln Γ(k/2).
// t:        (m/2) ln ν + ln Γ((ν-m)/2) - ln Γ(ν/2)
// Gaussian: (m/2) ln 2
fn log_moment_nu_part(nu: Dof, m: f64) -> Result<f64> {
    match nu.finite() {
        None => Ok(0.5 * m * std::f64::consts::LN_2),
        Some(nu) if m < nu => Ok(0.5 * m * nu.ln() - ln_gamma_ratio(0.5 * (nu - m), 0.5 * m)),
        Some(nu) => Err(Error::MomentDoesNotExist { order: m, nu }),
    }
}

/// Radial moment `E|X|^m` for real `m >= 0`.
///
/// `ν^{m/2} Γ((k+m)/2) Γ((ν-m)/2) / (Γ(k/2) Γ(ν/2))` for finite `ν > m`, and
/// the chi moment `2^{m/2} Γ((k+m)/2) / Γ(k/2)` in the Gaussian limit.
pub fn radial_moment(nu: Dof, k: Dim, m: f64) -> Result<f64> {
    check_moment_order(m)?;
    let nu_part = log_moment_nu_part(nu, m)?;
    if m == 0.0 {
        return Ok(1.0);
    }
    Ok((ln_gamma_ratio(0.5 * k.as_f64(), 0.5 * m) + nu_part).exp())
}

/// `E|X1|^m / E|X2|^m` for `X1 ~ t(ν1, k)` and `X2 ~ t(ν2, k)`.
///
/// The dimension-dependent gamma factors cancel exactly, so the result is
/// computed without them and does not depend on `k`; `k` is only taken to
/// mirror [`radial_moment`].
pub fn moment_ratio(nu1: Dof, nu2: Dof, _k: Dim, m: f64) -> Result<f64> {
    check_moment_order(m)?;
    let a = log_moment_nu_part(nu1, m)?;
    let b = log_moment_nu_part(nu2, m)?;
    Ok((a - b).exp())
}

/// Fourth standardized radial moment `β = E|X|^4 / (E|X|^2)^2` (needs `ν > 4`).
pub fn standardized_fourth_moment(nu: Dof, k: Dim) -> Result<f64> {
    let m4 = radial_moment(nu, k, 4.0)?;
    let m2 = radial_moment(nu, k, 2.0)?;
    Ok(m4 / (m2 * m2))
}

/// Kurtosis ratio `β(ν1, k) / β(ν2, k)`; requires `min(ν1, ν2) > 4`.
pub fn kurtosis_ratio(nu1: Dof, nu2: Dof, k: Dim) -> Result<f64> {
    for nu in [nu1, nu2] {
        if let Some(v) = nu.finite() {
            if v <= 4.0 {
                return Err(Error::MomentDoesNotExist { order: 4.0, nu: v });
            }
        }
    }
    let r4 = moment_ratio(nu1, nu2, k, 4.0)?;
    let r2 = moment_ratio(nu1, nu2, k, 2.0)?;
    Ok(r4 / (r2 * r2))
}
