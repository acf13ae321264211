//! Adaptive Simpson quadrature with interval bisection.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    pub abs_tol: f64,
    /// Relative to the coarse whole-interval estimate; 0 disables it.
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_depth: 60,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Argument(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Argument(format!(
                "rel_tol must be >= 0, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

// Subdivide at least this many times before trusting the local error test.
const MIN_DEPTH: u32 = 4;

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: u32,
    exhausted: bool,
    error: f64,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        let h = (b - a) / 12.0;
        let left = h * (fa + 4.0 * flm + fm);
        let right = h * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth >= self.max_depth {
            self.exhausted = true;
            self.error += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        if depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol {
            self.error += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Integrates `f` over `[a, b]`.
///
/// Running out of depth is reported as [`Error::Convergence`] carrying the
/// best estimate reached.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadEstimate> {
    spec.validate()?;
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = spec.abs_tol.max(spec.rel_tol * whole.abs());
    let mut s = Simpson {
        f: &f,
        max_depth: spec.max_depth,
        exhausted: false,
        error: 0.0,
    };
    let value = s.refine(a, b, fa, fm, fb, whole, tol, 0);
    if s.exhausted || !value.is_finite() {
        return Err(Error::Convergence {
            method: "adaptive Simpson quadrature",
            best_estimate: value,
            error_estimate: s.error,
        });
    }
    Ok(QuadEstimate {
        value,
        error_estimate: s.error,
    })
}
