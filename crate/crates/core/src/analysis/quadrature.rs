//! Adaptive Simpson quadrature.

use super::AnalysisError;

const MAX_DEPTH: u32 = 50;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, AnalysisError> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    refine(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, AnalysisError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(AnalysisError::QuadratureFailure { a, b });
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(AnalysisError::QuadratureFailure { a, b });
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_integrals() {
        assert!((integrate(f64::sin, 0.0, PI, 1e-10).unwrap() - 2.0).abs() < 1e-9);
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-10).unwrap() - 9.0).abs() < 1e-9);
        assert!((integrate(f64::exp, 0.0, 1.0, 1e-10).unwrap() - (1f64.exp() - 1.0)).abs() < 1e-9);
        assert_eq!(integrate(f64::exp, 2.0, 2.0, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn nan_integrand_fails() {
        assert!(integrate(|x| (x - 1.0).sqrt(), 0.0, 2.0, 1e-6).is_err());
    }
}
