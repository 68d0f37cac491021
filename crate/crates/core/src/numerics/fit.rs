//! Linear least squares and the small-momentum expansion fit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Designs with a column-scaled condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Euclidean norm of the residual vector.
    pub residual: f64,
    pub condition: f64,
}

/// Least-squares solution of `design * c = y` via SVD with column equilibration.
pub fn least_squares(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<LinearFit> {
    let (n, p) = design.shape();
    if n < p || p == 0 || y.len() != n {
        return invalid(format!("need at least {p} samples for {p} unknowns, got {n}"));
    }
    if design.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return invalid("non-finite entry in least-squares data");
    }
    let norms: Vec<f64> = (0..p).map(|j| design.column(j).norm()).collect();
    if norms.contains(&0.0) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    let mut scaled = design.clone();
    for (j, s) in norms.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let z = svd
        .solve(y, 0.0)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let r = y - &scaled * &z;
    let rss = r.norm_squared();
    let dof = (n - p).max(1) as f64;
    let sigma2 = if n > p { rss / dof } else { 0.0 };
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut std_errors = vec![0.0; p];
    for (j, se) in std_errors.iter_mut().enumerate() {
        let mut var = 0.0;
        for k in 0..p {
            let s = svd.singular_values[k];
            var += (v_t[(k, j)] / s).powi(2);
        }
        *se = (sigma2 * var).sqrt() / norms[j];
    }
    let coefficients = z.iter().zip(&norms).map(|(c, s)| c / s).collect();
    Ok(LinearFit {
        coefficients,
        std_errors,
        residual: rss.sqrt(),
        condition,
    })
}

/// Basis used for the small-k expansion of a subtracted form factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SmallKBasis {
    /// `k^2` only.
    Quadratic,
    /// `k^2` and `k^2 log(k^2 a^2)`.
    #[default]
    QuadraticLog,
    /// `k^2` and `k^4`.
    QuadraticQuartic,
    /// `k^2`, `k^2 log(k^2 a^2)` and `k^4`.
    QuadraticLogQuartic,
}

impl SmallKBasis {
    pub fn has_log(self) -> bool {
        matches!(self, Self::QuadraticLog | Self::QuadraticLogQuartic)
    }

    pub fn has_quartic(self) -> bool {
        matches!(self, Self::QuadraticQuartic | Self::QuadraticLogQuartic)
    }

    fn len(self) -> usize {
        1 + self.has_log() as usize + self.has_quartic() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallKFit {
    pub c2: f64,
    pub c_log: f64,
    /// Zero unless the basis contains `k^4`.
    pub c4: f64,
    pub c2_std_error: f64,
    pub c_log_std_error: f64,
    pub residual: f64,
    pub condition: f64,
    pub basis: SmallKBasis,
}

/// Fit subtracted samples `(k, f(k) - f(0))` on the requested small-k basis.
pub fn fit_small_k(samples: &[(f64, f64)], a: f64, basis: SmallKBasis) -> Result<SmallKFit> {
    if !(a > 0.0) {
        return invalid("length scale a must be positive");
    }
    let p = basis.len();
    if samples.len() < 4.max(p + 1) {
        return invalid(format!("need at least {} samples, got {}", 4.max(p + 1), samples.len()));
    }
    if let Some(&(k, _)) = samples.iter().find(|(k, _)| !(*k > 0.0) || k * a >= 1.0) {
        return invalid(format!("sample k = {k} outside 0 < k a < 1"));
    }
    let n = samples.len();
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for (i, &(k, f)) in samples.iter().enumerate() {
        let k2 = k * k;
        let mut col = 0;
        x[(i, col)] = k2;
        if basis.has_log() {
            col += 1;
            x[(i, col)] = k2 * (k2 * a * a).ln();
        }
        if basis.has_quartic() {
            col += 1;
            x[(i, col)] = k2 * k2;
        }
        y[i] = f;
    }
    let fit = least_squares(&x, &y)?;
    let c = &fit.coefficients;
    let se = &fit.std_errors;
    let (c_log, c_log_se) = if basis.has_log() { (c[1], se[1]) } else { (0.0, 0.0) };
    let c4 = if basis.has_quartic() { c[p - 1] } else { 0.0 };
    Ok(SmallKFit {
        c2: c[0],
        c_log,
        c4,
        c2_std_error: se[0],
        c_log_std_error: c_log_se,
        residual: fit.residual,
        condition: fit.condition,
        basis,
    })
}

/// Logarithmically spaced points covering `[lo, hi]` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l0, l1) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn synth(c2: f64, cl: f64) -> Vec<(f64, f64)> {
        [0.01, 0.02, 0.04, 0.08]
            .iter()
            .map(|&k: &f64| (k, c2 * k * k + cl * k * k * (k * k).ln()))
            .collect()
    }

    #[test]
    fn pure_quadratic() {
        let fit = fit_small_k(&synth(1.0, 0.0), 1.0, SmallKBasis::QuadraticLog).unwrap();
        assert_abs_diff_eq!(fit.c2, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.c_log, 0.0, epsilon = 1e-6);
        assert!(fit.residual >= 0.0);
    }

    #[test]
    fn planted_log() {
        let fit = fit_small_k(&synth(1.0, 0.5), 1.0, SmallKBasis::QuadraticLog).unwrap();
        assert_abs_diff_eq!(fit.c2, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.c_log, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn narrow_range_is_ill_conditioned() {
        let s: Vec<_> = (0..5).map(|i| (0.01 * (1.0 + 1e-14 * i as f64), 1e-4)).collect();
        assert!(matches!(
            fit_small_k(&s, 1.0, SmallKBasis::QuadraticLog),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn rejects_too_few_or_large_k() {
        assert!(fit_small_k(&synth(1.0, 0.0)[..3], 1.0, SmallKBasis::QuadraticLog).is_err());
        let s = vec![(0.1, 0.0), (0.5, 0.0), (1.5, 0.0), (2.0, 0.0)];
        assert!(fit_small_k(&s, 1.0, SmallKBasis::QuadraticLog).is_err());
    }

    #[test]
    fn line_fit_standard_errors() {
        // y = 2 + 3x with residuals +-0.1 alternating.
        let xs = [0.0, 1.0, 2.0, 3.0];
        let design = DMatrix::from_fn(4, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let y = DVector::from_iterator(4, xs.iter().enumerate().map(|(i, x)| {
            2.0 + 3.0 * x + if i % 2 == 0 { 0.1 } else { -0.1 }
        }));
        let fit = least_squares(&design, &y).unwrap();
        // Reference values from the normal equations.
        assert_abs_diff_eq!(fit.coefficients[0], 2.06, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], 2.96, epsilon = 1e-12);
        let sigma2 = fit.residual.powi(2) / 2.0;
        assert_abs_diff_eq!(fit.std_errors[1], (sigma2 / 5.0).sqrt(), epsilon = 1e-12);
    }
}
