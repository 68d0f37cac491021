//! Summation of slowly or exponentially decaying one-sided series.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Weight of the n = 0 term (1 or 1/2).
    pub half_weight_n0: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_terms: 2_000_000,
            half_weight_n0: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    /// Analytic estimate of the omitted tail, already included in `value`.
    pub tail: f64,
    pub terms: usize,
}

/// Sum `term(0) + term(1) + ...` with the n = 0 term optionally weighted by one half.
pub fn matsubara_sum<F: FnMut(usize) -> f64>(term: F, rel_tol: f64, half_weight_n0: bool) -> Result<f64> {
    let opts = SeriesOptions {
        rel_tol,
        half_weight_n0,
        ..SeriesOptions::default()
    };
    sum_series(term, &opts).map(|r| r.value)
}

/// Sum a series whose terms decay either geometrically or like a power of n.
///
/// The tail beyond the last computed term is estimated from the local ratio
/// (geometric model) or the local power-law exponent and added to the sum.
/// The stopping rule does not depend on the n = 0 weight, so the half-weighted
/// sum differs from the full one by exactly half the first term.
pub fn sum_series<F: FnMut(usize) -> f64>(mut term: F, opts: &SeriesOptions) -> Result<SeriesResult> {
    if !(opts.rel_tol > 0.0) {
        return invalid("rel_tol must be positive");
    }
    let t0 = term(0);
    if !t0.is_finite() {
        return Err(Error::Divergent("non-finite n = 0 term".into()));
    }
    let w0 = if opts.half_weight_n0 { 0.5 } else { 1.0 };
    // Neumaier-compensated running sum of n >= 1.
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut prev = t0.abs();
    let mut rising = 0usize;
    for n in 1..opts.max_terms {
        let t = term(n);
        if !t.is_finite() {
            return Err(Error::Divergent(format!("non-finite term at n = {n}")));
        }
        let s = acc + t;
        if acc.abs() >= t.abs() {
            comp += (acc - s) + t;
        } else {
            comp += (t - s) + acc;
        }
        acc = s;
        let a = t.abs();
        let total = acc + comp;
        let scale = t0.abs() + total.abs();
        let goal = 0.01 * opts.rel_tol * scale;

        if a == 0.0 {
            if prev == 0.0 || n > 1 {
                return Ok(done(w0 * t0, total, 0.0, n));
            }
            prev = a;
            continue;
        }
        if a >= prev && prev > 0.0 {
            rising += 1;
            if rising >= 8 {
                return Err(Error::Divergent(format!("terms not decreasing near n = {n}")));
            }
        } else {
            rising = 0;
        }
        if prev > 0.0 && a < prev {
            let r = a / prev;
            if r < 0.9 {
                let tail = t * r / (1.0 - r);
                if tail.abs() <= goal && a <= goal * 100.0 {
                    return Ok(done(w0 * t0, total, tail, n));
                }
            } else if n >= 4 {
                let nf = n as f64;
                let order = (prev / a).ln() / (nf / (nf - 1.0)).ln();
                if order <= 1.0 + 1e-3 {
                    if n > 10_000 {
                        return Err(Error::Divergent(format!(
                            "terms decay like n^-{order:.3}, not summable"
                        )));
                    }
                } else {
                    let tail = t * nf.powf(order) * (nf + 0.5).powf(1.0 - order) / (order - 1.0);
                    // The power-law model is good to O(1/n) relative.
                    if tail.abs() / nf <= goal {
                        return Ok(done(w0 * t0, total, tail, n));
                    }
                }
            }
        }
        prev = a;
    }
    Err(Error::SeriesNonConvergence {
        partial: w0 * t0 + acc + comp,
        terms: opts.max_terms,
    })
}

fn done(first: f64, rest: f64, tail: f64, n: usize) -> SeriesResult {
    SeriesResult {
        value: first + (rest + tail),
        tail,
        terms: n + 1,
    }
}
