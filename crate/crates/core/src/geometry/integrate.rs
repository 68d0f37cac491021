use std::cell::RefCell;
use std::f64::consts::PI;

use super::profile::{Domain, HeightProfile, Point};
use crate::error::{invalid, Error, Result};
use crate::numerics::{integrate_piecewise, integrate_semi_infinite, QuadOptions, QuadratureResult};

/// How to integrate a point function over a profile's domain.
#[derive(Debug, Clone)]
pub struct IntegrationPlan {
    domain: Domain,
    radial: bool,
    length: f64,
    scales: Vec<f64>,
    rim: Option<f64>,
}

impl IntegrationPlan {
    pub fn for_profile(p: &HeightProfile) -> Self {
        Self {
            domain: p.domain(),
            radial: p.is_radial(),
            length: p.length(),
            scales: p.scales().to_vec(),
            rim: p.rim(),
        }
    }

    /// Plan over the shared domain of two surfaces.
    pub fn for_pair(p1: &HeightProfile, p2: &HeightProfile) -> Result<Self> {
        if p1.domain() != p2.domain() {
            return invalid(format!(
                "surfaces must share a domain: {:?} vs {:?}",
                p1.domain(),
                p2.domain()
            ));
        }
        let mut scales = p1.scales().to_vec();
        scales.extend_from_slice(p2.scales());
        let rim = match (p1.rim(), p2.rim()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(Self {
            domain: p1.domain(),
            radial: p1.is_radial() && p2.is_radial(),
            length: p1.length(),
            scales,
            rim,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    fn plane_reach(&self) -> f64 {
        1e3 * self.scales.iter().copied().fold(0.0, f64::max)
    }

    /// Integral of `f` over the domain with the projected-plane measure.
    ///
    /// One-dimensional domains are multiplied by the profile length.
    pub fn integrate<F>(&self, f: F, opts: &QuadOptions) -> Result<QuadratureResult>
    where
        F: Fn(Point) -> Result<f64>,
    {
        let slot = RefCell::new(None);
        let out = self.integrate_inner(&f, opts, &slot);
        if let Some(e) = slot.into_inner() {
            return Err(e);
        }
        out
    }

    fn integrate_inner<F>(&self, f: &F, opts: &QuadOptions, slot: &RefCell<Option<Error>>) -> Result<QuadratureResult>
    where
        F: Fn(Point) -> Result<f64>,
    {
        let inner_opts = QuadOptions {
            rel_tol: opts.rel_tol * 0.1,
            ..*opts
        };
        match self.domain {
            Domain::Interval { lo, hi } => {
                let g = capture(slot, |x| f([x, 0.0]));
                let pts = breaks(lo, hi, &self.scales, self.rim);
                Ok(integrate_piecewise(g, &pts, opts)?.scale(self.length))
            }
            Domain::Disk { radius } if self.radial => {
                let g = capture(slot, |rho| Ok(2.0 * PI * rho * f([rho, 0.0])?));
                let pts = breaks(0.0, radius, &self.scales, self.rim);
                integrate_piecewise(g, &pts, opts)
            }
            Domain::Plane if self.radial => {
                let g = capture(slot, |rho| Ok(2.0 * PI * rho * f([rho, 0.0])?));
                integrate_semi_infinite(g, 0.0, &scale_breaks(&self.scales, self.plane_reach()), opts)
            }
            Domain::Disk { radius } => {
                let pts = breaks(0.0, radius, &self.scales, self.rim);
                let ring = capture(slot, |phi: f64| {
                    let (c, s) = (phi.cos(), phi.sin());
                    let g = capture(slot, |rho| Ok(rho * f([rho * c, rho * s])?));
                    Ok(integrate_piecewise(g, &pts, &inner_opts)?.value)
                });
                integrate_piecewise(ring, &quadrant_breaks(), opts)
            }
            Domain::Plane => {
                let br = scale_breaks(&self.scales, self.plane_reach());
                let ring = capture(slot, |phi: f64| {
                    let (c, s) = (phi.cos(), phi.sin());
                    let g = capture(slot, |rho| Ok(rho * f([rho * c, rho * s])?));
                    Ok(integrate_semi_infinite(g, 0.0, &br, &inner_opts)?.value)
                });
                integrate_piecewise(ring, &quadrant_breaks(), opts)
            }
            Domain::Rectangle { x0, x1, y0, y1 } => {
                let ypts = breaks(y0, y1, &self.scales, None);
                let xpts = breaks(x0, x1, &self.scales, None);
                let column = capture(slot, |x: f64| {
                    let g = capture(slot, |y| f([x, y]));
                    Ok(integrate_piecewise(g, &ypts, &inner_opts)?.value)
                });
                integrate_piecewise(column, &xpts, opts)
            }
        }
    }
}

fn quadrant_breaks() -> Vec<f64> {
    (0..=4).map(|k| k as f64 * 0.5 * PI).collect()
}

// Turn a fallible integrand into a plain one, parking the first error.
fn capture<'a, F>(slot: &'a RefCell<Option<Error>>, f: F) -> impl Fn(f64) -> f64 + 'a
where
    F: Fn(f64) -> Result<f64> + 'a,
{
    move |x| {
        if slot.borrow().is_some() {
            return f64::NAN;
        }
        match f(x) {
            Ok(v) => v,
            Err(e) => {
                *slot.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    }
}

// s/8, s/4, ... for each scale s, stopping at `reach`.
fn scale_breaks(scales: &[f64], reach: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for &s in scales {
        let mut x = s / 8.0;
        while x < reach {
            out.push(x);
            x *= 2.0;
        }
    }
    out
}

/// Breakpoints for [lo, hi]: the origin, geometric refinements around each
/// length scale, and geometric refinement towards a rim at |x| = rim.
pub(crate) fn breaks(lo: f64, hi: f64, scales: &[f64], rim: Option<f64>) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    if lo < 0.0 && hi > 0.0 {
        pts.push(0.0);
    }
    let reach = lo.abs().max(hi.abs());
    for x in scale_breaks(scales, reach) {
        pts.push(x);
        pts.push(-x);
    }
    if let Some(r) = rim {
        for (end, sign) in [(hi, 1.0), (-lo, -1.0)] {
            let gap = r - end;
            if end > 0.0 && gap > 0.0 {
                let mut d = 2.0 * gap;
                while d < r {
                    pts.push(sign * (r - d));
                    d *= 2.0;
                }
            }
        }
    }
    pts.retain(|p| *p >= lo && *p <= hi && p.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (a.abs() + b.abs()));
    pts
}
