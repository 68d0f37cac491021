use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::GridData;
use crate::error::{invalid, Result};

/// A point in the reference plane.
pub type Point = [f64; 2];

/// Region of the reference plane a profile is defined over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    /// One transverse coordinate; integrals are per unit length along the other.
    Interval { lo: f64, hi: f64 },
    Disk { radius: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// The whole plane.
    Plane,
}

impl Domain {
    pub fn dimensionality(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Domain::Interval { lo, hi } => p[0] >= lo && p[0] <= hi,
            Domain::Disk { radius } => p[0].hypot(p[1]) <= radius,
            Domain::Rectangle { x0, x1, y0, y1 } => p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1,
            Domain::Plane => true,
        }
    }

    /// Length (1D) or area (2D) of the domain; `None` when unbounded.
    pub fn measure(&self) -> Option<f64> {
        match *self {
            Domain::Interval { lo, hi } => Some(hi - lo),
            Domain::Disk { radius } => Some(std::f64::consts::PI * radius * radius),
            Domain::Rectangle { x0, x1, y0, y1 } => Some((x1 - x0) * (y1 - y0)),
            Domain::Plane => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Domain::Interval { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Domain::Disk { radius } => radius.is_finite() && radius > 0.0,
            Domain::Rectangle { x0, x1, y0, y1 } => {
                [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1
            }
            Domain::Plane => true,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("degenerate domain {self:?}"))
        }
    }
}

pub type Fn1d = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;
pub type Fn2d = Arc<dyn Fn(Point) -> (f64, Point) + Send + Sync>;

#[derive(Clone)]
pub(crate) enum Shape {
    Flat { height: f64 },
    Cylinder { a: f64, r: f64 },
    Sphere { a: f64, r: f64 },
    Paraboloid { a: f64, r1: f64, r2: f64 },
    Grid(Arc<GridData>),
    Custom1d(Fn1d),
    Custom2d { f: Fn2d, radial: bool },
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Flat { height } => write!(f, "Flat({height})"),
            Shape::Cylinder { a, r } => write!(f, "Cylinder(a={a}, R={r})"),
            Shape::Sphere { a, r } => write!(f, "Sphere(a={a}, R={r})"),
            Shape::Paraboloid { a, r1, r2 } => write!(f, "Paraboloid(a={a}, R1={r1}, R2={r2})"),
            Shape::Grid(g) => write!(f, "Grid({}x{})", g.nx, g.ny),
            Shape::Custom1d(_) => write!(f, "Custom1d"),
            Shape::Custom2d { radial, .. } => write!(f, "Custom2d(radial={radial})"),
        }
    }
}

/// Height function ψ over a domain of the reference plane.
#[derive(Debug, Clone)]
pub struct HeightProfile {
    pub(crate) shape: Shape,
    domain: Domain,
    length: f64,
    scales: Vec<f64>,
    rim: Option<f64>,
}

impl HeightProfile {
    fn new(shape: Shape, domain: Domain) -> Self {
        let mut p = Self {
            shape,
            domain,
            length: 1.0,
            scales: Vec::new(),
            rim: None,
        };
        match p.shape {
            Shape::Cylinder { a, r } | Shape::Sphere { a, r } => {
                p.scales = vec![(2.0 * a * r).sqrt()];
                p.rim = Some(r);
            }
            Shape::Paraboloid { a, r1, r2 } => {
                p.scales = vec![(2.0 * a * r1).sqrt(), (2.0 * a * r2).sqrt()];
            }
            _ => {}
        }
        p
    }

    /// Constant height over `domain`.
    pub fn flat(height: f64, domain: Domain) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return invalid(format!("flat height must be positive, got {height}"));
        }
        domain.validate()?;
        Ok(Self::new(Shape::Flat { height }, domain))
    }

    /// The reference plane itself (ψ ≡ 0), for use as the lower surface of a pair.
    pub fn reference_plane(domain: Domain) -> Result<Self> {
        domain.validate()?;
        Ok(Self::new(Shape::Flat { height: 0.0 }, domain))
    }

    /// Profile from a function returning (ψ, dψ/dx) on an interval.
    pub fn custom_1d(f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static, lo: f64, hi: f64) -> Result<Self> {
        let domain = Domain::Interval { lo, hi };
        domain.validate()?;
        Ok(Self::new(Shape::Custom1d(Arc::new(f)), domain))
    }

    /// Profile from a function returning (ψ, ∇ψ) on a 2D domain.
    ///
    /// Setting `radial` promises ψ depends on |x| only, which enables the
    /// one-dimensional radial quadrature on disks and the plane.
    pub fn custom_2d(
        f: impl Fn(Point) -> (f64, Point) + Send + Sync + 'static,
        domain: Domain,
        radial: bool,
    ) -> Result<Self> {
        domain.validate()?;
        if domain.dimensionality() != 2 {
            return invalid("custom_2d needs a two-dimensional domain");
        }
        Ok(Self::new(
            Shape::Custom2d {
                f: Arc::new(f),
                radial,
            },
            domain,
        ))
    }

    pub(crate) fn from_grid(grid: GridData) -> Self {
        let domain = grid.domain();
        let spacing = grid.dx;
        let mut p = Self::new(Shape::Grid(Arc::new(grid)), domain);
        p.scales = vec![spacing];
        p
    }

    /// Extent along the second axis for one-dimensional profiles (default 1).
    pub fn with_length(mut self, length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return invalid("length must be positive");
        }
        self.length = length;
        Ok(self)
    }

    /// Length-scale hints used to place quadrature breakpoints.
    pub fn with_scales(mut self, scales: Vec<f64>) -> Self {
        self.scales = scales.into_iter().filter(|s| *s > 0.0 && s.is_finite()).collect();
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dimensionality(&self) -> usize {
        self.domain.dimensionality()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Radius where the gradient of a circular profile diverges.
    pub fn rim(&self) -> Option<f64> {
        self.rim
    }

    /// Whether ψ depends on |x| only.
    pub fn is_radial(&self) -> bool {
        if self.dimensionality() != 2 {
            return false;
        }
        match &self.shape {
            Shape::Flat { .. } | Shape::Sphere { .. } => true,
            Shape::Paraboloid { r1, r2, .. } => r1 == r2,
            Shape::Custom2d { radial, .. } => *radial,
            _ => false,
        }
    }

    /// Smallest height when known in closed form.
    pub fn min_height(&self) -> Option<f64> {
        match &self.shape {
            Shape::Flat { height } => Some(*height),
            Shape::Cylinder { a, .. } | Shape::Sphere { a, .. } | Shape::Paraboloid { a, .. } => Some(*a),
            Shape::Grid(g) => Some(g.min_height()),
            _ => None,
        }
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.eval_grad(p).0
    }

    pub fn grad(&self, p: Point) -> Point {
        self.eval_grad(p).1
    }

    /// Height and gradient at `p`. One-dimensional profiles ignore `p[1]`.
    pub fn eval_grad(&self, p: Point) -> (f64, Point) {
        match &self.shape {
            Shape::Flat { height } => (*height, [0.0, 0.0]),
            Shape::Cylinder { a, r } => {
                let (h, d) = circle(*a, *r, p[0]);
                (h, [d, 0.0])
            }
            Shape::Sphere { a, r } => {
                let rho = p[0].hypot(p[1]);
                let (h, d) = circle(*a, *r, rho);
                if rho == 0.0 {
                    (h, [0.0, 0.0])
                } else {
                    (h, [d * p[0] / rho, d * p[1] / rho])
                }
            }
            Shape::Paraboloid { a, r1, r2 } => {
                let h = a + 0.5 * p[0] * p[0] / r1 + 0.5 * p[1] * p[1] / r2;
                (h, [p[0] / r1, p[1] / r2])
            }
            Shape::Grid(g) => g.eval_grad(p),
            Shape::Custom1d(f) => {
                let (h, d) = f(p[0]);
                (h, [d, 0.0])
            }
            Shape::Custom2d { f, .. } => f(p),
        }
    }
}

/// ψ = a + R(1 - sqrt(1 - x²/R²)) and its derivative.
fn circle(a: f64, r: f64, x: f64) -> (f64, f64) {
    let u = x / r;
    let s = (1.0 - u * u).max(0.0).sqrt();
    // R(1 - s) = x²/(R(1 + s)) avoids cancellation near the minimum.
    let h = a + x * x / (r * (1.0 + s));
    let d = if s > 0.0 { u / s } else { f64::INFINITY };
    (h, d)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be positive and finite, got {v}"))
    }
}

fn check_fraction(name: &str, f: f64) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        invalid(format!(
            "{name} must lie in (0, 1), got {f}; the gradient diverges at the rim"
        ))
    }
}

/// Circular cylinder of radius `R` at closest distance `a` above the plane.
pub fn make_cylinder_profile(a: f64, r: f64, x_max_fraction: f64) -> Result<HeightProfile> {
    check_positive("a", a)?;
    check_positive("R", r)?;
    check_fraction("x_max_fraction", x_max_fraction)?;
    let xm = x_max_fraction * r;
    Ok(HeightProfile::new(
        Shape::Cylinder { a, r },
        Domain::Interval { lo: -xm, hi: xm },
    ))
}

/// Sphere of radius `R` at closest distance `a`, over a disk of radius `rho_max_fraction·R`.
pub fn make_sphere_profile(a: f64, r: f64, rho_max_fraction: f64) -> Result<HeightProfile> {
    check_positive("a", a)?;
    check_positive("R", r)?;
    check_fraction("rho_max_fraction", rho_max_fraction)?;
    Ok(HeightProfile::new(
        Shape::Sphere { a, r },
        Domain::Disk {
            radius: rho_max_fraction * r,
        },
    ))
}

/// Osculating paraboloid a + x²/2R₁ + y²/2R₂ over the whole plane.
pub fn make_paraboloid_profile(a: f64, r1: f64, r2: f64) -> Result<HeightProfile> {
    check_positive("a", a)?;
    check_positive("R1", r1)?;
    check_positive("R2", r2)?;
    Ok(HeightProfile::new(Shape::Paraboloid { a, r1, r2 }, Domain::Plane))
}

impl HeightProfile {
    /// Same shape restricted to another domain of equal dimensionality.
    pub fn restricted_to(mut self, domain: Domain) -> Result<Self> {
        domain.validate()?;
        if domain.dimensionality() != self.dimensionality() {
            return invalid("restricted domain must keep the dimensionality");
        }
        if let (Some(rim), Domain::Disk { radius }) = (self.rim, domain) {
            if radius >= rim {
                return invalid("disk radius must stay inside the rim");
            }
        }
        self.domain = domain;
        Ok(self)
    }
}
