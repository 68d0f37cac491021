use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::profile::{Domain, HeightProfile, Point};
use crate::error::{invalid, Error, Result};

/// Heights sampled on a uniform grid with origin at (0, 0), stored row-major.
///
/// A grid with `ny == 1` describes a one-dimensional profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridData {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub heights: Vec<f64>,
}

impl GridData {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, heights: Vec<f64>) -> Result<Self> {
        if nx < 3 || !(ny == 1 || ny >= 3) {
            return invalid(format!(
                "grid {nx}x{ny} too small for central differences (need at least 3 points per axis)"
            ));
        }
        if !(dx > 0.0 && dx.is_finite()) || (ny > 1 && !(dy > 0.0 && dy.is_finite())) {
            return invalid("grid spacing must be positive");
        }
        if heights.len() != nx * ny {
            return invalid(format!("expected {} heights, found {}", nx * ny, heights.len()));
        }
        if let Some((i, h)) = heights.iter().enumerate().find(|(_, h)| !(**h > 0.0) || !h.is_finite()) {
            return invalid(format!("non-positive height {h} at index {i}"));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            heights,
        })
    }

    /// Build from explicit coordinates, rejecting non-uniform spacing.
    pub fn from_samples(xs: &[f64], ys: &[f64], heights: Vec<f64>) -> Result<Self> {
        let dx = uniform_step(xs, "x")?;
        let dy = if ys.len() == 1 { 1.0 } else { uniform_step(ys, "y")? };
        Self::new(xs.len(), ys.len(), dx, dy, heights)
    }

    /// Parse the text format: "nx ny dx dy" followed by nx·ny row-major heights.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))
                .map(str::to_owned)
        };
        let nx: usize = parse_token(&next("nx")?)?;
        let ny: usize = parse_token(&next("ny")?)?;
        let dx: f64 = parse_token(&next("dx")?)?;
        let dy: f64 = parse_token(&next("dy")?)?;
        let rest: Vec<&str> = text.split_whitespace().skip(4).collect();
        let heights = rest.iter().map(|t| parse_token(t)).collect::<Result<Vec<f64>>>()?;
        Self::new(nx, ny, dx, dy, heights)
    }

    pub fn read(mut reader: impl Read) -> Result<Self> {
        let mut s = String::new();
        reader
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Self::parse(&s)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.nx, self.ny, self.dx, self.dy);
        for row in self.heights.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|h| format!("{h:e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn domain(&self) -> Domain {
        let x1 = self.dx * (self.nx - 1) as f64;
        if self.ny == 1 {
            Domain::Interval { lo: 0.0, hi: x1 }
        } else {
            Domain::Rectangle {
                x0: 0.0,
                x1,
                y0: 0.0,
                y1: self.dy * (self.ny - 1) as f64,
            }
        }
    }

    pub fn min_height(&self) -> f64 {
        self.heights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn h(&self, i: usize, j: usize) -> f64 {
        self.heights[j * self.nx + i]
    }

    // Central differences in the interior, one-sided on the edges.
    fn node_grad(&self, i: usize, j: usize) -> Point {
        let d = |lo: f64, hi: f64, step: f64| (hi - lo) / step;
        let gx = if i == 0 {
            d(self.h(0, j), self.h(1, j), self.dx)
        } else if i == self.nx - 1 {
            d(self.h(i - 1, j), self.h(i, j), self.dx)
        } else {
            d(self.h(i - 1, j), self.h(i + 1, j), 2.0 * self.dx)
        };
        let gy = if self.ny == 1 {
            0.0
        } else if j == 0 {
            d(self.h(i, 0), self.h(i, 1), self.dy)
        } else if j == self.ny - 1 {
            d(self.h(i, j - 1), self.h(i, j), self.dy)
        } else {
            d(self.h(i, j - 1), self.h(i, j + 1), 2.0 * self.dy)
        };
        [gx, gy]
    }

    fn cell(&self, t: f64, step: f64, n: usize) -> (usize, f64) {
        let u = (t / step).clamp(0.0, (n - 1) as f64);
        let i = (u.floor() as usize).min(n.saturating_sub(2));
        (i, u - i as f64)
    }

    /// Bilinear interpolation of heights and of the nodal gradients.
    pub fn eval_grad(&self, p: Point) -> (f64, Point) {
        let (i, fx) = self.cell(p[0], self.dx, self.nx);
        if self.ny == 1 {
            let h = (1.0 - fx) * self.h(i, 0) + fx * self.h(i + 1, 0);
            let g = (1.0 - fx) * self.node_grad(i, 0)[0] + fx * self.node_grad(i + 1, 0)[0];
            return (h, [g, 0.0]);
        }
        let (j, fy) = self.cell(p[1], self.dy, self.ny);
        let w = [
            ((1.0 - fx) * (1.0 - fy), i, j),
            (fx * (1.0 - fy), i + 1, j),
            ((1.0 - fx) * fy, i, j + 1),
            (fx * fy, i + 1, j + 1),
        ];
        let mut h = 0.0;
        let mut g = [0.0, 0.0];
        for (wk, ii, jj) in w {
            h += wk * self.h(ii, jj);
            let ng = self.node_grad(ii, jj);
            g[0] += wk * ng[0];
            g[1] += wk * ng[1];
        }
        (h, g)
    }
}

fn parse_token<T: std::str::FromStr>(t: &str) -> Result<T> {
    t.parse()
        .map_err(|_| Error::Parse(format!("cannot parse '{t}'")))
}

fn uniform_step(v: &[f64], axis: &str) -> Result<f64> {
    if v.len() < 2 {
        return invalid(format!("need at least two {axis} coordinates"));
    }
    let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    for w in v.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs() {
            return invalid(format!("non-uniform {axis} spacing"));
        }
    }
    Ok(step)
}

/// Profile interpolated from gridded heights.
pub fn load_grid_profile(grid: GridData) -> HeightProfile {
    HeightProfile::from_grid(grid)
}

/// Read a grid profile from a text file.
pub fn load_grid_file(path: impl AsRef<Path>) -> Result<HeightProfile> {
    let f = std::fs::File::open(path.as_ref()).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(load_grid_profile(GridData::read(f)?))
}
