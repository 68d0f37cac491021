//! Adaptive Gauss-Kronrod quadrature and fixed Gauss-Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Value of a definite integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn new(value: f64, error_estimate: f64, evaluations: usize) -> Self {
        Self {
            value,
            error_estimate: error_estimate.abs(),
            evaluations: evaluations.max(1),
        }
    }

    /// Multiply value and error by a constant.
    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            evaluations: self.evaluations,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error_estimate
        } else {
            self.error_estimate / self.value.abs()
        }
    }
}

impl Add for QuadratureResult {
    type Output = QuadratureResult;

    fn add(self, rhs: Self) -> Self {
        QuadratureResult {
            value: self.value + rhs.value,
            error_estimate: self.error_estimate + rhs.error_estimate,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Default tolerance for nested (2D) integrals.
    pub fn nested() -> Self {
        Self::rel(1e-7)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) {
            return invalid("tolerances must be positive");
        }
        if self.max_subdivisions == 0 {
            return invalid("max_subdivisions must be at least 1");
        }
        Ok(())
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_971_451_997,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteIntegrand { x })
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        resabs,
    })
}

/// Evaluations performed by one Gauss-Kronrod panel.
pub const GK21_POINTS: usize = 21;

fn adaptive<F: Fn(f64) -> f64>(f: &F, edges: &[f64], opts: &QuadOptions) -> Result<QuadratureResult> {
    opts.validate()?;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(f, w[0], w[1])?);
            evaluations += GK21_POINTS;
        }
    }
    if heap.is_empty() {
        return invalid("integration range is empty");
    }
    let mut value: f64 = heap.iter().map(|s| s.value).sum();
    let mut error: f64 = heap.iter().map(|s| s.error).sum();
    let mut resabs: f64 = heap.iter().map(|s| s.resabs).sum();
    let mut subdivisions = heap.len();
    loop {
        let target = (opts.rel_tol * value.abs()).max(opts.abs_tol);
        if error <= target || error <= 100.0 * f64::EPSILON * resabs {
            let (v, e) = ordered_totals(&heap);
            if e <= target.max(100.0 * f64::EPSILON * resabs) {
                return Ok(QuadratureResult::new(v, e, evaluations));
            }
            value = v;
            error = e;
        }
        if subdivisions >= opts.max_subdivisions {
            let (v, e) = ordered_totals(&heap);
            return Err(Error::QuadratureNonConvergence {
                partial: v,
                error_estimate: e,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at machine resolution; nothing left to refine.
            heap.push(worst);
            let (v, e) = ordered_totals(&heap);
            return Err(Error::QuadratureNonConvergence {
                partial: v,
                error_estimate: e,
                evaluations,
            });
        }
        let left = gk21(f, worst.a, mid)?;
        let right = gk21(f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
        evaluations += 2 * GK21_POINTS;
        subdivisions += 1;
    }
}

// Sum segments left to right so the result does not depend on heap layout.
fn ordered_totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    segs.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

/// Adaptive integral of `f` over `[lo, hi]`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate(f, lo, hi, &QuadOptions::rel(rel_tol))
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<QuadratureResult> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("need finite lo < hi, got [{lo}, {hi}]"));
    }
    adaptive(&f, &[lo, hi], opts)
}

/// Adaptive integral over `[points[0], points[last]]` with the given interior breakpoints.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let edges = sorted_edges(points)?;
    adaptive(&f, &edges, opts)
}

fn sorted_edges(points: &[f64]) -> Result<Vec<f64>> {
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return invalid("need at least two finite breakpoints");
    }
    let mut edges = points.to_vec();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    if edges.len() < 2 {
        return invalid("integration range is empty");
    }
    Ok(edges)
}

/// Integral over `[lo, inf)` using the rational map `x = lo + t/(1-t)`.
///
/// `breaks` are optional interior points in the original variable.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if !lo.is_finite() {
        return invalid("lower limit must be finite");
    }
    let g = |t: f64| {
        let s = 1.0 - t;
        let x = lo + t / s;
        if x.is_infinite() {
            return 0.0;
        }
        f(x) / (s * s)
    };
    let mut edges = vec![0.0, 1.0];
    for &b in breaks {
        if b > lo && b.is_finite() {
            let u = b - lo;
            edges.push(u / (1.0 + u));
        }
    }
    let edges = sorted_edges(&edges)?;
    adaptive(&g, &edges, opts)
}

/// Integral over `[lo, inf)` truncated at `cutoff`, for integrands bounded by
/// `|f(cutoff)| exp(-decay_rate (x - cutoff))` beyond the cutoff.
///
/// The tail bound is added to the error estimate, not to the value.
pub fn integrate_to_cutoff<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    cutoff: f64,
    decay_rate: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if !(cutoff > lo) || !(decay_rate > 0.0) {
        return invalid("need cutoff > lo and positive decay rate");
    }
    let mut edges = vec![lo, cutoff];
    edges.extend(breaks.iter().copied().filter(|&b| b > lo && b < cutoff));
    let edges = sorted_edges(&edges)?;
    let body = adaptive(&f, &edges, opts)?;
    let tail = eval(&f, cutoff)?.abs() / decay_rate;
    Ok(QuadratureResult::new(
        body.value,
        body.error_estimate + tail,
        body.evaluations + 1,
    ))
}

/// Geometric breakpoints `start, start*ratio, ...` strictly below `end`.
pub fn geometric_breaks(start: f64, end: f64, ratio: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if !(start > 0.0) || !(ratio > 1.0) {
        return out;
    }
    let mut x = start;
    while x < end {
        out.push(x);
        x *= ratio;
    }
    out
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jf = j as f64;
                p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite fixed Gauss-Legendre rule over `[lo, hi]` split into `panels` equal parts.
pub fn fixed_gauss<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, order: usize, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = lo + h * p as f64;
        let c = a + 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(c + 0.5 * h * xi);
        }
        sum += 0.5 * h * s;
    }
    sum
}
