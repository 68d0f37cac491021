//! Zeta values, gamma at half-integers and unit-sphere areas.

use std::f64::consts::PI;

pub const ZETA3: f64 = 1.202_056_903_159_594_3;
pub const ZETA5: f64 = 1.036_927_755_143_369_9;
pub const ZETA7: f64 = 1.008_349_277_381_922_8;

/// Riemann zeta for real s > 1 by Euler-Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta(s) requires s > 1");
    const N: usize = 12;
    let nf = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Bernoulli corrections B_{2j}/(2j)! * s(s+1)...(s+2j-2) N^{-s-2j+1}.
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in B.iter().enumerate() {
        let m = 2 * j + 1;
        sum += b / fact * rising * nf.powf(-s - m as f64);
        rising *= (s + m as f64) * (s + m as f64 + 1.0);
        fact *= ((m + 2) * (m + 3)) as f64;
    }
    sum
}

/// Gamma function at `n/2` for positive integer n.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n >= 1, "gamma_half needs n >= 1");
    let (mut g, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = n as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Gamma function at a positive integer.
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Area of the unit sphere in m dimensions, `2 pi^(m/2) / Gamma(m/2)`.
pub fn sphere_area(m: u32) -> f64 {
    2.0 * PI.powf(m as f64 / 2.0) / gamma_half(m)
}

/// Measure factor `S_m / (2 pi)^m` of a radial integral over m-dimensional momenta.
pub fn radial_measure(m: u32) -> f64 {
    if m == 0 {
        1.0
    } else {
        sphere_area(m) / (2.0 * PI).powi(m as i32)
    }
}
