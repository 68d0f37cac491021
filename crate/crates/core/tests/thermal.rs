use std::f64::consts::PI;

use casimir_de::de::{universal_part, AsymptoticTerm, FitOptions};
use casimir_de::geometry::{make_sphere_profile, Domain, HeightProfile};
use casimir_de::numerics::special::ZETA3;
use casimir_de::perturbative::dirichlet_f2;
use casimir_de::thermal::{
    b0, b2, sphere_plane_high_t, thermal_de_free_energy, thermal_f2, zero_temperature_f2, ThermalTable,
};
use casimir_de::QuadOptions;

#[test]
fn table_interpolates_between_nodes() {
    for d in [2u32, 3] {
        let table = ThermalTable::new(d).unwrap();
        let nodes = table.nodes();
        for i in [3usize, 20, 47, 71, 90] {
            // Geometric midpoint of two nodes.
            let xi = (nodes[i].xi * nodes[i + 1].xi).sqrt();
            let (t0, t2) = table.eval(xi);
            let (e0, e2) = (b0(xi, d).unwrap(), b2(xi, d).unwrap());
            assert!((t0 / e0 - 1.0).abs() < 1e-4, "b0 d {d} xi {xi}: {t0} vs {e0}");
            assert!((t2 / e2 - 1.0).abs() < 1e-4, "b2 d {d} xi {xi}: {t2} vs {e2}");
        }
        let (z0, _) = table.eval(0.0);
        assert_eq!(z0, casimir_de::thermal::b0_zero_temperature(d).unwrap());
        assert!(table.to_csv().starts_with("xi,d,b0,b2\n"));
    }
}

#[test]
fn flat_plates_at_zero_temperature() {
    let table = ThermalTable::new(3).unwrap();
    let a = 0.3;
    let p = HeightProfile::flat(a, Domain::Rectangle { x0: 0.0, x1: 2.0, y0: 0.0, y1: 1.5 }).unwrap();
    let f = thermal_de_free_energy(&p, f64::INFINITY, &table, &QuadOptions::rel(1e-10)).unwrap();
    let expect = 3.0 * (-PI.powi(4) / 1440.0 / PI.powi(2)) / a.powi(3);
    assert!((f.total / expect - 1.0).abs() < 1e-10, "{} vs {expect}", f.total);
    assert_eq!(f.gradient_term, 0.0);
}

#[test]
fn free_energy_decreases_with_temperature() {
    let table = ThermalTable::new(3).unwrap();
    let p = make_sphere_profile(0.05, 1.0, 0.9).unwrap();
    let opts = QuadOptions::rel(1e-8);
    let mut last = thermal_de_free_energy(&p, f64::INFINITY, &table, &opts).unwrap().total;
    for beta in [10.0, 2.0, 0.5, 0.1, 0.02] {
        let f = thermal_de_free_energy(&p, beta, &table, &opts).unwrap().total;
        assert!(f < last, "beta {beta}: {f} not below {last}");
        last = f;
    }
}

#[test]
fn sphere_plane_high_temperature() {
    let table = ThermalTable::new(3).unwrap();
    let (r, a) = (1.0, 1e-3);
    let beta = a / 5.0;
    let p = make_sphere_profile(a, r, 0.95).unwrap();
    let de = thermal_de_free_energy(&p, beta, &table, &QuadOptions::rel(1e-10)).unwrap().total;
    let hs = sphere_plane_high_t(a, r, beta).unwrap();
    let leading = -ZETA3 * r / (8.0 * beta * a);
    assert!((de / hs.free_energy - 1.0).abs() < 2e-2, "{de} vs {}", hs.free_energy);
    assert!((de / leading - 1.0).abs() < 2e-2);
    assert!(hs.small_gap && hs.high_temperature);
}

#[test]
fn sphere_plane_high_temperature_log_term() {
    // Relative correction c·ε ln ε at fixed a/β, with analytic rim terms as nuisance.
    let table = ThermalTable::new(3).unwrap();
    let correction = |eps: f64| {
        let a = eps;
        let beta = a / 5.0;
        let p = make_sphere_profile(a, 1.0, 0.95)?;
        let f = thermal_de_free_energy(&p, beta, &table, &QuadOptions::rel(1e-11))?.total;
        Ok(f / (-ZETA3 / (8.0 * beta * a)) - 1.0)
    };
    let fit = universal_part(
        correction,
        1.0,
        &[AsymptoticTerm::PowLog(1.0)],
        &[AsymptoticTerm::Pow(1.0), AsymptoticTerm::PowLog(2.0), AsymptoticTerm::Pow(2.0)],
        &FitOptions::default(),
    )
    .unwrap();
    let c = fit.coefficients[0];
    let expect = -1.0 / (6.0 * ZETA3);
    assert!((c / expect - 1.0).abs() < 1e-2, "log coefficient {c} vs {expect}");
}

#[test]
fn thermal_form_factor_low_temperature_limit() {
    let xi = 0.05;
    for l in [0.0, 0.5, 1.5] {
        let t = thermal_f2(xi, 0, l, 3).unwrap().value;
        let z = zero_temperature_f2(l, 3).unwrap();
        let k = dirichlet_f2(l, 1.0).unwrap();
        assert!((z / k - 1.0).abs() < 1e-6, "l {l}: {z} vs {k}");
        assert!((t / k - 1.0).abs() < 1e-2, "l {l}: {t} vs {k}");
    }
}

#[test]
fn thermal_form_factor_is_even_in_n() {
    for n in [1i64, 2, 5] {
        let p = thermal_f2(0.4, n, 0.7, 3).unwrap().value;
        let m = thermal_f2(0.4, -n, 0.7, 3).unwrap().value;
        assert!((p / m - 1.0).abs() < 1e-9, "n {n}: {p} vs {m}");
    }
}
