mod common;

use common::*;
use coreshell::dnmap::{
    disk_dn_multiplier, dn_distance, dn_multiplier, dn_multiplier_and_derivative, dn_multiplier_jaeger, monotone_f,
    physical_potential, psi_analytic, psi_shell_branch, rho, shell_coefficients, JaegerValues, PhysicalScaling,
};
use coreshell::specfun::{bessel_i01, bessel_k01};
use coreshell::{Profile, Profile32};
use proptest::prelude::*;

fn p(r1: f64, s: f64) -> Profile {
    Profile::new(r1, s).unwrap()
}

fn lambda(r1: f64, s: f64) -> f64 {
    dn_multiplier(&p(r1, s)).unwrap().lambda
}

fn disk() -> f64 {
    disk_dn_multiplier::<f64>().lambda
}

#[test]
fn jaeger_identities_on_random_triples() {
    for (x, y, z) in uniform_triples(JAEGER_TRIPLES, JAEGER_RANGE, 2024) {
        let xy = JaegerValues::new(x, y).unwrap();
        let xz = JaegerValues::new(x, z).unwrap();
        let zy = JaegerValues::new(z, y).unwrap();
        let yx = JaegerValues::new(y, x).unwrap();
        let xx = JaegerValues::new(x, x).unwrap();

        let checks = [
            (xy.d * xz.d10 - xz.d * xy.d10, zy.d / x),
            (xy.d * xz.d11 - xz.d01 * xy.d10, zy.d10 / x),
            (xy.d11 * xz.d01 - xy.d01 * xz.d11, -zy.d11 / x),
        ];
        for (k, (lhs, rhs)) in checks.into_iter().enumerate() {
            assert!(
                (lhs - rhs).abs() <= JAEGER_PRODUCT_TOL * rhs.abs(),
                "identity {k} at ({x}, {y}, {z}): {lhs} vs {rhs}"
            );
        }
        assert!((xy.d01 + yx.d10).abs() <= JAEGER_SIMPLE_TOL * xy.d01.abs());
        assert!((xx.d10 - 1.0 / x).abs() <= JAEGER_SIMPLE_TOL / x);
        assert_eq!(xx.d, 0.0);
    }
}

#[test]
fn mixed_partial_is_derivative_of_d() {
    // ∂²D/∂x∂y against a central difference of D₁₀ in y
    let h = 1e-5;
    for (x, y, _) in uniform_triples(50, JAEGER_RANGE, 7) {
        let fd = (JaegerValues::new(x, y + h).unwrap().d10 - JaegerValues::new(x, y - h).unwrap().d10) / (2.0 * h);
        let d11 = JaegerValues::new(x, y).unwrap().d11;
        assert!((fd - d11).abs() < 1e-7 * (1.0 + d11.abs()), "({x}, {y})");
    }
}

#[test]
fn closed_and_cross_product_forms_agree() {
    let r1s = linspace(FORM_R1.0, FORM_R1.1, FORM_GRID);
    let sigmas = logspace(FORM_SIGMA.0, FORM_SIGMA.1, FORM_GRID);
    for &r1 in &r1s {
        for &s in &sigmas {
            let a = lambda(r1, s);
            let b = dn_multiplier_jaeger(&p(r1, s)).unwrap().lambda;
            assert!((a - b).abs() <= FORM_TOL * a.abs(), "({r1}, {s}): {a} vs {b}");
        }
    }
}

#[test]
fn cross_product_form_reference_cases() {
    for &(r1, s) in &[(0.5, 1.0), (0.3, 2.0), (0.8, 0.5)] {
        let a = lambda(r1, s);
        let b = dn_multiplier_jaeger(&p(r1, s)).unwrap().lambda;
        assert!((a - b).abs() <= 1e-11 * a.abs());
    }
}

#[test]
fn injective_in_sigma() {
    let sigmas = logspace(UNIQUENESS_SIGMA.0, UNIQUENESS_SIGMA.1, UNIQUENESS_POINTS);
    for &r1 in &UNIQUENESS_R1 {
        let lams: Vec<f64> = sigmas.iter().map(|&s| lambda(r1, s)).collect();
        for i in 0..lams.len() {
            for j in i + 1..lams.len() {
                assert!((lams[i] - lams[j]).abs() > UNIQUENESS_GAP, "r1 = {r1}: σ {} vs {}", sigmas[i], sigmas[j]);
            }
        }
    }
}

#[test]
fn lambda_increases_with_sigma() {
    for &r1 in &UNIQUENESS_R1 {
        for s in logspace(0.05, 20.0, 60) {
            let (_, d) = dn_multiplier_and_derivative(&p(r1, s)).unwrap();
            assert!(d > 0.0, "r1 = {r1}, σ = {s}");
        }
    }
}

#[test]
fn derivative_matches_central_difference() {
    for &r1 in &[0.1, 0.4, 0.7, 0.9] {
        for s in logspace(0.05, 20.0, 25) {
            let h = 1e-5 * s;
            let fd = (lambda(r1, s + h) - lambda(r1, s - h)) / (2.0 * h);
            let (_, d) = dn_multiplier_and_derivative(&p(r1, s)).unwrap();
            assert!((fd - d).abs() <= 1e-6 * d.abs() + 1e-11, "({r1}, {s}): {fd} vs {d}");
        }
    }
}

#[test]
fn homogeneous_limit_in_sigma() {
    let d = disk();
    for &ds in &[1e-7, -1e-7, 5e-8, -3e-8] {
        assert!((lambda(0.5, 1.0 + ds) - d).abs() <= 1e-6);
    }
    for &r1 in &UNIQUENESS_R1 {
        assert!((lambda(r1, 1.0) - d).abs() < 1e-15);
    }
}

#[test]
fn vanishing_core_limit() {
    let d = disk();
    let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|&r1| (lambda(r1, 4.0) - d).abs()).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] <= 1e-5);
}

#[test]
fn reference_multipliers() {
    assert!((disk() - 0.44638997).abs() < 1e-7);
    // N → ∞ limit of the FD flux sequence 0.4431, 0.4448, 0.4457, 0.4461
    assert!((lambda(0.3, 2.0) - 0.4465).abs() < 1e-3);
    assert!((lambda(0.3, 2.0) - 0.44655141570694606).abs() < 1e-13);
    assert!((lambda(0.8, 0.5) - 0.43010649589099764).abs() < 1e-13);
    assert!(rho(&p(0.3, 2.0)).unwrap().abs() > 0.0);
    assert_eq!(dn_distance(&p(0.4, 3.0), &p(0.4, 3.0)).unwrap(), 0.0);
    assert!(dn_distance(&p(0.7, 0.9), &p(0.7, 1.5)).unwrap() > 1e-3);
}

#[test]
fn centre_values_of_noise_examples() {
    let centre = |r1: f64, s: f64| psi_analytic(0.0, 1.0, &p(r1, s)).unwrap();
    assert!((centre(0.7, 0.9) - 692.0 / 887.0).abs() < 1e-4);
    assert!((centre(0.8, 1.5) - 199.0 / 240.0).abs() < 1e-4);
    assert!((centre(0.7, 0.9) - 0.7801573832).abs() < 1e-9);
    assert!((centre(0.8, 1.5) - 0.8291669874).abs() < 1e-9);
}

#[test]
fn monotone_f_increasing() {
    for &r in &MONOTONE_R {
        let etas = logspace(MONOTONE_ETA.0, MONOTONE_ETA.1, MONOTONE_POINTS);
        let vals: Vec<f64> = etas.iter().map(|&e| monotone_f(e, r).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[0] < w[1], "r = {r}");
        }
        for &e in &etas {
            let h = 1e-6 * e;
            let d = (monotone_f(e + h, r).unwrap() - monotone_f(e - h, r).unwrap()) / (2.0 * h);
            assert!(d > 0.0, "F' at eta = {e}, r = {r}");
        }
        assert!((monotone_f(1e6, r).unwrap() - r / 2.0).abs() < 1e-6);
    }
    assert!((monotone_f(1.0_f64, 1.0).unwrap() - disk()).abs() < 1e-15);
}

#[test]
fn physical_potentials() {
    let sc = PhysicalScaling::new(1.0, 0.5, 0.0).unwrap();
    let (u1, u2) = physical_potential(&p(0.5, 2.0), &sc);
    assert!((u1 - 0.5).abs() < 1e-15 && (u2 - 1.0).abs() < 1e-15);
    let sc = PhysicalScaling::new(1.05e-34, 9.1e-31, 3.0e-20).unwrap();
    let (u1, u2) = physical_potential(&p(0.5, 1.0), &sc);
    assert!((u1 - u2).abs() <= 1e-15 * u2.abs());
    let (u1, _) = physical_potential(&p(0.5, 1e12), &sc);
    assert!((u1 - 3.0e-20).abs() < 1e-9 * 3.0e-20);
    assert!(PhysicalScaling::new(0.0, 1.0, 0.0).is_err());
    assert!(PhysicalScaling::new(1.0, -1.0, 0.0).is_err());
}

#[test]
fn single_precision_profile() {
    let prof = Profile32::new(0.3, 2.0).unwrap();
    let l = dn_multiplier(&prof).unwrap().lambda as f64;
    assert!((l - lambda(0.3, 2.0)).abs() < 1e-5);
}

proptest! {
    #[test]
    fn transmission_conditions(r1 in 0.05f64..0.95, ls in -3.0f64..3.0, f in -10.0f64..10.0) {
        let s = ls.exp();
        let prof = p(r1, s);
        let c = shell_coefficients(f, &prof).unwrap();
        let q = s.sqrt();
        let (i0x, i1x) = bessel_i01(r1 / q).unwrap();
        let (i0r, i1r) = bessel_i01(r1).unwrap();
        let (k0r, k1r) = bessel_k01(r1).unwrap();

        let inside = c.a0 * i0x;
        let outside = c.a1 * i0r + c.b1 * k0r;
        prop_assert!((inside - outside).abs() <= 1e-12 * inside.abs().max(1e-300));
        prop_assert!((inside - psi_shell_branch(r1, &c).unwrap()).abs() <= 1e-12 * inside.abs().max(1e-300));

        let flux_in = q * c.a0 * i1x;
        let flux_out = c.a1 * i1r - c.b1 * k1r;
        prop_assert!((flux_in - flux_out).abs() <= 1e-12 * flux_in.abs().max(1e-300));

        let edge = psi_analytic(1.0, f, &prof).unwrap();
        prop_assert!((edge - f).abs() <= 1e-12 * f.abs());
        prop_assert!((dn_multiplier(&prof).unwrap().apply(f) - lambda(r1, s) * f).abs() <= 1e-15 * f.abs());
    }

    #[test]
    fn multiplier_bounded_by_shell_limits(r1 in 0.05f64..0.95, ls in -3.0f64..3.0) {
        let l = lambda(r1, ls.exp());
        prop_assert!(l.is_finite() && l > 0.0);
        prop_assert_eq!(dn_multiplier(&p(r1, ls.exp())).unwrap().operator_norm(), l.abs());
    }

    #[test]
    fn antisymmetry(x in 0.1f64..5.0, y in 0.1f64..5.0) {
        let a = JaegerValues::new(x, y).unwrap();
        let b = JaegerValues::new(y, x).unwrap();
        prop_assert!((a.d + b.d).abs() <= 1e-14 * (1.0 + a.d.abs()));
        prop_assert!((a.d11 + b.d11).abs() <= 1e-13 * (1.0 + a.d11.abs()));
    }
}
