mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use msfcs::coherent::{self, CoherentState};
use msfcs::params::{FieldConfig, ParticleSpec, Species};
use msfcs::qseries;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn nr_state(z1: Complex64, z2: Complex64, j: u8, mu: f64) -> CoherentState {
    let field = FieldConfig::new(1.0, 1, 1, 0, mu).unwrap();
    CoherentState::new(z1, z2, j, field, ParticleSpec::nr_spin_up(1.0, 1)).unwrap()
}

#[test]
fn pure_field_types_complete_each_other() {
    // without a flux line the two types split the Fock basis into n2 > n1 and n2 <= n1
    for (a, b) in [(3.0, 4.0), (0.5, 2.0), (6.0, 1.0)] {
        let r0 = qseries::q_full_scaled(1.0, a, b).unwrap().value.re;
        let r1 = qseries::q_full_scaled(0.0, b, a).unwrap().value.re;
        assert!((r0 + r1 - 1.0).abs() < 1e-13, "({a}, {b}): {}", r0 + r1);
    }
}

#[test]
fn diagonal_norm_against_brute_force() {
    for alpha in [0.5, 2.0, 5.0] {
        for u in [0.7, 2.0, 4.5] {
            let ours = qseries::q_full_scaled(alpha, u, u).unwrap().value.re;
            let brute = common::raw_kernel(alpha, 0, u, u);
            assert!(((ours - brute) / brute).abs() < 1e-12, "alpha {alpha} u {u}: {ours} vs {brute}");
        }
    }
}

#[test]
fn mean_n1_is_a_log_derivative_of_the_kernel() {
    // <N1> = (u/2) d/du ln Q for j = 0, computed on the brute-force kernel
    let mu = 0.3;
    let cs = nr_state(c(1.6, 0.7), c(-1.1, 2.4), 0, mu);
    let alpha = cs.sectors().unwrap()[0].alpha();
    let (u, v) = cs.kernel_uv();
    let h = 1e-4;
    let lq = |x: f64| common::raw_kernel(alpha, 0, x, v).ln() + x * x;
    let d = (lq(u + h) - lq(u - h)) / (2.0 * h);
    let oracle = 0.5 * u * d;
    let n1 = coherent::mean_n(&cs, 1).unwrap();
    assert!((n1 - oracle).abs() < 1e-6 * oracle, "{n1} vs {oracle}");
}

#[test]
fn far_below_diagonal_means_are_classical() {
    let cs = nr_state(c(5.0, 0.0), c(0.0, 20.0), 0, 0.3);
    let n1 = coherent::mean_n(&cs, 1).unwrap();
    assert!((n1 - 25.0).abs() <= 1e-12 * 25.0, "{n1}");
    let a1 = coherent::mean_a(&cs, 1).unwrap();
    assert!((a1 - cs.z1).norm() < 1e-12);
}

#[test]
fn unreduced_amplitude_is_exact() {
    let z1 = c(0.4, -2.2);
    let z2 = c(1.9, 0.3);
    assert_eq!(coherent::mean_a(&nr_state(z1, z2, 0, 0.6), 2).unwrap(), z2);
    assert_eq!(coherent::mean_a(&nr_state(z1, z2, 1, 0.6), 1).unwrap(), z1);
}

#[test]
fn reduced_amplitude_shrinks() {
    let cs = nr_state(c(2.0, 1.0), c(1.0, 0.5), 0, 0.45);
    let a1 = coherent::mean_a(&cs, 1).unwrap();
    let ratio = a1 / cs.z1;
    assert!(ratio.im.abs() < 1e-15);
    assert!(ratio.re > 0.0 && ratio.re < 1.0, "{ratio}");
}

#[test]
fn position_decodes_from_amplitudes() {
    let cs = nr_state(c(1.3, -0.2), c(0.6, 2.0), 1, 0.2);
    let (x, y) = coherent::mean_position(&cs).unwrap();
    let a1 = coherent::mean_a(&cs, 1).unwrap();
    let a2 = coherent::mean_a(&cs, 2).unwrap();
    let w = (2.0f64).sqrt() * (a2 - a1.conj());
    assert!((x - w.re).abs() < 1e-14 && (y + w.im).abs() < 1e-14);
}

#[test]
fn spin_polarized_3p1_matches_2p1_spin_up() {
    let field = FieldConfig::new(1.3, 1, 1, 2, 0.35).unwrap();
    let a = ParticleSpec::new(Species::NR3p1, 1.0, Some(1), 1, 0.0, 0.0).unwrap();
    let b = ParticleSpec::nr_spin_up(1.0, 1);
    for j in [0, 1] {
        let sa = CoherentState::new(c(1.5, 0.4), c(-0.8, 2.2), j, field, a).unwrap();
        let sb = CoherentState::new(c(1.5, 0.4), c(-0.8, 2.2), j, field, b).unwrap();
        let oa = coherent::observables(&sa).unwrap();
        let ob = coherent::observables(&sb).unwrap();
        assert_eq!(oa.n1_mean, ob.n1_mean);
        assert_eq!(oa.a1_mean, ob.a1_mean);
        assert_eq!(oa.var_xy, ob.var_xy);
    }
}

#[test]
fn states_of_different_type_are_orthogonal() {
    let a = nr_state(c(1.0, 0.2), c(2.0, -0.4), 0, 0.7);
    let b = nr_state(c(1.0, 0.2), c(2.0, -0.4), 1, 0.7);
    assert_eq!(coherent::norm_kernel(&a, Some(&b)).unwrap().value, c(0.0, 0.0));
}

#[test]
fn density_rotates_with_the_state() {
    // shifting phi by delta is undone by z1 -> z1 e^{i eps delta}, z2 -> z2 e^{-i eps delta}
    for j in [0u8, 1] {
        let cs = nr_state(c(1.2, 0.5), c(0.4, 1.7), j, 0.3);
        let delta = 0.83;
        let rot = Complex64::from_polar(1.0, delta);
        let turned = CoherentState::new(cs.z1 * rot, cs.z2 * rot.conj(), j, cs.field, cs.spec).unwrap();
        for &(phi, rho) in &[(0.1, 0.8), (2.0, 2.5), (4.4, 5.0)] {
            let a = coherent::density(&cs, phi, rho, None).unwrap();
            let b = coherent::density(&turned, phi + delta, rho, None).unwrap();
            assert!((a - b).abs() < 1e-10 * a.max(1e-300), "j {j} phi {phi}: {a} vs {b}");
        }
    }
}

#[test]
fn radial_marginal_integrates_to_one() {
    let cs = nr_state(c(1.0, 0.5), c(0.3, 1.2), 0, 0.4);
    // rho = s^4 smooths the rho^alpha behaviour at the origin
    let f = |s: f64| if s > 0.0 { 4.0 * s.powi(3) * coherent::radial_density(&cs, s.powi(4)).unwrap() } else { 0.0 };
    let total = common::simpson(f, 0.0, 40f64.powf(0.25), 800);
    assert!((total - 1.0).abs() < 1e-9, "{total}");
}

#[test]
fn density_parseval_on_a_ring() {
    let cs = nr_state(c(0.9, -0.3), c(1.4, 0.8), 1, 0.6);
    let rho = 1.7;
    let n = 256;
    let phis: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let ring = coherent::density_ring(&cs, rho, &phis, None).unwrap();
    let avg: f64 = ring.iter().sum::<f64>() * 2.0 * PI / n as f64;
    let radial = coherent::radial_density(&cs, rho).unwrap();
    assert!((avg - radial).abs() < 1e-12 * radial, "{avg} vs {radial}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn robertson_products_hold(
        r1 in 0.2f64..3.0, p1 in 0.0f64..6.3,
        r2 in 0.2f64..3.0, p2 in 0.0f64..6.3,
        j in 0u8..2, mu in 0.0f64..0.99,
    ) {
        let cs = nr_state(Complex64::from_polar(r1, p1), Complex64::from_polar(r2, p2), j, mu);
        let rep = coherent::uncertainty_products(&cs).unwrap();
        prop_assert!(rep.product_p >= rep.bound_p * (1.0 - 1e-9));
        prop_assert!(rep.product_l >= rep.bound_l * (1.0 - 1e-9));
        prop_assert!(rep.var_xy >= 0.0 && rep.var_lz >= 0.0);
    }

    #[test]
    fn means_are_phase_covariant(
        r1 in 0.2f64..3.0, r2 in 0.2f64..3.0, p1 in 0.0f64..6.3, p2 in 0.0f64..6.3, j in 0u8..2,
    ) {
        // N_k means depend on moduli only; a_k means follow the phase of z_k
        let a = nr_state(c(r1, 0.0), c(r2, 0.0), j, 0.25);
        let b = nr_state(Complex64::from_polar(r1, p1), Complex64::from_polar(r2, p2), j, 0.25);
        for k in [1u8, 2] {
            let na = coherent::mean_n(&a, k).unwrap();
            let nb = coherent::mean_n(&b, k).unwrap();
            prop_assert!((na - nb).abs() <= 1e-12 * na.max(1.0));
        }
        let ra = coherent::mean_a(&a, 1).unwrap().re / r1;
        let rb = coherent::mean_a(&b, 1).unwrap() / b.z1;
        prop_assert!((ra - rb.re).abs() < 1e-12 && rb.im.abs() < 1e-12);
    }
}
