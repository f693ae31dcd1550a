use num_complex::Complex64;
use proptest::prelude::*;

use msfcs::coherent::{self, CoherentState};
use msfcs::evolution::{self, EvolutionMode, EvolutionSpec};
use msfcs::params::{FieldConfig, ParticleSpec, Species};
use msfcs::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn field() -> FieldConfig {
    FieldConfig::new(1.0, 1, 1, 0, 0.4).unwrap()
}

fn nr(z1: Complex64, z2: Complex64, j: u8) -> CoherentState {
    CoherentState::new(z1, z2, j, field(), ParticleSpec::nr_spin_up(1.0, 1)).unwrap()
}

fn massless(z1: Complex64, z2: Complex64, j: u8) -> CoherentState {
    CoherentState::new(z1, z2, j, field(), ParticleSpec::massless()).unwrap()
}

#[test]
fn nonrelativistic_means_run_on_a_circle() {
    for j in [0u8, 1] {
        let cs = nr(c(1.4, 0.6), c(0.5, -2.0), j);
        let z1_0 = cs.z1.norm();
        let psi0 = evolution::psi0_of(cs.z1);
        let evo = EvolutionSpec::linspace(EvolutionMode::NonRelT, 1.0, psi0, 4.0 * std::f64::consts::PI, 100, 1).unwrap();
        let samples = evolution::mean_trajectory(&cs, &evo).unwrap();
        let a0 = samples[0].a1.norm();
        for s in &samples {
            assert!(s.a1.norm() <= z1_0 * (1.0 + 1e-14));
            assert!((s.a1.norm() - a0).abs() < 1e-12 * a0);
            assert!((s.norm - samples[0].norm).abs() < 1e-12 * samples[0].norm);
        }
        let fit = evolution::circle_fit(&cs, &samples).unwrap();
        assert!(fit.residual < 1e-10, "j {j}: {}", fit.residual);
    }
}

#[test]
fn type_one_centre_stays_inside_the_state_scale() {
    let cs = nr(c(3.0, 0.0), c(0.0, 1.5), 1);
    let (_, rc2, ..) = coherent::mean_r2_rc2(&cs).unwrap();
    let a2 = coherent::mean_a(&cs, 2).unwrap();
    let rc_mean = (2.0f64).sqrt() * a2.norm();
    assert!(rc_mean < (2.0f64).sqrt() * cs.z2.norm());
    assert!(rc_mean * rc_mean <= rc2);
}

#[test]
fn quasi_state_keeps_its_norm() {
    let cs = massless(c(2.0, 0.3), c(0.4, 1.1), 0);
    let evo = EvolutionSpec::linspace(EvolutionMode::QuasiCS, 1.0, 0.0, 30.0, 40, 1).unwrap();
    let samples = evolution::mean_trajectory(&cs, &evo).unwrap();
    for s in &samples {
        assert_eq!(s.norm, samples[0].norm);
    }
    let a1 = evolution::quasi_mean_a1(&cs, 0.0, 1).unwrap();
    let direct = coherent::mean_a(&cs, 1).unwrap();
    assert!((a1 - direct).norm() < 1e-12 * direct.norm());
    // dephasing can only shrink the mean amplitude
    for t in [5.0, 17.0, 60.0] {
        assert!(evolution::quasi_mean_a1(&cs, t, 1).unwrap().norm() <= a1.norm() * (1.0 + 1e-12));
    }
}

#[test]
fn branches_rotate_oppositely() {
    let cs = massless(c(2.5, 0.0), c(0.5, 0.5), 0);
    let t = 0.7;
    let p = evolution::quasi_mean_a1(&cs, t, 1).unwrap();
    let m = evolution::quasi_mean_a1(&cs, t, -1).unwrap();
    // the kernel weights are real, so the two branches are mirror images about z1
    let rp = p / cs.z1;
    let rm = m / cs.z1;
    assert!((rp - rm.conj()).norm() < 1e-12);
}

#[test]
fn spectral_gap_matches_direct_difference() {
    for n in [0.0, 1.0, 7.3, 100.0] {
        for (mass, sigma, eps) in [(0.0, 1, 1), (0.7, -1, 1), (3.0, 1, -1)] {
            let g = 1.3;
            let direct = evolution::pi0_spectral(n + 1.0, mass, g, sigma, eps) - evolution::pi0_spectral(n, mass, g, sigma, eps);
            let gap = evolution::omega_spectral(n, mass, g, sigma, eps);
            assert!((gap - direct).abs() < 1e-12 * gap, "n {n} M {mass}: {gap} vs {direct}");
        }
    }
}

#[test]
fn modes_are_tied_to_species() {
    let nr_state = nr(c(1.0, 0.0), c(1.0, 0.0), 0);
    let ml_state = massless(c(1.0, 0.0), c(1.0, 0.0), 0);
    let quasi = EvolutionSpec::linspace(EvolutionMode::QuasiCS, 1.0, 0.0, 1.0, 4, 1).unwrap();
    let nonrel = EvolutionSpec::linspace(EvolutionMode::NonRelT, 1.0, 0.0, 1.0, 4, 1).unwrap();
    let cone = EvolutionSpec::linspace(EvolutionMode::LightCone, 1.0, 0.0, 1.0, 4, 1).unwrap();
    assert!(matches!(evolution::mean_trajectory(&nr_state, &quasi), Err(Error::Mode(_))));
    assert!(matches!(evolution::mean_trajectory(&nr_state, &cone), Err(Error::Mode(_))));
    assert!(matches!(evolution::mean_trajectory(&ml_state, &nonrel), Err(Error::Mode(_))));
    assert!(matches!(evolution::quasi_mean_a1(&nr_state, 1.0, 1), Err(Error::Mode(_))));
}

#[test]
fn light_cone_means_run_on_a_circle() {
    let spec = ParticleSpec::new(Species::Rel3p1, 1.0, Some(1), 1, 1.5, 0.0).unwrap();
    let cs = CoherentState::new(c(-1.0, 0.8), c(1.2, 0.0), 0, field(), spec).unwrap();
    let omega = cs.field.gamma / (1.5 * 1.0);
    let evo = EvolutionSpec::linspace(EvolutionMode::LightCone, omega, evolution::psi0_of(cs.z1), 20.0, 80, 1).unwrap();
    let samples = evolution::mean_trajectory(&cs, &evo).unwrap();
    let fit = evolution::circle_fit(&cs, &samples).unwrap();
    assert!(fit.residual < 1e-10, "{}", fit.residual);
    assert!((fit.rate.abs() - omega).abs() < 1e-9, "{}", fit.rate);
}

#[test]
fn bad_time_grids_are_rejected() {
    assert!(EvolutionSpec::new(EvolutionMode::NonRelT, 1.0, 0.0, vec![0.0, 1.0, 1.0], 1).is_err());
    assert!(EvolutionSpec::new(EvolutionMode::NonRelT, -1.0, 0.0, vec![0.0, 1.0], 1).is_err());
    assert!(EvolutionSpec::linspace(EvolutionMode::NonRelT, 1.0, 0.0, 1.0, 1, 1).is_err());
}

proptest! {
    #[test]
    fn rotation_keeps_modulus(m in 0.0f64..50.0, psi0 in -7.0f64..7.0, w in 0.01f64..5.0, t in 0.0f64..100.0) {
        let z = evolution::z1_of_t(m, psi0, 1, w, t);
        prop_assert!((z.norm() - m).abs() <= 1e-13 * m.max(1.0));
        let zl = evolution::z1_of_xminus(m, psi0, w, t);
        prop_assert!((zl.norm() - m).abs() <= 1e-13 * m.max(1.0));
        if m > 1e-6 {
            let back = evolution::z1_of_t(m, evolution::psi0_of(evolution::z1_of_t(m, psi0, 1, w, 0.0)), 1, w, 0.0);
            prop_assert!((back - evolution::z1_of_t(m, psi0, 1, w, 0.0)).norm() < 1e-12 * m);
        }
    }
}
