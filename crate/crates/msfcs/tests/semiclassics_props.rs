use num_complex::Complex64;

use msfcs::coherent::CoherentState;
use msfcs::params::{FieldConfig, ParticleSpec};
use msfcs::semiclassics::{self, ClaimKey, Regime, ReportStatus};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn state(z1: Complex64, z2: Complex64, j: u8, mu: f64) -> CoherentState {
    let field = FieldConfig::new(1.0, 1, 1, 0, mu).unwrap();
    CoherentState::new(z1, z2, j, field, ParticleSpec::nr_spin_up(1.0, 1)).unwrap()
}

#[test]
fn diagonal_offset_on_the_diagonal() {
    let cs = state(c(30.0, 0.0), c(0.0, 30.0), 1, 0.4);
    let rep = semiclassics::compare_one(&cs, ClaimKey::DOffset).unwrap();
    assert_eq!(rep.regime, Regime::NearDiag);
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn number_spread_far_below_the_diagonal() {
    let cs = state(c(5.0, 0.0), c(25.0, 0.0), 0, 0.4);
    let rep = semiclassics::compare_one(&cs, ClaimKey::VarN).unwrap();
    assert_eq!(rep.regime, Regime::FarBelowDiag);
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn quantum_limit_for_tiny_product() {
    let cs = state(c(1e-2, 0.0), c(0.0, 1e-2), 1, 0.4);
    let rep = semiclassics::compare_one(&cs, ClaimKey::QuantumLimit).unwrap();
    assert_eq!(rep.regime, Regime::Quantum);
    assert!(rep.passed(), "{rep:?}");
    assert!(rep.abs_diff < 1e-6 * rep.exact.abs().max(1.0));
}

#[test]
fn every_claim_reported_once() {
    let field = FieldConfig::new(1.0, 1, 1, 0, 0.3).unwrap();
    let reps = semiclassics::compare_all(&field, &ParticleSpec::nr_spin_up(1.0, 1), c(12.0, 0.0), c(12.0, 0.0), 0).unwrap();
    assert_eq!(reps.len(), ClaimKey::ALL.len());
    for (rep, key) in reps.iter().zip(ClaimKey::ALL) {
        assert_eq!(rep.key, key);
        assert_ne!(rep.status, ReportStatus::Fail, "{rep:?}");
    }
}

#[test]
fn mixed_sector_species_have_no_expansion() {
    let field = FieldConfig::new(1.0, 1, 1, 0, 0.3).unwrap();
    let reps = semiclassics::compare_all(&field, &ParticleSpec::massless(), c(12.0, 0.0), c(12.0, 0.0), 0).unwrap();
    assert!(reps.iter().all(|r| r.status == ReportStatus::NotApplicable));
    let cs = CoherentState::new(c(12.0, 0.0), c(12.0, 0.0), 0, field, ParticleSpec::massless()).unwrap();
    assert!(semiclassics::compare_one(&cs, ClaimKey::DOffset).is_err());
}

#[test]
fn near_diagonal_error_shrinks_with_size() {
    let mut last = f64::INFINITY;
    for r in [10.0, 15.0, 20.0, 30.0, 40.0] {
        let cs = state(c(r, 0.0), c(r, 0.0), 0, 0.3);
        let rep = semiclassics::compare_one(&cs, ClaimKey::NearNCorrections).unwrap();
        assert!(rep.passed(), "r {r}: {rep:?}");
        assert!(rep.abs_diff < last, "r {r}: {} after {last}", rep.abs_diff);
        last = rep.abs_diff;
    }
}

#[test]
fn regime_boundaries() {
    assert_eq!(semiclassics::classify_regime(0.5, 2.0), Regime::Quantum);
    assert_eq!(semiclassics::classify_regime(5.0, 8.0), Regime::FarBelowDiag);
    assert_eq!(semiclassics::classify_regime(8.0, 5.0), Regime::FarAboveDiag);
    assert_eq!(semiclassics::classify_regime(10.0, 10.25), Regime::NearDiag);
    assert_eq!(semiclassics::classify_regime(10.0, 11.0), Regime::Intermediate);
}
