use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use msfcs::classical::{self, ClassicalTrajectory};
use msfcs::Error;

fn orbit(r: f64, rc: f64, eps: i32) -> ClassicalTrajectory {
    ClassicalTrajectory::new(r, rc, 0.7, 0.3, 2.0, 0.4, -1.0, eps, 1.5, 1.2).unwrap()
}

#[test]
fn closed_form_is_periodic() {
    let tr = orbit(1.0, 2.5, 1);
    for t in [0.0, 0.37, 4.1] {
        let a = tr.state_at(t);
        let b = tr.state_at(t + tr.period());
        assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
        assert!((a.p1 - b.p1).abs() < 1e-12 && (a.p2 - b.p2).abs() < 1e-12);
    }
}

#[test]
fn closed_form_agrees_with_rk4() {
    for eps in [1, -1] {
        let tr = orbit(2.5, 1.0, eps);
        let n = 4000;
        let step = tr.period() / n as f64;
        let path = classical::integrate_lorentz(&tr.state_at(0.0), tr.gamma, eps, tr.period(), step).unwrap();
        let e0 = tr.gamma * tr.gamma * tr.r * tr.r;
        for (t, s) in &path {
            let exact = tr.state_at(*t);
            let err = (s.x - exact.x).hypot(s.y - exact.y).hypot(s.z - exact.z);
            assert!(err < 1e-9, "eps {eps} t {t}: {err}");
            let e = s.p1 * s.p1 + s.p2 * s.p2;
            assert!((e - e0).abs() < 1e-9 * e0);
        }
    }
}

#[test]
fn amplitudes_are_integrals_of_motion() {
    let tr = orbit(1.3, 0.8, -1);
    let w = tr.omega();
    let first = classical::invariants_of(&tr.state_at(0.0), tr.gamma, tr.eps, 0.35, tr.mass);
    for t in [0.5, 1.9, 7.3] {
        let inv = classical::invariants_of(&tr.state_at(t), tr.gamma, tr.eps, 0.35, tr.mass);
        let rot = Complex64::from_polar(1.0, w * t);
        assert!((inv.a1 * rot - first.a1).norm() < 1e-8, "t {t}");
        assert!((inv.a2 - first.a2).norm() < 1e-8, "t {t}");
        assert!((inv.lz - first.lz).abs() < 1e-8, "t {t}");
        assert!((inv.r - tr.r).abs() < 1e-12 && (inv.rc - tr.rc).abs() < 1e-12);
    }
}

#[test]
fn phase_space_point_round_trips() {
    let tr = orbit(0.9, 1.7, 1);
    let s = tr.state_at(0.0);
    let back = ClassicalTrajectory::from_state(&s, tr.gamma, tr.eps, tr.mass).unwrap();
    for t in [0.0, 1.0, 2.2] {
        let a = tr.state_at(t);
        let b = back.state_at(t);
        assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12 && (a.z - b.z).abs() < 1e-12);
    }
}

#[test]
fn orbit_type_matches_winding() {
    for (r, rc) in [(1.0, 2.5), (2.5, 1.0), (0.3, 0.31), (3.0, 0.01)] {
        for eps in [1, -1] {
            let tr = orbit(r, rc, eps);
            let pts: Vec<(f64, f64)> = (0..=2000)
                .map(|i| {
                    let s = tr.state_at(tr.period() * i as f64 / 2000.0);
                    (s.x, s.y)
                })
                .collect();
            let kind = classical::classify_orbit(r, rc).unwrap();
            // the sense of rotation follows eps, so only the magnitude is compared
            assert_eq!(classical::winding_number(&pts).unsigned_abs(), kind as u64, "R {r} Rc {rc} eps {eps}");
        }
    }
}

#[test]
fn equal_radii_are_ambiguous() {
    assert!(matches!(classical::classify_orbit(1.5, 1.5), Err(Error::AmbiguousOrbit)));
    assert!(classical::classify_orbit(-1.0, 1.0).is_err());
}

#[test]
fn light_cone_form_matches_time_form() {
    let tr = orbit(1.1, 0.6, -1);
    let lambda = (tr.p0 + tr.p3) / tr.mass;
    for xm in [-2.0, 0.0, 0.8, 5.5] {
        let p = classical::lightcone_trajectory(&tr, lambda, xm).unwrap();
        let (x, y, z) = classical::trajectory_at(&tr, p.t).unwrap();
        assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12 && (p.z - z).abs() < 1e-12, "x- {xm}");
        assert!((p.t - p.z - xm).abs() < 1e-12);
    }
    assert!(classical::lightcone_trajectory(&tr, lambda * 1.01, 0.0).is_err());
}

#[test]
fn half_period_point() {
    // unit orbit about the origin, started on the positive x axis
    let tr = ClassicalTrajectory::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 1, 1.0, 1.0).unwrap();
    let (x, y, z) = classical::trajectory_at(&tr, PI).unwrap();
    assert!((x + 1.0).abs() < 1e-15 && y.abs() < 1e-15 && z == 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_from_axis_is_bounded(
        r in 0.0f64..4.0, rc in 0.0f64..4.0, ac in 0.0f64..6.3, psi in 0.0f64..6.3, t in 0.0f64..50.0,
    ) {
        let tr = ClassicalTrajectory::new(r, rc, ac, psi, 1.3, 0.0, 0.0, 1, 0.9, 1.0).unwrap();
        let s = tr.state_at(t);
        let d = s.x.hypot(s.y);
        prop_assert!(d >= (r - rc).abs() - 1e-12 && d <= r + rc + 1e-12);
    }
}
