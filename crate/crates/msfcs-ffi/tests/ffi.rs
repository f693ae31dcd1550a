use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use msfcs::coherent::{self, CoherentState};
use msfcs::params::{FieldConfig, ParticleSpec};
use msfcs_ffi::*;
use num_complex::Complex64;

fn field() -> MsfcsField {
    MsfcsField {
        gamma: 1.0,
        eps: 1,
        flux_ratio: 0.3,
        sign_b: 1,
    }
}

fn spin_up() -> MsfcsParticle {
    MsfcsParticle {
        species: MSFCS_SPECIES_NR2P1_SPIN_UP,
        mass: 1.0,
        sigma: 0,
        branch: 1,
        p3: 0.0,
        lambda: 0.0,
    }
}

fn new_state(p: &MsfcsParticle, z1: (f64, f64), z2: (f64, f64), j: u32) -> (MsfcsStatus, *mut MsfcsState) {
    let mut out = ptr::null_mut();
    let st = unsafe { msfcs_state_new(&field(), p, z1.0, z1.1, z2.0, z2.1, j, &mut out) };
    (st, out)
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { msfcs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn observables_match_the_library() {
    let (st, h) = new_state(&spin_up(), (1.2, -0.4), (-2.0, 3.0), 0);
    assert_eq!(st, MsfcsStatus::Ok);
    let mut o = MsfcsObservables::default();
    assert_eq!(unsafe { msfcs_state_observables(h, &mut o) }, MsfcsStatus::Ok);

    let fc = FieldConfig::from_flux(1.0, 1, 0.3, 1).unwrap();
    let cs = CoherentState::new(
        Complex64::new(1.2, -0.4),
        Complex64::new(-2.0, 3.0),
        0,
        fc,
        ParticleSpec::nr_spin_up(1.0, 1),
    )
    .unwrap();
    let lib = coherent::observables(&cs).unwrap();
    assert_eq!(o.n1_mean, lib.n1_mean);
    assert_eq!(o.jz_mean, lib.jz_mean);
    assert_eq!(o.re_a2, lib.a2_mean.re);
    assert_eq!(o.var_xy, lib.var_xy);

    let mut u = MsfcsUncertainty::default();
    assert_eq!(unsafe { msfcs_state_uncertainty(h, &mut u) }, MsfcsStatus::Ok);
    assert!(u.ratio_p >= 1.0 - 1e-9 && u.ratio_l >= 1.0 - 1e-9);

    let mut d = -1.0;
    assert_eq!(unsafe { msfcs_state_density(h, 0.4, 6.0, &mut d) }, MsfcsStatus::Ok);
    assert!(d >= 0.0);
    unsafe { msfcs_state_free(h) };
}

#[test]
fn mean_at_follows_the_orbit() {
    let (_, h) = new_state(&spin_up(), (1.5, 0.5), (-1.0, 2.0), 1);
    let mut s0 = MsfcsSample::default();
    let mut s1 = MsfcsSample::default();
    let period = 2.0 * std::f64::consts::PI;
    unsafe {
        assert_eq!(msfcs_state_mean_at(h, MSFCS_MODE_NONREL_T, 1.0, 1, 0.0, &mut s0), MsfcsStatus::Ok);
        assert_eq!(msfcs_state_mean_at(h, MSFCS_MODE_NONREL_T, 1.0, 1, period, &mut s1), MsfcsStatus::Ok);
    }
    assert!((s0.x_mean - s1.x_mean).abs() < 1e-10 && (s0.y_mean - s1.y_mean).abs() < 1e-10);
    let st = unsafe { msfcs_state_mean_at(h, MSFCS_MODE_QUASI_CS, 1.0, 1, 0.0, &mut s0) };
    assert_eq!(st, MsfcsStatus::Mode);
    unsafe { msfcs_state_free(h) };
}

#[test]
fn bad_input_reports_codes_and_messages() {
    let mut p = spin_up();
    p.species = 42;
    let (st, h) = new_state(&p, (1.0, 0.0), (1.0, 0.0), 0);
    assert_eq!(st, MsfcsStatus::Config);
    assert!(h.is_null());
    assert!(last_error().contains("42"));

    let (st, _) = new_state(&spin_up(), (1.0, 0.0), (1.0, 0.0), 2);
    assert_eq!(st, MsfcsStatus::Config);

    let mut massless = spin_up();
    massless.species = MSFCS_SPECIES_MASSLESS2P1;
    let (st, _) = new_state(&massless, (1.0, 0.0), (1.0, 0.0), 0);
    assert_eq!(st, MsfcsStatus::Config, "nonzero mass must be rejected");

    let mut o = MsfcsObservables::default();
    assert_eq!(unsafe { msfcs_state_observables(ptr::null(), &mut o) }, MsfcsStatus::NullPointer);
    let mut out = ptr::null_mut();
    let st = unsafe { msfcs_state_new(ptr::null(), &spin_up(), 1.0, 0.0, 1.0, 0.0, 0, &mut out) };
    assert_eq!(st, MsfcsStatus::NullPointer);
    unsafe { msfcs_state_free(ptr::null_mut()) };
}

#[test]
fn scalar_helpers() {
    let (mut l0, mut mu, mut th) = (0i64, 0.0, 0i32);
    assert_eq!(unsafe { msfcs_decompose_flux(-0.3, 1, &mut l0, &mut mu, &mut th) }, MsfcsStatus::Ok);
    assert_eq!((l0, th), (-1, -1));
    assert!((mu - 0.7).abs() < 1e-15);
    assert_eq!(unsafe { msfcs_decompose_flux(f64::NAN, 1, &mut l0, &mut mu, &mut th) }, MsfcsStatus::Domain);

    let w = msfcs_omega_spectral(0.0, 0.0, 2.0, 1, 1);
    assert!((w - 2.0).abs() < 1e-15);
    assert!(msfcs_omega_spectral(-1.0, 0.0, 2.0, 1, 1).is_nan());
    let v = unsafe { CStr::from_ptr(msfcs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("msfcs.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct MsfcsState MsfcsState;",
        "msfcs_state_new",
        "msfcs_state_free",
        "msfcs_state_observables",
        "msfcs_last_error_message",
        "MSFCS_STATUS_PANIC",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

/// Compiles a C client against the header and the static library when a C compiler exists.
#[test]
fn c_client_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libmsfcs_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to build");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C client exited with {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let n1: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    assert!((n1 - 4.0).abs() < 0.1, "n1 mean {n1}");
}
