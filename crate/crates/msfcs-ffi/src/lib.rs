//! C ABI over the `msfcs` library.
//!
//! States live behind an opaque [`MsfcsState`] handle created by [`msfcs_state_new`] and
//! released with [`msfcs_state_free`]. Every fallible call returns an [`MsfcsStatus`]; the text
//! of the most recent failure on the calling thread is available through
//! [`msfcs_last_error_message`]. Panics are caught at the boundary and reported as
//! `MSFCS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use msfcs::coherent::{self, CoherentState};
use msfcs::evolution::{self, EvolutionMode, EvolutionSpec};
use msfcs::params::{self, FieldConfig, ParticleSpec, Species};
use msfcs::Error;

/// Result codes. `MSFCS_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsfcsStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Domain = 3,
    Truncation = 4,
    Quadrature = 5,
    Regime = 6,
    AmbiguousOrbit = 7,
    Degenerate = 8,
    Invariant = 9,
    Mode = 10,
    Sampling = 11,
    Io = 12,
    Panic = 13,
}

pub const MSFCS_SPECIES_SPINLESS: u32 = 0;
pub const MSFCS_SPECIES_NR2P1_SPIN_UP: u32 = 1;
pub const MSFCS_SPECIES_NR2P1_SPIN_DOWN: u32 = 2;
pub const MSFCS_SPECIES_NR3P1: u32 = 3;
pub const MSFCS_SPECIES_REL3P1: u32 = 4;
pub const MSFCS_SPECIES_REL2P1_MASSIVE: u32 = 5;
pub const MSFCS_SPECIES_MASSLESS2P1: u32 = 6;

pub const MSFCS_MODE_NONREL_T: u32 = 0;
pub const MSFCS_MODE_LIGHT_CONE: u32 = 1;
pub const MSFCS_MODE_QUASI_CS: u32 = 2;

/// Field parameters; the flux is given as a signed ratio to the flux quantum.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsfcsField {
    pub gamma: f64,
    pub eps: i32,
    pub flux_ratio: f64,
    pub sign_b: i32,
}

/// Particle parameters. `sigma = 0` selects the value implied by the species.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsfcsParticle {
    /// One of the `MSFCS_SPECIES_*` constants.
    pub species: u32,
    pub mass: f64,
    pub sigma: i32,
    pub branch: i32,
    pub p3: f64,
    pub lambda: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MsfcsObservables {
    pub norm: f64,
    pub norm_err: f64,
    pub n1_mean: f64,
    pub n2_mean: f64,
    pub re_a1: f64,
    pub im_a1: f64,
    pub re_a2: f64,
    pub im_a2: f64,
    pub x_mean: f64,
    pub y_mean: f64,
    pub r2_mean: f64,
    pub rc2_mean: f64,
    pub r_mean: f64,
    pub rc_mean: f64,
    pub jz_mean: f64,
    pub var_n1: f64,
    pub var_n2: f64,
    pub var_xy: f64,
    pub d_offset: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MsfcsUncertainty {
    pub product_p: f64,
    pub bound_p: f64,
    pub ratio_p: f64,
    pub product_l: f64,
    pub bound_l: f64,
    pub ratio_l: f64,
}

/// Mean position and `a1` at one evolution time.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MsfcsSample {
    pub time: f64,
    pub x_mean: f64,
    pub y_mean: f64,
    pub re_a1: f64,
    pub im_a1: f64,
    pub norm: f64,
}

/// Opaque coherent-state handle.
pub struct MsfcsState {
    cs: CoherentState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MsfcsStatus {
    match e {
        Error::Domain(_) => MsfcsStatus::Domain,
        Error::Truncation { .. } => MsfcsStatus::Truncation,
        Error::Quadrature { .. } => MsfcsStatus::Quadrature,
        Error::Regime(_) => MsfcsStatus::Regime,
        Error::AmbiguousOrbit => MsfcsStatus::AmbiguousOrbit,
        Error::Degenerate(_) => MsfcsStatus::Degenerate,
        Error::Invariant { .. } => MsfcsStatus::Invariant,
        Error::Mode(_) => MsfcsStatus::Mode,
        Error::Sampling(_) => MsfcsStatus::Sampling,
        Error::Config(_) => MsfcsStatus::Config,
        Error::Io(_) => MsfcsStatus::Io,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (MsfcsStatus, String)>) -> MsfcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MsfcsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside msfcs".into());
            MsfcsStatus::Panic
        }
    }
}

fn lib<T>(r: msfcs::Result<T>) -> Result<T, (MsfcsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (MsfcsStatus, String) {
    (MsfcsStatus::NullPointer, format!("{what} is null"))
}

fn species_of(code: u32) -> Option<Species> {
    Species::ALL.get(code as usize).copied()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length without the terminator, or 0 when there is none.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn msfcs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn msfcs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Splits a signed flux ratio into integer part, mantissa and flux sign.
///
/// # Safety
/// Output pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn msfcs_decompose_flux(
    flux_ratio: f64,
    sign_b: i32,
    l0: *mut i64,
    mu: *mut f64,
    vartheta: *mut i32,
) -> MsfcsStatus {
    guard(|| {
        if l0.is_null() || mu.is_null() || vartheta.is_null() {
            return Err(null("output pointer"));
        }
        let (a, b, c) = lib(params::decompose_flux(flux_ratio, sign_b))?;
        *l0 = a;
        *mu = b;
        *vartheta = c;
        Ok(())
    })
}

/// Rotation frequency between neighbouring levels `n1` and `n1 + 1`; NaN on invalid input.
#[no_mangle]
pub extern "C" fn msfcs_omega_spectral(n1: f64, mass: f64, gamma: f64, sigma: i32, eps: i32) -> f64 {
    if !(n1 >= 0.0 && mass >= 0.0 && gamma > 0.0) {
        return f64::NAN;
    }
    evolution::omega_spectral(n1, mass, gamma, sigma, eps)
}

/// Creates a coherent state of type `j` (0 or 1). On success `*out` owns a new handle.
///
/// # Safety
/// `field`, `particle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn msfcs_state_new(
    field: *const MsfcsField,
    particle: *const MsfcsParticle,
    re_z1: f64,
    im_z1: f64,
    re_z2: f64,
    im_z2: f64,
    j: u32,
    out: *mut *mut MsfcsState,
) -> MsfcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        let p = particle.as_ref().ok_or_else(|| null("particle"))?;
        let species = species_of(p.species)
            .ok_or_else(|| (MsfcsStatus::Config, format!("unknown species code {}", p.species)))?;
        if j > 1 {
            return Err((MsfcsStatus::Config, format!("j must be 0 or 1, got {j}")));
        }
        let fc = lib(FieldConfig::from_flux(f.gamma, f.eps, f.flux_ratio, f.sign_b))?;
        let sigma = (p.sigma != 0).then_some(p.sigma);
        let spec = lib(ParticleSpec::new(species, p.mass, sigma, p.branch, p.lambda, p.p3))?;
        let cs = lib(CoherentState::new(
            Complex64::new(re_z1, im_z1),
            Complex64::new(re_z2, im_z2),
            j as u8,
            fc,
            spec,
        ))?;
        *out = Box::into_raw(Box::new(MsfcsState { cs }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `state` must be null or a handle from [`msfcs_state_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn msfcs_state_free(state: *mut MsfcsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn msfcs_state_observables(state: *const MsfcsState, out: *mut MsfcsObservables) -> MsfcsStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let o = lib(coherent::observables(&s.cs))?;
        *out = MsfcsObservables {
            norm: o.norm.value.re,
            norm_err: o.norm.abs_err,
            n1_mean: o.n1_mean,
            n2_mean: o.n2_mean,
            re_a1: o.a1_mean.re,
            im_a1: o.a1_mean.im,
            re_a2: o.a2_mean.re,
            im_a2: o.a2_mean.im,
            x_mean: o.x_mean,
            y_mean: o.y_mean,
            r2_mean: o.r2_mean,
            rc2_mean: o.rc2_mean,
            r_mean: o.r_mean,
            rc_mean: o.rc_mean,
            jz_mean: o.jz_mean,
            var_n1: o.var_n1,
            var_n2: o.var_n2,
            var_xy: o.var_xy,
            d_offset: o.d_offset,
        };
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn msfcs_state_uncertainty(state: *const MsfcsState, out: *mut MsfcsUncertainty) -> MsfcsStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let u = lib(coherent::uncertainty_products(&s.cs))?;
        *out = MsfcsUncertainty {
            product_p: u.product_p,
            bound_p: u.bound_p,
            ratio_p: u.ratio_p,
            product_l: u.product_l,
            bound_l: u.bound_l,
            ratio_l: u.ratio_l,
        };
        Ok(())
    })
}

/// Probability density per `d rho d phi` at `(rho, phi)`, with `rho = gamma r^2 / 2`.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn msfcs_state_density(state: *const MsfcsState, phi: f64, rho: f64, out: *mut f64) -> MsfcsStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lib(coherent::density(&s.cs, phi, rho, None))?;
        Ok(())
    })
}

/// Means at time `t` under one of the `MSFCS_MODE_*` evolutions. `omega` is ignored by the
/// quasi-coherent mode.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn msfcs_state_mean_at(
    state: *const MsfcsState,
    mode: u32,
    omega: f64,
    branch: i32,
    t: f64,
    out: *mut MsfcsSample,
) -> MsfcsStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let mode = match mode {
            MSFCS_MODE_NONREL_T => EvolutionMode::NonRelT,
            MSFCS_MODE_LIGHT_CONE => EvolutionMode::LightCone,
            MSFCS_MODE_QUASI_CS => EvolutionMode::QuasiCS,
            m => return Err((MsfcsStatus::Config, format!("unknown mode code {m}"))),
        };
        let omega = if mode == EvolutionMode::QuasiCS { 1.0 } else { omega };
        let evo = lib(EvolutionSpec::new(mode, omega, evolution::psi0_of(s.cs.z1), vec![t], branch))?;
        let sample = lib(evolution::mean_trajectory(&s.cs, &evo))?[0];
        *out = MsfcsSample {
            time: sample.time,
            x_mean: sample.x_mean,
            y_mean: sample.y_mean,
            re_a1: sample.a1.re,
            im_a1: sample.a1.im,
            norm: sample.norm,
        };
        Ok(())
    })
}
