//! Instantaneous coherent states: norms, means, variances, uncertainty products, density.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::pi0_spectral;
use crate::params::{FieldConfig, ParticleSpec, Species};
use crate::qseries::{
    self, kernel_sum, lead_term_ln, Growth, IndexSet, Kernel, ScaledSum, SeriesPath, SeriesValue,
    Weight,
};
use crate::specfun::ln_bessel_i_scaled;

/// Envelope used for `|I_{m+a,m}(rho)|` in the density tail bound.
pub const LAGUERRE_ENVELOPE: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentState {
    pub z1: Complex64,
    pub z2: Complex64,
    pub j: u8,
    pub field: FieldConfig,
    pub spec: ParticleSpec,
}

impl CoherentState {
    pub fn new(z1: Complex64, z2: Complex64, j: u8, field: FieldConfig, spec: ParticleSpec) -> Result<Self> {
        if j > 1 {
            return Err(Error::domain(format!("trajectory type must be 0 or 1, got {j}")));
        }
        for z in [z1, z2] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::domain("z1, z2 must be finite"));
            }
        }
        Ok(Self {
            z1,
            z2,
            j,
            field,
            spec,
        })
    }

    pub fn with_z1(&self, z1: Complex64) -> Self {
        Self { z1, ..*self }
    }

    /// Kernel arguments `(u, v)`: `(|z1|, |z2|)` for `j = 0`, `(|z2|, |z1|)` for `j = 1`.
    pub fn kernel_uv(&self) -> (f64, f64) {
        if self.j == 0 {
            (self.z1.norm(), self.z2.norm())
        } else {
            (self.z2.norm(), self.z1.norm())
        }
    }

    /// Index sets entering the norm (two for the massless species).
    pub fn sectors(&self) -> Result<Vec<IndexSet>> {
        self.spec
            .kernel_sigmas()
            .into_iter()
            .map(|s| IndexSet::from_field(&self.field, self.j, s))
            .collect()
    }

    /// Spin value used in the `R^2` and `J_z` relations.
    pub fn radius_sigma(&self) -> i32 {
        self.spec.radius_sigma(&self.field)
    }
}

/// Means and spreads of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSet {
    pub norm: SeriesValue,
    pub n1_mean: f64,
    pub n2_mean: f64,
    pub a1_mean: Complex64,
    pub a2_mean: Complex64,
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

fn cre(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Weight of a moment before the species factor is applied.
pub(crate) enum Moment<'a> {
    One,
    /// Complex weight in `n1` (phase factors).
    N1c(&'a (dyn Fn(f64) -> Complex64 + Sync)),
    N1(&'a (dyn Fn(f64) -> f64 + Sync)),
    N2(&'a (dyn Fn(f64) -> f64 + Sync)),
    Pair(&'a (dyn Fn(f64, f64) -> f64 + Sync)),
}

/// `sum_sigma e^{-|U|-|V|} sum w(n1,n2) [Pi0(n1 + pi_shift) + M] U^{n1} V^{n2} / (n1! n2!)`;
/// the bracket is present only for the massive 2+1 species.
pub(crate) fn moment(
    cs: &CoherentState,
    kernel: Kernel,
    big_u: Complex64,
    big_v: Complex64,
    m: Moment,
    degree: u32,
    pi_shift: f64,
) -> Result<ScaledSum> {
    let mut acc = ScaledSum::zero();
    let massive = cs.spec.has_pi0_weight();
    let (mass, gamma, eps) = (cs.spec.mass, cs.field.gamma, cs.field.eps);
    for idx in cs.sectors()? {
        let sigma = idx.sigma;
        let pw = move |n1: f64| {
            if massive {
                pi0_spectral(n1 + pi_shift, mass, gamma, sigma, eps) + mass
            } else {
                1.0
            }
        };
        let deg = if massive { degree + 1 } else { degree };
        let growth = if deg == 0 {
            Growth::Bounded
        } else {
            Growth::Poly(deg)
        };
        type F1<'b> = Box<dyn Fn(f64) -> Complex64 + Sync + 'b>;
        type F2<'b> = Box<dyn Fn(f64, f64) -> Complex64 + Sync + 'b>;
        let f1: F1;
        let fp: F2;
        let w = match (&m, massive) {
            (Moment::One, false) => Weight::One,
            (Moment::One, true) => {
                f1 = Box::new(move |n1: f64| cre(pw(n1)));
                Weight::N1(&*f1)
            }
            (Moment::N1c(f), _) => {
                f1 = Box::new(move |n1: f64| f(n1) * pw(n1));
                Weight::N1(&*f1)
            }
            (Moment::N1(f), _) => {
                f1 = Box::new(move |n1: f64| cre(f(n1) * pw(n1)));
                Weight::N1(&*f1)
            }
            (Moment::N2(f), false) => {
                f1 = Box::new(move |n2: f64| cre(f(n2)));
                Weight::N2(&*f1)
            }
            (Moment::N2(f), true) => {
                fp = Box::new(move |n1: f64, n2: f64| cre(f(n2) * pw(n1)));
                Weight::Pair(&*fp)
            }
            (Moment::Pair(f), _) => {
                fp = Box::new(move |n1: f64, n2: f64| cre(f(n1, n2) * pw(n1)));
                Weight::Pair(&*fp)
            }
        };
        let s = kernel_sum(idx.alpha(), idx.j, kernel, big_u, big_v, &w, growth)?;
        acc = acc.add(&s);
    }
    Ok(acc)
}

fn diag_args(cs: &CoherentState) -> (Complex64, Complex64) {
    (cre(cs.z1.norm_sqr()), cre(cs.z2.norm_sqr()))
}

pub(crate) fn diag_moment(cs: &CoherentState, kernel: Kernel, m: Moment, degree: u32, pi_shift: f64) -> Result<ScaledSum> {
    let (u, v) = diag_args(cs);
    moment(cs, kernel, u, v, m, degree, pi_shift)
}

pub(crate) fn norm_sum(cs: &CoherentState) -> Result<ScaledSum> {
    let s = diag_moment(cs, Kernel::Full, Moment::One, 0, 0.0)?;
    if s.is_zero() {
        return Err(Error::Degenerate(
            "norm vanishes: every term of the state carries a zero factor".into(),
        ));
    }
    Ok(s)
}

/// Norm kernel (matrix element of the identity) in scaled form.
///
/// Diagonal: `e^{-|z1|^2-|z2|^2} R`. Off-diagonal: `e^{-|z1* z1'| - |z2* z2'|} <z|z'>` with the
/// complex arguments `z1* z1'`, `z2* z2'`. States of different type `j` are orthogonal.
pub fn norm_kernel(cs: &CoherentState, other: Option<&CoherentState>) -> Result<SeriesValue> {
    let other = match other {
        None => return Ok(norm_sum(cs)?.to_series(SeriesPath::DirectSeries)),
        Some(o) => o,
    };
    if other.field != cs.field || other.spec != cs.spec {
        return Err(Error::Mode("matrix elements need a common field and species".into()));
    }
    if other.j != cs.j {
        return Ok(SeriesValue {
            value: cre(0.0),
            abs_err: 0.0,
            n_terms: 0,
            path: SeriesPath::ClosedForm,
        });
    }
    let u = cs.z1.conj() * other.z1;
    let v = cs.z2.conj() * other.z2;
    Ok(moment(cs, Kernel::Full, u, v, Moment::One, 0, 0.0)?.to_series(SeriesPath::DirectSeries))
}

pub(crate) fn lowering_kernels(j: u8) -> (Kernel, Kernel) {
    if j == 0 {
        (Kernel::Minus, Kernel::Full)
    } else {
        (Kernel::Full, Kernel::Minus)
    }
}

/// Off-diagonal element `<cs|a_k|other>` in the same scaled units as [`norm_kernel`].
pub fn matrix_element_a(cs: &CoherentState, other: &CoherentState, k: u8) -> Result<SeriesValue> {
    if other.field != cs.field || other.spec != cs.spec || other.j != cs.j {
        return Err(Error::Mode(
            "a_k matrix elements are assembled for a common field, species and type j".into(),
        ));
    }
    let u = cs.z1.conj() * other.z1;
    let v = cs.z2.conj() * other.z2;
    let (k1, k2) = lowering_kernels(cs.j);
    let (kernel, shift, z) = match k {
        1 => (k1, 1.0, other.z1),
        2 => (k2, 0.0, other.z2),
        _ => return Err(Error::domain("k must be 1 or 2")),
    };
    let s = moment(cs, kernel, u, v, Moment::One, 0, shift)?;
    Ok(s.scale(z).to_series(SeriesPath::DirectSeries))
}

/// `N_k` mean by the weighted double series.
pub fn mean_n(cs: &CoherentState, k: u8) -> Result<f64> {
    let norm = norm_sum(cs)?;
    let id = |n: f64| n;
    let s = match k {
        1 => diag_moment(cs, Kernel::Full, Moment::N1(&id), 1, 0.0)?,
        2 => diag_moment(cs, Kernel::Full, Moment::N2(&id), 1, 0.0)?,
        _ => return Err(Error::domain("k must be 1 or 2")),
    };
    Ok(s.ratio(&norm).re)
}

/// `a_k` mean by the weighted double series.
pub fn mean_a(cs: &CoherentState, k: u8) -> Result<Complex64> {
    let norm = norm_sum(cs)?;
    let (k1, k2) = lowering_kernels(cs.j);
    match k {
        1 => {
            let s = diag_moment(cs, k1, Moment::One, 0, 1.0)?;
            Ok(cs.z1 * s.ratio(&norm).re)
        }
        2 => {
            let s = diag_moment(cs, k2, Moment::One, 0, 0.0)?;
            Ok(cs.z2 * s.ratio(&norm).re)
        }
        _ => Err(Error::domain("k must be 1 or 2")),
    }
}

/// Closed-form route: per-sector kernel values and ratio functions.
struct ClosedSector {
    weight: f64,
    u2_slot: f64,
    v2_slot: f64,
    delta: f64,
}

fn closed_sectors(cs: &CoherentState) -> Result<Vec<ClosedSector>> {
    if cs.spec.has_pi0_weight() {
        return Err(Error::Mode(
            "the massive 2+1 weight has no closed-form ratio route".into(),
        ));
    }
    let (u, v) = cs.kernel_uv();
    if !(u > 0.0 && v > 0.0) {
        return Err(Error::domain("closed-form route needs z1, z2 != 0"));
    }
    let mut out = Vec::new();
    let mut ln_ref = f64::NEG_INFINITY;
    let mut raw = Vec::new();
    for idx in cs.sectors()? {
        let a = idx.alpha();
        let q = qseries::q_full_scaled(a, u, v)?;
        let ln_q = q.re().ln();
        let ln_q = if ln_q.is_finite() {
            ln_q
        } else {
            // underflowed scaled value: rebuild its log from the leading term and Delta
            lead_term_ln(a, u, v) - (1.0 - qseries::delta_ratio(a, u, v)?).ln()
        };
        ln_ref = ln_ref.max(ln_q);
        let delta = qseries::delta_ratio(a, u, v)?;
        // d/dv Q_a = 2v [Q_a + (v/u)^{a-1} I_{a-1}(2uv)], I_{a-1} = I_{a+1} + (2a/x) I_a
        let x = 2.0 * u * v;
        let base = -(u - v) * (u - v) + (a - 1.0) * (v / u).ln();
        let i_next = (base + ln_bessel_i_scaled(a + 1.0, x)).exp();
        let i_same = if a == 0.0 {
            0.0
        } else {
            (2.0 * a / x) * (base + ln_bessel_i_scaled(a, x)).exp()
        };
        let extra = (i_next + i_same) / (ln_q).exp();
        raw.push((ln_q, u * u * delta, v * v * (1.0 + extra), delta));
    }
    for (ln_q, n_u, n_v, delta) in raw {
        out.push(ClosedSector {
            weight: (ln_q - ln_ref).exp(),
            u2_slot: n_u,
            v2_slot: n_v,
            delta,
        });
    }
    Ok(out)
}

/// `N_k` mean from `Delta_alpha` and the kernel derivative identities (mixture over sectors
/// for the massless species).
pub fn mean_n_closed(cs: &CoherentState, k: u8) -> Result<f64> {
    let secs = closed_sectors(cs)?;
    let in_u_slot = (k == 1) == (cs.j == 0);
    let (num, den) = secs.iter().fold((0.0, 0.0), |(n, d), s| {
        let val = if in_u_slot { s.u2_slot } else { s.v2_slot };
        (n + s.weight * val, d + s.weight)
    });
    Ok(num / den)
}

/// `a_k` mean from `Delta_alpha` (`j=0`: `a1 = z1 Delta`, `a2 = z2`; `j=1`: `a1 = z1`, `a2 = z2 Delta`).
pub fn mean_a_closed(cs: &CoherentState, k: u8) -> Result<Complex64> {
    let secs = closed_sectors(cs)?;
    let reduced = (k == 1) == (cs.j == 0);
    let (num, den) = secs.iter().fold((0.0, 0.0), |(n, d), s| {
        let val = if reduced { s.delta } else { 1.0 };
        (n + s.weight * val, d + s.weight)
    });
    let z = if k == 1 { cs.z1 } else { cs.z2 };
    Ok(z * (num / den))
}

/// `(x_mean, y_mean)` from `x - i eps y = sqrt(2/gamma) (a2 - a1*)`.
pub fn mean_position(cs: &CoherentState) -> Result<(f64, f64)> {
    let a1 = mean_a(cs, 1)?;
    let a2 = mean_a(cs, 2)?;
    Ok(decode_position(cs, a1, a2))
}

pub(crate) fn decode_position(cs: &CoherentState, a1: Complex64, a2: Complex64) -> (f64, f64) {
    let w = (2.0 / cs.field.gamma).sqrt() * (a2 - a1.conj());
    (w.re, -(cs.field.eps as f64) * w.im)
}

/// Radius relations: `(R2_mean, Rc2_mean, R_mean, Rc_mean, Jz_mean, d_offset)`.
pub fn mean_r2_rc2(cs: &CoherentState) -> Result<(f64, f64, f64, f64, f64, f64)> {
    let n1 = mean_n(cs, 1)?;
    let n2 = mean_n(cs, 2)?;
    let a1 = mean_a(cs, 1)?;
    let a2 = mean_a(cs, 2)?;
    Ok(radius_block(cs, n1, n2, a1, a2))
}

fn radius_block(cs: &CoherentState, n1: f64, n2: f64, a1: Complex64, a2: Complex64) -> (f64, f64, f64, f64, f64, f64) {
    let g = cs.field.gamma;
    let eps = cs.field.eps as f64;
    let sigma = cs.radius_sigma() as f64;
    let r2 = (2.0 * n1 + 1.0 - sigma * eps) / g;
    let rc2 = (2.0 * n2 + 1.0) / g;
    let s = (2.0 / g).sqrt();
    let jz = eps * (cs.field.flux() + n2 - n1 + 0.5 * sigma * eps);
    (r2, rc2, s * a1.norm(), s * a2.norm(), jz, r2.sqrt() - rc2.sqrt())
}

fn clamp_variance(key: &'static str, v: f64, scale: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -1e-9 * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Invariant {
            key,
            detail: format!("negative variance {v:e}"),
        })
    }
}

/// Centered second moment of `N_k`.
fn var_n(cs: &CoherentState, norm: &ScaledSum, k: u8, mean: f64) -> Result<f64> {
    let sq = move |n: f64| (n - mean) * (n - mean);
    let s = if k == 1 {
        diag_moment(cs, Kernel::Full, Moment::N1(&sq), 2, 0.0)?
    } else {
        diag_moment(cs, Kernel::Full, Moment::N2(&sq), 2, 0.0)?
    };
    clamp_variance("var_n", s.ratio(norm).re, mean * mean)
}

/// `(Var N1, Var N2, Var x + Var y)`.
pub fn variances(cs: &CoherentState) -> Result<(f64, f64, f64)> {
    let norm = norm_sum(cs)?;
    let n1 = mean_n(cs, 1)?;
    let n2 = mean_n(cs, 2)?;
    let a1 = mean_a(cs, 1)?;
    let a2 = mean_a(cs, 2)?;
    let v1 = var_n(cs, &norm, 1, n1)?;
    let v2 = var_n(cs, &norm, 2, n2)?;
    let vxy = var_xy(cs, n1, n2, a1, a2)?;
    Ok((v1, v2, vxy))
}

fn var_xy(cs: &CoherentState, n1: f64, n2: f64, a1: Complex64, a2: Complex64) -> Result<f64> {
    let raw = (2.0 / cs.field.gamma) * (n1 + n2 + 1.0 - a1.norm_sqr() - a2.norm_sqr());
    clamp_variance("var_xy", raw, n1 + n2)
}

/// `Var(N1 - N2)`, the spread of `J_z`.
pub fn var_lz(cs: &CoherentState) -> Result<f64> {
    let norm = norm_sum(cs)?;
    let n1 = mean_n(cs, 1)?;
    let n2 = mean_n(cs, 2)?;
    let c = n1 - n2;
    let sq = move |a: f64, b: f64| (a - b - c) * (a - b - c);
    let s = diag_moment(cs, Kernel::Full, Moment::Pair(&sq), 2, 0.0)?;
    clamp_variance("var_lz", s.ratio(&norm).re, n1 * n1 + n2 * n2)
}

/// All observables of one state by the weighted double series.
pub fn observables(cs: &CoherentState) -> Result<ObservableSet> {
    let norm = norm_sum(cs)?;
    let n1 = mean_n(cs, 1)?;
    let n2 = mean_n(cs, 2)?;
    let a1 = mean_a(cs, 1)?;
    let a2 = mean_a(cs, 2)?;
    let (x, y) = decode_position(cs, a1, a2);
    let (r2, rc2, r, rc, jz, d) = radius_block(cs, n1, n2, a1, a2);
    let v1 = var_n(cs, &norm, 1, n1)?;
    let v2 = var_n(cs, &norm, 2, n2)?;
    let vxy = var_xy(cs, n1, n2, a1, a2)?;
    Ok(ObservableSet {
        norm: norm.to_series(SeriesPath::DirectSeries),
        n1_mean: n1,
        n2_mean: n2,
        a1_mean: a1,
        a2_mean: a2,
        x_mean: x,
        y_mean: y,
        r2_mean: r2,
        rc2_mean: rc2,
        r_mean: r,
        rc_mean: rc,
        jz_mean: jz,
        var_n1: v1,
        var_n2: v2,
        var_xy: vxy,
        d_offset: d,
    })
}

/// Robertson-type products for `(P_perp^2, x+y)` and `(L_z, x+y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub var_p2: f64,
    pub var_xy: f64,
    pub var_lz: f64,
    /// `Var(P_perp^2) (Var x + Var y)`.
    pub product_p: f64,
    /// `|<P1 + i eps P2>|^2 = 2 gamma |a1|^2`.
    pub bound_p: f64,
    /// `product_p / (4 bound_p)`.
    pub ratio_p: f64,
    /// `Var(L_z) (Var x + Var y)`.
    pub product_l: f64,
    /// `|<x - i eps y>|^2 / 4`.
    pub bound_l: f64,
    /// `product_l / bound_l`.
    pub ratio_l: f64,
}

pub fn uncertainty_products(cs: &CoherentState) -> Result<UncertaintyReport> {
    let obs = observables(cs)?;
    let g = cs.field.gamma;
    let vl = var_lz(cs)?;
    let var_p2 = 4.0 * g * g * obs.var_n1;
    let product_p = var_p2 * obs.var_xy;
    let bound_p = 2.0 * g * obs.a1_mean.norm_sqr();
    let product_l = vl * obs.var_xy;
    let bound_l = 0.25 * (obs.x_mean * obs.x_mean + obs.y_mean * obs.y_mean);
    for (key, p, b) in [("robertson_p", product_p, bound_p), ("robertson_l", product_l, bound_l)] {
        if p < b * (1.0 - 1e-9) {
            return Err(Error::Invariant {
                key,
                detail: format!("product {p:e} below bound {b:e}"),
            });
        }
    }
    Ok(UncertaintyReport {
        var_p2,
        var_xy: obs.var_xy,
        var_lz: vl,
        product_p,
        bound_p,
        ratio_p: product_p / (4.0 * bound_p),
        product_l,
        bound_l,
        ratio_l: product_l / bound_l,
    })
}

fn check_density_species(cs: &CoherentState) -> Result<()> {
    match cs.spec.species {
        Species::Spinless | Species::NR2p1SpinUp | Species::NR2p1SpinDown | Species::NR3p1 => Ok(()),
        other => Err(Error::Mode(format!(
            "density is assembled for single-component species only, not {}",
            other.name()
        ))),
    }
}

/// Coefficients `phase_k * Y_{alpha+k}` of the angular harmonics, and the tail bound on the
/// neglected amplitude. Harmonic `k` carries `e^{i eps k phi}` for `j = 0` and
/// `e^{-i eps k (phi - pi)}` for `j = 1`.
fn harmonics(cs: &CoherentState, rho: f64, k_max: Option<usize>) -> Result<(Vec<Complex64>, f64)> {
    let idx = cs.sectors()?[0];
    let alpha = idx.alpha();
    let (a, b) = if cs.j == 0 { (cs.z1, cs.z2) } else { (cs.z2, cs.z1) };
    let bn = b.norm();
    let needed = (bn * bn + 12.0 * bn + 40.0).ceil() as usize;
    let k_top = k_max.unwrap_or(needed);
    let mut out = Vec::with_capacity(k_top + 1);
    for k in 0..=k_top {
        let (y, _) = qseries::y_alpha_series(alpha + k as f64, a, b, rho)?;
        // j = 1 harmonics alternate in sign relative to j = 0
        let sign = if cs.j == 1 && k % 2 == 1 { -1.0 } else { 1.0 };
        out.push(y * sign);
    }
    // |Y_{alpha+k}| <= env e^{|ab|} |b|^{alpha+k} / sqrt(Gamma(alpha+k+1))
    let ab = (a * b).norm();
    let mut tail = 0.0;
    if bn > 0.0 {
        let mut k = k_top + 1;
        loop {
            let nu = alpha + k as f64;
            let ln_t = ab + nu * bn.ln() - 0.5 * crate::specfun::ln_gamma_unchecked(nu + 1.0);
            let t = LAGUERRE_ENVELOPE * ln_t.exp();
            tail += t;
            if (nu + 2.0) > 4.0 * bn * bn && t < 1e-30 * tail.max(1e-300) || k > k_top + 10_000 {
                break;
            }
            k += 1;
        }
    }
    Ok((out, tail))
}

/// Probability density in the `(rho, phi)` plane, `rho = gamma r^2 / 2`, normalized so that
/// `int_0^inf d rho int_0^{2 pi} d phi density = 1`.
///
/// `l_window` caps the number of angular harmonics; the call fails if the neglected tail
/// exceeds `1e-12` of the computed amplitude.
pub fn density(cs: &CoherentState, phi: f64, rho: f64, l_window: Option<usize>) -> Result<f64> {
    Ok(density_ring(cs, rho, &[phi], l_window)?[0])
}

/// Density at several angles on the ring of radius `rho`.
pub fn density_ring(cs: &CoherentState, rho: f64, phis: &[f64], l_window: Option<usize>) -> Result<Vec<f64>> {
    check_density_species(cs)?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("rho must be positive, got {rho}")));
    }
    let (coef, tail) = harmonics(cs, rho, l_window)?;
    let norm = norm_sum(cs)?;
    let ln_pref = -cs.z1.norm_sqr() - cs.z2.norm_sqr() - (2.0 * PI).ln() - norm.ln_abs();
    // amplitudes are measured against the local sum and against the state's own scale sqrt(R)
    let amp_scale: f64 = coef.iter().map(|c| c.norm()).sum();
    let state_scale = (-0.5 * (ln_pref + (2.0 * PI).ln())).exp();
    if tail > 1e-12 * amp_scale.max(state_scale) {
        return Err(Error::Truncation {
            what: "density harmonics",
            terms: coef.len(),
            bound: tail,
        });
    }
    let pref = ln_pref.exp();
    let s = if cs.j == 0 { cs.field.eps as f64 } else { -cs.field.eps as f64 };
    let out = phis
        .iter()
        .map(|&phi| {
            let step = Complex64::from_polar(1.0, s * phi);
            let mut rot = Complex64::new(1.0, 0.0);
            let mut amp = Complex64::new(0.0, 0.0);
            for c in &coef {
                amp += c * rot;
                rot *= step;
            }
            amp.norm_sqr() * pref
        })
        .collect();
    Ok(out)
}

/// Angular average of the density on a ring times `2 pi` (the radial marginal), by Parseval.
pub fn radial_density(cs: &CoherentState, rho: f64) -> Result<f64> {
    check_density_species(cs)?;
    if !(rho > 0.0) {
        return Err(Error::domain("rho must be positive"));
    }
    let (coef, _) = harmonics(cs, rho, None)?;
    let norm = norm_sum(cs)?;
    let ln_pref = -cs.z1.norm_sqr() - cs.z2.norm_sqr() - norm.ln_abs();
    let s: f64 = coef.iter().map(|c| c.norm_sqr()).sum();
    Ok(s * ln_pref.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nr_state(z1: Complex64, z2: Complex64, j: u8, mu: f64) -> CoherentState {
        let field = FieldConfig::new(1.0, 1, 1, 0, mu).unwrap();
        CoherentState::new(z1, z2, j, field, ParticleSpec::nr_spin_up(1.0, 1)).unwrap()
    }

    #[test]
    fn orthogonal_types() {
        let a = nr_state(Complex64::new(1.0, 0.2), Complex64::new(2.0, 0.0), 0, 0.3);
        let b = CoherentState { j: 1, ..a };
        let k = norm_kernel(&a, Some(&b)).unwrap();
        assert_eq!(k.value, Complex64::new(0.0, 0.0));
        assert_eq!(k.abs_err, 0.0);
    }

    #[test]
    fn exact_means_by_type() {
        let z1 = Complex64::new(1.2, -0.4);
        let z2 = Complex64::new(-0.7, 2.1);
        let a = nr_state(z1, z2, 0, 0.3);
        assert_eq!(mean_a(&a, 2).unwrap(), z2);
        let b = nr_state(z1, z2, 1, 0.3);
        assert_eq!(mean_a(&b, 1).unwrap(), z1);
    }

    #[test]
    fn zero_state_sits_at_origin() {
        // only the vacuum survives, which needs alpha = 0
        let field = FieldConfig::new(1.0, 1, 1, 0, 0.0).unwrap();
        let cs = CoherentState::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 1, field, ParticleSpec::spinless(1.0)).unwrap();
        let (x, y) = mean_position(&cs).unwrap();
        assert_eq!((x, y), (0.0, 0.0));
    }

    #[test]
    fn two_routes_for_means() {
        let cs = nr_state(Complex64::new(2.0, 0.5), Complex64::new(1.5, -1.0), 0, 0.4);
        for k in [1, 2] {
            let a = mean_n(&cs, k).unwrap();
            let b = mean_n_closed(&cs, k).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(1.0), "k={k}: {a} vs {b}");
        }
    }
}
