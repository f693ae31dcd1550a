//! The `Q_alpha` / `Q_alpha^-` kernels and everything summed over the ICS index set.
//!
//! `Q_alpha(u, v) = sum_{l>=0} (v/u)^{alpha+l} I_{alpha+l}(2uv)` and `Q_alpha^-` drops `l = 0`.
//! Expanding the Bessel functions gives the double series
//! `sum_{m>=0, k>=0} u^{2m} v^{2(m+alpha+k)} / (m! Gamma(m+alpha+k+1))`, which is what the
//! weighted sums run over. Large arguments are handled in the scaled form
//! `Q~ = e^{-u^2-v^2} Q`.

mod lattice;
mod ygen;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{self, FieldConfig};
use crate::quad;
use crate::specfun::{self, ln_bessel_i_scaled, ln_poisson};

use lattice::Plan;

pub use ygen::{y_alpha, y_alpha_series};

pub const DEFAULT_TOL: f64 = 1e-14;
pub const MAX_TERMS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesPath {
    DirectSeries,
    IntegralRep,
    ClosedForm,
    Asymptotic,
}

/// A computed quantity with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub abs_err: f64,
    pub n_terms: usize,
    pub path: SeriesPath,
}

impl SeriesValue {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    /// Cross-path agreement: `|v1 - v2| <= err1 + err2 + 1e-12 max(|v1|, |v2|)`.
    pub fn agrees_with(&self, other: &SeriesValue) -> bool {
        let d = (self.value - other.value).norm();
        let scale = self.value.norm().max(other.value.norm());
        d <= self.abs_err + other.abs_err + 1e-12 * scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    /// `Q_alpha`, all `k >= 0`.
    Full,
    /// `Q_alpha^-`, `k >= 1`.
    Minus,
}

impl Kernel {
    fn k0(self) -> usize {
        match self {
            Kernel::Full => 0,
            Kernel::Minus => 1,
        }
    }
}

/// Quantum numbers `(n1, n2)` reachable by an ICS of type `j` and spin `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexSet {
    pub j: u8,
    pub sigma: i32,
    pub eps: i32,
    pub vartheta: i32,
    pub mu: f64,
}

impl IndexSet {
    pub fn new(j: u8, sigma: i32, eps: i32, vartheta: i32, mu: f64) -> Result<Self> {
        if j > 1 {
            return Err(Error::domain(format!("trajectory type must be 0 or 1, got {j}")));
        }
        if !(-1..=1).contains(&sigma) {
            return Err(Error::domain(format!("sigma must be -1, 0 or 1, got {sigma}")));
        }
        if eps.abs() != 1 || vartheta.abs() != 1 {
            return Err(Error::domain("eps and vartheta must be signs"));
        }
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::domain(format!("mu must lie in [0,1), got {mu}")));
        }
        Ok(Self {
            j,
            sigma,
            eps,
            vartheta,
            mu,
        })
    }

    pub fn from_field(field: &FieldConfig, j: u8, sigma: i32) -> Result<Self> {
        Self::new(j, sigma, field.eps, field.vartheta, field.mu)
    }

    pub fn mu_sigma(&self) -> f64 {
        params::mu_sigma(self.mu, self.vartheta, self.eps, self.sigma)
    }

    /// Kernel order: `1 - mu_sigma` for `j = 0`, `mu_sigma` for `j = 1`.
    pub fn alpha(&self) -> f64 {
        let ms = self.mu_sigma();
        if self.j == 0 {
            1.0 - ms
        } else {
            ms
        }
    }

    /// Angular quantum number `l~` of the `k`-th admissible value.
    pub fn ltilde(&self, k: usize) -> i64 {
        let k = k as i64;
        if self.sigma == 0 {
            return if self.j == 0 { -k - 1 } else { k };
        }
        let te = (self.vartheta * self.eps) as i64;
        if self.j == 0 {
            -k - (1 + te) / 2
        } else {
            k + (1 - te) / 2
        }
    }

    /// `(n1, n2)` for the pair `(m, k)`.
    pub fn pair(&self, m: usize, k: usize) -> (f64, f64) {
        let a = self.alpha();
        let (m, k) = (m as f64, k as f64);
        if self.j == 0 {
            (m, m + a + k)
        } else {
            (m + a + k, m)
        }
    }
}

/// Kernel value `mant * e^{ln_scale}` with error and absolute-sum in the same units as `mant`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ScaledSum {
    pub mant: Complex64,
    pub ln_scale: f64,
    pub err: f64,
    pub abs: f64,
    pub trunc: f64,
    pub n_terms: usize,
}

impl ScaledSum {
    pub fn zero() -> Self {
        Self {
            mant: Complex64::new(0.0, 0.0),
            ln_scale: 0.0,
            err: 0.0,
            abs: 0.0,
            trunc: 0.0,
            n_terms: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == Complex64::new(0.0, 0.0)
    }

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return self.mant;
        }
        self.mant * self.ln_scale.exp()
    }

    pub fn err_abs(&self) -> f64 {
        if self.err == 0.0 {
            0.0
        } else {
            self.err * self.ln_scale.exp()
        }
    }

    /// `ln |value|`.
    pub fn ln_abs(&self) -> f64 {
        self.mant.norm().ln() + self.ln_scale
    }

    /// `self / den`, robust to both values being far outside the f64 range.
    pub fn ratio(&self, den: &ScaledSum) -> Complex64 {
        if self.is_zero() {
            return self.mant;
        }
        self.mant / den.mant * (self.ln_scale - den.ln_scale).exp()
    }

    /// Sum of two scaled values.
    pub fn add(&self, other: &ScaledSum) -> ScaledSum {
        if self.is_zero() && self.err == 0.0 {
            return *other;
        }
        if other.is_zero() && other.err == 0.0 {
            return *self;
        }
        let s = self.ln_scale.max(other.ln_scale);
        let f1 = (self.ln_scale - s).exp();
        let f2 = (other.ln_scale - s).exp();
        ScaledSum {
            mant: self.mant * f1 + other.mant * f2,
            ln_scale: s,
            err: self.err * f1 + other.err * f2,
            abs: self.abs * f1 + other.abs * f2,
            trunc: self.trunc * f1 + other.trunc * f2,
            n_terms: self.n_terms + other.n_terms,
        }
    }

    /// Multiply by a complex constant.
    pub fn scale(&self, c: Complex64) -> ScaledSum {
        let n = c.norm();
        ScaledSum {
            mant: self.mant * c,
            err: self.err * n,
            abs: self.abs * n,
            trunc: self.trunc * n,
            ..*self
        }
    }

    pub fn to_series(self, path: SeriesPath) -> SeriesValue {
        SeriesValue {
            value: self.value(),
            abs_err: self.err_abs(),
            n_terms: self.n_terms,
            path,
        }
    }
}

/// Weight attached to each `(n1, n2)` term of a weighted sum.
#[derive(Clone, Copy)]
pub enum Weight<'a> {
    One,
    /// Depends on `n1` only.
    N1(&'a (dyn Fn(f64) -> Complex64 + Sync)),
    /// Depends on `n2` only.
    N2(&'a (dyn Fn(f64) -> Complex64 + Sync)),
    /// General `w(n1, n2)`.
    Pair(&'a (dyn Fn(f64, f64) -> Complex64 + Sync)),
}

impl Weight<'_> {
    fn eval(&self, n1: f64, n2: f64) -> Complex64 {
        match self {
            Weight::One => Complex64::new(1.0, 0.0),
            Weight::N1(f) => f(n1),
            Weight::N2(f) => f(n2),
            Weight::Pair(f) => f(n1, n2),
        }
    }
}

/// Declared growth of a weight, used for the tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Bounded,
    Poly(u32),
}

fn weight_envelope(weight: &Weight, growth: Growth, n1_hi: f64, n2_hi: f64) -> Result<f64> {
    let d = match growth {
        Growth::Bounded => 0,
        Growth::Poly(d) => d as i32,
    };
    let c = |f: f64| {
        let (n1, n2) = (n1_hi * f + 8.0 * (f - 1.0).max(0.0), n2_hi * f + 8.0 * (f - 1.0).max(0.0));
        let w = weight.eval(n1, n2).norm();
        (w / (1.0 + n1.max(0.0) + n2.max(0.0)).powi(d), w)
    };
    let mut c_ref: f64 = 0.0;
    for f in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let (ci, wi) = c(f);
        if !wi.is_finite() {
            return Err(Error::domain("weight is not finite on the index set"));
        }
        c_ref = c_ref.max(ci);
    }
    let mut c_far: f64 = 0.0;
    for f in [2.0, 4.0, 16.0] {
        let (ci, wi) = c(f);
        if !wi.is_finite() {
            return Err(Error::domain("weight is not finite on the index set"));
        }
        c_far = c_far.max(ci);
    }
    if c_far > 1e3 * c_ref.max(1e-300) {
        return Err(Error::domain(
            "weight grows faster than its declared polynomial envelope",
        ));
    }
    let n_far = 1.0 + 16.0 * (n1_hi + n2_hi) + 256.0;
    Ok(c_ref.max(c_far).max(1e-300) * n_far.powi(d))
}

fn lam_phase(z: Complex64) -> (f64, f64) {
    let lam = z.norm();
    let ph = if lam == 0.0 || z.im == 0.0 && z.re > 0.0 {
        0.0
    } else {
        z.arg()
    };
    (lam, ph)
}

/// Scaled weighted double sum `e^{-|U|-|V|} sum w(n1,n2) U^{n1} V^{n2} / (Gamma(1+n1) Gamma(1+n2))`
/// over the pairs of a kernel of order `alpha`; `j` picks which slot carries `n1`.
pub(crate) fn kernel_sum(
    alpha: f64,
    j: u8,
    kernel: Kernel,
    big_u: Complex64,
    big_v: Complex64,
    weight: &Weight,
    growth: Growth,
) -> Result<ScaledSum> {
    let (lu, pu) = lam_phase(big_u);
    let (lv, pv) = lam_phase(big_v);
    let (la, pa, lb, pb) = if j == 0 {
        (lu, pu, lv, pv)
    } else {
        (lv, pv, lu, pu)
    };
    let plan = match Plan::new(alpha, kernel.k0(), la, lb, pa, pb)? {
        Some(p) => p,
        None => return Ok(ScaledSum::zero()),
    };
    let (ma, xb) = plan.extent();
    let (n1_hi, n2_hi) = if j == 0 { (ma, xb) } else { (xb, ma) };
    let env = match weight {
        Weight::One => 1.0,
        _ => weight_envelope(weight, growth, n1_hi, n2_hi)?,
    };
    let one = |_: f64| Complex64::new(1.0, 0.0);
    let rel = match (weight, j) {
        (Weight::One, _) => plan.sum_slot_a(&one, env),
        (Weight::N1(f), 0) | (Weight::N2(f), 1) => plan.sum_slot_a(*f, env),
        (Weight::N1(f), _) | (Weight::N2(f), _) => plan.sum_slot_b(*f, env),
        (Weight::Pair(f), 0) => plan.sum_pair(*f, env),
        (Weight::Pair(f), _) => plan.sum_pair(&|m, x| f(x, m), env),
    };
    let round = rel.abs * (1e-14 + f64::EPSILON * (rel.n_terms as f64).sqrt());
    Ok(ScaledSum {
        mant: rel.sum,
        ln_scale: plan.ln_peak,
        err: rel.trunc + round,
        abs: rel.abs,
        trunc: rel.trunc,
        n_terms: rel.n_terms,
    })
}

/// Weighted sum over the index set, in scaled form `e^{-|u|^2-|v|^2} * sum`.
///
/// Terms are `w(n1, n2) u^{2 n1} v^{2 n2} / (Gamma(1+n1) Gamma(1+n2))`; powers of complex
/// arguments use principal branches of `u^2`, `v^2`. The weight must stay within its
/// declared growth; a weight that outgrows it is rejected.
pub fn weighted_sum(
    idx: &IndexSet,
    u: Complex64,
    v: Complex64,
    kernel: Kernel,
    weight: &Weight,
    growth: Growth,
    tol: f64,
) -> Result<SeriesValue> {
    let s = kernel_sum(idx.alpha(), idx.j, kernel, u * u, v * v, weight, growth)?;
    if s.trunc > tol * s.abs.max(1e-300) {
        return Err(Error::Truncation {
            what: "weighted_sum",
            terms: s.n_terms,
            bound: s.trunc,
        });
    }
    Ok(s.to_series(SeriesPath::DirectSeries))
}

/// Raw double-sum evaluation of the scaled kernel with complex squared arguments.
pub(crate) fn kernel_double_sum(
    alpha: f64,
    kernel: Kernel,
    big_u: Complex64,
    big_v: Complex64,
) -> Result<ScaledSum> {
    kernel_sum(alpha, 0, kernel, big_u, big_v, &Weight::One, Growth::Bounded)
}

fn check_order(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < -1.0 {
        return Err(Error::domain(format!("kernel order must be >= -1, got {alpha}")));
    }
    Ok(())
}

fn check_uv(u: f64, v: f64) -> Result<()> {
    if !(u >= 0.0 && v >= 0.0) || !u.is_finite() || !v.is_finite() {
        return Err(Error::domain(format!("u, v must be finite and >= 0, got ({u}, {v})")));
    }
    Ok(())
}

/// `ln` of the scaled `l = 0` term `e^{-u^2-v^2} (v/u)^alpha I_alpha(2uv)`.
pub(crate) fn lead_term_ln(alpha: f64, u: f64, v: f64) -> f64 {
    if v == 0.0 {
        return if alpha == 0.0 {
            -u * u
        } else if alpha == -1.0 {
            -u * u + 2.0 * u.ln()
        } else {
            f64::NEG_INFINITY
        };
    }
    if u == 0.0 {
        return if alpha == -1.0 {
            f64::NEG_INFINITY
        } else {
            ln_poisson(alpha, v * v)
        };
    }
    -(u - v) * (u - v) + alpha * (v / u).ln() + ln_bessel_i_scaled(alpha, 2.0 * u * v)
}

/// Scaled `Q~^-` by the Bessel-order series, in log-scaled form.
fn direct_minus(alpha: f64, u: f64, v: f64, tol: f64) -> Result<ScaledSum> {
    if v == 0.0 {
        return kernel_double_sum(
            alpha,
            Kernel::Minus,
            Complex64::new(u * u, 0.0),
            Complex64::new(0.0, 0.0),
        );
    }
    let ln_t = |l: usize| -> f64 {
        let nu = alpha + l as f64;
        if u == 0.0 {
            ln_poisson(nu, v * v)
        } else {
            -(u - v) * (u - v) + nu * (v / u).ln() + ln_bessel_i_scaled(nu, 2.0 * u * v)
        }
    };
    let x = 2.0 * u * v;
    let mut ln_ref = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for l in 1..=MAX_TERMS {
        let lt = ln_t(l);
        if lt > ln_ref {
            sum = sum * (ln_ref - lt).exp() + 1.0;
            ln_ref = lt;
        } else if lt > f64::NEG_INFINITY {
            sum += (lt - ln_ref).exp();
        }
        // ratio of consecutive terms is nonincreasing in l, so the last ratio bounds the rest
        let nu = alpha + l as f64;
        let q_obs = if prev > f64::NEG_INFINITY {
            (lt - prev).exp()
        } else {
            f64::INFINITY
        };
        let q_an = if u == 0.0 {
            v * v / (nu + 1.0)
        } else {
            (v / u) * x / (nu + (nu * nu + x * x).sqrt())
        };
        let q = q_obs.min(q_an);
        prev = lt;
        if q < 1.0 && l >= 2 {
            let tail = (lt - ln_ref).exp() * q / (1.0 - q);
            if tail <= tol * sum || lt == f64::NEG_INFINITY {
                // each log-term carries absolute error ~ eps * (size of the cancelling pieces)
                let ln_size = if u == 0.0 {
                    v * v + nu * ((v * v).ln().abs() + (nu + 2.0).ln())
                } else {
                    (u - v) * (u - v) + nu * ((v / u).ln().abs() + (nu + x + 2.0).ln()) + x
                };
                let round = sum * (1e-14 + 2.0 * f64::EPSILON * (l as f64 + 4.0 * ln_size));
                return Ok(ScaledSum {
                    mant: Complex64::new(sum, 0.0),
                    ln_scale: ln_ref,
                    err: tail + round,
                    abs: sum,
                    trunc: tail,
                    n_terms: l,
                });
            }
        }
    }
    Err(Error::Truncation {
        what: "q_minus",
        terms: MAX_TERMS,
        bound: f64::NAN,
    })
}

fn direct_scaled(alpha: f64, kernel: Kernel, u: f64, v: f64, tol: f64) -> Result<ScaledSum> {
    check_order(alpha)?;
    check_uv(u, v)?;
    let minus = direct_minus(alpha, u, v, tol)?;
    match kernel {
        Kernel::Minus => Ok(minus),
        Kernel::Full => {
            if v == 0.0 && alpha < 0.0 && alpha != -1.0 {
                return Err(Error::domain("Q_alpha(u, 0) is infinite for -1 < alpha < 0"));
            }
            let ll = lead_term_ln(alpha, u, v);
            if ll == f64::NEG_INFINITY {
                return Ok(minus);
            }
            let lead = ScaledSum {
                mant: Complex64::new(1.0, 0.0),
                ln_scale: ll,
                err: 1e-14,
                abs: 1.0,
                trunc: 0.0,
                n_terms: 1,
            };
            Ok(minus.add(&lead))
        }
    }
}

fn is_nonneg_real(z: Complex64) -> bool {
    z.im == 0.0 && z.re >= 0.0
}

fn unscale(s: ScaledSum, lam: f64, path: SeriesPath) -> SeriesValue {
    let f = lam.exp();
    SeriesValue {
        value: s.value() * f,
        abs_err: s.err_abs() * f,
        n_terms: s.n_terms,
        path,
    }
}

fn q_unscaled(kernel: Kernel, alpha: f64, u: Complex64, v: Complex64, tol: f64) -> Result<SeriesValue> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    if is_nonneg_real(u) && is_nonneg_real(v) {
        let s = direct_scaled(alpha, kernel, u.re, v.re, tol)?;
        return Ok(unscale(s, u.re * u.re + v.re * v.re, SeriesPath::DirectSeries));
    }
    check_order(alpha)?;
    let (uu, vv) = (u * u, v * v);
    let s = kernel_double_sum(alpha, kernel, uu, vv)?;
    Ok(unscale(s, uu.norm() + vv.norm(), SeriesPath::DirectSeries))
}

/// `Q_alpha^-(u, v)`. Real nonnegative arguments use the Bessel-order series, complex ones
/// the double series in `u^2`, `v^2`.
pub fn q_minus(alpha: f64, u: Complex64, v: Complex64, tol: f64) -> Result<SeriesValue> {
    q_unscaled(Kernel::Minus, alpha, u, v, tol)
}

/// `Q_alpha(u, v) = Q_alpha^-(u, v) + (v/u)^alpha I_alpha(2uv)`.
pub fn q_full(alpha: f64, u: Complex64, v: Complex64, tol: f64) -> Result<SeriesValue> {
    q_unscaled(Kernel::Full, alpha, u, v, tol)
}

/// Scaled kernel `e^{-u^2-v^2} Q` for real arguments along the requested path.
///
/// `DirectSeries` sums over Bessel orders, `IntegralRep` integrates the `T` representation
/// (`u, v > 0`, `alpha > -1`). Other paths are rejected.
pub fn q_scaled(kernel: Kernel, alpha: f64, u: f64, v: f64, path: SeriesPath) -> Result<SeriesValue> {
    match path {
        SeriesPath::DirectSeries => {
            Ok(direct_scaled(alpha, kernel, u, v, DEFAULT_TOL)?.to_series(SeriesPath::DirectSeries))
        }
        SeriesPath::IntegralRep => integral_scaled(kernel, alpha, u, v),
        _ => Err(Error::domain("q_scaled supports DirectSeries and IntegralRep")),
    }
}

pub fn q_minus_scaled(alpha: f64, u: f64, v: f64) -> Result<SeriesValue> {
    q_scaled(Kernel::Minus, alpha, u, v, SeriesPath::DirectSeries)
}

pub fn q_full_scaled(alpha: f64, u: f64, v: f64) -> Result<SeriesValue> {
    q_scaled(Kernel::Full, alpha, u, v, SeriesPath::DirectSeries)
}

/// Scaled kernel from the raw `(m, k)` double series.
pub fn q_double_sum_scaled(kernel: Kernel, alpha: f64, u: f64, v: f64) -> Result<SeriesValue> {
    check_uv(u, v)?;
    let s = kernel_double_sum(
        alpha,
        kernel,
        Complex64::new(u * u, 0.0),
        Complex64::new(v * v, 0.0),
    )?;
    Ok(s.to_series(SeriesPath::DirectSeries))
}

fn integrand_ln(alpha: f64, u: f64, t: f64) -> f64 {
    std::f64::consts::LN_2 - (t - u) * (t - u) + alpha * (t / u).ln() + ln_bessel_i_scaled(alpha, 2.0 * u * t) + t.ln()
}

/// `(Q~^-, T)` with a shared error bound, from the integral representation.
fn integral_parts(alpha: f64, u: f64, v: f64) -> Result<(f64, f64, f64, usize)> {
    check_order(alpha)?;
    if !(u > 0.0 && v > 0.0) || !u.is_finite() || !v.is_finite() {
        return Err(Error::domain("integral representation needs u, v > 0"));
    }
    if alpha == -1.0 {
        return Err(Error::domain("integral representation needs alpha > -1"));
    }
    let (abs_tol, rel_tol) = (1e-200, 1e-13);
    if v <= u {
        // t = y^p removes the t^{2 alpha + 1} behaviour at the origin
        let p = 1.0 / (alpha + 1.0);
        let y_max = v.powf(alpha + 1.0);
        let r = quad::integrate(
            |y| {
                if y <= 0.0 {
                    return 0.0;
                }
                let t = y.powf(p);
                (integrand_ln(alpha, u, t) + p.ln() + t.ln() - y.ln()).exp()
            },
            0.0,
            y_max,
            abs_tol,
            rel_tol,
        )?;
        let err = r.abs_err + 1e-15 * r.value.abs();
        Ok((r.value, 1.0 - r.value, err + 1e-16, r.evals))
    } else {
        let r = quad::integrate(
            |t| integrand_ln(alpha, u, t).exp(),
            v,
            v + 12.0,
            abs_tol,
            rel_tol,
        )?;
        let err = r.abs_err + 1e-15 * r.value.abs() + 1e-60;
        Ok((1.0 - r.value, r.value, err + 1e-16, r.evals))
    }
}

fn integral_scaled(kernel: Kernel, alpha: f64, u: f64, v: f64) -> Result<SeriesValue> {
    let (qm, _, err, n) = integral_parts(alpha, u, v)?;
    let value = match kernel {
        Kernel::Minus => qm,
        Kernel::Full => qm + lead_term_ln(alpha, u, v).exp(),
    };
    Ok(SeriesValue {
        value: Complex64::new(value, 0.0),
        abs_err: err + 1e-15 * value.abs(),
        n_terms: n,
        path: SeriesPath::IntegralRep,
    })
}

/// `T(u, v) = 2 e^{-u^2} int_v^inf e^{-t^2} (t/u)^alpha I_alpha(2ut) t dt`, so that
/// `Q~^-_alpha(u, v) = 1 - T(u, v)`.
pub fn t_integral(alpha: f64, u: f64, v: f64) -> Result<SeriesValue> {
    let (_, t, err, n) = integral_parts(alpha, u, v)?;
    Ok(SeriesValue {
        value: Complex64::new(t, 0.0),
        abs_err: err,
        n_terms: n,
        path: SeriesPath::IntegralRep,
    })
}

/// `1 - Q~` for real arguments, evaluated without cancellation when `Q~` is close to one.
pub fn q_complement_scaled(kernel: Kernel, alpha: f64, u: f64, v: f64) -> Result<SeriesValue> {
    check_order(alpha)?;
    check_uv(u, v)?;
    if v == 0.0 {
        return Err(Error::domain("complement evaluation needs v > 0"));
    }
    let lam = v * v;
    let one_minus_total = if alpha > 0.0 {
        specfun::gamma_q(alpha, lam)?
    } else if alpha == 0.0 || alpha == -1.0 {
        0.0
    } else {
        specfun::gamma_q(alpha + 1.0, lam)? - ln_poisson(alpha, lam).exp()
    };
    let plan = Plan::new(alpha, kernel.k0(), u * u, lam, 0.0, 0.0)?
        .ok_or_else(|| Error::domain("empty kernel"))?;
    let (value, err) = plan.complement(one_minus_total);
    Ok(SeriesValue {
        value: Complex64::new(value, 0.0),
        abs_err: err,
        n_terms: plan.wa.ln.len(),
        path: SeriesPath::ClosedForm,
    })
}

/// Far-below-diagonal asymptotic form of the complement `1 - Q~_alpha(u, v)`,
/// `(u/v)^{1-alpha} e^{-(v-u)^2} / (2 sqrt(pi u v))`, with its first neglected order.
pub fn asymptotic_complement(alpha: f64, u: f64, v: f64) -> Result<SeriesValue> {
    check_order(alpha)?;
    if !Regime::FarBelowDiag.admits(u, v) {
        return Err(Error::Regime(format!("({u}, {v}) is outside FarBelowDiag")));
    }
    let d = v - u;
    let corr = (u / v).powf(1.0 - alpha) * (-d * d).exp() / (2.0 * (PI * u * v).sqrt());
    Ok(SeriesValue {
        value: Complex64::new(corr, 0.0),
        abs_err: corr * (u / d + 1.0 / (d * d)),
        n_terms: 1,
        path: SeriesPath::Asymptotic,
    })
}

/// `ln Q~^-` and `ln` of the leading term, for the two ratio functions.
fn ratio_logs(alpha: f64, u: f64, v: f64) -> Result<(f64, f64)> {
    check_order(alpha)?;
    if !(u > 0.0 && v > 0.0) || !u.is_finite() || !v.is_finite() {
        return Err(Error::domain("ratio functions need u, v > 0"));
    }
    let m = direct_minus(alpha, u, v, DEFAULT_TOL)?;
    Ok((m.ln_abs(), lead_term_ln(alpha, u, v)))
}

/// `Delta_alpha = Q_alpha^- / Q_alpha`, in `(0, 1)`.
pub fn delta_ratio(alpha: f64, u: f64, v: f64) -> Result<f64> {
    let (lm, ll) = ratio_logs(alpha, u, v)?;
    Ok(1.0 / (1.0 + (ll - lm).exp()))
}

/// `varpi_alpha = 1 - Delta_alpha = (v/u)^alpha I_alpha(2uv) / Q_alpha`.
pub fn varpi(alpha: f64, u: f64, v: f64) -> Result<f64> {
    let (lm, ll) = ratio_logs(alpha, u, v)?;
    Ok(1.0 / (1.0 + (lm - ll).exp()))
}

/// `Delta_alpha` as a ratio of two raw double sums.
pub fn delta_ratio_series(alpha: f64, u: f64, v: f64) -> Result<f64> {
    check_uv(u, v)?;
    let (uu, vv) = (Complex64::new(u * u, 0.0), Complex64::new(v * v, 0.0));
    let m = kernel_double_sum(alpha, Kernel::Minus, uu, vv)?;
    let f = kernel_double_sum(alpha, Kernel::Full, uu, vv)?;
    Ok(m.ratio(&f).re)
}

/// Semiclassical regimes of the kernel arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Quantum,
    FarBelowDiag,
    NearDiag,
    FarAboveDiag,
    Intermediate,
}

impl Regime {
    /// Threshold classification of `(u, v)`.
    pub fn classify(u: f64, v: f64) -> Regime {
        if u.max(v) < 3.0 || u * v < 1.0 {
            Regime::Quantum
        } else if v - u >= 3.0 && u >= 5.0 {
            Regime::FarBelowDiag
        } else if (v - u).abs() <= 0.3 && u.min(v) >= 10.0 {
            Regime::NearDiag
        } else if u - v >= 3.0 && v >= 5.0 {
            Regime::FarAboveDiag
        } else {
            Regime::Intermediate
        }
    }

    /// Whether `(u, v)` satisfies the preconditions of this regime's approximant.
    pub fn admits(self, u: f64, v: f64) -> bool {
        match self {
            Regime::Quantum => u.max(v) < 3.0 || u * v < 1.0,
            Regime::FarBelowDiag => v - u >= 3.0 && u >= 5.0,
            Regime::NearDiag => (v - u).abs() <= 0.3 && u >= 10.0,
            Regime::FarAboveDiag => u - v >= 3.0 && v >= 5.0,
            Regime::Intermediate => false,
        }
    }
}

/// Leading asymptotic form of the scaled kernel `Q~_alpha(u, v)`; `abs_err` is the size of the
/// first neglected order.
pub fn asymptotic_q(alpha: f64, u: f64, v: f64, regime: Regime) -> Result<SeriesValue> {
    check_order(alpha)?;
    check_uv(u, v)?;
    if !regime.admits(u, v) {
        return Err(Error::Regime(format!("({u}, {v}) is outside {regime:?}")));
    }
    let sqpi = PI.sqrt();
    let (value, err) = match regime {
        Regime::FarBelowDiag => {
            let d = v - u;
            let corr = (u / v).powf(1.0 - alpha) * (-d * d).exp() / (2.0 * (PI * u * v).sqrt());
            (1.0 - corr, corr * (u / d + 1.0 / (d * d)))
        }
        Regime::NearDiag => {
            let d = v - u;
            let val = 0.5 + d / sqpi - (alpha - 0.5) / (2.0 * sqpi * u);
            (val, d.abs().powi(3) / sqpi + d.abs() / u + 1.0 / (u * u))
        }
        Regime::FarAboveDiag => {
            let d = u - v;
            let val = (v / u).powf(alpha) * (-d * d).exp() / (2.0 * (PI * u * v).sqrt());
            (val, val * (v / d + 1.0 / (d * d) + 1.0 / (u * v)))
        }
        Regime::Quantum => {
            if alpha == -1.0 {
                return Err(Error::Regime("small-argument form needs alpha > -1".into()));
            }
            let ln_lead = -u * u - v * v + 2.0 * alpha * v.ln() - specfun::ln_gamma_unchecked(1.0 + alpha);
            let val = if v == 0.0 && alpha == 0.0 {
                (-u * u).exp()
            } else {
                ln_lead.exp()
            };
            (val, val * (v * v + u * u * v * v) / (alpha + 1.0))
        }
        Regime::Intermediate => unreachable!("rejected by admits"),
    };
    Ok(SeriesValue {
        value: Complex64::new(value, 0.0),
        abs_err: err,
        n_terms: 1,
        path: SeriesPath::Asymptotic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn minus_vanishes_at_v_zero() {
        let q = q_minus(0.4, c(1.0), c(0.0), 1e-14).unwrap();
        assert_eq!(q.value, c(0.0));
    }

    #[test]
    fn paths_agree_on_sample_point() {
        let d = q_scaled(Kernel::Minus, 0.5, 1.0, 2.0, SeriesPath::DirectSeries).unwrap();
        let i = q_scaled(Kernel::Minus, 0.5, 1.0, 2.0, SeriesPath::IntegralRep).unwrap();
        let s = q_double_sum_scaled(Kernel::Minus, 0.5, 1.0, 2.0).unwrap();
        assert!(d.agrees_with(&i), "{d:?} {i:?}");
        assert!(d.agrees_with(&s), "{d:?} {s:?}");
    }

    #[test]
    fn superposition_at_integer_orders() {
        for &(u, v) in &[(3.0, 4.0), (10.0, 2.0), (25.0, 25.0)] {
            let a = q_full_scaled(1.0, u, v).unwrap().re();
            let b = q_full_scaled(0.0, v, u).unwrap().re();
            assert!((a + b - 1.0).abs() < 1e-10, "({u},{v}): {}", a + b);
        }
    }

    #[test]
    fn ratio_routes_agree() {
        let d1 = delta_ratio(0.4, 3.0, 3.2).unwrap();
        let d2 = delta_ratio_series(0.4, 3.0, 3.2).unwrap();
        let w = varpi(0.4, 3.0, 3.2).unwrap();
        assert!((d1 - d2).abs() < 1e-9);
        assert!((d1 + w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn regime_classification() {
        assert_eq!(Regime::classify(5.0, 20.0), Regime::FarBelowDiag);
        assert_eq!(Regime::classify(30.0, 30.1), Regime::NearDiag);
        assert_eq!(Regime::classify(0.5, 0.8), Regime::Quantum);
        assert_eq!(Regime::classify(20.0, 5.0), Regime::FarAboveDiag);
        assert!(asymptotic_q(0.4, 2.0, 2.1, Regime::NearDiag).is_err());
    }

    #[test]
    fn index_set_pairs_are_admissible() {
        for &(j, sigma) in &[(0u8, 1), (0, -1), (1, 1), (1, -1), (0, 0), (1, 0)] {
            for &(eps, th) in &[(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let idx = IndexSet::new(j, sigma, eps, th, 0.3).unwrap();
                for m in 0..4 {
                    for k in 0..4 {
                        let (n1, n2) = idx.pair(m, k);
                        assert!(n1 > -1.0 && n2 > -1.0);
                    }
                }
            }
        }
    }
}
