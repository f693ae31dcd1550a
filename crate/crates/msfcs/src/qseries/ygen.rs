//! The generating function `Y_alpha(z1, z2; rho)`.
//!
//! Closed form: `e^{z1 z2 - rho/2} z2^alpha rho^{alpha/2} J^_alpha(z1 z2 rho)` with the entire
//! function `J^_alpha(s) = sum_k (-s)^k / (k! Gamma(alpha+k+1))`, so that
//! `J_alpha(2 sqrt s) = s^{alpha/2} J^_alpha(s)`. Writing the Bessel factor this way fixes the
//! branch of `(z2/z1)^{alpha/2}` to the principal `z2^alpha` also used by the defining series.

use num_complex::Complex64;

use crate::dd::{quick_two_sum, two_sum, Cdd, Dd};
use crate::error::{Error, Result};
use crate::specfun::{self, ln_gamma_unchecked, RealOrder};

const JHAT_SERIES_MAX: f64 = 400.0;

/// `J^_alpha(s) = sum_k (-s)^k / (k! Gamma(alpha+k+1))`.
fn jhat(alpha: f64, s: Complex64) -> Result<Complex64> {
    let r = s.norm();
    if r > JHAT_SERIES_MAX {
        if s.im == 0.0 && s.re > 0.0 {
            let j = specfun::bessel_j(RealOrder::new(alpha)?, 2.0 * s.re.sqrt())?;
            return Ok(Complex64::new(j / s.re.powf(0.5 * alpha), 0.0));
        }
        if s.im == 0.0 && s.re < 0.0 {
            let x = 2.0 * (-s.re).sqrt();
            let ln_i = specfun::ln_bessel_i_scaled(alpha, x) + x - 0.5 * alpha * (-s.re).ln();
            return Ok(Complex64::new(ln_i.exp(), 0.0));
        }
        return Err(Error::domain(format!(
            "closed-form Y is limited to |z1 z2 rho| <= {JHAT_SERIES_MAX} off the real axis; use the series"
        )));
    }
    // power series in double-double so the cancellation for complex s costs nothing
    let neg_s = Cdd {
        re: Dd::from(-s.re),
        im: Dd::from(-s.im),
    };
    let mut term = Cdd {
        re: Dd::from(1.0),
        im: Dd::from(0.0),
    };
    let mut sum = term;
    let mut k = 0.0;
    loop {
        let (a1, e1) = two_sum(alpha, k + 1.0);
        let den = Dd::from(k + 1.0).mul(quick_two_sum(a1, e1));
        term = term.mul(neg_s).div_real(den);
        sum = sum.add(term);
        k += 1.0;
        let t = term.re.hi.abs() + term.im.hi.abs();
        let sm = sum.re.hi.abs() + sum.im.hi.abs();
        if k > r.sqrt() + 2.0 && t <= 1e-34 * sm.max(1e-300) {
            break;
        }
        if k > 10_000.0 {
            break;
        }
    }
    Ok(sum.to_c64() * (-ln_gamma_unchecked(alpha + 1.0)).exp())
}

fn check_inputs(alpha: f64, z1: Complex64, z2: Complex64, rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("rho must be positive, got {rho}")));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("Y_alpha needs alpha > -1, got {alpha}")));
    }
    if !(z1.re.is_finite() && z1.im.is_finite() && z2.re.is_finite() && z2.im.is_finite()) {
        return Err(Error::domain("z1, z2 must be finite"));
    }
    if z2 == Complex64::new(0.0, 0.0) && alpha < 0.0 {
        return Err(Error::domain("z2^alpha is singular at z2 = 0 for alpha < 0"));
    }
    Ok(())
}

fn z2_pow(alpha: f64, z2: Complex64) -> Complex64 {
    if alpha == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if z2 == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        (z2.ln() * alpha).exp()
    }
}

/// `Y_alpha(z1, z2; rho)` in closed form.
pub fn y_alpha(alpha: f64, z1: Complex64, z2: Complex64, rho: f64) -> Result<Complex64> {
    check_inputs(alpha, z1, z2, rho)?;
    let p = z2_pow(alpha, z2);
    if p == Complex64::new(0.0, 0.0) {
        return Ok(p);
    }
    let w = z1 * z2;
    let jh = jhat(alpha, w * rho)?;
    Ok((w - 0.5 * rho).exp() * p * rho.powf(0.5 * alpha) * jh)
}

/// `Y_alpha` from its defining series `sum_m z1^m z2^{m+alpha} I_{m+alpha,m}(rho) / sqrt(m! Gamma(m+alpha+1))`.
///
/// Returns the value and a tail bound.
pub fn y_alpha_series(alpha: f64, z1: Complex64, z2: Complex64, rho: f64) -> Result<(Complex64, f64)> {
    check_inputs(alpha, z1, z2, rho)?;
    let p = z2_pow(alpha, z2);
    if p == Complex64::new(0.0, 0.0) {
        return Ok((p, 0.0));
    }
    let w = z1 * z2;
    let aw = w.norm();
    let ord = RealOrder::new(alpha)?;
    let mut m_max = (3.0 * aw + 40.0) as usize;
    loop {
        let lag = specfun::laguerre_fn_table(m_max + 1, ord, rho)?;
        let env = 1.1f64.max(2.0 * lag.iter().fold(0.0f64, |a, &x| a.max(x.abs())));
        let mut sum = Complex64::new(0.0, 0.0);
        let mut coef_last = 0.0;
        for (m, &lm) in lag.iter().enumerate().take(m_max + 1) {
            let mf = m as f64;
            let ln_mag = if aw == 0.0 {
                if m == 0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                mf * aw.ln()
            } - 0.5 * (ln_gamma_unchecked(mf + 1.0) + ln_gamma_unchecked(mf + alpha + 1.0));
            let c = Complex64::from_polar(ln_mag.exp(), mf * w.arg());
            sum += c * lm;
            coef_last = ln_mag;
        }
        let mf = m_max as f64;
        let q = aw / (mf + 2.0 + alpha.min(0.0));
        let tail = if aw == 0.0 {
            0.0
        } else {
            (coef_last.exp() * q / (1.0 - q)) * env
        };
        let val = sum * p;
        let tail = tail * p.norm();
        if tail <= 1e-15 * val.norm().max(1e-300) || m_max > 20_000 {
            return Ok((val, tail));
        }
        m_max *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_parameters() {
        let y = y_alpha(0.0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 2.0).unwrap();
        let j0 = specfun::bessel_j(RealOrder::new(0.0).unwrap(), 2.0 * 2f64.sqrt()).unwrap();
        assert!((y.re - j0).abs() < 1e-14 && y.im.abs() < 1e-15);
    }

    #[test]
    fn vanishes_at_z2_zero() {
        let y = y_alpha(0.4, Complex64::new(1.0, 0.3), Complex64::new(0.0, 0.0), 2.0).unwrap();
        assert_eq!(y, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn series_matches_closed_form() {
        let z1 = Complex64::new(0.8, 0.0);
        let z2 = Complex64::new(1.3, 0.0);
        let a = y_alpha(0.6, z1, z2, 2.0).unwrap();
        let (b, _) = y_alpha_series(0.6, z1, z2, 2.0).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn dd_division() {
        let q = Dd::from(1.0).div(Dd::from(3.0));
        let back = q.mul(Dd::from(3.0));
        assert!((back.hi - 1.0 + back.lo).abs() < 1e-30);
    }
}
