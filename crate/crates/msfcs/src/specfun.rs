//! Real-order special functions: log-gamma, Bessel J and I, Laguerre polynomials and functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Bessel or Laguerre order, restricted to `alpha >= -1`.
///
/// `alpha = -1` is admitted only for the Bessel functions, where it is the integer
/// reflection `I_{-1} = I_1`, `J_{-1} = -J_1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RealOrder(f64);

impl RealOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < -1.0 {
            return Err(Error::domain(format!("order must be >= -1, got {alpha}")));
        }
        Ok(Self(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn stirling_tail(y: f64) -> f64 {
    // Bernoulli-number series for ln Gamma(y) - [(y - 1/2) ln y - y + ln sqrt(2 pi)]
    let r = 1.0 / y;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))))))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < 15.0 {
        prod *= y;
        y += 1.0;
    }
    (y - 0.5) * y.ln() - y + LN_SQRT_2PI + stirling_tail(y) - prod.ln()
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// `ln Gamma(x+1) - (x + 1/2) ln x + x - ln sqrt(2 pi)`.
fn stirlerr(x: f64) -> f64 {
    if x > 15.0 {
        stirling_tail(x)
    } else {
        ln_gamma_unchecked(x + 1.0) - (x + 0.5) * x.ln() + x - LN_SQRT_2PI
    }
}

/// Deviance term `x ln(x/np) + np - x`, accurate when `x` is close to `np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `ln(e^{-lambda} lambda^x / Gamma(1 + x))` for `x > -1`, `lambda > 0`.
///
/// Uses the saddle-point split so the result keeps full relative accuracy for large `lambda`.
pub(crate) fn ln_poisson(x: f64, lambda: f64) -> f64 {
    if x >= 1.0 {
        -stirlerr(x) - bd0(x, lambda) - 0.5 * (2.0 * PI * x).ln()
    } else {
        -lambda + x * lambda.ln() - ln_gamma_unchecked(1.0 + x)
    }
}

/// Scaled modified Bessel function `e^{-x} I_alpha(x)`.
pub fn bessel_i_scaled(alpha: RealOrder, x: f64) -> Result<f64> {
    let mut a = alpha.value();
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("bessel_i needs finite x >= 0, got {x}")));
    }
    if a == -1.0 {
        a = 1.0;
    }
    if x == 0.0 {
        return if a == 0.0 {
            Ok(1.0)
        } else if a > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain("I_alpha(0) is infinite for alpha < 0"))
        };
    }
    Ok(ln_bessel_i_scaled(a, x).exp())
}

/// `ln(e^{-x} I_a(x))` for `a >= -1`, `x > 0`, without under/overflow.
pub(crate) fn ln_bessel_i_scaled(a: f64, x: f64) -> f64 {
    let a = if a == -1.0 { 1.0 } else { a };
    if x >= 25.0 && x >= 0.5 * a * a + 10.0 {
        if let Some(v) = bessel_i_scaled_asymptotic(a, x) {
            return v;
        }
    }
    ln_bessel_i_scaled_series(a, x)
}

fn bessel_i_scaled_asymptotic(a: f64, x: f64) -> Option<f64> {
    let mu4 = 4.0 * a * a;
    let mut sum = 1.0;
    let mut term: f64 = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu4 - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() && k > 2 {
            return None;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return Some(sum.ln() - 0.5 * (2.0 * PI * x).ln());
        }
    }
    None
}

fn ln_bessel_i_scaled_series(a: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut t = 1.0;
    let mut s = 1.0;
    let mut log_scale = 0.0;
    let mut k = 0.0;
    loop {
        t *= q / ((k + 1.0) * (k + 1.0 + a));
        s += t;
        k += 1.0;
        if s > 1e280 {
            s *= 1e-280;
            t *= 1e-280;
            log_scale += 280.0 * std::f64::consts::LN_10;
        }
        if t <= 1e-17 * s && k > 0.5 * x {
            break;
        }
    }
    let ln_pref = -x + a * (0.5 * x).ln() - ln_gamma_unchecked(a + 1.0);
    ln_pref + s.ln() + log_scale
}

/// Modified Bessel function of the first kind `I_alpha(x)`.
pub fn bessel_i(alpha: RealOrder, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(alpha, x)? * x.exp())
}

/// Bessel function of the first kind `J_alpha(x)` for `x >= 0`.
pub fn bessel_j(alpha: RealOrder, x: f64) -> Result<f64> {
    let a = alpha.value();
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("bessel_j needs finite x >= 0, got {x}")));
    }
    if a == -1.0 {
        return Ok(-bessel_j(RealOrder(1.0), x)?);
    }
    if x == 0.0 {
        return if a == 0.0 {
            Ok(1.0)
        } else if a > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain("J_alpha(0) is infinite for alpha < 0"))
        };
    }
    if x <= 2.0 || 0.25 * x * x < 0.5 * (a + 1.0) {
        return Ok(bessel_j_series(a, x));
    }
    Ok(bessel_j_miller(a, x))
}

fn bessel_j_series(a: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut t = 1.0;
    let mut s = 1.0;
    let mut k = 0.0;
    loop {
        t *= q / ((k + 1.0) * (k + 1.0 + a));
        s += t;
        k += 1.0;
        if t.abs() <= 1e-17 * s.abs().max(1e-300) && k > 0.5 * x {
            break;
        }
        if k > 1000.0 {
            break;
        }
    }
    let ln_pref = a * (0.5 * x).ln() - ln_gamma_unchecked(a + 1.0);
    s * ln_pref.exp()
}

/// Backward recurrence in the order with the Neumann-series normalization
/// `(x/2)^a / Gamma(a+1) = J_a + sum_{k>=1} (a+2k) Gamma(a+k) / (Gamma(a+1) k!) J_{a+2k}`.
fn bessel_j_miller(a: f64, x: f64) -> f64 {
    let top = (x + 30.0 + 4.0 * x.sqrt()).max(a + 20.0);
    let mut m = (top - a).ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let kmax = m / 2;
    let mut g = vec![0.0; kmax + 1];
    g[0] = 1.0;
    let mut c = 1.0;
    for (k, gk) in g.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        if k > 1 {
            c *= (a + kf - 1.0) / (kf - 1.0);
        }
        *gk = (a + 2.0 * kf) / kf * c;
    }
    let mut f_next = 0.0; // f[i+1]
    let mut f_cur = 1e-300; // f[i]
    let mut norm = if m % 2 == 0 { g[kmax] * f_cur } else { 0.0 };
    for i in (1..=m).rev() {
        let nu = a + i as f64;
        let f_prev = (2.0 * nu / x) * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        let idx = i - 1;
        if idx % 2 == 0 {
            norm += g[idx / 2] * f_cur;
        }
        if f_cur.abs() > 1e250 {
            f_cur *= 1e-250;
            f_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    let ln_target = a * (0.5 * x).ln() - ln_gamma_unchecked(a + 1.0);
    f_cur / norm * ln_target.exp()
}

/// Generalized Laguerre polynomial `L_m^alpha(x)` by the three-term recurrence.
pub fn laguerre_poly(m: usize, alpha: f64, x: f64) -> f64 {
    let mut l_prev = 1.0;
    if m == 0 {
        return l_prev;
    }
    let mut l_cur = 1.0 + alpha - x;
    for k in 1..m {
        let kf = k as f64;
        let l_next = ((2.0 * kf + 1.0 + alpha - x) * l_cur - (kf + alpha) * l_prev) / (kf + 1.0);
        l_prev = l_cur;
        l_cur = l_next;
    }
    l_cur
}

/// Laguerre functions `I_{m+alpha,m}(rho)` for `m = 0..=m_max`.
pub fn laguerre_fn_table(m_max: usize, alpha: RealOrder, rho: f64) -> Result<Vec<f64>> {
    let a = alpha.value();
    if a <= -1.0 {
        return Err(Error::domain("Laguerre functions need alpha > -1"));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    if rho == 0.0 {
        return if a == 0.0 {
            Ok(vec![1.0; m_max + 1])
        } else if a > 0.0 {
            Ok(vec![0.0; m_max + 1])
        } else {
            Err(Error::domain("Laguerre function is unbounded at rho = 0 for alpha < 0"))
        };
    }
    let ln_f0 = -0.5 * rho + 0.5 * a * rho.ln() - 0.5 * ln_gamma_unchecked(a + 1.0);
    let mut out = Vec::with_capacity(m_max + 1);
    let mut scale = ln_f0;
    let emit = |g: f64, scale: f64| -> f64 {
        if g == 0.0 {
            0.0
        } else {
            g.signum() * (g.abs().ln() + scale).exp()
        }
    };
    let mut g_prev = 0.0;
    let mut g_cur = 1.0;
    out.push(emit(g_cur, scale));
    for m in 0..m_max {
        let mf = m as f64;
        let g_next = ((2.0 * mf + a + 1.0 - rho) * g_cur - (mf * (mf + a)).sqrt() * g_prev)
            / ((mf + 1.0) * (mf + a + 1.0)).sqrt();
        g_prev = g_cur;
        g_cur = g_next;
        if g_cur.abs() > 1e200 {
            g_cur *= 1e-200;
            g_prev *= 1e-200;
            scale += 200.0 * std::f64::consts::LN_10;
        }
        out.push(emit(g_cur, scale));
    }
    Ok(out)
}

/// Laguerre function `I_{m+alpha,m}(rho) = sqrt(m!/Gamma(m+alpha+1)) e^{-rho/2} rho^{alpha/2} L_m^alpha(rho)`.
pub fn laguerre_fn(m: usize, alpha: RealOrder, rho: f64) -> Result<f64> {
    Ok(*laguerre_fn_table(m, alpha, rho)?.last().expect("table has m+1 entries"))
}

/// Regularized upper incomplete gamma `Q(a, x) = Gamma(a, x)/Gamma(a)` for `a > 0`, `x >= 0`.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(Error::domain(format!("gamma_q needs a > 0 and x >= 0, got ({a}, {x})")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let ln_pref = -x + a * x.ln() - ln_gamma_unchecked(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = 1.0;
        while term.abs() > 1e-17 * sum.abs() {
            term *= x / (a + n);
            sum += term;
            n += 1.0;
            if n > 10_000.0 {
                break;
            }
        }
        return Ok(1.0 - sum * ln_pref.exp());
    }
    // modified Lentz evaluation of the continued fraction
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    Ok(ln_pref.exp() * h)
}
