//! Independent numerical helpers shared by the integration tests.
#![allow(dead_code)]

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `ln(sum exp(x_i))` for a nonempty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Scaled kernel `e^{-u^2-v^2} sum_{m>=0, k>=k0} u^{2m} v^{2(m+alpha+k)} / (m! Gamma(m+alpha+k+1))`
/// by brute force over a generous rectangle of terms, in log space.
pub fn raw_kernel(alpha: f64, k0: usize, u: f64, v: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let (lu, lv) = (2.0 * u.ln(), 2.0 * v.ln());
    let top = (2.0 * (u * u + v * v) + 60.0 + 12.0 * (u + v)) as usize;
    let mut logs = Vec::new();
    for m in 0..top {
        let mf = m as f64;
        let lm = if u == 0.0 {
            if m > 0 {
                break;
            }
            0.0
        } else {
            mf * lu
        };
        for k in k0..top {
            let n2 = mf + alpha + k as f64;
            logs.push(lm + n2 * lv - ln_gamma(mf + 1.0) - ln_gamma(n2 + 1.0));
        }
    }
    (log_sum_exp(&logs) - u * u - v * v).exp()
}
