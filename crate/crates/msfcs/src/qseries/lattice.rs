//! Log-space Poisson lattices for the scaled double series.
//!
//! A scaled kernel term factorizes as `p(m; lam_a) * p(alpha + i; lam_b)` with
//! `p(x; lam) = e^{-lam} lam^x / Gamma(1 + x)`, restricted to `i >= m + k0`.
//! Everything is summed relative to the largest admissible term, so nothing
//! under- or overflows even when the scaled kernel itself is below `f64::MIN_POSITIVE`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::ln_poisson;

/// Log-distance below the peak term at which lattice windows are cut.
const CUT: f64 = 46.0;

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PoissonLattice {
    pub offset: f64,
    pub lam: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Window {
    pub lo: usize,
    pub hi: usize,
    pub ln: Vec<f64>,
    /// Log of an upper bound on the lattice mass outside `[lo, hi]`.
    pub ln_out: f64,
}

impl PoissonLattice {
    pub fn ln_w(&self, i: usize) -> f64 {
        let x = self.offset + i as f64;
        if x <= -1.0 {
            return f64::NEG_INFINITY;
        }
        if self.lam == 0.0 {
            return if x == 0.0 { 0.0 } else { f64::NEG_INFINITY };
        }
        ln_poisson(x, self.lam)
    }

    pub fn peak(&self) -> usize {
        if self.lam == 0.0 {
            let i = -self.offset;
            return if i >= 0.0 && i.fract() == 0.0 { i as usize } else { 0 };
        }
        let mut i = (self.lam - self.offset).floor().max(0.0) as usize;
        if self.offset + i as f64 <= -1.0 {
            i += 1;
        }
        i
    }

    pub fn window(&self, thr: f64) -> Window {
        let pk = self.peak();
        let mut lo = pk;
        while lo > 0 && self.ln_w(lo - 1) >= thr {
            lo -= 1;
        }
        let mut hi = pk;
        while self.ln_w(hi + 1) >= thr {
            hi += 1;
        }
        let ln: Vec<f64> = (lo..=hi).map(|i| self.ln_w(i)).collect();
        let mut ln_out = f64::NEG_INFINITY;
        if self.lam > 0.0 {
            if lo > 0 {
                let le = self.ln_w(lo - 1);
                let xe = self.offset + (lo - 1) as f64;
                let q = if xe > 0.0 { xe / self.lam } else { 0.0 };
                ln_out = logaddexp(ln_out, le - (1.0 - q).ln());
            }
            let he = self.ln_w(hi + 1);
            let xe = self.offset + (hi + 1) as f64;
            let r = self.lam / (xe + 1.0);
            ln_out = logaddexp(ln_out, he - (1.0 - r).ln());
        }
        Window { lo, hi, ln, ln_out }
    }
}

/// Running sum `c * e^s` (complex) with a parallel absolute sum `a * e^s`.
#[derive(Debug, Clone, Copy)]
struct Acc {
    c: Complex64,
    a: f64,
    s: f64,
}

impl Acc {
    const ZERO: Acc = Acc {
        c: Complex64::new(0.0, 0.0),
        a: 0.0,
        s: f64::NEG_INFINITY,
    };

    fn push(self, ln: f64, phase: Complex64) -> Acc {
        let s = self.s.max(ln);
        if s == f64::NEG_INFINITY {
            return self;
        }
        let f_new = (ln - s).exp();
        let f_old = if self.s == f64::NEG_INFINITY {
            0.0
        } else {
            (self.s - s).exp()
        };
        Acc {
            c: phase * f_new + self.c * f_old,
            a: f_new + self.a * f_old,
            s,
        }
    }
}

/// Result of a lattice sum, expressed relative to `e^{ln_scale}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RelSum {
    pub sum: Complex64,
    pub abs: f64,
    pub trunc: f64,
    pub n_terms: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub alpha: f64,
    pub k0: usize,
    pub a: PoissonLattice,
    pub b: PoissonLattice,
    pub phase_a: f64,
    pub phase_b: f64,
    pub ln_peak: f64,
    pub wa: Window,
    pub wb: Window,
    ln_tot_a: f64,
    ln_tot_b: f64,
}

fn phase(angle: f64, x: f64) -> Complex64 {
    if angle == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, angle * x)
    }
}

impl Plan {
    /// Plan the sum over `m >= 0`, `i >= m + k0` of `p(m; lam_a) p(alpha + i; lam_b)`.
    /// Returns `None` when every term vanishes exactly.
    pub fn new(
        alpha: f64,
        k0: usize,
        lam_a: f64,
        lam_b: f64,
        phase_a: f64,
        phase_b: f64,
    ) -> Result<Option<Plan>> {
        if !(alpha >= -1.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("kernel order must be >= -1, got {alpha}")));
        }
        if !(lam_a >= 0.0 && lam_b >= 0.0) || !lam_a.is_finite() || !lam_b.is_finite() {
            return Err(Error::domain("kernel arguments must be finite"));
        }
        if lam_b == 0.0 && k0 == 0 && alpha < 0.0 && alpha != -1.0 {
            return Err(Error::domain(
                "leading kernel term v^{2 alpha}/Gamma(1+alpha) is infinite at v = 0 for alpha < 0",
            ));
        }
        let a = PoissonLattice {
            offset: 0.0,
            lam: lam_a,
        };
        let b = PoissonLattice {
            offset: alpha,
            lam: lam_b,
        };
        let pk_a = a.peak();
        let pk_b = b.peak();
        let ln_a_max = a.ln_w(pk_a);
        let ln_b_max = b.ln_w(pk_b);
        let ln_peak = if pk_b >= pk_a + k0 {
            ln_a_max + ln_b_max
        } else {
            (0..=pk_a)
                .map(|m| a.ln_w(m) + b.ln_w(pk_b.max(m + k0)))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        if ln_peak == f64::NEG_INFINITY {
            return Ok(None);
        }
        let wa = a.window(ln_peak - CUT - ln_b_max);
        let wb = b.window(ln_peak - CUT - ln_a_max);
        let lse = |w: &Window| w.ln.iter().fold(w.ln_out, |acc, &l| logaddexp(acc, l));
        let ln_tot_a = lse(&wa);
        let ln_tot_b = lse(&wb);
        Ok(Some(Plan {
            alpha,
            k0,
            a,
            b,
            phase_a,
            phase_b,
            ln_peak,
            wa,
            wb,
            ln_tot_a,
            ln_tot_b,
        }))
    }

    /// Largest slot indices covered by the windows, as `(m_hi, x_hi)`.
    pub fn extent(&self) -> (f64, f64) {
        (self.wa.hi as f64, self.alpha + self.wb.hi as f64)
    }

    fn window_trunc(&self, envelope: f64) -> f64 {
        let t1 = (self.wa.ln_out + self.ln_tot_b - self.ln_peak).exp();
        let t2 = (self.wb.ln_out + self.ln_tot_a - self.ln_peak).exp();
        envelope * (t1 + t2)
    }

    /// Sum with a weight depending on the `m` slot only.
    pub fn sum_slot_a(&self, f: &dyn Fn(f64) -> Complex64, envelope: f64) -> RelSum {
        let nb = self.wb.hi - self.wb.lo + 1;
        let mut suffix = vec![Acc::ZERO; nb + 1];
        for idx in (0..nb).rev() {
            let x = self.alpha + (self.wb.lo + idx) as f64;
            suffix[idx] = suffix[idx + 1].push(self.wb.ln[idx], phase(self.phase_b, x));
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let mut n_terms = 0;
        for (k, &lna) in self.wa.ln.iter().enumerate() {
            let m = self.wa.lo + k;
            let n = m + self.k0;
            if n > self.wb.hi {
                break;
            }
            let acc = suffix[n.saturating_sub(self.wb.lo)];
            let lt = lna + acc.s - self.ln_peak;
            if lt == f64::NEG_INFINITY {
                continue;
            }
            let e = lt.exp();
            let w = f(m as f64);
            sum += w * phase(self.phase_a, m as f64) * acc.c * e;
            abs += w.norm() * acc.a * e;
            n_terms += 1;
        }
        RelSum {
            sum,
            abs,
            trunc: self.window_trunc(envelope),
            n_terms,
        }
    }

    /// Sum with a weight depending on the `alpha + i` slot only.
    pub fn sum_slot_b(&self, g: &dyn Fn(f64) -> Complex64, envelope: f64) -> RelSum {
        let na = self.wa.hi - self.wa.lo + 1;
        let mut prefix = Vec::with_capacity(na);
        let mut acc = Acc::ZERO;
        for (k, &lna) in self.wa.ln.iter().enumerate() {
            let m = (self.wa.lo + k) as f64;
            acc = acc.push(lna, phase(self.phase_a, m));
            prefix.push(acc);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let mut n_terms = 0;
        for (k, &lnb) in self.wb.ln.iter().enumerate() {
            let i = self.wb.lo + k;
            if i < self.wa.lo + self.k0 {
                continue;
            }
            let top = (i - self.k0).min(self.wa.hi);
            let acc = prefix[top - self.wa.lo];
            let lt = lnb + acc.s - self.ln_peak;
            if lt == f64::NEG_INFINITY {
                continue;
            }
            let e = lt.exp();
            let x = self.alpha + i as f64;
            let w = g(x);
            sum += w * phase(self.phase_b, x) * acc.c * e;
            abs += w.norm() * acc.a * e;
            n_terms += 1;
        }
        RelSum {
            sum,
            abs,
            trunc: self.window_trunc(envelope),
            n_terms,
        }
    }

    /// Sum with a general weight `w(m, alpha + i)`.
    pub fn sum_pair(&self, w: &dyn Fn(f64, f64) -> Complex64, envelope: f64) -> RelSum {
        let pk_b = self.b.peak();
        let thr = -CUT;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let mut pruned = 0.0;
        let mut n_terms = 0;
        for (k, &lna) in self.wa.ln.iter().enumerate() {
            let m = self.wa.lo + k;
            let start = (m + self.k0).max(self.wb.lo);
            if start > self.wb.hi {
                break;
            }
            let pa = phase(self.phase_a, m as f64);
            for i in start..=self.wb.hi {
                let lt = lna + self.wb.ln[i - self.wb.lo] - self.ln_peak;
                if i > pk_b && lt < thr {
                    let x = self.alpha + i as f64;
                    let r = self.b.lam / (x + 1.0);
                    pruned += lt.exp() / (1.0 - r);
                    break;
                }
                if lt == f64::NEG_INFINITY {
                    continue;
                }
                let x = self.alpha + i as f64;
                let e = lt.exp();
                let wt = w(m as f64, x);
                sum += wt * pa * phase(self.phase_b, x) * e;
                abs += wt.norm() * e;
                n_terms += 1;
            }
        }
        RelSum {
            sum,
            abs,
            trunc: self.window_trunc(envelope) + envelope * pruned,
            n_terms,
        }
    }

    /// `1 - sum` for the real kernel (no phases), accurate when the kernel is close to one.
    ///
    /// Uses `1 - Tail_b(n) = Head_b(n) + (1 - Total_b)` and `sum_m p(m; lam_a) = 1`.
    pub fn complement(&self, one_minus_total_b: f64) -> (f64, f64) {
        let la = self.a.lam;
        let lb = self.b.lam;
        let span = la.max(lb);
        let n_max = (span + 20.0 * span.sqrt() + 60.0).ceil() as usize + self.k0;
        let mut head = vec![f64::NEG_INFINITY; n_max + 2];
        for n in 1..=n_max + 1 {
            head[n] = logaddexp(head[n - 1], self.b.ln_w(n - 1));
        }
        let mut terms: Vec<f64> = Vec::with_capacity(n_max + 1);
        for m in 0..=(n_max - self.k0) {
            terms.push(self.a.ln_w(m) + head[m + self.k0]);
        }
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        if top > f64::NEG_INFINITY {
            for t in &terms {
                s += (t - top).exp();
            }
        }
        let m_end = n_max - self.k0 + 1;
        let r = la / (m_end as f64 + 1.0);
        let tail = if la > 0.0 {
            (self.a.ln_w(m_end) - (1.0 - r).ln()).exp()
        } else {
            0.0
        };
        let value = s * top.exp() + one_minus_total_b;
        let err = tail + 1e-15 * (s * top.exp()).abs() + 1e-15 * one_minus_total_b.abs();
        (value, err)
    }
}
