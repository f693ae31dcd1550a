//! Time-dependent coherent states and mean trajectories.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherent::{self, decode_position, diag_moment, lowering_kernels, norm_sum, CoherentState, Moment};
use crate::error::{Error, Result};
use crate::params::Species;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvolutionMode {
    NonRelT,
    LightCone,
    QuasiCS,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionSpec {
    pub mode: EvolutionMode,
    /// `gamma/M` for `NonRelT`, `gamma/(lambda M)` for `LightCone`; unused by `QuasiCS`.
    pub omega: f64,
    pub psi0: f64,
    pub times: Vec<f64>,
    /// Energy branch for `QuasiCS` (+1 particle, -1 antiparticle).
    pub branch: i32,
}

impl EvolutionSpec {
    pub fn new(mode: EvolutionMode, omega: f64, psi0: f64, times: Vec<f64>, branch: i32) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("omega must be positive, got {omega}")));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("times must be strictly increasing"));
        }
        if branch != 1 && branch != -1 {
            return Err(Error::domain("branch must be +1 or -1"));
        }
        Ok(Self {
            mode,
            omega,
            psi0,
            times,
            branch,
        })
    }

    /// Evenly spaced times `0, dt, ..., t_max` (`samples` points).
    pub fn linspace(mode: EvolutionMode, omega: f64, psi0: f64, t_max: f64, samples: usize, branch: i32) -> Result<Self> {
        if samples < 2 {
            return Err(Error::domain("need at least two samples"));
        }
        let times = (0..samples)
            .map(|i| t_max * i as f64 / (samples - 1) as f64)
            .collect();
        Self::new(mode, omega, psi0, times, branch)
    }
}

/// `-|z1| e^{-i sigma (omega t + psi0)}`.
pub fn z1_of_t(mod_z1: f64, psi0: f64, sigma: i32, omega: f64, t: f64) -> Complex64 {
    -Complex64::from_polar(mod_z1, -(sigma as f64) * (omega * t + psi0))
}

/// `-|z1| e^{-i (omega~ x_- + psi0)}`.
pub fn z1_of_xminus(mod_z1: f64, psi0: f64, omega_tilde: f64, x_minus: f64) -> Complex64 {
    -Complex64::from_polar(mod_z1, -(omega_tilde * x_minus + psi0))
}

/// Phase `psi0` such that `z1 = -|z1| e^{-i psi0}`.
pub fn psi0_of(z1: Complex64) -> f64 {
    if z1.norm() == 0.0 {
        0.0
    } else {
        -(-z1).arg()
    }
}

/// `Pi0(n1) = sqrt(M^2 + 2 gamma [n1 + (1 - sigma eps)/2])`.
pub fn pi0_spectral(n1: f64, mass: f64, gamma: f64, sigma: i32, eps: i32) -> f64 {
    (mass * mass + 2.0 * gamma * (n1 + 0.5 * (1.0 - (sigma * eps) as f64))).sqrt()
}

/// `Omega(n1) = Pi0(n1+1) - Pi0(n1)`, in the cancellation-free form `2 gamma / (Pi0(n1+1) + Pi0(n1))`.
pub fn omega_spectral(n1: f64, mass: f64, gamma: f64, sigma: i32, eps: i32) -> f64 {
    let p = pi0_spectral(n1, mass, gamma, sigma, eps);
    2.0 * gamma / ((p * p + 2.0 * gamma).sqrt() + p)
}

/// Mean `a1` of the massless quasi-CS at time `t`: each `(n1, n2)` term of the numerator picks
/// up `e^{-i branch Omega(n1) t}`.
pub fn quasi_mean_a1(cs0: &CoherentState, t: f64, branch: i32) -> Result<Complex64> {
    if cs0.spec.species != Species::Massless2p1 {
        return Err(Error::Mode("quasi-CS evolution is defined for the massless 2+1 species".into()));
    }
    let g = cs0.field.gamma;
    let eps = cs0.field.eps;
    let sigma = cs0.radius_sigma();
    let b = branch as f64;
    let phase = move |n1: f64| Complex64::from_polar(1.0, -b * omega_spectral(n1, 0.0, g, sigma, eps) * t);
    let norm = norm_sum(cs0)?;
    let (k1, _) = lowering_kernels(cs0.j);
    let s = diag_moment(cs0, k1, Moment::N1c(&phase), 0, 1.0)?;
    Ok(cs0.z1 * s.ratio(&norm))
}

/// One sample of a mean trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub x_mean: f64,
    pub y_mean: f64,
    pub a1: Complex64,
    pub norm: f64,
    pub r2_mean: f64,
}

fn check_mode(cs: &CoherentState, mode: EvolutionMode) -> Result<()> {
    let ok = match mode {
        EvolutionMode::NonRelT => cs.spec.species.is_nonrelativistic(),
        EvolutionMode::LightCone => cs.spec.species == Species::Rel3p1,
        EvolutionMode::QuasiCS => cs.spec.species == Species::Massless2p1,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Mode(format!(
            "{:?} evolution does not apply to {}",
            mode,
            cs.spec.species.name()
        )))
    }
}

/// Means along the evolution; `z2` stays fixed.
pub fn mean_trajectory(cs0: &CoherentState, evo: &EvolutionSpec) -> Result<Vec<TrajectorySample>> {
    check_mode(cs0, evo.mode)?;
    let a2 = coherent::mean_a(cs0, 2)?;
    let n1 = coherent::mean_n(cs0, 1)?;
    let (r2, ..) = r2_from(cs0, n1);
    let mz1 = cs0.z1.norm();
    evo.times
        .iter()
        .map(|&t| {
            let (a1, norm) = match evo.mode {
                EvolutionMode::QuasiCS => (quasi_mean_a1(cs0, t, evo.branch)?, norm_sum(cs0)?.value().re),
                mode => {
                    let z1 = if mode == EvolutionMode::NonRelT {
                        z1_of_t(mz1, evo.psi0, 1, evo.omega, t)
                    } else {
                        z1_of_xminus(mz1, evo.psi0, evo.omega, t)
                    };
                    let cs = cs0.with_z1(z1);
                    (coherent::mean_a(&cs, 1)?, norm_sum(&cs)?.value().re)
                }
            };
            let (x, y) = decode_position(cs0, a1, a2);
            Ok(TrajectorySample {
                time: t,
                x_mean: x,
                y_mean: y,
                a1,
                norm,
                r2_mean: r2,
            })
        })
        .collect()
}

fn r2_from(cs: &CoherentState, n1: f64) -> (f64,) {
    let sigma = cs.radius_sigma() as f64;
    ((2.0 * n1 + 1.0 - sigma * cs.field.eps as f64) / cs.field.gamma,)
}

/// Geometry of a sampled mean trajectory against its predicted circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleFit {
    pub center: (f64, f64),
    pub radius: f64,
    /// `max | |p - center| - radius |`.
    pub residual: f64,
    /// Angular rate of `p - center`, fitted by unwrapped-phase least squares.
    pub rate: f64,
}

/// Compares samples with the circle of centre `sqrt(2/gamma) a2` and radius `sqrt(2/gamma)|a1|`.
pub fn circle_fit(cs0: &CoherentState, samples: &[TrajectorySample]) -> Result<CircleFit> {
    let a2 = coherent::mean_a(cs0, 2)?;
    let center = decode_position(cs0, Complex64::new(0.0, 0.0), a2);
    let radius = (2.0 / cs0.field.gamma).sqrt() * samples.first().map_or(0.0, |s| s.a1.norm());
    let residual = samples
        .iter()
        .map(|s| ((s.x_mean - center.0).hypot(s.y_mean - center.1) - radius).abs())
        .fold(0.0, f64::max);
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    let rel: Vec<Complex64> = samples
        .iter()
        .map(|s| Complex64::new(s.x_mean - center.0, s.y_mean - center.1))
        .collect();
    let fit = fit_rotation_frequency(&times, &rel)?;
    Ok(CircleFit {
        center,
        radius,
        residual,
        rate: fit.omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyFit {
    /// Slope of the unwrapped phase.
    pub omega: f64,
    pub intercept: f64,
    /// RMS phase residual.
    pub residual: f64,
}

/// Least-squares fit of the unwrapped phase of `values` to `omega t + c`.
pub fn fit_rotation_frequency(times: &[f64], values: &[Complex64]) -> Result<FrequencyFit> {
    if times.len() != values.len() {
        return Err(Error::domain("times and values differ in length"));
    }
    if times.len() < 64 {
        return Err(Error::Sampling(format!("need at least 64 samples, got {}", times.len())));
    }
    if values.iter().any(|v| !(v.norm() > 0.0)) {
        return Err(Error::Sampling("phase undefined at a zero sample".into()));
    }
    let mut phase = Vec::with_capacity(values.len());
    let mut acc = values[0].arg();
    phase.push(acc);
    for w in values.windows(2) {
        let d = (w[1] / w[0]).arg();
        if d.abs() > 0.9 * PI {
            return Err(Error::Sampling(
                "phase step near pi: sampling too coarse to unwrap".into(),
            ));
        }
        acc += d;
        phase.push(acc);
    }
    let n = times.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let pm = phase.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, p) in times.iter().zip(&phase) {
        sxy += (t - tm) * (p - pm);
        sxx += (t - tm) * (t - tm);
    }
    let omega = sxy / sxx;
    let intercept = pm - omega * tm;
    let residual = (times
        .iter()
        .zip(&phase)
        .map(|(t, p)| (p - omega * t - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FrequencyFit {
        omega,
        intercept,
        residual,
    })
}

/// Fitted quasi-CS rotation frequency `|d arg a1 / dt|` over `periods` classical periods.
pub fn quasi_rotation_frequency(cs0: &CoherentState, branch: i32, periods: f64, samples: usize) -> Result<FrequencyFit> {
    let g = cs0.field.gamma;
    let e = (2.0 * g).sqrt() * cs0.z1.norm();
    if e == 0.0 {
        return Err(Error::Degenerate("quasi-CS rotation needs z1 != 0".into()));
    }
    let period = 2.0 * PI * e / g;
    let times: Vec<f64> = (0..samples)
        .map(|i| periods * period * i as f64 / (samples - 1) as f64)
        .collect();
    let vals = times
        .iter()
        .map(|&t| quasi_mean_a1(cs0, t, branch))
        .collect::<Result<Vec<_>>>()?;
    let mut fit = fit_rotation_frequency(&times, &vals)?;
    fit.omega = fit.omega.abs();
    Ok(fit)
}
