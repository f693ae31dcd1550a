//! Classical motion in the uniform field plus flux line.
//!
//! Kinetic momenta are covariant components, `P_k = -p0 dx^k/dt`, so that
//! `a1 = -sqrt(gamma/2) R e^{-i psi}` and `z = -(p3/p0) t + z0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::FieldConfig;

/// Orbit parameters of the closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalTrajectory {
    pub r: f64,
    pub rc: f64,
    /// Angle of the orbit centre.
    pub alpha_c: f64,
    pub psi0: f64,
    pub p0: f64,
    pub p3: f64,
    pub z0: f64,
    pub eps: i32,
    pub gamma: f64,
    pub mass: f64,
}

/// Position and kinetic momentum at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotionInvariants {
    pub a1: Complex64,
    pub a2: Complex64,
    pub lz: f64,
    pub lambda: f64,
    pub e_perp_sq: f64,
    pub r: f64,
    pub rc: f64,
    pub alpha_c: f64,
    pub psi: f64,
}

impl ClassicalTrajectory {
    pub fn new(r: f64, rc: f64, alpha_c: f64, psi0: f64, p0: f64, p3: f64, z0: f64, eps: i32, gamma: f64, mass: f64) -> Result<Self> {
        if !(r >= 0.0 && rc >= 0.0) {
            return Err(Error::domain("R and Rc must be nonnegative"));
        }
        if !(p0 > 0.0) {
            return Err(Error::domain(format!("p0 must be positive, got {p0}")));
        }
        if !(gamma > 0.0) {
            return Err(Error::domain("gamma must be positive"));
        }
        if eps != 1 && eps != -1 {
            return Err(Error::domain("eps must be +1 or -1"));
        }
        Ok(Self {
            r,
            rc,
            alpha_c,
            psi0,
            p0,
            p3,
            z0,
            eps,
            gamma,
            mass,
        })
    }

    /// Trajectory through a phase-space point at `t = 0`.
    pub fn from_state(s: &PhaseState, gamma: f64, eps: i32, mass: f64) -> Result<Self> {
        let inv = invariants_of(s, gamma, eps, 0.0, mass);
        Self::new(inv.r, inv.rc, inv.alpha_c, inv.psi, s.p0, s.p3, s.z, eps, gamma, mass)
    }

    pub fn omega(&self) -> f64 {
        self.gamma / self.p0
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega()
    }

    pub fn center(&self) -> (f64, f64) {
        (self.rc * self.alpha_c.cos(), self.rc * self.alpha_c.sin())
    }

    /// Phase-space point at time `t`.
    pub fn state_at(&self, t: f64) -> PhaseState {
        let psi = self.omega() * t + self.psi0;
        let e = self.eps as f64;
        let (x0, y0) = self.center();
        let g = self.gamma;
        PhaseState {
            x: x0 + self.r * psi.cos(),
            y: y0 - e * self.r * psi.sin(),
            z: -(self.p3 / self.p0) * t + self.z0,
            p1: g * self.r * psi.sin(),
            p2: e * g * self.r * psi.cos(),
            p3: self.p3,
            p0: self.p0,
        }
    }
}

/// `(x, y, z)` at time `t`.
pub fn trajectory_at(traj: &ClassicalTrajectory, t: f64) -> Result<(f64, f64, f64)> {
    if !(traj.p0 > 0.0) {
        return Err(Error::domain("p0 must be positive"));
    }
    let s = traj.state_at(t);
    Ok((s.x, s.y, s.z))
}

fn rhs(s: &[f64; 6], p0: f64, gamma: f64, eps: f64) -> [f64; 6] {
    let w = gamma / p0;
    [
        -s[3] / p0,
        -s[4] / p0,
        -s[5] / p0,
        w * eps * s[4],
        -w * eps * s[3],
        0.0,
    ]
}

/// Classic RK4 for the Lorentz equations with a uniform field; samples every step.
pub fn integrate_lorentz(initial: &PhaseState, gamma: f64, eps: i32, t_final: f64, step: f64) -> Result<Vec<(f64, PhaseState)>> {
    if !(step > 0.0) || !(t_final >= 0.0) {
        return Err(Error::domain("step must be positive and t_final nonnegative"));
    }
    if !(initial.p0 > 0.0) {
        return Err(Error::domain("p0 must be positive"));
    }
    let e = eps as f64;
    let n = (t_final / step).ceil() as usize;
    let h = if n == 0 { 0.0 } else { t_final / n as f64 };
    let mut y = [initial.x, initial.y, initial.z, initial.p1, initial.p2, initial.p3];
    let pack = |y: &[f64; 6]| PhaseState {
        x: y[0],
        y: y[1],
        z: y[2],
        p1: y[3],
        p2: y[4],
        p3: y[5],
        p0: initial.p0,
    };
    let check_axis = |y: &[f64; 6]| -> Result<()> {
        if y[0].hypot(y[1]) < 1e-12 {
            Err(Error::Degenerate(
                "trajectory passes through the solenoid axis; orbit type undefined".into(),
            ))
        } else {
            Ok(())
        }
    };
    check_axis(&y)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push((0.0, pack(&y)));
    let f = |y: &[f64; 6]| rhs(y, initial.p0, gamma, e);
    for i in 0..n {
        let k1 = f(&y);
        let mut tmp = [0.0; 6];
        for d in 0..6 {
            tmp[d] = y[d] + 0.5 * h * k1[d];
        }
        let k2 = f(&tmp);
        for d in 0..6 {
            tmp[d] = y[d] + 0.5 * h * k2[d];
        }
        let k3 = f(&tmp);
        for d in 0..6 {
            tmp[d] = y[d] + h * k3[d];
        }
        let k4 = f(&tmp);
        for d in 0..6 {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        check_axis(&y)?;
        out.push(((i + 1) as f64 * h, pack(&y)));
    }
    Ok(out)
}

/// Integrals of motion; `flux` is `l0 + mu` and enters only `L_z`.
pub fn invariants_of(s: &PhaseState, gamma: f64, eps: i32, flux: f64, mass: f64) -> MotionInvariants {
    let e = eps as f64;
    let sg = (2.0 * gamma).sqrt();
    let a1 = Complex64::new(-e * s.p2, s.p1) / sg;
    let a2 = (gamma / 2.0).sqrt() * Complex64::new(s.x, -e * s.y) + Complex64::new(-e * s.p2, -s.p1) / sg;
    let r2 = s.x * s.x + s.y * s.y;
    // generalized momenta in the symmetric gauge plus the flux-line potential
    let k = if r2 > 0.0 { gamma / 2.0 + flux / r2 } else { gamma / 2.0 };
    let gp1 = s.p1 + e * k * s.y;
    let gp2 = s.p2 - e * k * s.x;
    let lz = if r2 > 0.0 {
        s.y * gp1 - s.x * gp2
    } else {
        e * flux
    };
    let scale = (2.0 / gamma).sqrt();
    // a1 = -sqrt(gamma/2) R e^{-i psi}, a2 = sqrt(gamma/2) Rc e^{-i eps alpha}
    let r = scale * a1.norm();
    let rc = scale * a2.norm();
    let psi = if r > 0.0 { -(-a1).arg() } else { 0.0 };
    let alpha_c = if rc > 0.0 { -e * a2.arg() } else { 0.0 };
    MotionInvariants {
        a1,
        a2,
        lz,
        lambda: if mass > 0.0 { (s.p0 + s.p3) / mass } else { f64::NAN },
        e_perp_sq: s.p1 * s.p1 + s.p2 * s.p2,
        r,
        rc,
        alpha_c,
        psi,
    }
}

/// Invariants using the flux of a field configuration.
pub fn invariants_in(s: &PhaseState, field: &FieldConfig, mass: f64) -> MotionInvariants {
    invariants_of(s, field.gamma, field.eps, field.flux(), mass)
}

/// `1` if the orbit embraces the solenoid (`R > Rc`), `0` if not.
pub fn classify_orbit(r: f64, rc: f64) -> Result<u8> {
    if !(r >= 0.0 && rc >= 0.0) {
        return Err(Error::domain("R and Rc must be nonnegative"));
    }
    if r == rc {
        return Err(Error::AmbiguousOrbit);
    }
    Ok(if r > rc { 1 } else { 0 })
}

/// Net number of turns of a sampled closed orbit around the origin.
pub fn winding_number(points: &[(f64, f64)]) -> i64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        let a = w[0].1.atan2(w[0].0);
        let b = w[1].1.atan2(w[1].0);
        let mut d = b - a;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Point on the light-cone parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LightConePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi: f64,
}

/// Trajectory as a function of `x_- = t - z`, with `psi = omega~ x_- + psi_lc`,
/// `omega~ = gamma/(lambda M)`; `psi_lc` is the phase at `x_- = 0`.
///
/// `lambda` must equal `(p0 + p3)/M` for the trajectory.
pub fn lightcone_trajectory(traj: &ClassicalTrajectory, lambda: f64, x_minus: f64) -> Result<LightConePoint> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::domain("lambda must be nonzero"));
    }
    if !(traj.mass > 0.0) {
        return Err(Error::domain("light-cone form needs M > 0"));
    }
    let lam_traj = (traj.p0 + traj.p3) / traj.mass;
    if (lam_traj - lambda).abs() > 1e-12 * lambda.abs() {
        return Err(Error::domain(format!(
            "lambda {lambda} does not match (p0+p3)/M = {lam_traj}"
        )));
    }
    let lm = lambda * traj.mass;
    // t - z = t (p0+p3)/p0 - z0
    let t = traj.p0 * (x_minus + traj.z0) / lm;
    let z = t - x_minus;
    let omega_t = traj.gamma / lm;
    let psi_lc = traj.psi0 + omega_t * traj.z0;
    let psi = omega_t * x_minus + psi_lc;
    let e = traj.eps as f64;
    let (x0, y0) = traj.center();
    Ok(LightConePoint {
        t,
        x: x0 + traj.r * psi.cos(),
        y: y0 - e * traj.r * psi.sin(),
        z,
        psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ClassicalTrajectory {
        ClassicalTrajectory::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn phase_zero_and_half_period() {
        let tr = unit();
        let (x, y, z) = trajectory_at(&tr, 0.0).unwrap();
        assert_eq!((x, y, z), (1.0, 0.0, 0.5));
        let (x, y, _) = trajectory_at(&tr, std::f64::consts::PI / tr.omega()).unwrap();
        assert!((x + 1.0).abs() < 1e-15 && y.abs() < 1e-15);
    }

    #[test]
    fn classify() {
        assert_eq!(classify_orbit(2.0, 1.0).unwrap(), 1);
        assert_eq!(classify_orbit(1.0, 2.0).unwrap(), 0);
        assert!(matches!(classify_orbit(1.0, 1.0), Err(Error::AmbiguousOrbit)));
    }

    #[test]
    fn invariants_reproduce_parameters() {
        let tr = ClassicalTrajectory::new(2.0, 3.0, 0.7, 0.3, 1.2, 0.4, 0.0, -1, 1.7, 1.0).unwrap();
        let inv = invariants_of(&tr.state_at(0.0), tr.gamma, tr.eps, 0.0, tr.mass);
        assert!((inv.r - 2.0).abs() < 1e-13 && (inv.rc - 3.0).abs() < 1e-13);
        assert!((inv.alpha_c - 0.7).abs() < 1e-13 && (inv.psi - 0.3).abs() < 1e-13);
        assert!((inv.e_perp_sq - (tr.gamma * 2.0).powi(2)).abs() < 1e-12);
    }
}
