//! Field configuration, flux decomposition and species bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Split the signed flux ratio into integer part and mantissa.
///
/// Returns `(l0, mu, vartheta)` with `nu = flux_ratio * sign_b = l0 + mu`, `mu` in `[0, 1)`.
/// `vartheta` is the sign of the flux, `+1` when the flux vanishes.
pub fn decompose_flux(flux_ratio: f64, sign_b: i32) -> Result<(i64, f64, i32)> {
    if !flux_ratio.is_finite() {
        return Err(Error::domain("flux ratio must be finite"));
    }
    if sign_b != 1 && sign_b != -1 {
        return Err(Error::domain("sign_b must be +1 or -1"));
    }
    let nu = flux_ratio * sign_b as f64;
    let l0 = nu.floor();
    let mut mu = nu - l0;
    let mut l0 = l0 as i64;
    // nu slightly below an integer can round the mantissa up to exactly 1
    if mu >= 1.0 {
        mu = 0.0;
        l0 += 1;
    }
    let vartheta = if flux_ratio < 0.0 { -1 } else { 1 };
    Ok((l0, mu, vartheta))
}

/// Spin-shifted mantissa: `mu` for `sigma = 0`, else `mu - vartheta*eps*(1 - vartheta*sigma)/2`.
pub fn mu_sigma(mu: f64, vartheta: i32, eps: i32, sigma: i32) -> f64 {
    if sigma == 0 {
        return mu;
    }
    let te = (vartheta * eps) as f64;
    mu - 0.5 * te * (1.0 - (vartheta * sigma) as f64)
}

fn check_sign(name: &str, s: i32) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be +1 or -1, got {s}")))
    }
}

/// Uniform field plus flux line, in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub gamma: f64,
    pub eps: i32,
    pub vartheta: i32,
    pub l0: i64,
    pub mu: f64,
    pub pure_field: bool,
}

impl FieldConfig {
    pub fn new(gamma: f64, eps: i32, vartheta: i32, l0: i64, mu: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
        }
        check_sign("eps", eps)?;
        check_sign("vartheta", vartheta)?;
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::Config(format!("mu must lie in [0,1), got {mu}")));
        }
        Ok(Self {
            gamma,
            eps,
            vartheta,
            l0,
            mu,
            pure_field: mu == 0.0 && l0 == 0,
        })
    }

    /// Build from the physical flux ratio `Phi/Phi0` and the sign of `B`.
    pub fn from_flux(gamma: f64, eps: i32, flux_ratio: f64, sign_b: i32) -> Result<Self> {
        let (l0, mu, vartheta) = decompose_flux(flux_ratio, sign_b)?;
        Self::new(gamma, eps, vartheta, l0, mu)
    }

    pub fn mu_sigma(&self, sigma: i32) -> f64 {
        mu_sigma(self.mu, self.vartheta, self.eps, sigma)
    }

    /// `l0 + mu`, the flux term entering the angular momentum.
    pub fn flux(&self) -> f64 {
        self.l0 as f64 + self.mu
    }

    /// Magnetic quantum length `sqrt(2/gamma)`.
    pub fn r_quant(&self) -> f64 {
        (2.0 / self.gamma).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Species {
    Spinless,
    NR2p1SpinUp,
    NR2p1SpinDown,
    NR3p1,
    Rel3p1,
    Rel2p1Massive,
    Massless2p1,
}

impl Species {
    pub const ALL: [Species; 7] = [
        Species::Spinless,
        Species::NR2p1SpinUp,
        Species::NR2p1SpinDown,
        Species::NR3p1,
        Species::Rel3p1,
        Species::Rel2p1Massive,
        Species::Massless2p1,
    ];

    pub fn is_nonrelativistic(self) -> bool {
        matches!(
            self,
            Species::Spinless | Species::NR2p1SpinUp | Species::NR2p1SpinDown | Species::NR3p1
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Species::Spinless => "Spinless",
            Species::NR2p1SpinUp => "NR2p1SpinUp",
            Species::NR2p1SpinDown => "NR2p1SpinDown",
            Species::NR3p1 => "NR3p1",
            Species::Rel3p1 => "Rel3p1",
            Species::Rel2p1Massive => "Rel2p1Massive",
            Species::Massless2p1 => "Massless2p1",
        }
    }
}

impl std::str::FromStr for Species {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Species::ALL
            .iter()
            .copied()
            .find(|sp| sp.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown species '{s}'")))
    }
}

/// Species tag plus the quantum numbers that select the ICS sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub species: Species,
    pub mass: f64,
    pub sigma: i32,
    pub branch: i32,
    pub s_pol: i32,
    pub lambda: f64,
    pub p3: f64,
}

impl ParticleSpec {
    /// Validate a full specification. `sigma = None` picks the value implied by the species.
    ///
    /// NR spin-up and massive 2+1 use `sigma = branch`, NR spin-down `sigma = -branch`,
    /// NR 3+1 ties the polarization to `s_pol = sigma*branch`.
    pub fn new(
        species: Species,
        mass: f64,
        sigma: Option<i32>,
        branch: i32,
        lambda: f64,
        p3: f64,
    ) -> Result<Self> {
        check_sign("branch", branch)?;
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::Config(format!("mass must be finite and >= 0, got {mass}")));
        }
        match species {
            Species::Massless2p1 => {
                if mass != 0.0 {
                    return Err(Error::Config("Massless2p1 requires mass = 0".into()));
                }
            }
            _ => {
                if mass <= 0.0 {
                    return Err(Error::Config(format!("{} requires mass > 0", species.name())));
                }
            }
        }
        let implied = match species {
            Species::Spinless => Some(0),
            Species::NR2p1SpinUp | Species::Rel2p1Massive => Some(branch),
            Species::NR2p1SpinDown => Some(-branch),
            _ => None,
        };
        let sigma = match (sigma, implied) {
            (Some(s), Some(i)) if s != i => {
                return Err(Error::Config(format!(
                    "{} with branch {branch} requires sigma = {i}, got {s}",
                    species.name()
                )))
            }
            (_, Some(i)) => i,
            (Some(s), None) => {
                check_sign("sigma", s)?;
                s
            }
            (None, None) => 1,
        };
        if species == Species::Rel3p1 {
            if lambda == 0.0 || !lambda.is_finite() {
                return Err(Error::Config("Rel3p1 requires a finite nonzero lambda".into()));
            }
            if (lambda > 0.0) != (branch > 0) {
                return Err(Error::Config("Rel3p1 requires sign(lambda) = branch".into()));
            }
        }
        let s_pol = if sigma == 0 { 1 } else { sigma * branch };
        Ok(Self {
            species,
            mass,
            sigma,
            branch,
            s_pol,
            lambda,
            p3,
        })
    }

    pub fn spinless(mass: f64) -> Self {
        Self::new(Species::Spinless, mass, None, 1, 0.0, 0.0).expect("valid spinless spec")
    }

    pub fn nr_spin_up(mass: f64, branch: i32) -> Self {
        Self::new(Species::NR2p1SpinUp, mass, None, branch, 0.0, 0.0).expect("valid spin-up spec")
    }

    pub fn massless() -> Self {
        Self::new(Species::Massless2p1, 0.0, None, 1, 0.0, 0.0).expect("valid massless spec")
    }

    /// Spin values entering the norm: both signs for the massless case, one otherwise.
    pub fn kernel_sigmas(&self) -> Vec<i32> {
        match self.species {
            Species::Massless2p1 => vec![1, -1],
            _ => vec![self.sigma],
        }
    }

    /// Spin value used in the `R^2` and `J_z` operator relations.
    ///
    /// The massless Hamiltonian is built at `sigma = -vartheta`, so that value is used there.
    pub fn radius_sigma(&self, field: &FieldConfig) -> i32 {
        match self.species {
            Species::Massless2p1 => -field.vartheta,
            _ => self.sigma,
        }
    }

    pub fn has_pi0_weight(&self) -> bool {
        self.species == Species::Rel2p1Massive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_flux(2.5, 1).unwrap(), (2, 0.5, 1));
        let (l0, mu, th) = decompose_flux(-0.3, 1).unwrap();
        assert_eq!((l0, th), (-1, -1));
        assert!((mu - 0.7).abs() < 1e-15);
        assert_eq!(decompose_flux(3.0, 1).unwrap(), (3, 0.0, 1));
        assert!(decompose_flux(f64::NAN, 1).is_err());
        assert!(decompose_flux(1.0, 0).is_err());
    }

    #[test]
    fn zero_flux_sets_pure_field() {
        let f = FieldConfig::from_flux(1.0, 1, 0.0, 1).unwrap();
        assert!(f.pure_field);
        assert_eq!(f.vartheta, 1);
    }

    #[test]
    fn mu_sigma_examples() {
        assert!((mu_sigma(0.3, 1, 1, 1) - 0.3).abs() < 1e-15);
        assert!((mu_sigma(0.3, 1, 1, -1) + 0.7).abs() < 1e-15);
        assert!((mu_sigma(0.3, -1, 1, 1) - 1.3).abs() < 1e-15);
        assert_eq!(mu_sigma(0.3, -1, -1, 0), 0.3);
    }

    #[test]
    fn species_sigma_rules() {
        assert!(ParticleSpec::new(Species::NR2p1SpinUp, 1.0, Some(-1), 1, 0.0, 0.0).is_err());
        let down = ParticleSpec::new(Species::NR2p1SpinDown, 1.0, None, 1, 0.0, 0.0).unwrap();
        assert_eq!(down.sigma, -1);
        let nr3 = ParticleSpec::new(Species::NR3p1, 1.0, Some(-1), 1, 0.0, 0.0).unwrap();
        assert_eq!(nr3.s_pol, -1);
        assert!(ParticleSpec::new(Species::Rel3p1, 1.0, Some(1), 1, -0.5, 0.0).is_err());
        assert!(ParticleSpec::new(Species::Massless2p1, 1.0, None, 1, 0.0, 0.0).is_err());
        assert!(ParticleSpec::new(Species::Spinless, 0.0, None, 1, 0.0, 0.0).is_err());
        assert_eq!("massless2p1".parse::<Species>().unwrap(), Species::Massless2p1);
    }
}
