//! Model parameters, unit conventions and conversions.
//!
//! Phase-space coordinates `(X, P)` are measured in units of the kick-potential
//! wavelength `Λ = π/k` (the period of `cos(2kx)`) and `mνΛ`. In these units the
//! quantum kick phase is periodic in `X` with period 1 and a coherent amplitude
//! maps to `α = π(X + iP)/(2η)`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced Planck constant in SI units.
pub const HBAR: f64 = 1.054_571_817e-34;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduces `r/q` and checks the resonance requirement `q > 2`.
pub fn reduce_resonance(r: u64, q: u64) -> Result<(u64, u64)> {
    if r == 0 || q == 0 {
        return Err(Error::InvalidResonance { r, q });
    }
    let g = gcd(r, q);
    let (rr, qq) = (r / g, q / g);
    if qq <= 2 {
        return Err(Error::InvalidResonance { r, q });
    }
    Ok((rr, qq))
}

/// Free rotation angle per kick period, `ντ = 2πr/q`.
pub fn nu_tau(r: u64, q: u64) -> Result<f64> {
    let (r, q) = reduce_resonance(r, q)?;
    Ok(2.0 * PI * r as f64 / q as f64)
}

/// Dimensionless definition of the kicked oscillator.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub r: u64,
    pub q: u64,
    pub eta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub fock_dim: usize,
    pub n_kicks: u64,
}

impl ModelParams {
    pub fn new(
        r: u64,
        q: u64,
        eta: f64,
        kappa1: f64,
        kappa2: f64,
        fock_dim: usize,
        n_kicks: u64,
    ) -> Result<Self> {
        let (r, q) = reduce_resonance(r, q)?;
        check_eta(eta)?;
        for (name, k) in [("kappa1", kappa1), ("kappa2", kappa2)] {
            if !k.is_finite() || k < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and non-negative, got {k}"),
                });
            }
        }
        if fock_dim < 2 {
            return Err(Error::InvalidParameter {
                name: "fock_dim",
                reason: format!("must be at least 2, got {fock_dim}"),
            });
        }
        Ok(ModelParams {
            r,
            q,
            eta,
            kappa1,
            kappa2,
            fock_dim,
            n_kicks,
        })
    }

    pub fn nu_tau(&self) -> f64 {
        2.0 * PI * self.r as f64 / self.q as f64
    }

    pub fn delta_kappa(&self) -> f64 {
        self.kappa2 - self.kappa1
    }
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("must be positive and finite, got {eta}"),
        })
    }
}

/// Classical phase-space point in `(Λ, mνΛ)` units.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const fn new(x: f64, p: f64) -> Self {
        PhasePoint { x, p }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.p)
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.x - other.x).hypot(self.p - other.p)
    }
}

/// Coherent amplitude equivalent to a classical phase point, `α = π(X + iP)/(2η)`.
pub fn alpha_from_phasepoint(pp: PhasePoint, eta: f64) -> Complex64 {
    debug_assert!(eta > 0.0);
    Complex64::new(pp.x, pp.p) * (PI / (2.0 * eta))
}

/// Inverse of [`alpha_from_phasepoint`].
pub fn phasepoint_from_alpha(alpha: Complex64, eta: f64) -> PhasePoint {
    debug_assert!(eta > 0.0);
    let s = 2.0 * eta / PI;
    PhasePoint::new(s * alpha.re, s * alpha.im)
}

/// Validity thresholds for the far-detuned, short-pulse kick model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdiabaticBounds {
    /// Upper bound on `|Ω/Δ|`.
    pub max_rabi_ratio: f64,
    /// Lower bound on `σ|Δ|`.
    pub min_width_detuning: f64,
}

impl Default for AdiabaticBounds {
    fn default() -> Self {
        AdiabaticBounds {
            max_rabi_ratio: 0.1,
            min_width_detuning: 10.0,
        }
    }
}

/// Laboratory parameters of one laser-driven ground state (SI units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Peak Rabi frequency Ω (rad/s).
    pub rabi: f64,
    /// Signed detuning Δ = ω_L − ω₀ (rad/s).
    pub detuning: f64,
    /// Gaussian pulse width σ (s).
    pub pulse_width: f64,
    /// Ion mass (kg).
    pub mass: f64,
    /// Trap frequency ν (rad/s).
    pub trap_freq: f64,
    /// Laser wavenumber k (1/m).
    pub wavenumber: f64,
}

/// Result of converting laboratory parameters into model parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickStrength {
    pub eta: f64,
    /// Dimensionless kick strength κ.
    pub kappa: f64,
    /// Kick strength K in joule-seconds.
    pub big_k: f64,
    pub rabi_ratio: f64,
    pub width_detuning: f64,
}

impl PhysicalParams {
    /// Lamb-Dicke parameter `η = k√(ħ/2mν)`.
    pub fn eta(&self) -> f64 {
        self.wavenumber * (HBAR / (2.0 * self.mass * self.trap_freq)).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("physical.pulse_width", self.pulse_width),
            ("physical.mass", self.mass),
            ("physical.trap_freq", self.trap_freq),
            ("physical.wavenumber", self.wavenumber),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        if !self.rabi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "physical.rabi",
                reason: format!("must be finite, got {}", self.rabi),
            });
        }
        if !self.detuning.is_finite() || self.detuning == 0.0 {
            return Err(Error::InvalidParameter {
                name: "physical.detuning",
                reason: format!("must be finite and nonzero, got {}", self.detuning),
            });
        }
        Ok(())
    }
}

/// Converts laboratory parameters to `(η, κ, K)`, checking the far-detuning
/// and pulse-width preconditions of the kick model.
///
/// `κ = Ω²η²σ√(2π)/(8Δ)` and `K = ħσ√π Ω²/(8Δ)`, so that `κ = √2 η² K/ħ`.
/// A negative detuning gives negative κ and K.
pub fn kappa_from_physical(
    phys: &PhysicalParams,
    bounds: &AdiabaticBounds,
) -> Result<KickStrength> {
    phys.validate()?;
    let rabi_ratio = (phys.rabi / phys.detuning).abs();
    if rabi_ratio >= bounds.max_rabi_ratio {
        return Err(Error::AdiabaticValidity {
            bound: "|rabi/detuning|",
            value: rabi_ratio,
            limit: bounds.max_rabi_ratio,
        });
    }
    let width_detuning = phys.pulse_width * phys.detuning.abs();
    if width_detuning <= bounds.min_width_detuning {
        return Err(Error::AdiabaticValidity {
            bound: "pulse_width*|detuning|",
            value: width_detuning,
            limit: bounds.min_width_detuning,
        });
    }
    let eta = phys.eta();
    let omega2 = phys.rabi * phys.rabi;
    let kappa = omega2 * eta * eta * phys.pulse_width * (2.0 * PI).sqrt() / (8.0 * phys.detuning);
    let big_k = HBAR * phys.pulse_width * PI.sqrt() * omega2 / (8.0 * phys.detuning);
    Ok(KickStrength {
        eta,
        kappa,
        big_k,
        rabi_ratio,
        width_detuning,
    })
}

impl KickStrength {
    /// `√2 η² K/ħ`, which must equal `kappa`.
    pub fn kappa_from_big_k(&self) -> f64 {
        SQRT_2 * self.eta * self.eta * self.big_k / HBAR
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonance_angles() {
        assert!((nu_tau(1, 6).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((nu_tau(1, 4).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(matches!(nu_tau(2, 2), Err(Error::InvalidResonance { .. })));
        // 2/4 reduces to 1/2
        assert!(nu_tau(2, 4).is_err());
        assert_eq!(reduce_resonance(2, 12).unwrap(), (1, 6));
    }

    #[test]
    fn model_params_validation() {
        assert!(ModelParams::new(1, 6, 0.5, 0.2, 0.225, 400, 1000).is_ok());
        assert!(ModelParams::new(1, 6, 0.0, 0.2, 0.225, 400, 1000).is_err());
        assert!(ModelParams::new(1, 6, 0.5, -0.1, 0.225, 400, 1000).is_err());
        assert!(ModelParams::new(1, 6, 0.5, 0.2, 0.225, 1, 1000).is_err());
        let p = ModelParams::new(3, 18, 0.5, 0.2, 0.225, 400, 10).unwrap();
        assert_eq!((p.r, p.q), (1, 6));
        assert!((p.delta_kappa() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn reference_initial_conditions() {
        let a = alpha_from_phasepoint(PhasePoint::new(1.0, 0.0), 0.5);
        assert!((a - Complex64::new(PI, 0.0)).norm() < 1e-15);

        assert_eq!(
            alpha_from_phasepoint(PhasePoint::default(), 0.37),
            Complex64::new(0.0, 0.0)
        );

        let a = alpha_from_phasepoint(PhasePoint::new(0.0, 2.0 / 3f64.sqrt()), 0.25);
        assert!((a - Complex64::new(0.0, 4.0 * PI / 3f64.sqrt())).norm() < 1e-13);

        let pp = phasepoint_from_alpha(Complex64::new(PI, 0.0), 0.5);
        assert!((pp.x - 1.0).abs() < 1e-15 && pp.p.abs() < 1e-15);
    }

    #[test]
    fn no_light_no_kick() {
        let phys = PhysicalParams {
            rabi: 0.0,
            detuning: 2.0e8,
            pulse_width: 1.0e-6,
            mass: 6.6e-26,
            trap_freq: 2.0 * PI * 1.0e6,
            wavenumber: 1.58e7,
        };
        let ks = kappa_from_physical(&phys, &AdiabaticBounds::default()).unwrap();
        assert_eq!(ks.kappa, 0.0);
        assert_eq!(ks.big_k, 0.0);
    }

    #[test]
    fn adiabatic_bounds_are_enforced() {
        let base = PhysicalParams {
            rabi: 1.0e7,
            detuning: 2.0e7,
            pulse_width: 1.0e-6,
            mass: 6.6e-26,
            trap_freq: 2.0 * PI * 1.0e6,
            wavenumber: 1.58e7,
        };
        let err = kappa_from_physical(&base, &AdiabaticBounds::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::AdiabaticValidity {
                bound: "|rabi/detuning|",
                ..
            }
        ));

        let short = PhysicalParams {
            rabi: 1.0e6,
            pulse_width: 1.0e-7,
            ..base
        };
        let err = kappa_from_physical(&short, &AdiabaticBounds::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::AdiabaticValidity {
                bound: "pulse_width*|detuning|",
                ..
            }
        ));

        let relaxed = AdiabaticBounds {
            max_rabi_ratio: 1.0,
            min_width_detuning: 1.0,
        };
        assert!(kappa_from_physical(&base, &relaxed).is_ok());
    }

    #[test]
    fn negative_detuning_flips_sign() {
        let phys = PhysicalParams {
            rabi: 1.0e7,
            detuning: 2.0e8,
            pulse_width: 1.0e-6,
            mass: 6.6e-26,
            trap_freq: 2.0 * PI * 1.0e6,
            wavenumber: 1.58e7,
        };
        let pos = kappa_from_physical(&phys, &AdiabaticBounds::default()).unwrap();
        let neg = kappa_from_physical(
            &PhysicalParams {
                detuning: -2.0e8,
                ..phys
            },
            &AdiabaticBounds::default(),
        )
        .unwrap();
        assert!(pos.kappa > 0.0);
        assert_eq!(neg.kappa, -pos.kappa);
    }
}
