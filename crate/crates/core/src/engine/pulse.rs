use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Which collective electronic state a post-selection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `|ee…e⟩ = |j, +j⟩_z` (dark event on the cycling transition).
    AllExcited,
    /// `|gg…g⟩ = |j, -j⟩_z`.
    AllGround,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::AllExcited => "all_excited",
            Target::AllGround => "all_ground",
        }
    }
}

/// Coupling rate `λ` of the dispersive gate `e^{-iλt J_y²}`, either supplied
/// directly or derived from the laser parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DispersiveRate {
    Direct { lambda: f64 },
    Physical { rabi: f64, eta: f64, detuning: f64 },
}

impl DispersiveRate {
    /// `λ = 4(Ωη)²/δ`, the second-order rate of the detuned first-sideband
    /// bichromatic Hamiltonian `2Ωη J_T (â e^{iδt} + h.c.)`.
    pub fn lambda(&self) -> f64 {
        match *self {
            DispersiveRate::Direct { lambda } => lambda,
            DispersiveRate::Physical { rabi, eta, detuning } => 4.0 * (rabi * eta).powi(2) / detuning,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DispersiveRate::Direct { lambda } => {
                if !lambda.is_finite() || lambda == 0.0 {
                    return Err(Error::invalid("dispersive rate lambda must be finite and nonzero"));
                }
            }
            DispersiveRate::Physical { rabi, eta, detuning } => {
                finite_all(&[rabi, eta, detuning], "dispersive pulse")?;
                if eta <= 0.0 {
                    return Err(Error::invalid("Lamb-Dicke parameter must be positive"));
                }
                if detuning == 0.0 {
                    return Err(Error::invalid("dispersive pulse needs a nonzero detuning"));
                }
                // dispersive-regime sanity bounds; the thresholds are heuristics
                if eta > 0.2 {
                    log::warn!("dispersive pulse with eta = {eta} > 0.2: the J_y^2 gate is a poor approximation");
                }
                let ratio = (self.lambda() / detuning).abs();
                if ratio > 0.1 {
                    log::warn!("dispersive pulse with |lambda/delta| = {ratio:.3} > 0.1: outside the dispersive regime");
                }
            }
        }
        Ok(())
    }
}

/// One protocol step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseSpec {
    /// Lasers on the `k`-th red and blue sidebands.
    ResonantBichromatic {
        order: u32,
        rabi: f64,
        eta: f64,
        duration: f64,
        /// Common laser phase `φ`; `φ = kπ/2` couples through `J_x`.
        phase: f64,
    },
    /// First sidebands detuned by `δ`; acts as `e^{-iλt J_y²}`.
    ///
    /// Give either `lambda` or all of `rabi`, `eta`, `detuning`.
    DispersiveBichromatic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rabi: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        detuning: Option<f64>,
        duration: f64,
    },
    /// Carrier rotation `e^{-iθ(cos φ·J_x + sin φ·J_y)}`.
    Carrier { theta: f64, phase: f64 },
    Postselect { target: Target },
}

impl PulseSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PulseSpec::ResonantBichromatic { .. } => "resonant_bichromatic",
            PulseSpec::DispersiveBichromatic { .. } => "dispersive_bichromatic",
            PulseSpec::Carrier { .. } => "carrier",
            PulseSpec::Postselect { .. } => "postselect",
        }
    }

    /// Resonant pulse through `J_x` (`φ = kπ/2`).
    pub fn resonant_x(order: u32, rabi: f64, eta: f64, duration: f64) -> Self {
        PulseSpec::ResonantBichromatic { order, rabi, eta, duration, phase: order as f64 * FRAC_PI_2 }
    }

    pub fn dispersive(rate: DispersiveRate, duration: f64) -> Self {
        match rate {
            DispersiveRate::Direct { lambda } => PulseSpec::DispersiveBichromatic {
                lambda: Some(lambda),
                rabi: None,
                eta: None,
                detuning: None,
                duration,
            },
            DispersiveRate::Physical { rabi, eta, detuning } => PulseSpec::DispersiveBichromatic {
                lambda: None,
                rabi: Some(rabi),
                eta: Some(eta),
                detuning: Some(detuning),
                duration,
            },
        }
    }

    /// Rate of a dispersive pulse; errors for other kinds or ambiguous input.
    pub fn dispersive_rate(&self) -> Result<DispersiveRate> {
        match *self {
            PulseSpec::DispersiveBichromatic { lambda, rabi, eta, detuning, .. } => {
                match (lambda, rabi, eta, detuning) {
                    (Some(lambda), None, None, None) => Ok(DispersiveRate::Direct { lambda }),
                    (None, Some(rabi), Some(eta), Some(detuning)) => {
                        Ok(DispersiveRate::Physical { rabi, eta, detuning })
                    }
                    _ => Err(Error::invalid(
                        "dispersive pulse needs either lambda or all of rabi, eta, detuning",
                    )),
                }
            }
            _ => Err(Error::invalid(format!("{} pulse has no dispersive rate", self.kind()))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PulseSpec::ResonantBichromatic { order, rabi, eta, duration, phase } => {
                finite_all(&[*rabi, *eta, *duration, *phase], "resonant pulse")?;
                if *order == 0 {
                    return Err(Error::invalid("sideband order must be at least 1"));
                }
                if *eta <= 0.0 {
                    return Err(Error::invalid("Lamb-Dicke parameter must be positive"));
                }
                if *duration < 0.0 {
                    return Err(Error::invalid("pulse duration must be non-negative"));
                }
            }
            PulseSpec::DispersiveBichromatic { duration, .. } => {
                self.dispersive_rate()?.validate()?;
                if !duration.is_finite() || *duration < 0.0 {
                    return Err(Error::invalid("pulse duration must be finite and non-negative"));
                }
            }
            PulseSpec::Carrier { theta, phase } => finite_all(&[*theta, *phase], "carrier pulse")?,
            PulseSpec::Postselect { .. } => {}
        }
        Ok(())
    }
}

fn finite_all(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what}: parameters must be finite")))
    }
}

/// Unit displacement `α_k(t) = -2iΩtηᵏ/k!` realized by `exp(-iHt)` for the
/// resonant Hamiltonian `H = (2Ωηᵏ/k!) J_T (âᵏ + â†ᵏ)`; the `J_T = m`
/// sector is displaced by `m·α_k(t)`.
pub fn displacement_unit(order: u32, rabi: f64, eta: f64, duration: f64) -> crate::C64 {
    let factorial: f64 = (1..=order).map(f64::from).product();
    crate::C64::new(0.0, -2.0 * rabi * duration * eta.powi(order as i32) / factorial)
}

/// First-sideband duration that produces a unit displacement of magnitude `|α|`.
pub fn resonant_duration(alpha_abs: f64, rabi: f64, eta: f64) -> f64 {
    alpha_abs / (2.0 * rabi * eta)
}

/// Trap and laser constants that fix the centre-of-mass Lamb-Dicke parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Effective wavenumber `q` along the trap axis.
    pub wavenumber: f64,
    /// Single-ion mass.
    pub mass: f64,
    /// Centre-of-mass frequency `ν` (angular).
    pub trap_frequency: f64,
    pub n_ions: usize,
    pub hbar: f64,
}

impl PhysicalParams {
    /// Natural units, `ħ = 1`.
    pub fn natural(wavenumber: f64, mass: f64, trap_frequency: f64, n_ions: usize) -> Self {
        PhysicalParams { wavenumber, mass, trap_frequency, n_ions, hbar: 1.0 }
    }

    /// SI units (m⁻¹, kg, rad/s).
    pub fn si(wavenumber: f64, mass: f64, trap_frequency: f64, n_ions: usize) -> Self {
        PhysicalParams { wavenumber, mass, trap_frequency, n_ions, hbar: HBAR_SI }
    }
}

/// `η = q √(ħ / 2Nmν)`.
pub fn lamb_dicke(params: &PhysicalParams) -> Result<f64> {
    let PhysicalParams { wavenumber, mass, trap_frequency, n_ions, hbar } = *params;
    if !(wavenumber > 0.0 && mass > 0.0 && trap_frequency > 0.0 && hbar > 0.0 && n_ions > 0) {
        return Err(Error::invalid("Lamb-Dicke parameter needs positive q, m, nu, hbar and N"));
    }
    Ok(wavenumber * (hbar / (2.0 * n_ions as f64 * mass * trap_frequency)).sqrt())
}
