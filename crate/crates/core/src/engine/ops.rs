use std::f64::consts::FRAC_PI_2;

use crate::linalg::{CMatrix, CVector};
use crate::motional::{FockSpace, GeneralizedDisplacement, MotionalState, DEFAULT_MAX_ORDER};
use crate::spin::{axis_eigenbasis, SpinOperators, DEFAULT_MAX_IONS};
use crate::{Error, Result, C64};

use super::pulse::{displacement_unit, PulseSpec, Target};
use super::state::VibronicState;

/// Probabilities below this make a post-selected state undefined.
const DEGENERATE_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineConfig {
    pub max_ions: usize,
    /// Highest sideband order accepted for resonant pulses.
    pub max_order: u32,
    /// Largest norm a single pulse may push past `n_max`.
    pub norm_tolerance: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_ions: DEFAULT_MAX_IONS, max_order: DEFAULT_MAX_ORDER, norm_tolerance: 1e-9 }
    }
}

/// Conditional motional state after projecting the spin sector.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub target: Target,
    pub probability: f64,
    pub state: MotionalState,
}

/// Pulse engine for a fixed ion number and Fock truncation.
#[derive(Clone, Debug)]
pub struct Engine {
    spin: SpinOperators,
    space: FockSpace,
    config: EngineConfig,
}

impl Engine {
    pub fn new(n_ions: usize, space: FockSpace) -> Result<Self> {
        Self::with_config(n_ions, space, EngineConfig::default())
    }

    pub fn with_config(n_ions: usize, space: FockSpace, config: EngineConfig) -> Result<Self> {
        let spin = SpinOperators::with_limit(n_ions, config.max_ions)?;
        Ok(Engine { spin, space, config })
    }

    pub fn spin(&self) -> &SpinOperators {
        &self.spin
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn n_ions(&self) -> usize {
        self.spin.n_ions()
    }

    pub fn ground_state(&self) -> VibronicState {
        VibronicState::ground(self.n_ions(), self.space).expect("engine has N >= 1")
    }

    fn check(&self, state: &VibronicState) -> Result<()> {
        if state.n_ions() != self.n_ions() || state.space() != self.space {
            return Err(Error::invalid(format!(
                "state (N = {}, n_max = {}) does not match engine (N = {}, n_max = {})",
                state.n_ions(),
                state.space().n_max(),
                self.n_ions(),
                self.space.n_max()
            )));
        }
        Ok(())
    }

    fn with_spin_unitary(&self, state: &VibronicState, u: &CMatrix) -> VibronicState {
        VibronicState::from_matrix(self.n_ions(), self.space, u * state.matrix(), state.truncation_loss())
    }

    /// Applies any non-measurement pulse.
    pub fn apply(&self, state: &VibronicState, spec: &PulseSpec) -> Result<VibronicState> {
        spec.validate()?;
        match *spec {
            PulseSpec::ResonantBichromatic { order, rabi, eta, duration, phase } => {
                self.apply_resonant(state, order, rabi, eta, duration, phase)
            }
            PulseSpec::DispersiveBichromatic { duration, .. } => {
                let lambda = spec.dispersive_rate()?.lambda();
                self.apply_dispersive(state, lambda * duration)
            }
            PulseSpec::Carrier { theta, phase } => self.apply_carrier(state, theta, phase),
            PulseSpec::Postselect { .. } => {
                Err(Error::invalid("post-selection is a measurement; use Engine::postselect"))
            }
        }
    }

    /// `U_k(t) = Σ_m D_k(m α_k(t)) |j,m⟩_T⟨j,m|_T`, the exact propagator of
    /// `(2Ωηᵏ/k!) J_T (âᵏ + â†ᵏ)`.
    ///
    /// The laser phase `φ` selects `J_T = cos(φ - kπ/2)·J_x + sin(φ - kπ/2)·J_y`.
    pub fn apply_resonant(
        &self,
        state: &VibronicState,
        order: u32,
        rabi: f64,
        eta: f64,
        duration: f64,
        phase: f64,
    ) -> Result<VibronicState> {
        self.check(state)?;
        let unit = displacement_unit(order, rabi, eta, duration);
        if unit == C64::from(0.0) {
            return Ok(state.clone());
        }
        let axis = phase - order as f64 * FRAC_PI_2;
        let basis = axis_eigenbasis(&self.spin, axis);
        let rotated = basis.adjoint() * state.matrix();
        let top = state.support_top();
        let mut displaced = CMatrix::zeros(rotated.nrows(), rotated.ncols());
        let mut lost = 0.0;
        for (row, m) in self.spin.m_values().into_iter().enumerate() {
            let op = GeneralizedDisplacement::new(order, unit * m, self.space, top, self.config.max_order)?;
            let amps: Vec<C64> = rotated.row(row).iter().copied().collect();
            let (out, row_lost) = op.apply(&amps);
            lost += row_lost;
            for (n, z) in out.into_iter().enumerate() {
                displaced[(row, n)] = z;
            }
        }
        if lost > self.config.norm_tolerance {
            return Err(Error::Truncation {
                detail: format!("resonant pulse pushed norm {lost:.3e} past the truncation"),
                n_max: self.space.n_max(),
                required: crate::motional::required_n_max(self.spin.j() * unit.norm() + (top as f64).sqrt()),
            });
        }
        let mut out = &basis * displaced;
        let norm = out.norm();
        out.unscale_mut(norm);
        Ok(VibronicState::from_matrix(self.n_ions(), self.space, out, state.truncation_loss() + lost))
    }

    /// `e^{-iχ J_y²}` with `χ = λt`; the motional sector is untouched.
    pub fn apply_dispersive(&self, state: &VibronicState, chi: f64) -> Result<VibronicState> {
        self.check(state)?;
        Ok(self.with_spin_unitary(state, &self.spin.twist_y(chi)))
    }

    /// `e^{-iθ(cos φ·J_x + sin φ·J_y)}`.
    pub fn apply_carrier(&self, state: &VibronicState, theta: f64, phase: f64) -> Result<VibronicState> {
        self.check(state)?;
        Ok(self.with_spin_unitary(state, &self.spin.in_plane_rotation(theta, phase)))
    }

    /// Projects onto `|ee…e⟩` or `|gg…g⟩` and renormalizes the motional remainder.
    pub fn postselect(&self, state: &VibronicState, target: Target) -> Result<Outcome> {
        self.check(state)?;
        let row = match target {
            Target::AllExcited => self.n_ions(),
            Target::AllGround => 0,
        };
        let spin = self.spin.z_state(row as f64 - self.spin.j())?;
        let (probability, motion) = self.condition(state, &spin)?;
        Ok(Outcome { target, probability, state: motion })
    }

    /// Probability and renormalized motional state conditioned on the spin
    /// state `spin` (unit vector on the ladder).
    pub fn condition(&self, state: &VibronicState, spin: &CVector) -> Result<(f64, MotionalState)> {
        let component = state.project_spin(spin)?;
        let probability = component.norm_squared().min(1.0);
        if probability < DEGENERATE_PROBABILITY {
            return Err(Error::DegenerateOutcome { probability });
        }
        let amps = component.iter().map(|z| z / probability.sqrt()).collect();
        let motion = MotionalState::from_amplitudes(self.space, amps)?;
        Ok((probability, motion))
    }
}
