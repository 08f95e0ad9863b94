use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{Engine, VibronicState};
use crate::motional::FockSpace;
use crate::{Error, Result, C64};

use super::full_space::FullSpaceState;
use super::integrate::{apply_spin_generator, collective_y, integrate_detuned, integrate_resonant};

pub const EQUIVALENCE_THRESHOLD: f64 = 1.0 - 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub max_ions: usize,
    pub orders: Vec<u32>,
    pub draws: usize,
    pub seed: u64,
    pub n_max: usize,
    /// Feed the engine the opposite displacement sign; the suite must then fail.
    pub negative_control: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { max_ions: 4, orders: vec![1, 2], draws: 3, seed: 2024, n_max: 80, negative_control: false }
    }
}

impl SuiteOptions {
    pub fn quick() -> Self {
        SuiteOptions { max_ions: 2, draws: 1, n_max: 60, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub n_ions: usize,
    pub order: u32,
    pub draw: usize,
    pub rabi: f64,
    pub eta: f64,
    pub duration: f64,
    pub phase: f64,
    pub fidelity: f64,
    pub symmetric_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub threshold: f64,
    pub negative_control: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn worst_fidelity(&self) -> f64 {
        self.checks.iter().map(|c| c.fidelity).fold(1.0, f64::min)
    }
}

struct Draw {
    n_ions: usize,
    order: u32,
    index: usize,
    rabi: f64,
    eta: f64,
    duration: f64,
    phase: f64,
    amplitudes: Vec<C64>,
}

/// Random initial state with Fock support `0..=4`.
fn random_state(rng: &mut ChaCha8Rng, n_ions: usize, fock_dim: usize) -> Vec<C64> {
    let mut amps = vec![C64::from(0.0); (n_ions + 1) * fock_dim];
    for row in 0..=n_ions {
        for n in 0..5.min(fock_dim) {
            amps[row * fock_dim + n] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let norm = crate::linalg::norm_sqr(&amps).sqrt();
    amps.iter().map(|z| z / norm).collect()
}

fn draws(options: &SuiteOptions) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let fock_dim = options.n_max + 1;
    let mut out = Vec::new();
    for n_ions in 1..=options.max_ions {
        for &order in &options.orders {
            for index in 0..options.draws {
                let rabi: f64 = rng.random_range(0.5..2.0);
                let eta: f64 = rng.random_range(0.05..0.2);
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                // |α₁| = 2Ωtη in [0.2, 1.5]; |α₂| = Ωtη² in [0.02, 0.12]
                let duration = match order {
                    1 => rng.random_range(0.2..1.5) / (2.0 * rabi * eta),
                    _ => rng.random_range(0.02..0.12) / (rabi * eta.powi(order as i32)),
                };
                let amplitudes = random_state(&mut rng, n_ions, fock_dim);
                out.push(Draw { n_ions, order, index, rabi, eta, duration, phase, amplitudes });
            }
        }
    }
    out
}

fn check(draw: &Draw, options: &SuiteOptions) -> Result<CheckResult> {
    let space = FockSpace::new(options.n_max)?;
    let initial = VibronicState::from_amplitudes(draw.n_ions, space, &draw.amplitudes)?;
    let engine = Engine::new(draw.n_ions, space)?;
    let engine_duration = if options.negative_control { -draw.duration } else { draw.duration };
    let reduced = engine.apply_resonant(&initial, draw.order, draw.rabi, draw.eta, engine_duration, draw.phase)?;
    let full = integrate_resonant(&FullSpaceState::embed(&initial)?, draw.order, draw.rabi, draw.eta, draw.duration, draw.phase)?;
    let fidelity = full.fidelity(&FullSpaceState::embed(&reduced)?);
    Ok(CheckResult {
        n_ions: draw.n_ions,
        order: draw.order,
        draw: draw.index,
        rabi: draw.rabi,
        eta: draw.eta,
        duration: draw.duration,
        phase: draw.phase,
        fidelity,
        symmetric_residual: full.symmetric_residual()?,
        passed: fidelity >= EQUIVALENCE_THRESHOLD,
    })
}

/// Engine resonant pulses against full-space integration on seeded random draws.
pub fn run_suite(options: &SuiteOptions) -> Result<SuiteReport> {
    if options.max_ions == 0 || options.draws == 0 || options.orders.is_empty() {
        return Err(Error::invalid("validation suite needs ions, orders and draws"));
    }
    let checks = draws(options).par_iter().map(|d| check(d, options)).collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport { threshold: EQUIVALENCE_THRESHOLD, negative_control: options.negative_control, checks })
}

/// Fidelity of the detuned drive (time-ordered integration from the ground
/// state over `t = π/(2λ)`) with the ideal twist `e^{-iλtJ_y²}` on the same
/// register. Step count doubles until the step-halving check passes.
pub fn dispersive_fidelity(n_ions: usize, rabi: f64, eta: f64, detuning: f64, n_max: usize) -> Result<f64> {
    let space = FockSpace::new(n_max)?;
    let ground = FullSpaceState::embed(&VibronicState::ground(n_ions, space)?)?;
    let lambda = 4.0 * (rabi * eta).powi(2) / detuning;
    let t = std::f64::consts::FRAC_PI_2 / lambda;
    let jy = collective_y(n_ions);
    let ideal = apply_spin_generator(&ground, &jy.mul(&jy), lambda * t);
    let mut steps = (t * detuning.abs().max(rabi * eta) * 20.0).ceil() as usize;
    for _ in 0..8 {
        match integrate_detuned(&ground, rabi, eta, detuning, t, steps) {
            Ok(out) => return Ok(out.fidelity(&ideal)),
            Err(Error::Convergence { .. }) => steps *= 2,
            Err(e) => return Err(e),
        }
    }
    integrate_detuned(&ground, rabi, eta, detuning, t, steps).map(|out| out.fidelity(&ideal))
}
