//! The four preparation protocols plus free-form pulse sequences.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::motional::{required_n_max, FockSpace, MotionalState, DEFAULT_N_MAX};
use crate::{Error, Result, C64};

use super::ops::{Engine, EngineConfig};
use super::pulse::{displacement_unit, resonant_duration, DispersiveRate, PulseSpec, Target};
use super::report::{
    BranchReport, MotionalStateFile, ProtocolReport, RecordReport, SampleReport, TraceReport, VibronicStateFile,
};
use super::state::VibronicState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// One resonant pulse from the ground state: `N+1` coherent components on a line.
    MultiCat,
    /// Dispersive twist then resonant pulse: `|±Nα/2⟩` correlated with `|j,±j⟩_x`.
    EntangledCat,
    /// `EntangledCat` followed by post-selection on `|ee…e⟩` / `|gg…g⟩`.
    CatPostselect,
    /// `EntangledCat` plus a second twist: even/odd cats with probability ≈ 1/2 each.
    CatDeterministic,
    /// Explicit pulse list from the configuration.
    Sequence,
}

impl ProtocolKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProtocolKind::MultiCat => "multi_cat",
            ProtocolKind::EntangledCat => "entangled_cat",
            ProtocolKind::CatPostselect => "cat_postselect",
            ProtocolKind::CatDeterministic => "cat_deterministic",
            ProtocolKind::Sequence => "sequence",
        }
    }
}

/// Whether the carrier `π/2` pulse accompanies each dispersive twist.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierMode {
    /// Only for even `N`.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Clone, Debug)]
pub struct ProtocolOptions {
    pub rabi: f64,
    pub eta: f64,
    pub dispersive: DispersiveRate,
    /// Fock truncation; derived from the target amplitude when absent.
    pub n_max: Option<usize>,
    pub carrier: CarrierMode,
    /// Explicit resonant duration, bypassing the solve from `alpha_target`.
    pub resonant_duration: Option<f64>,
    /// Pulses for [`ProtocolKind::Sequence`].
    pub sequence: Vec<PulseSpec>,
    pub engine: EngineConfig,
    /// `(seed, shots)` for the demonstration sampler.
    pub sampling: Option<(u64, u64)>,
}

impl ProtocolOptions {
    pub fn new(rabi: f64, eta: f64, dispersive: DispersiveRate) -> Self {
        ProtocolOptions {
            rabi,
            eta,
            dispersive,
            n_max: None,
            carrier: CarrierMode::Auto,
            resonant_duration: None,
            sequence: Vec::new(),
            engine: EngineConfig::default(),
            sampling: None,
        }
    }
}

/// Joint state after a named protocol step.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub label: String,
    pub state: VibronicState,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub outcome: String,
    pub probability: f64,
    pub state: MotionalState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleCounts {
    pub seed: u64,
    pub shots: u64,
    pub all_excited: u64,
    pub all_ground: u64,
    pub other: u64,
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub kind: ProtocolKind,
    pub engine: Engine,
    pub alpha_target: C64,
    /// Unit displacement `α₁(τ)` of the resonant pulse, when there is one.
    pub alpha_unit: Option<C64>,
    pub final_state: VibronicState,
    pub branches: Vec<Branch>,
    pub trace: Vec<TraceReport>,
    pub records: Vec<StepRecord>,
    pub samples: Option<SampleCounts>,
}

impl ProtocolResult {
    pub fn branch(&self, outcome: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.outcome == outcome)
    }

    pub fn to_report(&self) -> ProtocolReport {
        let spin = self.engine.spin();
        ProtocolReport {
            protocol: self.kind.as_str().to_string(),
            n_ions: self.engine.n_ions(),
            n_max: self.engine.space().n_max(),
            alpha_target: [self.alpha_target.re, self.alpha_target.im],
            final_state: VibronicStateFile::from_state(&self.final_state),
            branches: self
                .branches
                .iter()
                .map(|b| BranchReport {
                    outcome: b.outcome.clone(),
                    probability: b.probability,
                    state: MotionalStateFile::from_state(&b.state),
                })
                .collect(),
            trace: self.trace.clone(),
            records: self
                .records
                .iter()
                .map(|r| RecordReport {
                    label: r.label.clone(),
                    norm: r.state.norm(),
                    mean_jz: r.state.mean_jz(spin),
                    mean_n: r.state.mean_n(),
                })
                .collect(),
            samples: self.samples.map(|s| SampleReport {
                seed: s.seed,
                shots: s.shots,
                all_excited: s.all_excited,
                all_ground: s.all_ground,
                other: s.other,
            }),
        }
    }
}

/// Draws `shots` independent measurement outcomes from the two extremal
/// probabilities (the remainder counts as `other`).
pub fn sample_outcomes(p_excited: f64, p_ground: f64, shots: u64, seed: u64) -> SampleCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = SampleCounts { seed, shots, all_excited: 0, all_ground: 0, other: 0 };
    for _ in 0..shots {
        let u: f64 = rng.random();
        if u < p_excited {
            counts.all_excited += 1;
        } else if u < p_excited + p_ground {
            counts.all_ground += 1;
        } else {
            counts.other += 1;
        }
    }
    counts
}

struct Runner {
    engine: Engine,
    state: VibronicState,
    trace: Vec<TraceReport>,
    records: Vec<StepRecord>,
    branches: Vec<Branch>,
    alpha_unit: Option<C64>,
}

impl Runner {
    fn new(engine: Engine) -> Self {
        let state = engine.ground_state();
        let records = vec![StepRecord { label: "initial".into(), state: state.clone() }];
        Runner { engine, state, trace: Vec::new(), records, branches: Vec::new(), alpha_unit: None }
    }

    fn step(&mut self, spec: PulseSpec, label: &str) -> Result<()> {
        spec.validate()?;
        let mut entry = TraceReport { pulse: spec.clone(), duration: None, rate_times_duration: None, displacement_unit: None };
        match spec {
            PulseSpec::Postselect { target } => {
                let outcome = self.engine.postselect(&self.state, target)?;
                let spin = self.engine.spin().z_state(match target {
                    Target::AllExcited => self.engine.spin().j(),
                    Target::AllGround => -self.engine.spin().j(),
                })?;
                self.state = VibronicState::product(&spin, &outcome.state)?;
                self.branches.push(Branch {
                    outcome: target.as_str().to_string(),
                    probability: outcome.probability,
                    state: outcome.state,
                });
            }
            PulseSpec::ResonantBichromatic { order, rabi, eta, duration, .. } => {
                let unit = displacement_unit(order, rabi, eta, duration);
                entry.duration = Some(duration);
                entry.rate_times_duration = Some(rabi * duration);
                entry.displacement_unit = Some([unit.re, unit.im]);
                if order == 1 {
                    self.alpha_unit = Some(unit);
                }
                self.state = self.engine.apply(&self.state, &spec)?;
            }
            PulseSpec::DispersiveBichromatic { duration, .. } => {
                entry.duration = Some(duration);
                entry.rate_times_duration = Some(spec.dispersive_rate()?.lambda() * duration);
                self.state = self.engine.apply(&self.state, &spec)?;
            }
            PulseSpec::Carrier { .. } => {
                self.state = self.engine.apply(&self.state, &spec)?;
            }
        }
        self.trace.push(entry);
        self.records.push(StepRecord { label: label.to_string(), state: self.state.clone() });
        Ok(())
    }

    /// Conditional states on `|ee…e⟩` and `|gg…g⟩` of the current state.
    fn z_branches(&mut self) -> Result<()> {
        for target in [Target::AllExcited, Target::AllGround] {
            match self.engine.postselect(&self.state, target) {
                Ok(o) => self.branches.push(Branch {
                    outcome: target.as_str().to_string(),
                    probability: o.probability,
                    state: o.state,
                }),
                Err(Error::DegenerateOutcome { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    /// Conditional states on `|j,±j⟩_x`.
    fn x_branches(&mut self) -> Result<()> {
        let j = self.engine.spin().j();
        for (name, m) in [("x_plus_j", j), ("x_minus_j", -j)] {
            let spin = self.engine.spin().x_state(m)?;
            match self.engine.condition(&self.state, &spin) {
                Ok((probability, state)) => {
                    self.branches.push(Branch { outcome: name.to_string(), probability, state })
                }
                Err(Error::DegenerateOutcome { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

/// Runs a named protocol from the vibronic ground state.
///
/// Resonant pulses use `J_x` (`φ = π/2`) and last `τ = |α|/(2Ωη)`; dispersive
/// pulses last `π/(2λ)`. For even `N` (or `CarrierMode::Always`) each twist is
/// followed by a carrier rotation `e^{-i(π/2)J_y}`, which commutes with it.
pub fn run_protocol(kind: ProtocolKind, n_ions: usize, alpha_target: C64, options: &ProtocolOptions) -> Result<ProtocolResult> {
    if n_ions == 0 {
        return Err(Error::invalid("ion count must be at least 1"));
    }
    if !(alpha_target.re.is_finite() && alpha_target.im.is_finite()) {
        return Err(Error::invalid("alpha_target must be finite"));
    }
    let largest = n_ions as f64 / 2.0 * alpha_target.norm();
    let required = required_n_max(largest);
    let n_max = match options.n_max {
        Some(n) if n < required && kind != ProtocolKind::Sequence => {
            return Err(Error::Truncation {
                detail: format!("alpha_target |{:.4}| needs amplitude {largest:.4} for N = {n_ions}", alpha_target.norm()),
                n_max: n,
                required,
            })
        }
        Some(n) => n,
        None => DEFAULT_N_MAX.max(required),
    };
    let engine = Engine::with_config(n_ions, FockSpace::new(n_max)?, options.engine)?;
    let mut run = Runner::new(engine);

    let tau = match options.resonant_duration {
        Some(t) => t,
        None => {
            if !(options.rabi > 0.0 && options.eta > 0.0) {
                return Err(Error::invalid("rabi and eta must be positive to solve the pulse duration"));
            }
            resonant_duration(alpha_target.norm(), options.rabi, options.eta)
        }
    };
    let resonant = PulseSpec::resonant_x(1, options.rabi, options.eta, tau);
    let needs_carrier = match options.carrier {
        CarrierMode::Auto => n_ions % 2 == 0,
        CarrierMode::Always => true,
        CarrierMode::Never => false,
    };
    let twist = |run: &mut Runner| -> Result<()> {
        if kind == ProtocolKind::Sequence {
            return Ok(());
        }
        options.dispersive.validate()?;
        let lambda = options.dispersive.lambda();
        run.step(PulseSpec::dispersive(options.dispersive, FRAC_PI_2 / lambda.abs()), "dispersive")?;
        if needs_carrier {
            run.step(PulseSpec::Carrier { theta: FRAC_PI_2, phase: FRAC_PI_2 }, "carrier")?;
        }
        Ok(())
    };

    match kind {
        ProtocolKind::MultiCat => {
            run.step(resonant, "resonant")?;
            run.z_branches()?;
        }
        ProtocolKind::EntangledCat => {
            twist(&mut run)?;
            run.step(resonant, "resonant")?;
            run.x_branches()?;
            run.z_branches()?;
        }
        ProtocolKind::CatPostselect => {
            twist(&mut run)?;
            run.step(resonant, "resonant")?;
            run.z_branches()?;
        }
        ProtocolKind::CatDeterministic => {
            twist(&mut run)?;
            run.step(resonant, "resonant")?;
            twist(&mut run)?;
            run.z_branches()?;
        }
        ProtocolKind::Sequence => {
            if options.sequence.is_empty() {
                return Err(Error::invalid("sequence protocol needs at least one pulse"));
            }
            for (i, spec) in options.sequence.iter().enumerate() {
                run.step(spec.clone(), &format!("{}:{}", i, spec.kind()))?;
            }
            if !matches!(options.sequence.last(), Some(PulseSpec::Postselect { .. })) {
                run.z_branches()?;
            }
        }
    }

    let samples = options.sampling.map(|(seed, shots)| {
        let p = |name: &str| run.branches.iter().find(|b| b.outcome == name).map_or(0.0, |b| b.probability);
        sample_outcomes(p("all_excited"), p("all_ground"), shots, seed)
    });
    Ok(ProtocolResult {
        kind,
        engine: run.engine,
        alpha_target,
        alpha_unit: run.alpha_unit,
        final_state: run.state,
        branches: run.branches,
        trace: run.trace,
        records: run.records,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motional::{coherent_state, fock_distribution};

    fn options() -> ProtocolOptions {
        ProtocolOptions::new(1.0, 0.1, DispersiveRate::Direct { lambda: 1.0 })
    }

    fn cat(space: FockSpace, beta: C64, sign: f64) -> MotionalState {
        let a = coherent_state(beta, space).unwrap();
        let b = coherent_state(-beta, space).unwrap();
        MotionalState::superpose(&[(C64::from(1.0), &a), (C64::from(sign), &b)]).unwrap()
    }

    #[test]
    fn multi_cat_trace_and_branches() {
        let r = run_protocol(ProtocolKind::MultiCat, 3, C64::new(0.0, 3.0), &options()).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.engine.space().n_max(), 96);
        let unit = r.alpha_unit.unwrap();
        assert!((unit.norm() - 3.0).abs() < 1e-12);
        let total: f64 = r.branches.iter().map(|b| b.probability).sum();
        assert!(total <= 1.0 + 1e-12);
        assert!(r.branch("all_excited").is_some());
    }

    #[test]
    fn single_ion_cat_postselect_parities() {
        for alpha in [0.8, 2.0, 3.5] {
            let r = run_protocol(ProtocolKind::CatPostselect, 1, C64::new(0.0, alpha), &options()).unwrap();
            let beta = r.alpha_unit.unwrap() / 2.0;
            let odd = r.branch("all_excited").unwrap();
            let even = r.branch("all_ground").unwrap();
            assert!(1.0 - even.state.fidelity(&cat(r.engine.space(), beta, 1.0)) < 1e-10);
            assert!(1.0 - odd.state.fidelity(&cat(r.engine.space(), beta, -1.0)) < 1e-10);
            let overlap = (-2.0 * beta.norm_sqr()).exp();
            assert!((even.probability - (1.0 + overlap) / 2.0).abs() < 1e-10);
            assert!((odd.probability - (1.0 - overlap) / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_even_n_with_carrier() {
        for n in [2, 4] {
            let r = run_protocol(ProtocolKind::CatDeterministic, n, C64::new(0.0, 1.0), &options()).unwrap();
            assert_eq!(r.trace.iter().filter(|t| t.pulse.kind() == "carrier").count(), 2);
            let e = r.branch("all_excited").unwrap();
            let g = r.branch("all_ground").unwrap();
            assert!((e.probability + g.probability - 1.0).abs() < 1e-9);
            let pe = fock_distribution(&e.state);
            let pg = fock_distribution(&g.state);
            assert!(pe.iter().step_by(2).sum::<f64>() < 1e-12, "N = {n}: excited branch not odd");
            assert!(pg.iter().skip(1).step_by(2).sum::<f64>() < 1e-12, "N = {n}: ground branch not even");
        }
    }

    #[test]
    fn rejects_small_n_max() {
        let mut o = options();
        o.n_max = Some(8);
        assert!(matches!(
            run_protocol(ProtocolKind::MultiCat, 3, C64::new(0.0, 3.0), &o),
            Err(Error::Truncation { n_max: 8, .. })
        ));
    }

    #[test]
    fn sequence_with_midway_postselection() {
        let mut o = options();
        o.n_max = Some(40);
        o.sequence = vec![
            PulseSpec::resonant_x(1, 1.0, 0.1, 5.0),
            PulseSpec::Postselect { target: Target::AllExcited },
        ];
        let r = run_protocol(ProtocolKind::Sequence, 1, C64::from(0.0), &o).unwrap();
        assert_eq!(r.branches.len(), 1);
        assert!((r.final_state.norm() - 1.0).abs() < 1e-12);
        o.sequence.clear();
        assert!(run_protocol(ProtocolKind::Sequence, 1, C64::from(0.0), &o).is_err());
    }

    #[test]
    fn sampler_is_seeded() {
        let a = sample_outcomes(0.3, 0.5, 1000, 7);
        let b = sample_outcomes(0.3, 0.5, 1000, 7);
        assert_eq!(a, b);
        assert_eq!(a.all_excited + a.all_ground + a.other, 1000);
        assert!(a.all_excited > 200 && a.all_excited < 400);
    }

    #[test]
    fn explicit_duration_mode() {
        let mut o = options();
        o.resonant_duration = Some(10.0);
        o.n_max = Some(60);
        let r = run_protocol(ProtocolKind::MultiCat, 2, C64::from(0.0), &o).unwrap();
        assert!((r.alpha_unit.unwrap().norm() - 2.0).abs() < 1e-12);
    }
}
