//! JSON documents exchanged with the command line.

use serde::{Deserialize, Serialize};

use crate::motional::{FockSpace, MotionalState};
use crate::{Result, C64};

use super::state::VibronicState;

fn pairs(amps: &[C64]) -> Vec<[f64; 2]> {
    amps.iter().map(|z| [z.re, z.im]).collect()
}

fn complex(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|p| C64::new(p[0], p[1])).collect()
}

/// Motional state on disk: amplitudes of `|0⟩ … |n_max⟩` as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionalStateFile {
    pub n_max: usize,
    pub norm: f64,
    pub mean_n: f64,
    pub parity: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

impl MotionalStateFile {
    pub fn from_state(state: &MotionalState) -> Self {
        MotionalStateFile {
            n_max: state.space().n_max(),
            norm: state.norm(),
            mean_n: state.mean_n(),
            parity: state.parity(),
            amplitudes: pairs(state.amplitudes()),
        }
    }

    pub fn to_state(&self) -> Result<MotionalState> {
        MotionalState::from_amplitudes(FockSpace::new(self.n_max)?, complex(&self.amplitudes))
    }
}

/// Joint state on disk, row-major with the spin index outer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VibronicStateFile {
    pub n_ions: usize,
    pub n_max: usize,
    pub spin_dim: usize,
    pub fock_dim: usize,
    pub norm: f64,
    pub truncation_loss: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

impl VibronicStateFile {
    pub fn from_state(state: &VibronicState) -> Self {
        VibronicStateFile {
            n_ions: state.n_ions(),
            n_max: state.space().n_max(),
            spin_dim: state.spin_dim(),
            fock_dim: state.space().dim(),
            norm: state.norm(),
            truncation_loss: state.truncation_loss(),
            amplitudes: pairs(&state.amplitudes()),
        }
    }

    pub fn to_state(&self) -> Result<VibronicState> {
        VibronicState::from_amplitudes(self.n_ions, FockSpace::new(self.n_max)?, &complex(&self.amplitudes))
    }
}

/// One conditional motional state with its probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchReport {
    /// `all_excited`, `all_ground`, `x_plus_j` or `x_minus_j`.
    pub outcome: String,
    pub probability: f64,
    pub state: MotionalStateFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceReport {
    pub pulse: super::PulseSpec,
    /// Raw duration `t` (absent for carrier rotations and measurements).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub duration: Option<f64>,
    /// `Ω·t` for resonant pulses, `λ·t` for dispersive ones.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rate_times_duration: Option<f64>,
    /// Unit displacement `α_k(t)` of a resonant pulse.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub displacement_unit: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordReport {
    pub label: String,
    pub norm: f64,
    pub mean_jz: f64,
    pub mean_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleReport {
    pub seed: u64,
    pub shots: u64,
    pub all_excited: u64,
    pub all_ground: u64,
    pub other: u64,
}

/// Serialized `ProtocolResult`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolReport {
    pub protocol: String,
    pub n_ions: usize,
    pub n_max: usize,
    pub alpha_target: [f64; 2],
    pub final_state: VibronicStateFile,
    pub branches: Vec<BranchReport>,
    pub trace: Vec<TraceReport>,
    pub records: Vec<RecordReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<SampleReport>,
}

impl ProtocolReport {
    pub fn branch(&self, outcome: &str) -> Option<&BranchReport> {
        self.branches.iter().find(|b| b.outcome == outcome)
    }
}
