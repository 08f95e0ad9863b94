//! Vibronic state of `N` ions plus the centre-of-mass mode, and the pulse
//! protocols that act on it.

mod ops;
mod protocol;
mod pulse;
mod report;
mod state;

pub use ops::{Engine, EngineConfig, Outcome};
pub use protocol::{
    run_protocol, sample_outcomes, CarrierMode, ProtocolKind, ProtocolOptions, ProtocolResult, SampleCounts,
    StepRecord,
};
pub use pulse::{lamb_dicke, resonant_duration, DispersiveRate, PhysicalParams, PulseSpec, Target, HBAR_SI};
pub use report::{MotionalStateFile, ProtocolReport, VibronicStateFile};
pub use state::VibronicState;
