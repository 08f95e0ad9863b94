//! Mesoscopic superpositions of the collective motion of `N` trapped ions.
//!
//! The crate is organised around four layers:
//!
//! * [`spin`]: collective spin operators on the symmetric (Dicke) ladder and
//!   Wigner rotation matrices.
//! * [`motional`] and [`wigner`]: truncated Fock space, coherent states,
//!   generalized displacements and phase-space quasi-probabilities.
//! * [`engine`]: the vibronic state and the pulse protocols (resonant and
//!   dispersive bichromatic pulses, carrier rotations, post-selection).
//! * [`oracle`]: a brute-force simulation on the full `2^N` spin space used to
//!   certify the engine's closed forms.

pub mod engine;
pub mod error;
pub mod linalg;
pub mod motional;
pub mod oracle;
pub mod spin;
pub mod wigner;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
