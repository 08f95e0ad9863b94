//! Brute-force reference: the full `2^N ⊗ Fock` space with spin operators
//! assembled from individual ion flips and evolution by Taylor series or RK4.
//! Shares no code with the Dicke-ladder engine beyond the state containers.

mod full_space;
mod integrate;
mod sparse;
mod validation;

pub use full_space::{
    annihilation, collective_hermitian, collective_raising, collective_z, resonant_hamiltonian, sigma_plus,
    FullSpaceState, MAX_FULL_SPACE_IONS,
};
pub use integrate::{
    apply_spin_generator, collective_in_plane, collective_y, entangled_cat_full_space, integrate_detuned,
    integrate_detuned_raw, integrate_resonant, MAX_DETUNED_IONS, STEP_HALVING_TOLERANCE,
};
pub use sparse::{expm_multiply, SparseMatrix};
pub use validation::{dispersive_fidelity, run_suite, CheckResult, SuiteOptions, SuiteReport};
