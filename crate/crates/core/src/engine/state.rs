use crate::linalg::{CMatrix, CVector};
use crate::motional::{FockSpace, MotionalState};
use crate::spin::SpinOperators;
use crate::{linalg, Error, Result, C64};

/// Joint amplitudes on `|j,m⟩_z ⊗ |n⟩`, stored as a `(N+1) × (n_max+1)`
/// matrix: row `m + j`, column `n`.
#[derive(Clone, Debug)]
pub struct VibronicState {
    n_ions: usize,
    space: FockSpace,
    amps: CMatrix,
    truncation_loss: f64,
}

impl VibronicState {
    /// `|N/2, -N/2⟩_z ⊗ |0⟩`, i.e. all ions in `g` and the mode in its ground state.
    pub fn ground(n_ions: usize, space: FockSpace) -> Result<Self> {
        if n_ions == 0 {
            return Err(Error::invalid("ion count must be at least 1"));
        }
        let mut amps = CMatrix::zeros(n_ions + 1, space.dim());
        amps[(0, 0)] = C64::from(1.0);
        Ok(VibronicState { n_ions, space, amps, truncation_loss: 0.0 })
    }

    /// Product `|spin⟩ ⊗ |motion⟩`.
    pub fn product(spin: &CVector, motion: &MotionalState) -> Result<Self> {
        if spin.len() < 2 {
            return Err(Error::invalid("spin vector needs at least two components"));
        }
        let amps = spin * motion.vector().transpose();
        Ok(VibronicState {
            n_ions: spin.len() - 1,
            space: motion.space(),
            amps,
            truncation_loss: motion.truncation_loss(),
        })
    }

    /// From a flattened row-major amplitude list (spin index outer).
    pub fn from_amplitudes(n_ions: usize, space: FockSpace, amplitudes: &[C64]) -> Result<Self> {
        let (rows, cols) = (n_ions + 1, space.dim());
        if n_ions == 0 || amplitudes.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} amplitudes for N = {n_ions}, n_max = {}",
                rows * cols,
                space.n_max()
            )));
        }
        Ok(VibronicState {
            n_ions,
            space,
            amps: CMatrix::from_row_slice(rows, cols, amplitudes),
            truncation_loss: 0.0,
        })
    }

    pub(crate) fn from_matrix(n_ions: usize, space: FockSpace, amps: CMatrix, truncation_loss: f64) -> Self {
        debug_assert_eq!(amps.shape(), (n_ions + 1, space.dim()));
        VibronicState { n_ions, space, amps, truncation_loss }
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn spin_dim(&self) -> usize {
        self.n_ions + 1
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.amps
    }

    /// Accumulated norm discarded by Fock-space truncation.
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    /// Row-major flattening, index `(m + j)·(n_max+1) + n`.
    pub fn amplitudes(&self) -> Vec<C64> {
        let (rows, cols) = self.amps.shape();
        let mut out = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            out.extend(self.amps.row(r).iter().copied());
        }
        out
    }

    pub fn amplitude(&self, m_index: usize, n: usize) -> C64 {
        self.amps[(m_index, n)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn fidelity(&self, other: &VibronicState) -> f64 {
        linalg::fidelity(&self.amplitudes(), &other.amplitudes())
    }

    pub fn inner(&self, other: &VibronicState) -> C64 {
        linalg::inner(&self.amplitudes(), &other.amplitudes())
    }

    fn spin_expectation(&self, op: &CMatrix) -> f64 {
        (self.amps.adjoint() * op * &self.amps).trace().re
    }

    pub fn mean_jz(&self, ops: &SpinOperators) -> f64 {
        self.spin_expectation(ops.jz())
    }

    /// `⟨J_x² + J_y² + J_z²⟩`.
    pub fn mean_j2(&self, ops: &SpinOperators) -> f64 {
        let j2 = ops.jx() * ops.jx() + ops.jy() * ops.jy() + ops.jz() * ops.jz();
        self.spin_expectation(&j2)
    }

    pub fn mean_n(&self) -> f64 {
        self.amps
            .column_iter()
            .enumerate()
            .map(|(n, col)| n as f64 * col.norm_squared())
            .sum()
    }

    /// `⟨â⟩` of the motional mode.
    pub fn mean_a(&self) -> C64 {
        (1..self.space.dim())
            .map(|n| {
                let lower = self.amps.column(n - 1);
                let upper = self.amps.column(n);
                lower.dotc(&upper) * (n as f64).sqrt()
            })
            .sum()
    }

    /// Reduced spin density matrix `Tr_motion |ψ⟩⟨ψ|`.
    pub fn reduced_spin(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    /// Unnormalized motional component `(⟨s| ⊗ 1)|ψ⟩`.
    pub fn project_spin(&self, spin: &CVector) -> Result<CVector> {
        if spin.len() != self.spin_dim() {
            return Err(Error::invalid("spin vector dimension does not match the state"));
        }
        Ok((spin.adjoint() * &self.amps).transpose())
    }

    /// Highest Fock index carrying weight in any spin row.
    pub(crate) fn support_top(&self) -> usize {
        (0..self.space.dim())
            .rev()
            .find(|&n| self.amps.column(n).norm_squared() > 1e-30)
            .unwrap_or(0)
    }
}
