use crate::engine::VibronicState;
use crate::motional::FockSpace;
use crate::{Error, Result, C64};

use super::sparse::SparseMatrix;

pub const MAX_FULL_SPACE_IONS: usize = 6;

/// Joint state on `(C²)^⊗N ⊗ Fock`, index `bits·(n_max+1) + n`; bit `j` set
/// means ion `j` is excited.
#[derive(Clone, Debug)]
pub struct FullSpaceState {
    n_ions: usize,
    space: FockSpace,
    amplitudes: Vec<C64>,
}

fn check_ions(n_ions: usize, max: usize) -> Result<()> {
    if n_ions == 0 || n_ions > max {
        return Err(Error::TooManyIons { n: n_ions, max });
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl FullSpaceState {
    pub fn from_amplitudes(n_ions: usize, space: FockSpace, amplitudes: Vec<C64>) -> Result<Self> {
        check_ions(n_ions, MAX_FULL_SPACE_IONS)?;
        if amplitudes.len() != (1 << n_ions) * space.dim() {
            return Err(Error::invalid("full-space amplitude length mismatch"));
        }
        Ok(FullSpaceState { n_ions, space, amplitudes })
    }

    /// Dicke state `|j,m⟩_z` spread evenly over the basis states with `m+j` excitations.
    pub fn embed(state: &VibronicState) -> Result<Self> {
        let n = state.n_ions();
        check_ions(n, MAX_FULL_SPACE_IONS)?;
        let space = state.space();
        let fock = space.dim();
        let mut amplitudes = vec![C64::from(0.0); (1 << n) * fock];
        for bits in 0..(1usize << n) {
            let excited = bits.count_ones() as usize;
            let w = 1.0 / binomial(n, excited).sqrt();
            for k in 0..fock {
                amplitudes[bits * fock + k] = state.amplitude(excited, k) * w;
            }
        }
        Ok(FullSpaceState { n_ions: n, space, amplitudes })
    }

    /// Projection onto the symmetric subspace.
    pub fn project(&self) -> Result<VibronicState> {
        let n = self.n_ions;
        let fock = self.space.dim();
        let mut amps = vec![C64::from(0.0); (n + 1) * fock];
        for bits in 0..(1usize << n) {
            let excited = bits.count_ones() as usize;
            let w = 1.0 / binomial(n, excited).sqrt();
            for k in 0..fock {
                amps[excited * fock + k] += self.amplitudes[bits * fock + k] * w;
            }
        }
        VibronicState::from_amplitudes(n, self.space, &amps)
    }

    /// Norm outside the symmetric subspace.
    pub fn symmetric_residual(&self) -> Result<f64> {
        let back = Self::embed(&self.project()?)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&back.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<C64>) -> Self {
        FullSpaceState { n_ions: self.n_ions, space: self.space, amplitudes }
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm_sqr(&self.amplitudes).sqrt()
    }

    pub fn fidelity(&self, other: &FullSpaceState) -> f64 {
        crate::linalg::fidelity(&self.amplitudes, &other.amplitudes)
    }

    /// Probability that every ion is found in the same basis state (`excited` or not).
    pub fn uniform_probability(&self, excited: bool) -> f64 {
        let fock = self.space.dim();
        let bits = if excited { (1usize << self.n_ions) - 1 } else { 0 };
        self.amplitudes[bits * fock..(bits + 1) * fock].iter().map(|z| z.norm_sqr()).sum()
    }

    /// Population of the highest Fock level.
    pub fn top_population(&self) -> f64 {
        let fock = self.space.dim();
        (0..1usize << self.n_ions)
            .map(|bits| self.amplitudes[bits * fock + fock - 1].norm_sqr())
            .sum()
    }
}

/// `σ⁺` of one ion embedded in the `N`-ion register.
pub fn sigma_plus(n_ions: usize, ion: usize) -> SparseMatrix {
    let dim = 1usize << n_ions;
    let t = (0..dim)
        .filter(|b| b & (1 << ion) == 0)
        .map(|b| (b | (1 << ion), b, C64::from(1.0)))
        .collect();
    SparseMatrix::from_triplets(dim, t)
}

/// `Σ_j σ_j⁺`.
pub fn collective_raising(n_ions: usize) -> SparseMatrix {
    (1..n_ions).fold(sigma_plus(n_ions, 0), |acc, j| acc.add(&sigma_plus(n_ions, j)))
}

/// `c·Σσ⁺ + c*·Σσ⁻`.
pub fn collective_hermitian(n_ions: usize, c: C64) -> SparseMatrix {
    let up = collective_raising(n_ions);
    up.scale(c).add(&up.adjoint().scale(c.conj()))
}

/// `(1/2) Σ_j σ_j^z`.
pub fn collective_z(n_ions: usize) -> SparseMatrix {
    let dim = 1usize << n_ions;
    let t = (0..dim)
        .map(|b| (b, b, C64::from(b.count_ones() as f64 - n_ions as f64 / 2.0)))
        .collect();
    SparseMatrix::from_triplets(dim, t)
}

pub fn annihilation(space: FockSpace) -> SparseMatrix {
    let t = (1..space.dim()).map(|n| (n - 1, n, C64::from((n as f64).sqrt()))).collect();
    SparseMatrix::from_triplets(space.dim(), t)
}

pub fn annihilation_power(space: FockSpace, k: u32) -> SparseMatrix {
    let a = annihilation(space);
    (1..k).fold(a.clone(), |acc, _| acc.mul(&a))
}

/// Lamb–Dicke Hamiltonian `(2Ωηᵏ/k!)·J_T·(aᵏ + a†ᵏ)` with
/// `J_T = (iᵏ e^{-iφ}/2) Σσ⁺ + h.c.`, on the full register.
pub fn resonant_hamiltonian(n_ions: usize, space: FockSpace, k: u32, rabi: f64, eta: f64, phase: f64) -> SparseMatrix {
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let strength = 2.0 * rabi * eta.powi(k as i32) / factorial;
    let c = C64::new(0.0, 1.0).powu(k) * C64::from_polar(0.5, -phase);
    let spin = collective_hermitian(n_ions, c);
    let ak = annihilation_power(space, k);
    let motion = ak.add(&ak.adjoint());
    spin.kron(&motion).scale(C64::from(strength))
}

/// Spin-only operator lifted to the joint space.
pub fn lift_spin(spin: &SparseMatrix, space: FockSpace) -> SparseMatrix {
    spin.kron(&SparseMatrix::identity(space.dim()))
}
