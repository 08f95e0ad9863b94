use crate::motional::required_n_max;
use crate::{Error, Result, C64};

use super::full_space::{
    annihilation, collective_hermitian, lift_spin, resonant_hamiltonian, FullSpaceState, MAX_FULL_SPACE_IONS,
};
use super::sparse::{expm_multiply, SparseMatrix};

/// Largest register for the time-dependent integrator.
pub const MAX_DETUNED_IONS: usize = 4;
/// Allowed change between a run and its step-halved repeat.
pub const STEP_HALVING_TOLERANCE: f64 = 1e-8;
const TOP_LEVEL_TOLERANCE: f64 = 1e-10;

fn check_top(state: &FullSpaceState, context: &str) -> Result<()> {
    let top = state.top_population();
    if top > TOP_LEVEL_TOLERANCE {
        let n_max = state.space().n_max();
        let mean_n: f64 = {
            let fock = state.space().dim();
            state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, z)| (i % fock) as f64 * z.norm_sqr())
                .sum()
        };
        return Err(Error::Truncation {
            detail: format!("{context}: population {top:.3e} reached the highest Fock level"),
            n_max,
            required: required_n_max(mean_n.sqrt()).max(n_max + 1),
        });
    }
    Ok(())
}

/// Evolution under the time-independent Lamb–Dicke Hamiltonian of order `k`.
pub fn integrate_resonant(
    psi0: &FullSpaceState,
    k: u32,
    rabi: f64,
    eta: f64,
    t: f64,
    phase: f64,
) -> Result<FullSpaceState> {
    if k == 0 {
        return Err(Error::invalid("order must be at least 1"));
    }
    if !(rabi.is_finite() && eta.is_finite() && t.is_finite() && phase.is_finite()) {
        return Err(Error::invalid("pulse parameters must be finite"));
    }
    let h = resonant_hamiltonian(psi0.n_ions(), psi0.space(), k, rabi, eta, phase);
    let out = psi0.with_amplitudes(expm_multiply(&h, t, psi0.amplitudes()));
    check_top(&out, "resonant integration")?;
    Ok(out)
}

/// `exp(-i θ G)` for a spin-only generator `G` on the full register.
pub fn apply_spin_generator(psi: &FullSpaceState, generator: &SparseMatrix, theta: f64) -> FullSpaceState {
    let g = lift_spin(generator, psi.space());
    psi.with_amplitudes(expm_multiply(&g, theta, psi.amplitudes()))
}

/// `J_y` built from `Σ_j σ_j^y / 2`.
pub fn collective_y(n_ions: usize) -> SparseMatrix {
    collective_hermitian(n_ions, C64::new(0.0, -0.5))
}

/// `cos φ J_x + sin φ J_y` built from individual flips.
pub fn collective_in_plane(n_ions: usize, phase: f64) -> SparseMatrix {
    collective_hermitian(n_ions, C64::from_polar(0.5, -phase))
}

/// First-sideband bichromatic drive detuned by `±δ`, with `φ = 0`:
/// `H(t) = ηΩ·A·(a† e^{-iδt} + a e^{iδt})`, `A = i Σσ⁺ + h.c. = -2J_y`.
struct DetunedDrive {
    creation_part: SparseMatrix,
    annihilation_part: SparseMatrix,
    coupling: f64,
    detuning: f64,
}

impl DetunedDrive {
    fn new(psi: &FullSpaceState, rabi: f64, eta: f64, detuning: f64) -> Self {
        let spin = collective_hermitian(psi.n_ions(), C64::new(0.0, 1.0));
        let a = annihilation(psi.space());
        DetunedDrive {
            creation_part: spin.kron(&a.adjoint()),
            annihilation_part: spin.kron(&a),
            coupling: eta * rabi,
            detuning,
        }
    }

    /// `-i H(t) v`
    fn derivative(&self, t: f64, v: &[C64], scratch: &mut [C64], out: &mut [C64]) {
        self.creation_part.mul_vec(v, out);
        self.annihilation_part.mul_vec(v, scratch);
        let up = C64::from_polar(self.coupling, -self.detuning * t) * C64::new(0.0, -1.0);
        let down = C64::from_polar(self.coupling, self.detuning * t) * C64::new(0.0, -1.0);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o = *o * up + s * down;
        }
    }

    fn rk4(&self, psi0: &[C64], t: f64, steps: usize) -> Vec<C64> {
        let n = psi0.len();
        let h = t / steps as f64;
        let mut y = psi0.to_vec();
        let (mut k1, mut k2, mut k3, mut k4) = (vec![C64::from(0.0); n], vec![C64::from(0.0); n], vec![C64::from(0.0); n], vec![C64::from(0.0); n]);
        let mut tmp = vec![C64::from(0.0); n];
        let mut scratch = vec![C64::from(0.0); n];
        for step in 0..steps {
            let t0 = step as f64 * h;
            self.derivative(t0, &y, &mut scratch, &mut k1);
            for i in 0..n {
                tmp[i] = y[i] + k1[i] * (h / 2.0);
            }
            self.derivative(t0 + h / 2.0, &tmp, &mut scratch, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + k2[i] * (h / 2.0);
            }
            self.derivative(t0 + h / 2.0, &tmp, &mut scratch, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + k3[i] * h;
            }
            self.derivative(t0 + h, &tmp, &mut scratch, &mut k4);
            for i in 0..n {
                y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        y
    }
}

/// Fixed-step RK4 without the step-halving check; used for convergence studies.
pub fn integrate_detuned_raw(psi0: &FullSpaceState, rabi: f64, eta: f64, detuning: f64, t: f64, substeps: usize) -> Result<FullSpaceState> {
    if psi0.n_ions() > MAX_DETUNED_IONS {
        return Err(Error::TooManyIons { n: psi0.n_ions(), max: MAX_DETUNED_IONS });
    }
    if substeps == 0 {
        return Err(Error::invalid("substeps must be positive"));
    }
    let drive = DetunedDrive::new(psi0, rabi, eta, detuning);
    Ok(psi0.with_amplitudes(drive.rk4(psi0.amplitudes(), t, substeps)))
}

/// Time-ordered evolution under the detuned drive; the run is repeated with
/// twice as many steps and must agree to [`STEP_HALVING_TOLERANCE`].
pub fn integrate_detuned(psi0: &FullSpaceState, rabi: f64, eta: f64, detuning: f64, t: f64, substeps: usize) -> Result<FullSpaceState> {
    if !(rabi.is_finite() && eta.is_finite() && detuning.is_finite() && t.is_finite()) {
        return Err(Error::invalid("drive parameters must be finite"));
    }
    let coarse = integrate_detuned_raw(psi0, rabi, eta, detuning, t, substeps)?;
    let fine = integrate_detuned_raw(psi0, rabi, eta, detuning, t, 2 * substeps)?;
    let difference = coarse
        .amplitudes()
        .iter()
        .zip(fine.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if difference > STEP_HALVING_TOLERANCE {
        return Err(Error::Convergence { difference, tolerance: STEP_HALVING_TOLERANCE });
    }
    check_top(&fine, "detuned integration")?;
    Ok(fine)
}

/// Twist `e^{-iλtJ_y²}` [+ carrier `e^{-i(π/2)J_y}`] then the `J_x` resonant
/// pulse, all on the full register; returns the joint state.
pub fn entangled_cat_full_space(
    psi0: &FullSpaceState,
    chi: f64,
    carrier: bool,
    rabi: f64,
    eta: f64,
    duration: f64,
) -> Result<FullSpaceState> {
    if psi0.n_ions() > MAX_FULL_SPACE_IONS {
        return Err(Error::TooManyIons { n: psi0.n_ions(), max: MAX_FULL_SPACE_IONS });
    }
    let jy = collective_y(psi0.n_ions());
    let mut psi = apply_spin_generator(psi0, &jy.mul(&jy), chi);
    if carrier {
        psi = apply_spin_generator(&psi, &collective_in_plane(psi0.n_ions(), std::f64::consts::FRAC_PI_2), std::f64::consts::FRAC_PI_2);
    }
    integrate_resonant(&psi, 1, rabi, eta, duration, std::f64::consts::FRAC_PI_2)
}
