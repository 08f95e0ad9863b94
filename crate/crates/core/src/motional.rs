//! Truncated Fock space of the centre-of-mass mode.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::linalg::{self, CMatrix, CVector, Spectrum};
use crate::{Error, Result, C64};

/// Default truncation level.
pub const DEFAULT_N_MAX: usize = 96;

/// Highest generalized-displacement order accepted unless explicitly raised.
pub const DEFAULT_MAX_ORDER: u32 = 2;

/// Smallest `n_max` that holds a coherent amplitude `|β|` with a six-sigma
/// Poisson tail: `|β|² + 6|β| + 10`.
pub fn required_n_max(beta_abs: f64) -> usize {
    (beta_abs * beta_abs + 6.0 * beta_abs + 10.0).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        Ok(FockSpace { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// `â` with `⟨n-1|â|n⟩ = √n`.
    pub fn annihilation(&self) -> CMatrix {
        annihilation(self.dim())
    }

    /// Errors unless a coherent amplitude `|β|` fits this space.
    pub fn check_amplitude(&self, beta_abs: f64, what: &str) -> Result<()> {
        let required = required_n_max(beta_abs);
        if required > self.n_max {
            return Err(Error::Truncation {
                detail: format!("{what}: amplitude {beta_abs:.4} does not fit"),
                n_max: self.n_max,
                required,
            });
        }
        Ok(())
    }
}

pub(crate) fn annihilation(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    a
}

/// Pure state of the motional mode.
#[derive(Clone, Debug)]
pub struct MotionalState {
    space: FockSpace,
    amplitudes: CVector,
    truncation_loss: f64,
}

impl MotionalState {
    pub fn vacuum(space: FockSpace) -> Self {
        Self::fock(space, 0).expect("vacuum always fits")
    }

    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n > space.n_max() {
            return Err(Error::invalid(format!("Fock level {n} exceeds n_max = {}", space.n_max())));
        }
        let mut amplitudes = CVector::zeros(space.dim());
        amplitudes[n] = C64::from(1.0);
        Ok(MotionalState { space, amplitudes, truncation_loss: 0.0 })
    }

    /// Wraps raw amplitudes without normalizing.
    pub fn from_amplitudes(space: FockSpace, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                space.dim(),
                amplitudes.len()
            )));
        }
        Ok(MotionalState {
            space,
            amplitudes: CVector::from_vec(amplitudes),
            truncation_loss: 0.0,
        })
    }

    pub(crate) fn with_loss(mut self, loss: f64) -> Self {
        self.truncation_loss = loss;
        self
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn vector(&self) -> &CVector {
        &self.amplitudes
    }

    /// Norm discarded by truncation while producing this state.
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite state"));
        }
        self.amplitudes.unscale_mut(n);
        Ok(self)
    }

    /// Superposition `Σ cᵢ |ψᵢ⟩`, normalized.
    pub fn superpose(terms: &[(C64, &MotionalState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::invalid("empty superposition"))?.1;
        let mut amps = CVector::zeros(first.space.dim());
        let mut loss = 0.0f64;
        for (c, s) in terms {
            if s.space != first.space {
                return Err(Error::invalid("superposition of states on different Fock spaces"));
            }
            amps += &s.amplitudes * *c;
            loss = loss.max(s.truncation_loss);
        }
        MotionalState { space: first.space, amplitudes: amps, truncation_loss: loss }.normalized()
    }

    pub fn fidelity(&self, other: &MotionalState) -> f64 {
        linalg::fidelity(self.amplitudes(), other.amplitudes())
    }

    pub fn inner(&self, other: &MotionalState) -> C64 {
        linalg::inner(self.amplitudes(), other.amplitudes())
    }

    /// `⟨â⟩`.
    pub fn mean_a(&self) -> C64 {
        let a = &self.amplitudes;
        (1..a.len()).map(|n| a[n - 1].conj() * a[n] * (n as f64).sqrt()).sum()
    }

    /// `⟨â†â⟩`.
    pub fn mean_n(&self) -> f64 {
        fock_distribution(self).iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `⟨(-1)^n⟩`.
    pub fn parity(&self) -> f64 {
        fock_distribution(self)
            .iter()
            .enumerate()
            .map(|(n, p)| if n % 2 == 0 { *p } else { -*p })
            .sum()
    }

    /// Mean and variance of `x̂ = (â + â†)/√2` and `p̂ = (â - â†)/(i√2)`.
    pub fn quadrature_moments(&self) -> QuadratureMoments {
        let a = self.mean_a();
        let a2: C64 = {
            let v = &self.amplitudes;
            (2..v.len())
                .map(|n| v[n - 2].conj() * v[n] * ((n * (n - 1)) as f64).sqrt())
                .sum()
        };
        let n = self.mean_n();
        // ⟨x²⟩ = (⟨a²⟩ + ⟨a†²⟩ + 2⟨n⟩ + 1)/2, ⟨p²⟩ = (2⟨n⟩ + 1 - ⟨a²⟩ - ⟨a†²⟩)/2
        let mean_x = std::f64::consts::SQRT_2 * a.re;
        let mean_p = std::f64::consts::SQRT_2 * a.im;
        let x2 = (2.0 * a2.re + 2.0 * n + 1.0) / 2.0;
        let p2 = (2.0 * n + 1.0 - 2.0 * a2.re) / 2.0;
        QuadratureMoments {
            mean_x,
            mean_p,
            var_x: (x2 - mean_x * mean_x).max(0.0),
            var_p: (p2 - mean_p * mean_p).max(0.0),
        }
    }

    /// Highest Fock index carrying non-negligible weight.
    pub(crate) fn support_top(&self) -> usize {
        self.amplitudes
            .iter()
            .rposition(|z| z.norm_sqr() > 1e-30)
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
}

/// Mixed state of the motional mode.
#[derive(Clone, Debug)]
pub struct MotionalDensity {
    space: FockSpace,
    rho: CMatrix,
}

impl MotionalDensity {
    pub fn new(space: FockSpace, rho: CMatrix) -> Result<Self> {
        if rho.shape() != (space.dim(), space.dim()) {
            return Err(Error::invalid("density matrix shape does not match the Fock space"));
        }
        if linalg::hermiticity_defect(&rho) > 1e-10 {
            return Err(Error::invalid("density matrix is not Hermitian"));
        }
        Ok(MotionalDensity { space, rho })
    }

    pub fn pure(state: &MotionalState) -> Self {
        let v = state.vector();
        MotionalDensity { space: state.space(), rho: v * v.adjoint() }
    }

    /// Incoherent mixture `Σ pᵢ |ψᵢ⟩⟨ψᵢ|`.
    pub fn mixture(parts: &[(f64, &MotionalState)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::invalid("empty mixture"))?.1;
        let mut rho = CMatrix::zeros(first.space.dim(), first.space.dim());
        for (p, s) in parts {
            if *p < 0.0 {
                return Err(Error::invalid("negative mixture weight"));
            }
            rho += s.vector() * s.vector().adjoint() * C64::from(*p);
        }
        Ok(MotionalDensity { space: first.space, rho })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Weighted pure components from the spectral decomposition; weights
    /// below `cutoff` are dropped.
    pub fn components(&self, cutoff: f64) -> Vec<(f64, MotionalState)> {
        let spectrum = Spectrum::of_hermitian(&self.rho);
        spectrum
            .values
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > cutoff)
            .map(|(k, &w)| {
                let amps = spectrum.vectors.column(k).iter().copied().collect();
                (w, MotionalState::from_amplitudes(self.space, amps).expect("matching dim"))
            })
            .collect()
    }
}

/// `|α⟩ = e^{-|α|²/2} Σ αⁿ/√(n!) |n⟩`, truncated and renormalized.
pub fn coherent_state(alpha: C64, space: FockSpace) -> Result<MotionalState> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::invalid("coherent amplitude must be finite"));
    }
    space.check_amplitude(alpha.norm(), "coherent state")?;
    let mut amps = Vec::with_capacity(space.dim());
    let mut term = C64::from((-alpha.norm_sqr() / 2.0).exp());
    amps.push(term);
    for n in 1..space.dim() {
        term *= alpha / (n as f64).sqrt();
        amps.push(term);
    }
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let state = MotionalState::from_amplitudes(space, amps)?.with_loss((1.0 - kept).max(0.0));
    state.normalized()
}

/// `p_n = |⟨n|ψ⟩|²`.
pub fn fock_distribution(state: &MotionalState) -> Vec<f64> {
    state.amplitudes().iter().map(|z| z.norm_sqr()).collect()
}

/// Unitary `exp(-i r X̂)` on a padded space, `X̂ = â + â†`, kept in spectral form.
///
/// First-order displacements are `D(r e^{iθ}) = P_θ · exp(-i r X̂) · P_θ†` with
/// `P_θ = diag(e^{in(θ+π/2)})`.
#[derive(Debug)]
pub struct DisplacementKernel {
    dim: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    /// `(V^T Π V)_{k, dim-1-k}`: parity maps eigenvector `k` onto its mirror.
    parity_signs: Vec<f64>,
}

impl DisplacementKernel {
    fn build(dim: usize) -> Self {
        let mut x = DMatrix::<f64>::zeros(dim, dim);
        for n in 1..dim {
            let s = (n as f64).sqrt();
            x[(n - 1, n)] = s;
            x[(n, n - 1)] = s;
        }
        let eig = x.symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut eigenvectors = DMatrix::<f64>::zeros(dim, dim);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        let parity_signs = (0..dim)
            .map(|k| {
                let mirror = dim - 1 - k;
                let s: f64 = (0..dim)
                    .map(|m| {
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        sign * eigenvectors[(m, k)] * eigenvectors[(m, mirror)]
                    })
                    .sum();
                s.signum()
            })
            .collect();
        DisplacementKernel { dim, eigenvalues, eigenvectors, parity_signs }
    }

    /// Shared kernel of at least `min_dim` levels (rounded up to a multiple of 64).
    pub fn shared(min_dim: usize) -> Arc<DisplacementKernel> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DisplacementKernel>>>> = OnceLock::new();
        let dim = min_dim.div_ceil(64).max(1) * 64;
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(k) = cache.lock().expect("kernel cache poisoned").get(&dim) {
            return Arc::clone(k);
        }
        let kernel = Arc::new(DisplacementKernel::build(dim));
        cache
            .lock()
            .expect("kernel cache poisoned")
            .entry(dim)
            .or_insert(kernel)
            .clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Spectral coordinates `e^{-i r λ_k} (V^T P_θ† ψ)_k`.
    fn spectral(&self, amps: &[C64], beta: C64) -> Vec<C64> {
        assert!(amps.len() <= self.dim, "state larger than displacement kernel");
        let (r, theta) = beta.to_polar();
        let step = theta + std::f64::consts::FRAC_PI_2;
        let z: Vec<C64> = amps
            .iter()
            .enumerate()
            .map(|(n, a)| a * C64::from_polar(1.0, -step * n as f64))
            .collect();
        (0..self.dim)
            .map(|k| {
                let col = self.eigenvectors.column(k);
                let y: C64 = z.iter().zip(col.iter()).map(|(zn, v)| zn * *v).sum();
                y * C64::from_polar(1.0, -r * self.eigenvalues[k])
            })
            .collect()
    }

    /// `D(β)ψ`, first `out_dim` components plus the norm pushed past them.
    pub fn displace(&self, amps: &[C64], beta: C64, out_dim: usize) -> (Vec<C64>, f64) {
        let step = beta.arg() + std::f64::consts::FRAC_PI_2;
        let w = self.spectral(amps, beta);
        let out: Vec<C64> = (0..out_dim.min(self.dim))
            .map(|m| {
                let row = self.eigenvectors.row(m);
                let s: C64 = row.iter().zip(&w).map(|(v, wk)| wk * *v).sum();
                s * C64::from_polar(1.0, step * m as f64)
            })
            .collect();
        let lost = (linalg::norm_sqr(amps) - linalg::norm_sqr(&out)).max(0.0);
        (out, lost)
    }

    /// `⟨ψ| D(β) Π D†(β) |ψ⟩` with `Π = (-1)^n̂`.
    pub fn displaced_parity(&self, amps: &[C64], beta: C64) -> f64 {
        let w = self.spectral(amps, -beta);
        (0..self.dim)
            .map(|k| (w[k].conj() * w[self.dim - 1 - k]).re * self.parity_signs[k])
            .sum()
    }
}

fn padded_dim_for(top: usize, beta_abs: f64) -> usize {
    let reach = (top as f64).sqrt() + beta_abs;
    required_n_max(reach) + 1
}

/// Generalized displacement `exp(α â†ᵏ - α* âᵏ)` restricted to the truncated space.
pub fn displacement_matrix(k: u32, alpha: C64, space: FockSpace) -> Result<CMatrix> {
    displacement_matrix_with(k, alpha, space, DEFAULT_MAX_ORDER)
}

pub fn displacement_matrix_with(k: u32, alpha: C64, space: FockSpace, max_order: u32) -> Result<CMatrix> {
    let op = GeneralizedDisplacement::new(k, alpha, space, space.n_max(), max_order)?;
    let dim = space.dim();
    let mut out = CMatrix::zeros(dim, dim);
    let mut basis = vec![C64::from(0.0); dim];
    for n in 0..dim {
        basis.iter_mut().for_each(|z| *z = C64::from(0.0));
        basis[n] = C64::from(1.0);
        let (col, _) = op.apply(&basis);
        for (m, z) in col.into_iter().enumerate() {
            out[(m, n)] = z;
        }
    }
    Ok(out)
}

/// Effective amplitude used for truncation checks of `D_k(α)`.
fn effective_amplitude(k: u32, alpha_abs: f64) -> f64 {
    match k {
        1 => alpha_abs,
        // squeezing parameter r = 2|α|; ⟨n⟩ = sinh² r
        _ => {
            let r = k as f64 * alpha_abs;
            let sh = r.sinh();
            (sh * sh + 6.0 * std::f64::consts::SQRT_2 * sh * r.cosh()).sqrt()
        }
    }
}

/// `D_k(α)` prepared for repeated application to states on a truncated space.
pub struct GeneralizedDisplacement {
    k: u32,
    alpha: C64,
    out_dim: usize,
    inner: DisplacementImpl,
}

enum DisplacementImpl {
    Kernel(Arc<DisplacementKernel>),
    Dense(CMatrix),
}

impl GeneralizedDisplacement {
    /// `support_top` is the highest Fock index the operand may occupy.
    pub fn new(k: u32, alpha: C64, space: FockSpace, support_top: usize, max_order: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("displacement order must be at least 1"));
        }
        if k > max_order {
            return Err(Error::UnsupportedOrder { order: k, max: max_order });
        }
        if k >= 3 {
            log::warn!("displacement order k = {k}: higher-order generators are falsified by truncation; treat results with care");
        }
        space.check_amplitude(effective_amplitude(k, alpha.norm()), &format!("D_{k} displacement"))?;
        let top = support_top.min(space.n_max());
        let inner = if k == 1 {
            DisplacementImpl::Kernel(DisplacementKernel::shared(padded_dim_for(top, alpha.norm()).max(space.dim())))
        } else {
            let pad = padded_dim_for(top, effective_amplitude(k, alpha.norm())).max(2 * space.dim());
            let a = annihilation(pad);
            let mut ak = CMatrix::identity(pad, pad);
            for _ in 0..k {
                ak = &ak * &a;
            }
            // exp(α a†ᵏ - α* aᵏ) = exp(-i G), G = i(α a†ᵏ - α* aᵏ)
            let g = (ak.adjoint() * alpha - &ak * alpha.conj()) * C64::new(0.0, 1.0);
            let full = Spectrum::of_hermitian(&g).evolution(1.0);
            DisplacementImpl::Dense(full.columns(0, space.dim()).into_owned())
        };
        Ok(GeneralizedDisplacement { k, alpha, out_dim: space.dim(), inner })
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    /// Applies the operator; returns the truncated image and the norm lost
    /// beyond the truncation.
    pub fn apply(&self, amps: &[C64]) -> (Vec<C64>, f64) {
        if self.alpha == C64::from(0.0) {
            return (amps.to_vec(), 0.0);
        }
        match &self.inner {
            DisplacementImpl::Kernel(kernel) => kernel.displace(amps, self.alpha, self.out_dim),
            DisplacementImpl::Dense(m) => {
                let v = CVector::from_column_slice(amps);
                let full = m * v;
                let out: Vec<C64> = full.iter().take(self.out_dim).copied().collect();
                let lost = (linalg::norm_sqr(amps) - linalg::norm_sqr(&out)).max(0.0);
                (out, lost)
            }
        }
    }
}
