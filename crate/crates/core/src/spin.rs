//! Collective spin `j = N/2` on the symmetric (Dicke) ladder.
//!
//! Basis vectors are `|j,m⟩_z` ordered `m = -j, …, +j`; row/column `i` holds
//! `m = i - j`. Ladder phases follow Condon–Shortley:
//! `J₊|j,m⟩ = √(j(j+1) - m(m+1)) |j,m+1⟩`.
//!
//! `|j,-j⟩_z` is the all-ground electronic state `|gg…g⟩` and `|j,+j⟩_z` the
//! all-excited state `|ee…e⟩`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

use crate::linalg::{CMatrix, CVector, Spectrum};
use crate::{Error, Result, C64};

/// Largest ion count accepted by default (rotation matrices stay accurate to
/// roughly `j ≈ 50`).
pub const DEFAULT_MAX_IONS: usize = 100;

/// `J_x`, `J_y`, `J_z` for `N` ions in the maximal-spin sector.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    n_ions: usize,
    jx: CMatrix,
    jy: CMatrix,
    jz: CMatrix,
    jy_spectrum: Spectrum,
}

pub fn build_spin_operators(n_ions: usize) -> Result<SpinOperators> {
    SpinOperators::with_limit(n_ions, DEFAULT_MAX_IONS)
}

impl SpinOperators {
    pub fn new(n_ions: usize) -> Result<Self> {
        build_spin_operators(n_ions)
    }

    pub fn with_limit(n_ions: usize, max_ions: usize) -> Result<Self> {
        if n_ions == 0 {
            return Err(Error::invalid("ion count must be at least 1"));
        }
        if n_ions > max_ions {
            return Err(Error::TooManyIons { n: n_ions, max: max_ions });
        }
        let dim = n_ions + 1;
        let j = n_ions as f64 / 2.0;
        let mut jplus = CMatrix::zeros(dim, dim);
        for i in 0..n_ions {
            let m = i as f64 - j;
            jplus[(i + 1, i)] = C64::from((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
        let jminus = jplus.adjoint();
        let jx = (&jplus + &jminus).scale(0.5);
        let jy = (&jplus - &jminus) * C64::new(0.0, -0.5);
        let jz = CMatrix::from_diagonal(&CVector::from_fn(dim, |i, _| C64::from(i as f64 - j)));
        let jy_spectrum = Spectrum::of_hermitian(&jy);
        Ok(SpinOperators { n_ions, jx, jy, jz, jy_spectrum })
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    /// Dimension `2j + 1 = N + 1` of the ladder.
    pub fn dim(&self) -> usize {
        self.n_ions + 1
    }

    pub fn j(&self) -> f64 {
        self.n_ions as f64 / 2.0
    }

    pub fn two_j(&self) -> usize {
        self.n_ions
    }

    /// `m` quantum numbers in basis order.
    pub fn m_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| i as f64 - self.j()).collect()
    }

    /// Basis index of `|j,m⟩_z`, if `m` lies on the ladder.
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let shifted = m + self.j();
        let idx = shifted.round();
        if (shifted - idx).abs() > 1e-9 || idx < 0.0 || idx as usize >= self.dim() {
            None
        } else {
            Some(idx as usize)
        }
    }

    pub fn jx(&self) -> &CMatrix {
        &self.jx
    }

    pub fn jy(&self) -> &CMatrix {
        &self.jy
    }

    pub fn jz(&self) -> &CMatrix {
        &self.jz
    }

    /// `cos(a)·J_x + sin(a)·J_y`.
    pub fn in_plane(&self, axis_angle: f64) -> CMatrix {
        self.jx.scale(axis_angle.cos()) + self.jy.scale(axis_angle.sin())
    }

    /// `|j,m⟩_z` as a column vector.
    pub fn z_state(&self, m: f64) -> Result<CVector> {
        let idx = self
            .index_of(m)
            .ok_or_else(|| Error::invalid(format!("m = {m} is not on the j = {} ladder", self.j())))?;
        let mut v = CVector::zeros(self.dim());
        v[idx] = C64::from(1.0);
        Ok(v)
    }

    /// `|j,m⟩_x` in the rotation convention `|j,m⟩_x = e^{+iπJ_y/2} |j,-m⟩_z`.
    ///
    /// With this phase choice, twisting `|j,-j⟩_z` by `e^{-iπJ_y²/2}` gives
    /// `(|j,j⟩_x - |j,-j⟩_x)/√2` (up to a global phase) for every odd `N`.
    pub fn x_state(&self, m: f64) -> Result<CVector> {
        let col = self
            .index_of(-m)
            .ok_or_else(|| Error::invalid(format!("m = {m} is not on the j = {} ladder", self.j())))?;
        let d = self.rotation(-FRAC_PI_2);
        Ok(CVector::from_fn(self.dim(), |row, _| C64::from(d.matrix()[(row, col)])))
    }

    /// `e^{-iθ J_y}` as a real matrix.
    pub fn rotation(&self, theta: f64) -> RotationMatrix {
        let u = self.jy_spectrum.evolution(theta);
        RotationMatrix {
            two_j: self.two_j(),
            theta,
            d: u.map(|z| z.re),
        }
    }

    /// One-axis twist `e^{-iχ J_y²}`, built from the spectrum of `J_y`.
    pub fn twist_y(&self, chi: f64) -> CMatrix {
        self.jy_spectrum.apply_fn(|mu| C64::from_polar(1.0, -chi * mu * mu))
    }

    /// Rotation `e^{-iθ(cos φ·J_x + sin φ·J_y)}` about an in-plane axis.
    pub fn in_plane_rotation(&self, theta: f64, phi: f64) -> CMatrix {
        let basis = axis_eigenbasis(self, phi);
        let mut scaled = basis.clone();
        for (k, m) in self.m_values().into_iter().enumerate() {
            let w = C64::from_polar(1.0, -theta * m);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * basis.adjoint()
    }
}

/// Wigner small-d matrix `d^j_{m',m}(θ) = ⟨j,m'|e^{-iθJ_y}|j,m⟩`.
#[derive(Clone, Debug)]
pub struct RotationMatrix {
    two_j: usize,
    theta: f64,
    d: DMatrix<f64>,
}

impl RotationMatrix {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Indexed `[(m' + j, m + j)]`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// `d^j_{m',m}(θ)` by quantum numbers.
    pub fn element(&self, m_row: f64, m_col: f64) -> f64 {
        let j = self.j();
        let r = (m_row + j).round() as usize;
        let c = (m_col + j).round() as usize;
        self.d[(r, c)]
    }
}

pub fn wigner_small_d(two_j: usize, theta: f64) -> Result<RotationMatrix> {
    if two_j == 0 {
        return Err(Error::invalid("wigner_small_d needs 2j >= 1"));
    }
    if theta == 0.0 {
        return Ok(RotationMatrix {
            two_j,
            theta,
            d: DMatrix::identity(two_j + 1, two_j + 1),
        });
    }
    Ok(SpinOperators::new(two_j)?.rotation(theta))
}

/// Eigenbasis of `cos(a)·J_x + sin(a)·J_y`.
///
/// Columns are ordered by ascending eigenvalue `m = -j … +j`. Each column is
/// rephased so its largest-magnitude component (lowest index on ties) is real
/// and positive.
pub fn axis_eigenbasis(ops: &SpinOperators, axis_angle: f64) -> CMatrix {
    let spectrum = Spectrum::of_hermitian(&ops.in_plane(axis_angle));
    let mut v = spectrum.vectors;
    for mut col in v.column_iter_mut() {
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = col
            .iter()
            .position(|z| z.norm() >= peak * (1.0 - 1e-9))
            .expect("non-empty eigenvector");
        let phase = col[pivot].conj() / col[pivot].norm();
        for z in col.iter_mut() {
            *z *= phase;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, hermiticity_defect, max_abs_diff, unitarity_defect};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn dense_exp_rotation(ops: &SpinOperators, theta: f64) -> CMatrix {
        (ops.jy().clone() * C64::new(0.0, -theta)).exp()
    }

    #[test]
    fn spin_half_is_pauli_over_two() {
        let ops = build_spin_operators(1).unwrap();
        assert_eq!(ops.jz()[(0, 0)], C64::from(-0.5));
        assert_eq!(ops.jz()[(1, 1)], C64::from(0.5));
        assert!((ops.jx()[(0, 1)] - C64::from(0.5)).norm() < 1e-15);
        assert!((ops.jx()[(1, 0)] - C64::from(0.5)).norm() < 1e-15);
    }

    #[test]
    fn spin_one_ladder_elements() {
        let ops = build_spin_operators(2).unwrap();
        for i in 0..3 {
            assert_eq!(ops.jz()[(i, i)].re, i as f64 - 1.0);
        }
        assert!((ops.jx()[(0, 1)].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((ops.jx()[(1, 2)].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn algebra_holds_for_many_sizes() {
        for n in 1..=12 {
            let ops = build_spin_operators(n).unwrap();
            let i = C64::new(0.0, 1.0);
            let xy = commutator(ops.jx(), ops.jy()) - ops.jz() * i;
            let yz = commutator(ops.jy(), ops.jz()) - ops.jx() * i;
            let zx = commutator(ops.jz(), ops.jx()) - ops.jy() * i;
            for c in [xy, yz, zx] {
                assert!(c.iter().all(|z| z.norm() < 1e-12));
            }
            let j = ops.j();
            let casimir = ops.jx() * ops.jx() + ops.jy() * ops.jy() + ops.jz() * ops.jz();
            let target = CMatrix::identity(n + 1, n + 1).scale(j * (j + 1.0));
            assert!(max_abs_diff(&casimir, &target) < 1e-12);
            for op in [ops.jx(), ops.jy(), ops.jz()] {
                assert!(hermiticity_defect(op) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_zero_and_oversized() {
        assert!(matches!(build_spin_operators(0), Err(Error::InvalidInput(_))));
        assert!(matches!(
            SpinOperators::with_limit(9, 8),
            Err(Error::TooManyIons { n: 9, max: 8 })
        ));
    }

    #[test]
    fn small_d_spin_half_quarter_turn() {
        let d = wigner_small_d(1, PI / 2.0).unwrap();
        let (c, s) = ((PI / 4.0).cos(), (PI / 4.0).sin());
        // ascending m order: rows/cols (-1/2, +1/2)
        assert!((d.element(-0.5, -0.5) - c).abs() < 1e-12);
        assert!((d.element(-0.5, 0.5) - s).abs() < 1e-12);
        assert!((d.element(0.5, -0.5) + s).abs() < 1e-12);
        assert!((d.element(0.5, 0.5) - c).abs() < 1e-12);
    }

    #[test]
    fn small_d_matches_dense_exponential() {
        for two_j in 1..=8 {
            let ops = build_spin_operators(two_j).unwrap();
            for theta in [0.1, PI / 4.0, PI / 2.0, 2.3] {
                let d = wigner_small_d(two_j, theta).unwrap();
                let direct = dense_exp_rotation(&ops, theta);
                for ((r, c), v) in d.matrix().iter().enumerate().map(|(k, v)| {
                    ((k % (two_j + 1), k / (two_j + 1)), v)
                }) {
                    assert!((direct[(r, c)].re - v).abs() < 1e-10);
                    assert!(direct[(r, c)].im.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn small_d_structure() {
        for two_j in 1..=9 {
            assert_eq!(
                wigner_small_d(two_j, 0.0).unwrap().matrix(),
                &DMatrix::<f64>::identity(two_j + 1, two_j + 1)
            );
            for theta in [0.3, 1.1, 2.9] {
                let d = wigner_small_d(two_j, theta).unwrap();
                let dt = d.matrix().transpose();
                let id = DMatrix::<f64>::identity(two_j + 1, two_j + 1);
                assert!((d.matrix() * &dt - &id).abs().max() < 1e-12);
                let back = wigner_small_d(two_j, -theta).unwrap();
                assert!((back.matrix() - &dt).abs().max() < 1e-12);
                let composed = wigner_small_d(two_j, theta).unwrap().matrix()
                    * wigner_small_d(two_j, 0.7).unwrap().matrix();
                let direct = wigner_small_d(two_j, theta + 0.7).unwrap();
                assert!((composed - direct.matrix()).abs().max() < 1e-10);
            }
            let j = two_j as f64 / 2.0;
            let top = wigner_small_d(two_j, PI / 2.0).unwrap().element(j, j);
            assert!((top - 2f64.powf(-j)).abs() < 1e-12);
        }
    }

    #[test]
    fn axis_basis_spin_half() {
        let ops = build_spin_operators(1).unwrap();
        let v = axis_eigenbasis(&ops, 0.0);
        let h = FRAC_1_SQRT_2;
        // m = -1/2 column ∝ (|↓⟩ - |↑⟩)/√2, m = +1/2 column ∝ (|↓⟩ + |↑⟩)/√2
        assert!((v[(0, 0)] - C64::from(h)).norm() < 1e-12);
        assert!((v[(1, 0)] + C64::from(h)).norm() < 1e-12);
        assert!((v[(0, 1)] - C64::from(h)).norm() < 1e-12);
        assert!((v[(1, 1)] - C64::from(h)).norm() < 1e-12);
    }

    #[test]
    fn axis_basis_diagonalizes() {
        for n in 1..=7 {
            let ops = build_spin_operators(n).unwrap();
            for a in [0.0, 0.4, FRAC_PI_2, -2.0] {
                let v = axis_eigenbasis(&ops, a);
                assert!(unitarity_defect(&v) < 1e-12);
                let diag = v.adjoint() * ops.in_plane(a) * &v;
                for (i, m) in ops.m_values().into_iter().enumerate() {
                    for k in 0..=n {
                        let want = if i == k { m } else { 0.0 };
                        assert!((diag[(i, k)] - C64::from(want)).norm() < 1e-12);
                    }
                }
            }
            let v = axis_eigenbasis(&ops, 0.0);
            let m = CMatrix::from_diagonal(&CVector::from_iterator(
                n + 1,
                ops.m_values().into_iter().map(C64::from),
            ));
            assert!(max_abs_diff(&(&v * m * v.adjoint()), ops.jx()) < 1e-12);
        }
    }

    #[test]
    fn x_states_are_jx_eigenstates() {
        for n in 1..=6 {
            let ops = build_spin_operators(n).unwrap();
            for m in ops.m_values() {
                let v = ops.x_state(m).unwrap();
                let jv = ops.jx() * &v;
                assert!((jv - v.scale(m)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn twist_splits_ground_state_for_odd_n() {
        for n in [1, 3, 5, 7] {
            let ops = build_spin_operators(n).unwrap();
            let j = ops.j();
            let out = ops.twist_y(PI / 2.0) * ops.z_state(-j).unwrap();
            let target = (ops.x_state(j).unwrap() - ops.x_state(-j).unwrap()).scale(FRAC_1_SQRT_2);
            let f = crate::linalg::fidelity(target.as_slice(), out.as_slice());
            assert!(1.0 - f < 1e-10, "N = {n}: fidelity {f}");
        }
    }

    #[test]
    fn full_turn_flips_spinor_sign() {
        let ops = build_spin_operators(1).unwrap();
        let u = ops.in_plane_rotation(2.0 * PI, 0.3);
        assert!(max_abs_diff(&u, &CMatrix::identity(2, 2).scale(-1.0)) < 1e-12);
    }
}
