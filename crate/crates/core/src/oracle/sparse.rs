use crate::C64;

/// Compressed-row complex matrix; only what the oracle needs.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    /// Duplicate entries are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet outside matrix");
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
                continue;
            }
            last = Some((r, c));
            cols.push(c);
            vals.push(v);
            row_start[r + 1] += 1;
        }
        for r in 0..dim {
            row_start[r + 1] += row_start[r];
        }
        SparseMatrix { dim, row_start, cols, vals }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, C64::from(1.0))).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.vals.len());
        for r in 0..self.dim {
            for idx in self.row_start[r]..self.row_start[r + 1] {
                out.push((r, self.cols[idx], self.vals[idx]));
            }
        }
        out
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        (self.row_start[r]..self.row_start[r + 1])
            .find(|&idx| self.cols[idx] == c)
            .map_or(C64::from(0.0), |idx| self.vals[idx])
    }

    pub fn mul_vec(&self, v: &[C64], out: &mut [C64]) {
        for r in 0..self.dim {
            let mut acc = C64::from(0.0);
            for idx in self.row_start[r]..self.row_start[r + 1] {
                acc += self.vals[idx] * v[self.cols[idx]];
            }
            out[r] = acc;
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::from(0.0); self.dim];
        self.mul_vec(v, &mut out);
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn add(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut t = self.triplets();
        t.extend(other.triplets());
        Self::from_triplets(self.dim, t)
    }

    pub fn mul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut t = Vec::new();
        for r in 0..self.dim {
            for i in self.row_start[r]..self.row_start[r + 1] {
                let k = self.cols[i];
                for j in other.row_start[k]..other.row_start[k + 1] {
                    t.push((r, other.cols[j], self.vals[i] * other.vals[j]));
                }
            }
        }
        Self::from_triplets(self.dim, t)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().into_iter().map(|(r, c, v)| (c, r, v.conj())).collect())
    }

    /// `self ⊗ other`, with `other` as the fast index.
    pub fn kron(&self, other: &SparseMatrix) -> Self {
        let d = other.dim;
        let mut t = Vec::new();
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                t.push((r1 * d + r2, c1 * d + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.dim * d, t)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.dim];
        for (idx, c) in self.cols.iter().enumerate() {
            sums[*c] += self.vals[idx].norm();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.add(&self.adjoint().scale(C64::from(-1.0)))
            .vals
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// `exp(-i H t) v` by a Taylor series, with `t` split so each slice has `‖H‖₁·dt ≤ 1`.
pub fn expm_multiply(h: &SparseMatrix, t: f64, v: &[C64]) -> Vec<C64> {
    let slices = (h.one_norm() * t.abs()).ceil().max(1.0) as usize;
    let dt = t / slices as f64;
    let mut state = v.to_vec();
    let mut term = vec![C64::from(0.0); v.len()];
    let mut next = vec![C64::from(0.0); v.len()];
    for _ in 0..slices {
        term.copy_from_slice(&state);
        let scale = crate::linalg::norm_sqr(&state).sqrt().max(1e-300);
        for k in 1..=80 {
            h.mul_vec(&term, &mut next);
            let f = C64::new(0.0, -dt / k as f64);
            let mut size = 0.0;
            for (dst, src) in term.iter_mut().zip(&next) {
                *dst = src * f;
                size += dst.norm_sqr();
            }
            state.iter_mut().zip(&term).for_each(|(s, d)| *s += d);
            if size.sqrt() < 1e-17 * scale {
                break;
            }
        }
    }
    state
}
