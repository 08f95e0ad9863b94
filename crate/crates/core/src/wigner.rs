//! Wigner quasi-probability on a rectangular phase-space grid.
//!
//! Convention: dimensionless quadratures `x̂ = (â + â†)/√2`, `p̂ = (â - â†)/(i√2)`,
//! `[x̂, p̂] = i`, phase-space point `α = (x + ip)/√2`, and
//! `W(x,p) = (1/π)·Tr[ρ D(α) Π D†(α)]` so that `∬ W dx dp = 1` and `|W| ≤ 1/π`.

use std::f64::consts::{FRAC_1_PI, SQRT_2};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::motional::{required_n_max, DisplacementKernel, MotionalDensity, MotionalState};
use crate::{Error, Result, C64};

pub const CONVENTION: &str = "x=(a+a^dag)/sqrt2, p=(a-a^dag)/(i sqrt2), alpha=(x+ip)/sqrt2, W=Tr[rho D(alpha) Parity D^dag(alpha)]/pi, integral W dx dp = 1";

/// Largest padded Fock dimension the evaluator will build.
const MAX_KERNEL_DIM: usize = 4096;

/// Uniform 1-D grid, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let axis = Axis { min, max, points };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::invalid("grid axis needs at least one point"));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::invalid(format!("bad axis range [{}, {}]", self.min, self.max)));
        }
        if self.points > 1 && self.min == self.max {
            return Err(Error::invalid("multi-point axis with zero width"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        if self.points > 1 {
            (self.max - self.min) / (self.points - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + self.step() * i as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    fn max_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WignerGrid {
    pub convention: String,
    pub x_axis: Axis,
    pub p_axis: Axis,
    /// `values[i][k] = W(x_i, p_k)`.
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix][ip]
    }

    /// Riemann sum `Σ W Δx Δp`.
    pub fn integral(&self) -> f64 {
        let cell = self.x_axis.step() * self.p_axis.step();
        self.values.iter().flatten().sum::<f64>() * cell
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_p W(x_i, p) Δp` for each `x_i`.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = self.p_axis.step();
        self.values.iter().map(|row| row.iter().sum::<f64>() * dp).collect()
    }

    /// Header `x,p,w`, rows ordered by x then p, 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p,w\n");
        for (i, row) in self.values.iter().enumerate() {
            let x = self.x_axis.value(i);
            for (k, w) in row.iter().enumerate() {
                let p = self.p_axis.value(k);
                writeln!(out, "{x:.14e},{p:.14e},{w:.14e}").expect("write to string");
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }
}

/// Anything that can report a Wigner function: pure states and density matrices.
pub trait WignerSource {
    /// Weighted pure components `(weight, state)`.
    fn pure_components(&self) -> Vec<(f64, MotionalState)>;
}

impl WignerSource for MotionalState {
    fn pure_components(&self) -> Vec<(f64, MotionalState)> {
        vec![(1.0, self.clone())]
    }
}

impl WignerSource for MotionalDensity {
    fn pure_components(&self) -> Vec<(f64, MotionalState)> {
        self.components(1e-14)
    }
}

pub fn wigner<S: WignerSource + ?Sized>(source: &S, xs: Axis, ps: Axis) -> Result<WignerGrid> {
    xs.validate()?;
    ps.validate()?;
    let components = source.pure_components();
    let top = components.iter().map(|(_, s)| s.support_top()).max().unwrap_or(0);
    let reach = (xs.max_abs().powi(2) + ps.max_abs().powi(2)).sqrt() / SQRT_2;
    let needed = required_n_max((top as f64).sqrt() + reach) + 1;
    if needed > MAX_KERNEL_DIM {
        return Err(Error::Truncation {
            detail: format!("Wigner grid reaches |alpha| = {reach:.2} beyond the reliable region"),
            n_max: MAX_KERNEL_DIM,
            required: needed,
        });
    }
    let kernel = DisplacementKernel::shared(needed);
    let trimmed: Vec<(f64, Vec<C64>)> = components
        .iter()
        .map(|(w, s)| (*w, s.amplitudes()[..=top].to_vec()))
        .collect();
    let p_values = ps.values();
    let values = xs
        .values()
        .into_par_iter()
        .map(|x| {
            p_values
                .iter()
                .map(|&p| {
                    let alpha = C64::new(x, p) / SQRT_2;
                    let parity: f64 = trimmed
                        .iter()
                        .map(|(w, amps)| w * kernel.displaced_parity(amps, alpha))
                        .sum();
                    FRAC_1_PI * parity
                })
                .collect()
        })
        .collect();
    Ok(WignerGrid { convention: CONVENTION.to_string(), x_axis: xs, p_axis: ps, values })
}

/// Square-ish grid centred on the state's mean quadratures, wide enough to
/// hold its spread.
pub fn suggest_axes(state: &MotionalState, points: usize) -> Result<(Axis, Axis)> {
    let q = state.quadrature_moments();
    let half_x = 4.0 * q.var_x.sqrt() + 3.0;
    let half_p = 4.0 * q.var_p.sqrt() + 3.0;
    Ok((
        Axis::new(q.mean_x - half_x, q.mean_x + half_x, points)?,
        Axis::new(q.mean_p - half_p, q.mean_p + half_p, points)?,
    ))
}
