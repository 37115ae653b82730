//! Rectangular phase-space lattices and sampled Wigner functions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::gaussian::GaussianState;
use crate::kernels::KernelSpec;

/// Photon-number tail left outside the momentum window.
const PHOTON_TAIL: f64 = 1e-9;

/// Default tolerance on `|∫W − 1|` before a grid is flagged as too small.
pub const NORMALIZATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

/// Named grid recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPreset {
    /// 241×241, bounds sized from the state and the expected momentum kick.
    Default,
    /// Fixed X window `[−8, 8]` with 301 points and momentum spacing 0.05,
    /// used for all figure regressions.
    PaperRepro,
}

impl GridPreset {
    pub fn name(&self) -> &'static str {
        match self {
            GridPreset::Default => "default",
            GridPreset::PaperRepro => "paper-repro",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "default" => Some(GridPreset::Default),
            "paper-repro" => Some(GridPreset::PaperRepro),
            _ => None,
        }
    }

    pub fn build(&self, kernel: &KernelSpec, state: &GaussianState) -> Result<PhaseSpaceGrid> {
        match self {
            GridPreset::Default => PhaseSpaceGrid::default_for(kernel, state),
            GridPreset::PaperRepro => PhaseSpaceGrid::paper_repro_for(kernel, state),
        }
    }
}

impl PhaseSpaceGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        for (n, v) in [("x_min", x_min), ("x_max", x_max), ("p_min", p_min), ("p_max", p_max)] {
            ensure_finite(n, v)?;
        }
        if x_max <= x_min || p_max <= p_min {
            return Err(Error::Domain(format!(
                "empty grid: X [{x_min}, {x_max}], P [{p_min}, {p_max}]"
            )));
        }
        if nx < 2 || np < 2 {
            return Err(Error::Domain(format!("grid needs at least 2×2 points, got {nx}×{np}")));
        }
        Ok(PhaseSpaceGrid { x_min, x_max, p_min, p_max, nx, np })
    }

    /// Square grid centred on the origin.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    /// `[−6σ_X − |X_G|, 6σ_X + |X_G|] × [min(−4, P_G − 6σ_P), max(12, 4 + μ n_q + 6σ_P)]`
    /// at 241×241, where all but 1e-9 of the pulse's photon statistics lie
    /// below `n_q`.
    pub fn default_for(kernel: &KernelSpec, state: &GaussianState) -> Result<Self> {
        let (x_half, p_lo, p_hi) = auto_bounds(kernel, state);
        Self::new(-x_half, x_half, p_lo, p_hi, 241, 241)
    }

    pub fn paper_repro_for(kernel: &KernelSpec, state: &GaussianState) -> Result<Self> {
        let (_, _, p_hi) = auto_bounds(kernel, state);
        let x_half = 8.0;
        let p_lo = (state.p_mean - 6.0 * state.var_p.sqrt()).min(-5.0);
        let np = ((p_hi - p_lo) / 0.05).round() as usize + 1;
        let p_hi = p_lo + 0.05 * (np - 1) as f64;
        Self::new(-x_half, x_half, p_lo, p_hi, 301, np)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    // Interpolating between both ends keeps symmetric grids exactly
    // symmetric, with the centre node at 0.
    pub fn x(&self, i: usize) -> f64 {
        lerp(self.x_min, self.x_max, i, self.nx)
    }

    pub fn p(&self, j: usize) -> f64 {
        lerp(self.p_min, self.p_max, j, self.np)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.np).map(|j| self.p(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_x_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs().max(1.0)
    }
}

fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    let m = (n - 1) as f64;
    (lo * (m - i as f64) + hi * i as f64) / m
}

fn auto_bounds(kernel: &KernelSpec, state: &GaussianState) -> (f64, f64, f64) {
    let sx = state.var_x.sqrt();
    let sp = state.var_p.sqrt();
    let x_half = 6.0 * sx + state.x_mean.abs();
    let kick = kernel.params.mu() * kernel.photon_quantile(PHOTON_TAIL);
    let p_lo = (state.p_mean - 6.0 * sp).min(-4.0);
    let p_hi = (state.p_mean + 4.0 + kick + 6.0 * sp).max(12.0);
    (x_half, p_lo, p_hi)
}

/// Wigner samples, row-major over X then P.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub grid: PhaseSpaceGrid,
    pub values: Vec<f64>,
    /// Largest `|Im W|` seen before the imaginary part was discarded.
    pub max_imag_residual: f64,
    /// Set when `|ΣW dx dp − 1|` exceeds the tolerance: the grid is too
    /// small for the state.
    pub normalization_warning: bool,
}

impl WignerGrid {
    pub fn from_values(grid: PhaseSpaceGrid, values: Vec<f64>, max_imag_residual: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "{} values for a {}×{} grid",
                values.len(),
                grid.nx,
                grid.np
            )));
        }
        let mut w = WignerGrid { grid, values, max_imag_residual, normalization_warning: false };
        w.normalization_warning = (w.volume() - 1.0).abs() > NORMALIZATION_TOL;
        Ok(w)
    }

    /// Samples an analytic function on the grid.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: PhaseSpaceGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.np {
                values.push(f(x, grid.p(j)));
            }
        }
        Self::from_values(grid, values, 0.0).expect("length matches by construction")
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.np + j]
    }

    /// `Σ W dx dp`.
    pub fn volume(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.grid.dp()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with header `X,P,W`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "X,P,W")?;
        for i in 0..self.grid.nx {
            let x = self.grid.x(i);
            for j in 0..self.grid.np {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", x, self.grid.p(j), self.at(i, j))?;
            }
        }
        Ok(())
    }
}
