//! Wigner transform of the post-interaction state by direct quadrature over
//! the off-diagonal offset `u`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::gaussian::GaussianState;
use crate::grid::{PhaseSpaceGrid, WignerGrid};
use crate::kernels::KernelSpec;
use crate::quadrature::GaussLegendre;

/// Hard limit on `|Im W|` before the imaginary part may be dropped.
pub const IMAG_RESIDUAL_LIMIT: f64 = 1e-8;

const MIN_NODES: usize = 257;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// `U_max = cutoff · √(2V_X/d)`.
    pub cutoff: f64,
    /// Fixed Gauss–Legendre node count; `None` sizes it from the largest
    /// oscillation frequency on the grid.
    pub nodes: Option<usize>,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { cutoff: 8.0, nodes: None }
    }
}

impl QuadratureSettings {
    /// Node count used for `grid`: at least 257, and enough to resolve
    /// `e^{iPu}` times the kernel's momentum kick across `[−U_max, U_max]`.
    pub fn node_count(&self, grid: &PhaseSpaceGrid, kernel: &KernelSpec, state: &GaussianState) -> usize {
        if let Some(n) = self.nodes {
            return n;
        }
        let omega = grid.p_min.abs().max(grid.p_max.abs())
            + kernel.params.mu() * kernel.mean_photons().max(1.0);
        let length = 2.0 * state.offset_cutoff(self.cutoff);
        let n = (0.75 * omega * length).ceil() as usize + 64;
        n.max(MIN_NODES) | 1
    }

    fn rule(&self, n: usize, state: &GaussianState) -> GaussLegendre {
        let u_max = state.offset_cutoff(self.cutoff);
        GaussLegendre::on_interval(n, -u_max, u_max)
    }
}

/// `W(X, P)` on every grid node with default quadrature.
pub fn compute_wigner(grid: &PhaseSpaceGrid, kernel: &KernelSpec, state: &GaussianState) -> Result<WignerGrid> {
    compute_wigner_with(grid, kernel, state, &QuadratureSettings::default())
}

pub fn compute_wigner_with(
    grid: &PhaseSpaceGrid,
    kernel: &KernelSpec,
    state: &GaussianState,
    quad: &QuadratureSettings,
) -> Result<WignerGrid> {
    check_settings(quad)?;
    let n = quad.node_count(grid, kernel, state);
    let rule = quad.rule(n, state);
    let ps = grid.ps();
    // e^{iP u_j}, laid out per node so each row of the product is contiguous
    let phases: Vec<Complex64> = rule
        .nodes
        .iter()
        .flat_map(|&u| ps.iter().map(move |&p| Complex64::from_polar(1.0, p * u)))
        .collect();

    let rows: Vec<Result<(Vec<f64>, f64)>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let x = grid.x(i);
            let k = kernel.row(x, &rule.nodes)?;
            let mut acc = vec![Complex64::new(0.0, 0.0); ps.len()];
            for (j, (&u, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let g = w * k[j] * state.matrix_element(x, u);
                if g == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let e = &phases[j * ps.len()..(j + 1) * ps.len()];
                for (a, &z) in acc.iter_mut().zip(e) {
                    *a += g * z;
                }
            }
            let mut imag: f64 = 0.0;
            let row = acc
                .into_iter()
                .map(|v| {
                    imag = imag.max(v.im.abs() / (2.0 * PI));
                    v.re / (2.0 * PI)
                })
                .collect();
            Ok((row, imag))
        })
        .collect();

    let mut values = Vec::with_capacity(grid.len());
    let mut max_imag: f64 = 0.0;
    for r in rows {
        let (row, imag) = r?;
        max_imag = max_imag.max(imag);
        values.extend(row);
    }
    if max_imag > IMAG_RESIDUAL_LIMIT {
        return Err(Error::ImaginaryResidual { residual: max_imag, limit: IMAG_RESIDUAL_LIMIT });
    }
    WignerGrid::from_values(*grid, values, max_imag)
}

/// `W(x, p)` at a single point by the same quadrature.
pub fn wigner_point(
    x: f64,
    p: f64,
    kernel: &KernelSpec,
    state: &GaussianState,
    quad: &QuadratureSettings,
) -> Result<f64> {
    ensure_finite("x", x)?;
    ensure_finite("p", p)?;
    check_settings(quad)?;
    let grid = PhaseSpaceGrid::new(x - 1.0, x + 1.0, p - 1.0, p + 1.0, 2, 2)?;
    let n = quad.node_count(&grid, kernel, state);
    let rule = quad.rule(n, state);
    let k = kernel.row(x, &rule.nodes)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, (&u, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        acc += w * k[j] * state.matrix_element(x, u) * Complex64::from_polar(1.0, p * u);
    }
    let v = acc / (2.0 * PI);
    if v.im.abs() > IMAG_RESIDUAL_LIMIT {
        return Err(Error::ImaginaryResidual { residual: v.im.abs(), limit: IMAG_RESIDUAL_LIMIT });
    }
    Ok(v.re)
}

fn check_settings(quad: &QuadratureSettings) -> Result<()> {
    if !(quad.cutoff.is_finite() && quad.cutoff > 0.0) {
        return Err(Error::Domain(format!("quadrature cutoff must be positive, got {}", quad.cutoff)));
    }
    if quad.nodes == Some(0) {
        return Err(Error::Domain("quadrature needs at least one node".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    P,
}

/// One-dimensional density obtained by integrating out the other axis with
/// the trapezoidal rule. Returns `(coordinates, density)`.
pub fn marginal(w: &WignerGrid, axis: Axis) -> (Vec<f64>, Vec<f64>) {
    let g = &w.grid;
    match axis {
        Axis::X => {
            let dp = g.dp();
            let dens = (0..g.nx)
                .map(|i| {
                    let row = &w.values[i * g.np..(i + 1) * g.np];
                    trapezoid(row, dp)
                })
                .collect();
            (g.xs(), dens)
        }
        Axis::P => {
            let dx = g.dx();
            let dens = (0..g.np)
                .map(|j| {
                    let col: Vec<f64> = (0..g.nx).map(|i| w.at(i, j)).collect();
                    trapezoid(&col, dx)
                })
                .collect();
            (g.ps(), dens)
        }
    }
}

pub(crate) fn trapezoid(v: &[f64], h: f64) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => 0.0,
        n => h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1])),
    }
}

/// `max |W(X, P) − W(−X, P)|` over the grid.
pub fn symmetry_check(w: &WignerGrid) -> Result<f64> {
    let g = &w.grid;
    if !g.is_x_symmetric() {
        return Err(Error::Precondition(format!(
            "grid X range [{}, {}] is not symmetric about 0",
            g.x_min, g.x_max
        )));
    }
    let mut worst: f64 = 0.0;
    for i in 0..g.nx / 2 {
        let m = g.nx - 1 - i;
        for j in 0..g.np {
            worst = worst.max((w.at(i, j) - w.at(m, j)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::SystemParams;

    #[test]
    fn vacuum_passthrough() {
        let p = SystemParams::pulsed(2.0, 0.0).unwrap();
        let k = KernelSpec::coherent(0.0, p).unwrap();
        let s = GaussianState::vacuum();
        let g = PhaseSpaceGrid::symmetric(5.0, 61).unwrap();
        let w = compute_wigner(&g, &k, &s).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..g.nx {
            for j in 0..g.np {
                let want = (-g.x(i).powi(2) - g.p(j).powi(2)).exp() / PI;
                worst = worst.max((w.at(i, j) - want).abs());
            }
        }
        assert!(worst < 1e-12, "{worst}");
        assert!((w.at(30, 30) - 1.0 / PI).abs() < 1e-14);
        assert!((w.volume() - 1.0).abs() < 1e-8);
        assert!(symmetry_check(&w).unwrap() < 1e-14);
    }

    #[test]
    fn vacuum_x_marginal() {
        let p = SystemParams::pulsed(1.0, 0.0).unwrap();
        let k = KernelSpec::coherent(0.0, p).unwrap();
        let g = PhaseSpaceGrid::symmetric(6.0, 61).unwrap();
        let w = compute_wigner(&g, &k, &GaussianState::vacuum()).unwrap();
        let (_, m) = marginal(&w, Axis::X);
        assert!((m[30] - 1.0 / PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let g = PhaseSpaceGrid::new(-1.0, 2.0, -1.0, 1.0, 3, 3).unwrap();
        let w = WignerGrid::from_fn(g, |_, _| 0.0);
        assert!(matches!(symmetry_check(&w), Err(Error::Precondition(_))));
    }

    #[test]
    fn point_matches_grid() {
        let p = SystemParams::pulsed(1.0, 0.2).unwrap();
        let k = KernelSpec::photon_count(1, p).unwrap();
        let s = GaussianState::squeezed_thermal(0.0, 0.3).unwrap();
        let g = PhaseSpaceGrid::new(-1.0, 1.0, 0.0, 4.0, 3, 5).unwrap();
        let quad = QuadratureSettings { nodes: Some(401), ..Default::default() };
        let w = compute_wigner_with(&g, &k, &s, &quad).unwrap();
        let v = wigner_point(g.x(2), g.p(3), &k, &s, &quad).unwrap();
        assert!((v - w.at(2, 3)).abs() < 1e-14);
    }
}
