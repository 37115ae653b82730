//! Negativity of sampled Wigner functions: negative volume, minimum,
//! thermal smoothing and nonclassical depth.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::grid::{PhaseSpaceGrid, WignerGrid};

/// Padding in standard deviations of the smoothing kernel.
const PAD_SIGMAS: f64 = 6.0;
/// Relative non-negativity threshold `ε_neg / max W`.
pub const DEFAULT_NEG_EPS: f64 = 1e-9;
pub const DEPTH_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    /// `Σ|W| dx dp − Σ W dx dp`.
    pub delta: f64,
    pub min_value: f64,
    pub min_location: (f64, f64),
    /// Negative volume over positive volume.
    pub neg_to_pos_ratio: f64,
}

pub fn negative_volume(w: &WignerGrid) -> NegativityReport {
    let cell = w.grid.dx() * w.grid.dp();
    let mut total = 0.0;
    let mut abs_total = 0.0;
    let mut min_idx = 0;
    for (k, &v) in w.values.iter().enumerate() {
        total += v;
        abs_total += v.abs();
        if v < w.values[min_idx] {
            min_idx = k;
        }
    }
    let delta = (abs_total - total) * cell;
    let neg = 0.5 * delta;
    let pos = total * cell + neg;
    let (i, j) = (min_idx / w.grid.np, min_idx % w.grid.np);
    NegativityReport {
        delta,
        min_value: w.values[min_idx],
        min_location: (w.grid.x(i), w.grid.p(j)),
        neg_to_pos_ratio: if pos > 0.0 { neg / pos } else { 0.0 },
    }
}

// β = (X + iP)/√2, so a weight e^{−|β′|²/τ_th} has variance τ_th in X and P
fn sigma_for(tau_th: f64) -> f64 {
    tau_th.sqrt()
}

/// Gaussian smoothing with variance `τ_th` per quadrature, i.e. the
/// Wigner function after adding `τ_th` thermal phonons. The output grid is
/// the input grid padded by `6√τ_th` on every side.
pub fn thermal_convolve(w: &WignerGrid, tau_th: f64) -> Result<WignerGrid> {
    ensure_finite("tau_th", tau_th)?;
    if tau_th < 0.0 {
        return Err(Error::Domain(format!("tau_th must be >= 0, got {tau_th}")));
    }
    if tau_th == 0.0 {
        return Ok(w.clone());
    }
    let sm = Smoother::new(w, sigma_for(tau_th));
    Ok(sm.apply(sigma_for(tau_th)))
}

/// Zero-padded spectrum of a grid, reusable for several smoothing widths
/// up to the one it was padded for.
struct Smoother {
    grid: PhaseSpaceGrid,
    pad_x: usize,
    pad_p: usize,
    // FFT buffer extents, larger than the padded grid so the circular
    // convolution never wraps onto it
    fx: usize,
    fp: usize,
    spectrum: Vec<Complex64>,
    inv_x: Arc<dyn Fft<f64>>,
    inv_p: Arc<dyn Fft<f64>>,
}

impl Smoother {
    fn new(w: &WignerGrid, sigma_max: f64) -> Self {
        let g = w.grid;
        let (dx, dp) = (g.dx(), g.dp());
        let pad_x = (PAD_SIGMAS * sigma_max / dx).ceil() as usize;
        let pad_p = (PAD_SIGMAS * sigma_max / dp).ceil() as usize;
        let fx = g.nx + 3 * pad_x;
        let fp = g.np + 3 * pad_p;
        let mut planner = FftPlanner::<f64>::new();
        let fwd_x = planner.plan_fft_forward(fx);
        let fwd_p = planner.plan_fft_forward(fp);
        let inv_x = planner.plan_fft_inverse(fx);
        let inv_p = planner.plan_fft_inverse(fp);

        let mut buf = vec![Complex64::new(0.0, 0.0); fx * fp];
        for i in 0..g.nx {
            for j in 0..g.np {
                buf[(i + pad_x) * fp + j + pad_p] = Complex64::new(w.at(i, j), 0.0);
            }
        }
        fft_2d(&mut buf, fx, fp, &fwd_x, &fwd_p);
        Smoother { grid: g, pad_x, pad_p, fx, fp, spectrum: buf, inv_x, inv_p }
    }

    fn padded_grid(&self) -> PhaseSpaceGrid {
        let g = &self.grid;
        let (dx, dp) = (g.dx(), g.dp());
        PhaseSpaceGrid {
            x_min: g.x_min - self.pad_x as f64 * dx,
            x_max: g.x_max + self.pad_x as f64 * dx,
            p_min: g.p_min - self.pad_p as f64 * dp,
            p_max: g.p_max + self.pad_p as f64 * dp,
            nx: g.nx + 2 * self.pad_x,
            np: g.np + 2 * self.pad_p,
        }
    }

    /// Values on the padded grid after smoothing with width `sigma`.
    fn smoothed_values(&self, sigma: f64) -> Vec<f64> {
        let (fx, fp) = (self.fx, self.fp);
        let kx = frequencies(fx, self.grid.dx());
        let kp = frequencies(fp, self.grid.dp());
        let s2 = 0.5 * sigma * sigma;
        let mut buf: Vec<Complex64> = self
            .spectrum
            .par_chunks(fp)
            .enumerate()
            .flat_map_iter(|(i, row)| {
                let ax = (-s2 * kx[i] * kx[i]).exp();
                let kp = &kp;
                row.iter().enumerate().map(move |(j, &v)| v * (ax * (-s2 * kp[j] * kp[j]).exp()))
            })
            .collect();
        fft_2d(&mut buf, fx, fp, &self.inv_x, &self.inv_p);
        let scale = 1.0 / (fx * fp) as f64;
        let out = self.padded_grid();
        let mut values = Vec::with_capacity(out.len());
        for i in 0..out.nx {
            for j in 0..out.np {
                values.push(buf[i * fp + j].re * scale);
            }
        }
        values
    }

    fn apply(&self, sigma: f64) -> WignerGrid {
        let values = self.smoothed_values(sigma);
        WignerGrid::from_values(self.padded_grid(), values, 0.0).expect("padded grid matches")
    }
}

fn frequencies(n: usize, h: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / (n as f64 * h);
    (0..n)
        .map(|k| if k <= n / 2 { k as f64 * base } else { (k as f64 - n as f64) * base })
        .collect()
}

fn fft_2d(buf: &mut [Complex64], rows: usize, cols: usize, along_x: &Arc<dyn Fft<f64>>, along_p: &Arc<dyn Fft<f64>>) {
    buf.par_chunks_mut(cols).for_each(|row| along_p.process(row));
    let mut t = vec![Complex64::new(0.0, 0.0); rows * cols];
    transpose(buf, &mut t, rows, cols);
    t.par_chunks_mut(rows).for_each(|col| along_x.process(col));
    transpose(&t, buf, cols, rows);
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for i in 0..rows {
        for j in 0..cols {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}

/// Result of the depth search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthResult {
    pub tau_inf: f64,
    pub tau_th: f64,
    pub eps_neg: f64,
}

/// `τ_inf = ½ + τ_th*` with `τ_th*` the smallest added thermal occupation
/// that leaves the smoothed grid non-negative (down to `−ε_neg`).
pub fn nonclassical_depth(w: &WignerGrid) -> Result<f64> {
    Ok(nonclassical_depth_with(w, DEFAULT_NEG_EPS, DEPTH_TOLERANCE)?.tau_inf)
}

pub fn nonclassical_depth_with(w: &WignerGrid, rel_eps: f64, tol: f64) -> Result<DepthResult> {
    let eps_neg = rel_eps * w.max_value();
    let min0 = w.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min0 >= -eps_neg {
        return Err(Error::Precondition(
            "state has no Wigner negativity; the R-function route is unsupported".into(),
        ));
    }
    let sm = Smoother::new(w, sigma_for(0.5));
    let nonneg = |tau: f64| {
        sm.smoothed_values(sigma_for(tau)).iter().copied().fold(f64::INFINITY, f64::min) >= -eps_neg
    };
    let (mut lo, mut hi) = (0.0, 0.5);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if nonneg(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DepthResult { tau_inf: 0.5 + hi, tau_th: hi, eps_neg })
}
