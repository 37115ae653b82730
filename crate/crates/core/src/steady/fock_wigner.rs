use std::f64::consts::PI;

use rayon::prelude::*;

use super::solver::FockPopulations;
use crate::error::Result;
use crate::grid::{PhaseSpaceGrid, WignerGrid};

/// Rescaling threshold for the Laguerre recurrence.
const BIG: f64 = 1e150;

/// `(1/π) Σ_n P_n (−1)ⁿ e^{−R²} L_n(2R²)` at `R² = r2`.
///
/// The three-term recurrence runs on `L_n` with a separately tracked log
/// scale that starts at `−R²`, so neither the Gaussian factor nor the
/// polynomial overflows.
pub fn fock_wigner_value(probs: &[f64], r2: f64) -> f64 {
    let x = 2.0 * r2;
    let mut log_scale = -r2;
    let mut prev = 1.0; // L_0
    let mut cur = 1.0 - x; // L_1
    let mut sum = 0.0;
    for (n, &p) in probs.iter().enumerate() {
        let l = match n {
            0 => prev,
            1 => cur,
            _ => {
                let nf = (n - 1) as f64;
                let next = ((2.0 * nf + 1.0 - x) * cur - nf * prev) / (nf + 1.0);
                prev = cur;
                cur = next;
                if cur.abs() > BIG {
                    prev /= BIG;
                    cur /= BIG;
                    log_scale += BIG.ln();
                }
                cur
            }
        };
        if p != 0.0 && l != 0.0 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 } * l.signum();
            sum += sign * p * (l.abs().ln() + log_scale).exp();
        }
    }
    sum / PI
}

/// Wigner function of a Fock-diagonal state on `grid`. Depends on `X² + P²`
/// only, so it is rotationally invariant.
pub fn fock_diagonal_wigner(pop: &FockPopulations, grid: &PhaseSpaceGrid) -> Result<WignerGrid> {
    let rows: Vec<Vec<f64>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let x = grid.x(i);
            (0..grid.np)
                .map(|j| {
                    let p = grid.p(j);
                    fock_wigner_value(&pop.probs, x * x + p * p)
                })
                .collect()
        })
        .collect();
    WignerGrid::from_values(*grid, rows.concat(), 0.0)
}

/// Square grid with an odd point count (so the origin is a node), wide
/// enough for the highest level carrying non-negligible population.
pub fn steady_grid(pop: &FockPopulations, n_points: usize) -> Result<PhaseSpaceGrid> {
    let mut acc = 0.0;
    let mut top = 0;
    for (n, &p) in pop.probs.iter().enumerate() {
        acc += p;
        top = n;
        if 1.0 - acc < 1e-10 {
            break;
        }
    }
    let half = (2.0 * top as f64 + 1.0).sqrt() + 4.0;
    PhaseSpaceGrid::symmetric(half, n_points | 1)
}
