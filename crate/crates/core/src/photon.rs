//! Closed-form Wigner function after a single-photon detection, for a
//! centred Gaussian initial state.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_finite, Error, Result};
use crate::faddeeva::erfcx_split;
use crate::gaussian::GaussianState;
use crate::grid::{PhaseSpaceGrid, WignerGrid};
use crate::kernels::KernelSpec;
use crate::response::SystemParams;
use crate::wigner::{wigner_point, QuadratureSettings};

/// Below this `|μ(2Δ + μx)|` the prefactor's removable singularity is
/// handled by the quadrature path.
pub const SINGULARITY_GUARD: f64 = 1e-8;

pub fn wigner_single_photon_closed_form(
    x: f64,
    p: f64,
    s: &GaussianState,
    params: &SystemParams,
) -> Result<f64> {
    ensure_finite("x", x)?;
    ensure_finite("p", p)?;
    if !s.is_centred() {
        return Err(Error::Precondition(
            "closed form needs an initial state centred at the origin".into(),
        ));
    }
    let mu = params.mu();
    let delta = params.delta_bar();
    let lever = mu * (2.0 * delta + mu * x);
    if lever.abs() < SINGULARITY_GUARD {
        let k = KernelSpec::photon_count(1, *params)?;
        return wigner_point(x, p, &k, s, &QuadratureSettings::default());
    }

    let d = s.determinant();
    let a = d / (2.0 * s.var_x);
    let b = (s.var_x * p - s.cov_xp * x) / d;
    let y = Complex64::new(2.0 * delta + mu * x, 2.0);
    let z = a.sqrt() * Complex64::new(4.0 - mu * b, -4.0 * delta - 2.0 * mu * x) / mu;
    let coef = 16.0 * PI / lever * (d / (2.0 * PI * s.var_x)).sqrt();

    let log_wi = s.log_wigner(x, p);
    let wi = log_wi.exp();
    let (scaled, reflected) = erfcx_split(z);
    // erfcx(z) = 2 e^{z²} − S in the left half-plane; the growing factor is
    // combined with W_i before exponentiation
    // Re[y erfcx(z)] · W_i
    let weighted = match reflected {
        None => (y * scaled).re * wi,
        Some(e) => (2.0 * y * (e + log_wi).exp()).re - (y * scaled).re * wi,
    };
    Ok(wi - coef * weighted)
}

/// Closed form on every grid node.
pub fn single_photon_grid(grid: &PhaseSpaceGrid, s: &GaussianState, params: &SystemParams) -> Result<WignerGrid> {
    let rows: Vec<Result<Vec<f64>>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let x = grid.x(i);
            (0..grid.np)
                .map(|j| wigner_single_photon_closed_form(x, grid.p(j), s, params))
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    for r in rows {
        values.extend(r?);
    }
    WignerGrid::from_values(*grid, values, 0.0)
}
