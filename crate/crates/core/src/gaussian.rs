//! Gaussian initial states of the mechanical oscillator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Slack on the uncertainty bound `d >= 1/4` to absorb rounding in
/// user-supplied moments.
const HEISENBERG_SLACK: f64 = 1e-12;

/// First and second moments of a Gaussian mechanical state in the
/// dimensionless quadratures `X = (b + b†)/√2`, `P = −i(b − b†)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub x_mean: f64,
    pub p_mean: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
}

impl GaussianState {
    pub fn new(x_mean: f64, p_mean: f64, var_x: f64, var_p: f64, cov_xp: f64) -> Result<Self> {
        for (n, v) in [
            ("x_mean", x_mean),
            ("p_mean", p_mean),
            ("var_x", var_x),
            ("var_p", var_p),
            ("cov_xp", cov_xp),
        ] {
            ensure_finite(n, v)?;
        }
        if var_x <= 0.0 || var_p <= 0.0 {
            return Err(Error::Domain(format!(
                "variances must be positive (V_X = {var_x}, V_P = {var_p})"
            )));
        }
        let s = GaussianState { x_mean, p_mean, var_x, var_p, cov_xp };
        if s.determinant() < 0.25 - HEISENBERG_SLACK {
            return Err(Error::Domain(format!(
                "covariance determinant {} violates the uncertainty bound 1/4",
                s.determinant()
            )));
        }
        Ok(s)
    }

    /// The oscillator ground state.
    pub fn vacuum() -> Self {
        GaussianState { x_mean: 0.0, p_mean: 0.0, var_x: 0.5, var_p: 0.5, cov_xp: 0.0 }
    }

    /// Thermal state with mean occupation `n_bar`, squeezed in momentum by `r_m`.
    pub fn squeezed_thermal(n_bar: f64, r_m: f64) -> Result<Self> {
        ensure_finite("n_bar", n_bar)?;
        ensure_finite("r_m", r_m)?;
        if n_bar < 0.0 {
            return Err(Error::Domain(format!("n_bar must be >= 0, got {n_bar}")));
        }
        let v = n_bar + 0.5;
        Ok(GaussianState {
            x_mean: 0.0,
            p_mean: 0.0,
            var_x: v * (2.0 * r_m).exp(),
            var_p: v * (-2.0 * r_m).exp(),
            cov_xp: 0.0,
        })
    }

    /// Covariance determinant `d = V_X V_P − V_XP²`.
    pub fn determinant(&self) -> f64 {
        self.var_x * self.var_p - self.cov_xp * self.cov_xp
    }

    pub fn is_centred(&self) -> bool {
        self.x_mean == 0.0 && self.p_mean == 0.0
    }

    /// Position-basis element `⟨x − u/2|ρ|x + u/2⟩`.
    pub fn matrix_element(&self, x: f64, u: f64) -> Complex64 {
        let d = self.determinant();
        let dx = x - self.x_mean;
        let re = -(d / (2.0 * self.var_x)) * u * u - dx * dx / (2.0 * self.var_x);
        let im = -self.p_mean * u - (self.cov_xp / self.var_x) * dx * u;
        let norm = 1.0 / (2.0 * PI * self.var_x).sqrt();
        Complex64::from_polar(norm * re.exp(), im)
    }

    /// Closed-form Wigner function of the state.
    pub fn wigner(&self, x: f64, p: f64) -> f64 {
        (self.log_wigner(x, p)).exp()
    }

    pub(crate) fn log_wigner(&self, x: f64, p: f64) -> f64 {
        let d = self.determinant();
        let dx = x - self.x_mean;
        let dp = p - self.p_mean;
        let q = self.var_p * dx * dx - 2.0 * self.cov_xp * dx * dp + self.var_x * dp * dp;
        -q / (2.0 * d) - (2.0 * PI * d.sqrt()).ln()
    }

    /// Half-width of the `u` interval on which the Gaussian factor
    /// `exp(−d u²/2V_X)` is above `exp(−c²)`.
    pub fn offset_cutoff(&self, c: f64) -> f64 {
        c * (2.0 * self.var_x / self.determinant()).sqrt()
    }
}
