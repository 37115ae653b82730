//! Physical parameters and the adiabatic cavity response.
//!
//! For a mechanical position `x` the cavity maps the input field onto the
//! output field via the unit-modulus factor
//!
//! ```text
//! f(x) = [1 + i(μx/2 + Δ)] / [1 − i(μx/2 + Δ)],   μ = √8 · g₀/κ
//! ```
//!
//! whose argument `φ(x) = 2 atan(μx/2 + Δ)` is the optical phase imprinted on
//! every photon.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Single source of the physical constants used by every module.
///
/// `mu` is derived from `g0_over_kappa` at construction and cannot be set on
/// its own. Rates are stored in angular units (rad/s); `flux_k` and
/// `flux_k2` are in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    g0_over_kappa: f64,
    mu: f64,
    delta_bar: f64,
    omega_m: f64,
    gamma: f64,
    n_bath: f64,
    flux_k: f64,
    flux_k2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    g0_over_kappa: f64,
    mu: f64,
    delta_bar: f64,
    omega_m: f64,
    gamma: f64,
    n_bath: f64,
    flux_k: f64,
    flux_k2: f64,
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams {
            g0_over_kappa: p.g0_over_kappa,
            mu: p.mu,
            delta_bar: p.delta_bar,
            omega_m: p.omega_m,
            gamma: p.gamma,
            n_bath: p.n_bath,
            flux_k: p.flux_k,
            flux_k2: p.flux_k2,
        }
    }
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;

    // `mu` in serialized form is informational; it is always recomputed.
    fn try_from(r: RawParams) -> Result<Self> {
        SystemParams::builder(r.g0_over_kappa)
            .detuning(r.delta_bar)
            .omega_m(r.omega_m)
            .gamma(r.gamma)
            .n_bath(r.n_bath)
            .flux_k(r.flux_k)
            .flux_k2(r.flux_k2)
            .build()
    }
}

impl SystemParams {
    /// Pulsed-interaction parameters: only the coupling and detuning matter.
    pub fn pulsed(g0_over_kappa: f64, delta_bar: f64) -> Result<Self> {
        Self::builder(g0_over_kappa).detuning(delta_bar).build()
    }

    pub fn builder(g0_over_kappa: f64) -> SystemParamsBuilder {
        SystemParamsBuilder {
            g0_over_kappa,
            delta_bar: 0.0,
            omega_m: 0.0,
            gamma: 0.0,
            n_bath: 0.0,
            flux_k: 0.0,
            flux_k2: 0.0,
        }
    }

    /// Copy with a different coupling ratio; `mu` follows.
    pub fn with_g0_over_kappa(&self, g0_over_kappa: f64) -> Result<Self> {
        self.to_builder().g0(g0_over_kappa).build()
    }

    pub fn to_builder(&self) -> SystemParamsBuilder {
        SystemParamsBuilder {
            g0_over_kappa: self.g0_over_kappa,
            delta_bar: self.delta_bar,
            omega_m: self.omega_m,
            gamma: self.gamma,
            n_bath: self.n_bath,
            flux_k: self.flux_k,
            flux_k2: self.flux_k2,
        }
    }

    pub fn g0_over_kappa(&self) -> f64 {
        self.g0_over_kappa
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn delta_bar(&self) -> f64 {
        self.delta_bar
    }
    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn n_bath(&self) -> f64 {
        self.n_bath
    }
    pub fn flux_k(&self) -> f64 {
        self.flux_k
    }
    pub fn flux_k2(&self) -> f64 {
        self.flux_k2
    }

    /// `μx/2 + Δ`, the argument shared by the response and its phase.
    #[inline]
    pub(crate) fn detuned_position(&self, x: f64) -> f64 {
        0.5 * self.mu * x + self.delta_bar
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SystemParamsBuilder {
    g0_over_kappa: f64,
    delta_bar: f64,
    omega_m: f64,
    gamma: f64,
    n_bath: f64,
    flux_k: f64,
    flux_k2: f64,
}

impl SystemParamsBuilder {
    pub fn g0(mut self, v: f64) -> Self {
        self.g0_over_kappa = v;
        self
    }
    pub fn detuning(mut self, v: f64) -> Self {
        self.delta_bar = v;
        self
    }
    /// Mechanical angular frequency in rad/s.
    pub fn omega_m(mut self, v: f64) -> Self {
        self.omega_m = v;
        self
    }
    /// Mechanical amplitude decay rate in rad/s.
    pub fn gamma(mut self, v: f64) -> Self {
        self.gamma = v;
        self
    }
    pub fn n_bath(mut self, v: f64) -> Self {
        self.n_bath = v;
        self
    }
    pub fn flux_k(mut self, v: f64) -> Self {
        self.flux_k = v;
        self
    }
    pub fn flux_k2(mut self, v: f64) -> Self {
        self.flux_k2 = v;
        self
    }

    pub fn build(self) -> Result<SystemParams> {
        for (name, v) in [
            ("g0_over_kappa", self.g0_over_kappa),
            ("delta_bar", self.delta_bar),
            ("omega_m", self.omega_m),
            ("gamma", self.gamma),
            ("n_bath", self.n_bath),
            ("flux_k", self.flux_k),
            ("flux_k2", self.flux_k2),
        ] {
            ensure_finite(name, v)?;
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("n_bath", self.n_bath),
            ("flux_k", self.flux_k),
            ("flux_k2", self.flux_k2),
        ] {
            if v < 0.0 {
                return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(SystemParams {
            g0_over_kappa: self.g0_over_kappa,
            mu: 8f64.sqrt() * self.g0_over_kappa,
            delta_bar: self.delta_bar,
            omega_m: self.omega_m,
            gamma: self.gamma,
            n_bath: self.n_bath,
            flux_k: self.flux_k,
            flux_k2: self.flux_k2,
        })
    }
}

/// Cavity response `f(x)`.
pub fn response(x: f64, p: &SystemParams) -> Result<Complex64> {
    ensure_finite("x", x)?;
    Ok(response_unchecked(x, p))
}

#[inline]
pub(crate) fn response_unchecked(x: f64, p: &SystemParams) -> Complex64 {
    response_at(p.detuned_position(x))
}

/// `(1 + iy)/(1 − iy)` written out so that the modulus is exactly one up to
/// rounding: `((1 − y²) + 2iy)/(1 + y²)`.
#[inline]
pub(crate) fn response_at(y: f64) -> Complex64 {
    let y2 = y * y;
    let den = 1.0 + y2;
    Complex64::new((1.0 - y2) / den, 2.0 * y / den)
}

/// Optical phase `arg f(x) = 2 atan(μx/2 + Δ)`, continuous in `x`.
pub fn phase(x: f64, p: &SystemParams) -> Result<f64> {
    ensure_finite("x", x)?;
    Ok(2.0 * p.detuned_position(x).atan())
}
