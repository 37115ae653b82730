//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use optowig_core::{GaussianState, KernelSpec, PhaseSpaceGrid, SystemParams};

/// Coherent pulse, α = 2, g₀/κ = 2, ground state.
pub fn arrowhead() -> (KernelSpec, GaussianState) {
    let p = SystemParams::pulsed(2.0, 0.0).expect("valid parameters");
    (KernelSpec::coherent(2.0, p).expect("valid kernel"), GaussianState::vacuum())
}

/// Grid small enough for repeated sampling.
pub fn small_grid() -> PhaseSpaceGrid {
    PhaseSpaceGrid::new(-5.0, 5.0, -4.0, 16.0, 61, 121).expect("valid grid")
}

/// Continuous-drive rates with the mechanical frequency dominating.
pub fn continuous(g: f64, k: f64) -> SystemParams {
    SystemParams::builder(g)
        .gamma(2.0 * PI * 1e-3)
        .omega_m(2.0 * PI * 1e5)
        .flux_k(k)
        .build()
        .expect("valid rates")
}
