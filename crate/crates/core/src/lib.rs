//! Mechanical Wigner functions, negativity measures and driven steady states
//! for optomechanics with a nonlinear cavity response.

pub mod error;
pub mod faddeeva;
pub mod gaussian;
pub mod grid;
pub mod kernels;
pub mod negativity;
pub mod photon;
pub mod quadrature;
pub mod response;
pub mod steady;
pub mod wigner;

pub use error::{Error, Result};
pub use gaussian::GaussianState;
pub use grid::{GridPreset, PhaseSpaceGrid, WignerGrid};
pub use kernels::{
    baseline_no_cavity, heralding_probability, kernel_coherent, kernel_lossy, kernel_photon_count,
    kernel_squeezed_vacuum, max_heralding, InputKind, InputState, KernelKind, KernelSpec,
};
pub use negativity::{negative_volume, nonclassical_depth, thermal_convolve, NegativityReport};
pub use photon::{single_photon_grid, wigner_single_photon_closed_form};
pub use response::{phase, response, SystemParams};
pub use steady::{
    fock_diagonal_wigner, solve_steady_state, solve_steady_state_with, validate_rwa, witness,
    FockPopulations, SteadyOptions,
};
pub use wigner::{compute_wigner, compute_wigner_with, marginal, symmetry_check, Axis, QuadratureSettings};

/// Library version recorded in output provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
