//! Continuous-drive steady states in the rotating-wave approximation.

pub mod fock_wigner;
pub mod lindblad;
pub mod recurrences;
pub mod solver;

pub use fock_wigner::{fock_diagonal_wigner, fock_wigner_value, steady_grid};
pub use lindblad::{master_equation_generator, validate_rwa, validate_rwa_with, JumpOperators, RwaValidation};
pub use recurrences::{inverse_coefficients, recurrences, rwa_transfer, TridiagRecurrences};
pub use solver::{
    solve_steady_state, solve_steady_state_with, steady_state_system, witness, witness_certifies,
    FockPopulations, SolverDiagnostics, SteadyOptions,
};
