use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::recurrences::{inverse_coefficients, recurrences, rwa_transfer};
use crate::error::{Error, Result};
use crate::response::SystemParams;

/// Diagonal steady state `ρ = Σ P_n |n⟩⟨n|` over levels `0..=truncation_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockPopulations {
    pub probs: Vec<f64>,
    pub truncation_n: usize,
    /// Largest population among the two highest retained levels.
    pub tail_mass: f64,
    pub diagnostics: SolverDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SolverDiagnostics {
    pub escalations: usize,
    /// Max-norm residual of the linear system.
    pub residual: f64,
    /// Most negative population before clamping.
    pub min_raw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyOptions {
    /// Initial truncation `N` (highest retained level).
    pub truncation: usize,
    pub tail_tolerance: f64,
    /// Growth steps `N ← ⌈1.5N⌉` allowed when the tail is too heavy.
    pub max_escalations: usize,
    /// With `false` a heavy tail is reported in `tail_mass` but not raised.
    pub enforce_tail: bool,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        SteadyOptions { truncation: 100, tail_tolerance: 1e-10, max_escalations: 8, enforce_tail: true }
    }
}

impl SteadyOptions {
    /// Exactly `n` levels above the ground state, no escalation, no tail check.
    pub fn fixed(n: usize) -> Self {
        SteadyOptions { truncation: n, enforce_tail: false, max_escalations: 0, ..Default::default() }
    }
}

const NEGATIVE_POPULATION_LIMIT: f64 = -1e-12;
/// ω_m must exceed every dissipative rate by this factor.
const RWA_MARGIN: f64 = 10.0;

pub(crate) fn check_rwa_preconditions(p: &SystemParams) -> Result<()> {
    if p.flux_k2() != 0.0 {
        return Err(Error::Unsupported("steady state requires flux_k2 = 0".into()));
    }
    if p.delta_bar() != 0.0 {
        return Err(Error::Unsupported("steady state requires zero detuning".into()));
    }
    let fastest = (2.0 * p.gamma() * (p.n_bath() + 1.0)).max(2.0 * p.flux_k());
    if !(p.omega_m() > 0.0 && p.omega_m() >= RWA_MARGIN * fastest) {
        return Err(Error::Precondition(format!(
            "rotating-wave approximation needs omega_m >> rates (omega_m = {}, fastest rate = {})",
            p.omega_m(),
            fastest
        )));
    }
    Ok(())
}

pub fn solve_steady_state(p: &SystemParams, n: usize) -> Result<FockPopulations> {
    solve_steady_state_with(p, &SteadyOptions { truncation: n, ..Default::default() })
}

pub fn solve_steady_state_with(p: &SystemParams, opts: &SteadyOptions) -> Result<FockPopulations> {
    check_rwa_preconditions(p)?;
    if opts.truncation < 2 {
        return Err(Error::Domain(format!("truncation must be >= 2, got {}", opts.truncation)));
    }
    let mut n = opts.truncation;
    let mut escalations = 0;
    loop {
        let mut pop = solve_once(p, n)?;
        pop.diagnostics.escalations = escalations;
        if !opts.enforce_tail || pop.tail_mass < opts.tail_tolerance {
            return Ok(pop);
        }
        if escalations == opts.max_escalations {
            return Err(Error::Truncation {
                truncation: n,
                tail: pop.tail_mass,
                tolerance: opts.tail_tolerance,
            });
        }
        n = (1.5 * n as f64).ceil() as usize;
        escalations += 1;
    }
}

/// Balance equations for levels `0..N` plus the normalisation row, over
/// populations `P_0..=P_N`.
pub fn steady_state_system(p: &SystemParams, n: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let dim = n + 1;
    let mu = p.mu();
    let phi = rwa_transfer(&inverse_coefficients(&recurrences(dim, mu)?, mu), mu);
    let down = 2.0 * p.gamma() * (p.n_bath() + 1.0);
    let up = 2.0 * p.gamma() * p.n_bath();
    let k2 = 2.0 * p.flux_k();
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for l in 0..n {
        let lf = l as f64;
        a[(l, l + 1)] += down * (lf + 1.0);
        a[(l, l)] -= down * lf;
        if l > 0 {
            a[(l, l - 1)] += up * lf;
        }
        a[(l, l)] -= up * (lf + 1.0);
        for m in 0..dim {
            a[(l, m)] += k2 * phi[(m, l)];
        }
        a[(l, l)] -= k2;
    }
    for m in 0..dim {
        a[(n, m)] = 1.0;
    }
    let mut b = DVector::zeros(dim);
    b[n] = 1.0;
    Ok((a, b))
}

fn solve_once(p: &SystemParams, n: usize) -> Result<FockPopulations> {
    let (a, b) = steady_state_system(p, n)?;
    let x = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular(format!("steady-state matrix of size {} is singular", n + 1)))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular(format!("non-finite solution at truncation {n}")));
    }
    let residual = (&a * &x - &b).amax();
    let min_raw = x.iter().copied().fold(f64::INFINITY, f64::min);
    if min_raw < NEGATIVE_POPULATION_LIMIT {
        return Err(Error::Singular(format!(
            "population {min_raw:.3e} below {NEGATIVE_POPULATION_LIMIT:e} at truncation {n}; system is ill-conditioned"
        )));
    }
    let probs: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let tail_mass = probs[n].max(probs[n - 1]);
    Ok(FockPopulations {
        probs,
        truncation_n: n,
        tail_mass,
        diagnostics: SolverDiagnostics { escalations: 0, residual, min_raw },
    })
}

impl FockPopulations {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mean phonon number.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// CSV with header `n,P_n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,P_n")?;
        for (n, p) in self.probs.iter().enumerate() {
            writeln!(out, "{n},{p:.16e}")?;
        }
        Ok(())
    }
}

/// `tr(Ωρ)` with `Ω = Σ_{k<n_levels} |2k+1⟩⟨2k+1|`.
pub fn witness(pop: &FockPopulations, n_levels: usize) -> Result<f64> {
    if n_levels == 0 {
        return Ok(0.0);
    }
    if 2 * n_levels - 1 > pop.truncation_n {
        return Err(Error::Precondition(format!(
            "witness over {n_levels} odd levels needs truncation >= {}, have {}",
            2 * n_levels - 1,
            pop.truncation_n
        )));
    }
    Ok((0..n_levels).map(|k| pop.probs[2 * k + 1]).sum())
}

/// Whether the witness certifies Wigner negativity.
pub fn witness_certifies(value: f64) -> bool {
    value > 0.5
}
