//! One evaluation of a pipeline at a single parameter point.

use std::time::Instant;

use optowig_core::negativity::{nonclassical_depth_with, DEFAULT_NEG_EPS, DEPTH_TOLERANCE};
use optowig_core::steady::lindblad::validate_rwa_with;
use optowig_core::steady::{steady_grid, RwaValidation};
use optowig_core::{
    baseline_no_cavity, compute_wigner_with, fock_diagonal_wigner, negative_volume, solve_steady_state_with, witness,
    Error, FockPopulations, KernelKind, KernelSpec, PhaseSpaceGrid, SteadyOptions, WignerGrid,
};
use serde::Serialize;

use crate::config::{Command, ConfigError, DepthKernel, GridChoice, Settings};

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad input: exit status 2.
    Config(String),
    /// The computation itself failed: exit status 3.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Unsupported(_) | Error::Precondition(_) | Error::Io(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub delta: Option<f64>,
    pub min_w: Option<f64>,
    pub min_x: Option<f64>,
    pub min_p: Option<f64>,
    pub witness: Option<f64>,
    pub tau_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neg_to_pos_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_fidelity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureInfo {
    pub cutoff: f64,
    pub nodes: usize,
    pub max_imag_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationInfo {
    pub n: usize,
    pub tail_mass: f64,
    pub escalations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub grid: Option<PhaseSpaceGrid>,
    pub quadrature: Option<QuadratureInfo>,
    pub truncation: Option<TruncationInfo>,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization_warning: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_trace_drift: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Full-size results kept for file output.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub wigner: Option<WignerGrid>,
    pub populations: Option<FockPopulations>,
    pub fidelity: Option<RwaValidation>,
}

#[derive(Debug)]
pub struct Outcome {
    pub metrics: Metrics,
    pub diagnostics: Diagnostics,
    pub artifacts: Artifacts,
}

pub fn evaluate(s: &Settings) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let mut out = Outcome { metrics: Metrics::default(), diagnostics: Diagnostics::default(), artifacts: Artifacts::default() };
    match s.inner.unwrap_or(s.command) {
        Command::Pulsed => pulsed(s, s.deterministic_kernel(), &mut out)?,
        Command::PhotonCount => pulsed(s, s.counting_kernel(), &mut out)?,
        Command::Baseline => baseline(s, &mut out)?,
        Command::Depth => depth(s, &mut out)?,
        Command::Steady => steady(s, &mut out)?,
        Command::ValidateRwa => rwa(s, &mut out)?,
        Command::Sweep => unreachable!("sweeps are expanded before evaluation"),
    }
    out.diagnostics.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn grid_for(s: &Settings, k: &KernelSpec) -> Result<PhaseSpaceGrid, Failure> {
    Ok(match s.grid {
        GridChoice::Preset(p) => p.build(k, &s.state)?,
        GridChoice::Explicit(g) => g,
    })
}

fn record_wigner(w: WignerGrid, out: &mut Outcome) {
    let rep = negative_volume(&w);
    let m = &mut out.metrics;
    m.delta = Some(rep.delta);
    m.min_w = Some(rep.min_value);
    m.min_x = Some(rep.min_location.0);
    m.min_p = Some(rep.min_location.1);
    m.neg_to_pos_ratio = Some(rep.neg_to_pos_ratio);
    out.diagnostics.grid = Some(w.grid);
    out.diagnostics.normalization_warning = Some(w.normalization_warning);
    if w.normalization_warning {
        out.diagnostics.notes.push(format!("grid volume {:.6} differs from 1; widen the grid", w.volume()));
    }
    out.artifacts.wigner = Some(w);
}

fn wigner(s: &Settings, kind: KernelKind, out: &mut Outcome) -> Result<WignerGrid, Failure> {
    let k = KernelSpec::new(kind, s.params)?;
    let grid = grid_for(s, &k)?;
    let nodes = s.quad.node_count(&grid, &k, &s.state);
    let w = compute_wigner_with(&grid, &k, &s.state, &s.quad)?;
    out.diagnostics.quadrature = Some(QuadratureInfo { cutoff: s.quad.cutoff, nodes, max_imag_residual: w.max_imag_residual });
    Ok(w)
}

fn pulsed(s: &Settings, kind: KernelKind, out: &mut Outcome) -> Result<(), Failure> {
    let w = wigner(s, kind, out)?;
    record_wigner(w, out);
    Ok(())
}

fn baseline(s: &Settings, out: &mut Outcome) -> Result<(), Failure> {
    let input = s.input_state();
    let k = KernelSpec::new(KernelKind::BaselineNoCavity { input }, s.params)?;
    let grid = grid_for(s, &k)?;
    let w = baseline_no_cavity(&grid, &input, &s.state, &s.params)?;
    record_wigner(w, out);
    Ok(())
}

fn depth(s: &Settings, out: &mut Outcome) -> Result<(), Failure> {
    let kind = match s.depth_kernel {
        DepthKernel::Deterministic => s.deterministic_kernel(),
        DepthKernel::PhotonCount => s.counting_kernel(),
    };
    let w = wigner(s, kind, out)?;
    match nonclassical_depth_with(&w, DEFAULT_NEG_EPS, DEPTH_TOLERANCE) {
        Ok(d) => out.metrics.tau_inf = Some(d.tau_inf),
        Err(Error::Precondition(m)) => out.diagnostics.notes.push(m),
        Err(e) => return Err(e.into()),
    }
    record_wigner(w, out);
    Ok(())
}

fn truncation_info(pop: &FockPopulations) -> TruncationInfo {
    TruncationInfo {
        n: pop.truncation_n,
        tail_mass: pop.tail_mass,
        escalations: pop.diagnostics.escalations,
        residual: pop.diagnostics.residual,
    }
}

fn steady(s: &Settings, out: &mut Outcome) -> Result<(), Failure> {
    let opts = SteadyOptions { truncation: s.truncation, tail_tolerance: s.tail_tolerance, ..Default::default() };
    let pop = solve_steady_state_with(&s.params, &opts)?;
    out.metrics.witness = Some(witness(&pop, s.witness_levels)?);
    out.diagnostics.truncation = Some(truncation_info(&pop));
    let grid = steady_grid(&pop, s.steady_points)?;
    record_wigner(fock_diagonal_wigner(&pop, &grid)?, out);
    out.artifacts.populations = Some(pop);
    Ok(())
}

fn rwa(s: &Settings, out: &mut Outcome) -> Result<(), Failure> {
    let pop = solve_steady_state_with(&s.params, &SteadyOptions::fixed(s.truncation))?;
    let v = validate_rwa_with(&pop, &s.params, s.periods, s.steps_per_period)?;
    out.metrics.min_fidelity = Some(v.min_fidelity());
    out.diagnostics.truncation = Some(truncation_info(&pop));
    out.diagnostics.max_trace_drift = Some(v.max_trace_drift);
    out.artifacts.populations = Some(pop);
    out.artifacts.fidelity = Some(v);
    Ok(())
}
