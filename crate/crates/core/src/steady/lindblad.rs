//! Full time-dependent master equation in the rotating frame, used to check
//! the rotating-wave steady state.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::solver::{check_rwa_preconditions, FockPopulations};
use crate::error::{Error, Result};
use crate::response::SystemParams;

pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
pub const MIN_STEPS_PER_PERIOD: usize = 200;

/// Jump operators `L₁ = √(2k) f(X)` and `L₂ = √(2k₂) f²(X)` on levels
/// `0..dim`, with `f(X) = T†T⁻¹` from a dense inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperators {
    pub l1: DMatrix<Complex64>,
    pub l2: DMatrix<Complex64>,
}

pub fn master_equation_generator(p: &SystemParams, dim: usize) -> Result<JumpOperators> {
    let f = response_operator(p.mu(), dim)?;
    let l1 = f.map(|z| z * (2.0 * p.flux_k()).sqrt());
    let l2 = if p.flux_k2() == 0.0 {
        DMatrix::zeros(dim, dim)
    } else {
        (&f * &f).map(|z| z * (2.0 * p.flux_k2()).sqrt())
    };
    Ok(JumpOperators { l1, l2 })
}

/// Position operator `(b + b†)/√2` on levels `0..dim`.
pub fn position_operator(dim: usize) -> DMatrix<Complex64> {
    let mut x = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        let v = Complex64::new((n as f64 / 2.0).sqrt(), 0.0);
        x[(n - 1, n)] = v;
        x[(n, n - 1)] = v;
    }
    x
}

/// `f(X) = (1 + iμX/2)(1 − iμX/2)⁻¹` at zero detuning, by dense inversion.
pub fn response_operator(mu: f64, dim: usize) -> Result<DMatrix<Complex64>> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let x = position_operator(dim);
    let half = Complex64::new(0.0, 0.5 * mu);
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let t = &id - &x * half;
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("1 − iμX/2 is not invertible".into()))?;
    Ok(t.adjoint() * t_inv)
}

/// Complex matrix held as separate real and imaginary parts so products go
/// through the real matrix-multiply kernel.
#[derive(Clone)]
struct Split {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl Split {
    fn zeros(n: usize) -> Self {
        Split { re: DMatrix::zeros(n, n), im: DMatrix::zeros(n, n) }
    }

    fn from_complex(m: &DMatrix<Complex64>) -> Self {
        Split { re: m.map(|z| z.re), im: m.map(|z| z.im) }
    }

    fn to_complex(&self) -> DMatrix<Complex64> {
        self.re.zip_map(&self.im, Complex64::new)
    }

    /// `out = a · b`.
    fn mul_into(out: &mut Split, a: &Split, b: &Split) {
        out.re.gemm(1.0, &a.re, &b.re, 0.0);
        out.re.gemm(-1.0, &a.im, &b.im, 1.0);
        out.im.gemm(1.0, &a.re, &b.im, 0.0);
        out.im.gemm(1.0, &a.im, &b.re, 1.0);
    }

    /// `self += c · other`.
    fn axpy(&mut self, c: f64, other: &Split) {
        self.re.zip_apply(&other.re, |a, b| *a += c * b);
        self.im.zip_apply(&other.im, |a, b| *a += c * b);
    }

    fn trace_re(&self) -> f64 {
        self.re.trace()
    }
}

/// Right-hand side of the rotating-frame master equation.
struct Generator {
    dim: usize,
    omega: f64,
    down: f64,
    up: f64,
    drive: f64,
    f0: Split,
    f0_adj: Split,
    // scratch
    sigma: Split,
    tmp: Split,
    m: Split,
}

impl Generator {
    fn new(p: &SystemParams, dim: usize) -> Result<Self> {
        let f0 = response_operator(p.mu(), dim)?;
        Ok(Generator {
            dim,
            omega: p.omega_m(),
            down: 2.0 * p.gamma() * (p.n_bath() + 1.0),
            up: 2.0 * p.gamma() * p.n_bath(),
            drive: 2.0 * p.flux_k(),
            f0_adj: Split::from_complex(&f0.adjoint()),
            f0: Split::from_complex(&f0),
            sigma: Split::zeros(dim),
            tmp: Split::zeros(dim),
            m: Split::zeros(dim),
        })
    }

    /// `out = dρ/dt` at time `t`. In the rotating frame
    /// `f̃(t)_{lm} = e^{iω_m t (l−m)} f(0)_{lm}`.
    fn eval(&mut self, t: f64, rho: &Split, out: &mut Split) {
        let n = self.dim;
        let wt = self.omega * t;
        // unit phases e^{iω t j}
        let ph: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, wt * j as f64)).collect();

        if self.drive != 0.0 {
            // σ = D†ρD
            for c in 0..n {
                for r in 0..n {
                    let z = Complex64::new(rho.re[(r, c)], rho.im[(r, c)]) * ph[r].conj() * ph[c];
                    self.sigma.re[(r, c)] = z.re;
                    self.sigma.im[(r, c)] = z.im;
                }
            }
            Split::mul_into(&mut self.tmp, &self.f0, &self.sigma);
            Split::mul_into(&mut self.m, &self.tmp, &self.f0_adj);
        }

        let dn = |k: usize| if k + 1 < n { (k + 1) as f64 } else { 0.0 };
        for c in 0..n {
            for r in 0..n {
                let rho_rc = Complex64::new(rho.re[(r, c)], rho.im[(r, c)]);
                let mut acc = Complex64::new(0.0, 0.0);
                if self.drive != 0.0 {
                    let frf = Complex64::new(self.m.re[(r, c)], self.m.im[(r, c)]) * ph[r] * ph[c].conj();
                    acc += self.drive * (frf - rho_rc);
                }
                if self.down != 0.0 {
                    // bρb† − ½{b†b, ρ}
                    let mut v = -0.5 * (r + c) as f64 * rho_rc;
                    if r + 1 < n && c + 1 < n {
                        let s = (((r + 1) * (c + 1)) as f64).sqrt();
                        v += s * Complex64::new(rho.re[(r + 1, c + 1)], rho.im[(r + 1, c + 1)]);
                    }
                    acc += self.down * v;
                }
                if self.up != 0.0 {
                    // b†ρb − ½{bb†, ρ}; bb† is truncated at the top level
                    let mut v = -0.5 * (dn(r) + dn(c)) * rho_rc;
                    if r > 0 && c > 0 {
                        let s = ((r * c) as f64).sqrt();
                        v += s * Complex64::new(rho.re[(r - 1, c - 1)], rho.im[(r - 1, c - 1)]);
                    }
                    acc += self.up * v;
                }
                out.re[(r, c)] = acc.re;
                out.im[(r, c)] = acc.im;
            }
        }
    }
}

/// Fidelity trace from propagating the full master equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RwaValidation {
    /// Uhlmann fidelity with the rotating-wave state at the end of each
    /// mechanical period (index 0 is the initial state).
    pub fidelity: Vec<f64>,
    pub max_trace_drift: f64,
    pub steps_per_period: usize,
}

impl RwaValidation {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Starts from the rotating-wave populations and integrates with classical
/// RK4 for `periods` mechanical periods.
pub fn validate_rwa(pop: &FockPopulations, p: &SystemParams, periods: usize) -> Result<RwaValidation> {
    validate_rwa_with(pop, p, periods, MIN_STEPS_PER_PERIOD)
}

pub fn validate_rwa_with(
    pop: &FockPopulations,
    p: &SystemParams,
    periods: usize,
    steps_per_period: usize,
) -> Result<RwaValidation> {
    check_rwa_preconditions(p)?;
    if steps_per_period < MIN_STEPS_PER_PERIOD {
        return Err(Error::Domain(format!(
            "need at least {MIN_STEPS_PER_PERIOD} steps per period, got {steps_per_period}"
        )));
    }
    let dim = pop.probs.len();
    let mut gen = Generator::new(p, dim)?;
    let mut rho = Split::zeros(dim);
    for (n, &v) in pop.probs.iter().enumerate() {
        rho.re[(n, n)] = v;
    }
    let sqrt_p: Vec<f64> = pop.probs.iter().map(|v| v.max(0.0).sqrt()).collect();
    let trace0 = rho.trace_re();

    let period = 2.0 * PI / p.omega_m();
    let h = period / steps_per_period as f64;
    let mut k1 = Split::zeros(dim);
    let mut k2 = Split::zeros(dim);
    let mut k3 = Split::zeros(dim);
    let mut k4 = Split::zeros(dim);
    let mut stage = Split::zeros(dim);

    let mut fidelity = vec![uhlmann_diag(&sqrt_p, &rho.to_complex())];
    let mut max_drift: f64 = 0.0;
    let mut t = 0.0;
    for _ in 0..periods {
        for _ in 0..steps_per_period {
            gen.eval(t, &rho, &mut k1);
            stage.clone_from(&rho);
            stage.axpy(0.5 * h, &k1);
            gen.eval(t + 0.5 * h, &stage, &mut k2);
            stage.clone_from(&rho);
            stage.axpy(0.5 * h, &k2);
            gen.eval(t + 0.5 * h, &stage, &mut k3);
            stage.clone_from(&rho);
            stage.axpy(h, &k3);
            gen.eval(t + h, &stage, &mut k4);
            rho.axpy(h / 6.0, &k1);
            rho.axpy(h / 3.0, &k2);
            rho.axpy(h / 3.0, &k3);
            rho.axpy(h / 6.0, &k4);
            t += h;
        }
        let drift = (rho.trace_re() - trace0).abs();
        max_drift = max_drift.max(drift);
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::StepSize { drift, limit: TRACE_DRIFT_LIMIT });
        }
        fidelity.push(uhlmann_diag(&sqrt_p, &rho.to_complex()));
    }
    Ok(RwaValidation { fidelity, max_trace_drift: max_drift, steps_per_period })
}

/// `(tr √(√σ ρ √σ))²` for diagonal `σ` with `√σ = diag(sqrt_p)`.
pub fn uhlmann_diag(sqrt_p: &[f64], rho: &DMatrix<Complex64>) -> f64 {
    let n = sqrt_p.len();
    let m = DMatrix::from_fn(n, n, |r, c| {
        // symmetrise so the eigen-solver sees an exactly Hermitian matrix
        let h = 0.5 * (rho[(r, c)] + rho[(c, r)].conj());
        h * (sqrt_p[r] * sqrt_p[c])
    });
    let eig = SymmetricEigen::new(m);
    let s: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    s * s
}
