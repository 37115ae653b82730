//! Interaction kernels `K(X, u)` multiplying `⟨X − u/2|ρ_i|X + u/2⟩` inside
//! the Wigner integral, plus heralding probabilities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::gaussian::GaussianState;
use crate::grid::{PhaseSpaceGrid, WignerGrid};
use crate::response::{response_at, SystemParams};

/// Tail weight below which displacement-ladder sums are cut.
pub const LADDER_TAIL: f64 = 1e-10;

/// Optical input pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InputState {
    Coherent { alpha: Complex64 },
    /// `theta` is the squeezing angle; no kernel depends on it.
    SqueezedVacuum { r_l: f64, theta: f64 },
}

impl InputState {
    fn validate(&self) -> Result<()> {
        match *self {
            InputState::Coherent { alpha } => {
                ensure_finite("alpha.re", alpha.re)?;
                ensure_finite("alpha.im", alpha.im)
            }
            InputState::SqueezedVacuum { r_l, theta } => {
                ensure_finite("r_l", r_l)?;
                ensure_finite("theta", theta)?;
                if r_l < 0.0 {
                    return Err(Error::Domain(format!("r_l must be >= 0, got {r_l}")));
                }
                Ok(())
            }
        }
    }

    /// Photon-number distribution `|c_n|²` for `n = 0, 1, …`, cut once the
    /// remaining weight is below `tail`.
    pub fn photon_distribution(&self, tail: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut acc = 0.0;
        let mut n = 0usize;
        loop {
            let w = match *self {
                InputState::Coherent { alpha } => poisson(n, alpha.norm_sqr()),
                InputState::SqueezedVacuum { r_l, .. } => squeezed_vacuum_probability(n, r_l),
            };
            out.push(w);
            acc += w;
            // odd terms of squeezed vacuum are zero, so only test after even n
            if 1.0 - acc < tail && n % 2 == 0 {
                break;
            }
            n += 1;
            if n > 100_000 {
                break;
            }
        }
        out
    }
}

/// Which kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum KernelKind {
    DeterministicCoherent { alpha: Complex64 },
    DeterministicSqueezedVac { r_l: f64, theta: f64 },
    PhotonCount { n: u32 },
    LossyPhotonCount { n: u32, eta: f64, alpha: Complex64 },
    BaselineNoCavity { input: InputState },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub params: SystemParams,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, params: SystemParams) -> Result<Self> {
        match kind {
            KernelKind::DeterministicCoherent { alpha } => {
                InputState::Coherent { alpha }.validate()?
            }
            KernelKind::DeterministicSqueezedVac { r_l, theta } => {
                InputState::SqueezedVacuum { r_l, theta }.validate()?
            }
            KernelKind::PhotonCount { .. } => {}
            KernelKind::LossyPhotonCount { eta, alpha, .. } => {
                check_eta(eta)?;
                InputState::Coherent { alpha }.validate()?;
            }
            KernelKind::BaselineNoCavity { input } => input.validate()?,
        }
        Ok(KernelSpec { kind, params })
    }

    pub fn coherent(alpha: f64, params: SystemParams) -> Result<Self> {
        Self::new(
            KernelKind::DeterministicCoherent { alpha: Complex64::new(alpha, 0.0) },
            params,
        )
    }

    pub fn squeezed_vacuum(r_l: f64, params: SystemParams) -> Result<Self> {
        Self::new(KernelKind::DeterministicSqueezedVac { r_l, theta: 0.0 }, params)
    }

    pub fn photon_count(n: u32, params: SystemParams) -> Result<Self> {
        Self::new(KernelKind::PhotonCount { n }, params)
    }

    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self.kind {
            KernelKind::DeterministicCoherent { .. } => "deterministic_coherent",
            KernelKind::DeterministicSqueezedVac { .. } => "deterministic_squeezed_vac",
            KernelKind::PhotonCount { .. } => "photon_count",
            KernelKind::LossyPhotonCount { .. } => "lossy_photon_count",
            KernelKind::BaselineNoCavity { .. } => "baseline_no_cavity",
        }
    }

    /// Mean photon number of the pulse, used to size momentum grids.
    pub fn mean_photons(&self) -> f64 {
        match self.kind {
            KernelKind::DeterministicCoherent { alpha } => alpha.norm_sqr(),
            KernelKind::DeterministicSqueezedVac { r_l, .. } => r_l.sinh().powi(2),
            KernelKind::PhotonCount { n } => n as f64,
            KernelKind::LossyPhotonCount { n, eta, alpha } => {
                n as f64 + (1.0 - eta) * alpha.norm_sqr()
            }
            KernelKind::BaselineNoCavity { input } => match input {
                InputState::Coherent { alpha } => alpha.norm_sqr(),
                InputState::SqueezedVacuum { r_l, .. } => r_l.sinh().powi(2),
            },
        }
    }

    /// Photon number below which all but `tail` of the pulse's photon
    /// statistics lie. Sets how far the momentum kick can reach.
    pub fn photon_quantile(&self, tail: f64) -> f64 {
        let quantile = |input: InputState| {
            let w = input.photon_distribution(tail);
            (w.len() - 1) as f64
        };
        match self.kind {
            KernelKind::DeterministicCoherent { alpha } => quantile(InputState::Coherent { alpha }),
            KernelKind::DeterministicSqueezedVac { r_l, theta } => {
                quantile(InputState::SqueezedVacuum { r_l, theta })
            }
            KernelKind::PhotonCount { n } => n as f64,
            KernelKind::LossyPhotonCount { n, eta, alpha } => {
                let lost = Complex64::new((1.0 - eta).sqrt(), 0.0) * alpha;
                n as f64 + quantile(InputState::Coherent { alpha: lost })
            }
            KernelKind::BaselineNoCavity { input } => quantile(input),
        }
    }

    /// Kernel at a single point. The squeezed-vacuum square root is
    /// continued along a straight path from `u = 0`.
    pub fn eval(&self, x: f64, u: f64) -> Result<Complex64> {
        ensure_finite("x", x)?;
        ensure_finite("u", u)?;
        let p = &self.params;
        Ok(match self.kind {
            KernelKind::DeterministicCoherent { alpha } => {
                coherent_factor(x, u, alpha.norm_sqr(), p)
            }
            KernelKind::DeterministicSqueezedVac { r_l, .. } => {
                squeezed_vacuum_point(x, u, r_l, p)?
            }
            KernelKind::PhotonCount { n } => kernel_photon_count(x, u, n, p),
            KernelKind::LossyPhotonCount { n, eta, alpha } => {
                kernel_lossy_unchecked(x, u, n, eta, alpha, p)
            }
            KernelKind::BaselineNoCavity { input } => {
                baseline_factor(u, &ladder_weights(&input), p)
            }
        })
    }

    /// Kernel along a sweep of offsets at fixed `x`. `us` must be sorted
    /// ascending; branch tracking for the squeezed-vacuum kernel runs
    /// outward from `u = 0`, so the result never depends on the ordering of
    /// worker threads.
    pub fn row(&self, x: f64, us: &[f64]) -> Result<Vec<Complex64>> {
        ensure_finite("x", x)?;
        let p = &self.params;
        match self.kind {
            KernelKind::DeterministicSqueezedVac { r_l, .. } => {
                squeezed_vacuum_sweep(x, us, r_l, p)
            }
            KernelKind::BaselineNoCavity { input } => {
                let w = ladder_weights(&input);
                Ok(us.iter().map(|&u| baseline_factor(u, &w, p)).collect())
            }
            _ => us.iter().map(|&u| self.eval(x, u)).collect(),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

/// `q = f(x − u/2) f*(x + u/2)`.
#[inline]
pub(crate) fn response_product(x: f64, u: f64, p: &SystemParams) -> Complex64 {
    let b = p.detuned_position(x - 0.5 * u);
    let a = p.detuned_position(x + 0.5 * u);
    response_at(b) * response_at(a).conj()
}

#[inline]
fn coherent_factor(x: f64, u: f64, n_mean: f64, p: &SystemParams) -> Complex64 {
    if n_mean == 0.0 || u == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let i = Complex64::i();
    let a = p.detuned_position(x + 0.5 * u);
    let b = p.detuned_position(x - 0.5 * u);
    let den = (Complex64::new(a, -1.0)) * (Complex64::new(b, 1.0));
    (-n_mean * i * p.mu() * u / den).exp()
}

/// Deterministic kernel for a coherent pulse of amplitude `alpha`.
pub fn kernel_coherent(x: f64, u: f64, alpha: Complex64, p: &SystemParams) -> Complex64 {
    coherent_factor(x, u, alpha.norm_sqr(), p)
}

/// `[f*(x + u/2) f(x − u/2)]ⁿ`, the kernel conditioned on `n` detected photons.
pub fn kernel_photon_count(x: f64, u: f64, n: u32, p: &SystemParams) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    response_product(x, u, p).powu(n)
}

/// `n`-photon kernel after a beam splitter of transmission `eta` in front
/// of the detector, coherent input.
pub fn kernel_lossy(
    x: f64,
    u: f64,
    n: u32,
    eta: f64,
    alpha: Complex64,
    p: &SystemParams,
) -> Result<Complex64> {
    check_eta(eta)?;
    Ok(kernel_lossy_unchecked(x, u, n, eta, alpha, p))
}

fn kernel_lossy_unchecked(
    x: f64,
    u: f64,
    n: u32,
    eta: f64,
    alpha: Complex64,
    p: &SystemParams,
) -> Complex64 {
    kernel_photon_count(x, u, n, p) * coherent_factor(x, u, (1.0 - eta) * alpha.norm_sqr(), p)
}

/// Deterministic squeezed-vacuum kernel at one point; see [`KernelSpec::eval`].
pub fn kernel_squeezed_vacuum(x: f64, u: f64, r_l: f64, p: &SystemParams) -> Result<Complex64> {
    ensure_finite("x", x)?;
    ensure_finite("u", u)?;
    if r_l < 0.0 || !r_l.is_finite() {
        return Err(Error::Domain(format!("r_l must be finite and >= 0, got {r_l}")));
    }
    squeezed_vacuum_point(x, u, r_l, p)
}

fn squeezed_vacuum_point(x: f64, u: f64, r_l: f64, p: &SystemParams) -> Result<Complex64> {
    if r_l == 0.0 || u == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // arg q changes by at most μ|Δu|, so this keeps each step well inside
    // the tracker's tolerance
    let steps = ((u.abs() * p.mu() * 4.0).ceil() as usize).max(4);
    let path: Vec<f64> = (1..=steps).map(|k| u * k as f64 / steps as f64).collect();
    let vals = squeezed_vacuum_path(x, &path, r_l, p)?;
    Ok(*vals.last().expect("non-empty path"))
}

/// Root of `1 − tanh²r · q²` continued from `√(1 − tanh²r)` at `u = 0`.
struct SqrtTracker {
    prev: Complex64,
}

impl SqrtTracker {
    fn start(radicand: Complex64) -> Self {
        SqrtTracker { prev: radicand.sqrt() }
    }

    fn step(&mut self, radicand: Complex64, u: f64) -> Result<Complex64> {
        let s = radicand.sqrt();
        let d_same = (s - self.prev).norm();
        let d_flip = (s + self.prev).norm();
        // roots rotated by more than ~53° between neighbours: cannot tell
        // which sheet we are on
        if d_same.min(d_flip) > 0.5 * d_same.max(d_flip) {
            return Err(Error::BranchTracking { u });
        }
        let chosen = if d_flip < d_same { -s } else { s };
        self.prev = chosen;
        Ok(chosen)
    }
}

fn squeezed_radicand(x: f64, u: f64, t2: f64, p: &SystemParams) -> Complex64 {
    let q = response_product(x, u, p);
    Complex64::new(1.0, 0.0) - t2 * q * q
}

/// Tracks along `path`, which must start near 0 and be monotone.
fn squeezed_vacuum_path(x: f64, path: &[f64], r_l: f64, p: &SystemParams) -> Result<Vec<Complex64>> {
    let t2 = r_l.tanh().powi(2);
    let sech = 1.0 / r_l.cosh();
    let mut tr = SqrtTracker::start(Complex64::new(1.0 - t2, 0.0));
    path.iter()
        .map(|&u| Ok(sech / tr.step(squeezed_radicand(x, u, t2, p), u)?))
        .collect()
}

fn squeezed_vacuum_sweep(x: f64, us: &[f64], r_l: f64, p: &SystemParams) -> Result<Vec<Complex64>> {
    if r_l == 0.0 {
        return Ok(vec![Complex64::new(1.0, 0.0); us.len()]);
    }
    if us.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("offset nodes must be sorted ascending".into()));
    }
    let split = us.partition_point(|&u| u < 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); us.len()];
    let upper = squeezed_vacuum_path(x, &us[split..], r_l, p)?;
    out[split..].copy_from_slice(&upper);
    let lower_path: Vec<f64> = us[..split].iter().rev().copied().collect();
    let lower = squeezed_vacuum_path(x, &lower_path, r_l, p)?;
    for (k, v) in lower.into_iter().enumerate() {
        out[split - 1 - k] = v;
    }
    Ok(out)
}

/// Photon-number weights cut at [`LADDER_TAIL`] and renormalised, so the
/// baseline kernel is exactly one at `u = 0`.
pub fn ladder_weights(input: &InputState) -> Vec<f64> {
    let mut w = input.photon_distribution(LADDER_TAIL);
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// `Σ_n w_n e^{−inμu}`: each detected photon number displaces momentum by `nμ`.
fn baseline_factor(u: f64, weights: &[f64], p: &SystemParams) -> Complex64 {
    let step = Complex64::from_polar(1.0, -p.mu() * u);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for &w in weights {
        acc += w * z;
        z *= step;
    }
    acc
}

/// Pulse passing an ideal phase shifter instead of the cavity: a mixture
/// of momentum-displaced copies `Σ_n |c_n|² W_i(X, P − nμ)`.
pub fn baseline_no_cavity(
    grid: &PhaseSpaceGrid,
    input: &InputState,
    s: &GaussianState,
    params: &SystemParams,
) -> Result<WignerGrid> {
    input.validate()?;
    let w = ladder_weights(input);
    let mu = params.mu();
    Ok(WignerGrid::from_fn(*grid, |x, p| {
        w.iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(|(n, &c)| c * s.wigner(x, p - n as f64 * mu))
            .sum()
    }))
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn poisson(n: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-mean + n as f64 * mean.ln() - ln_factorial(n)).exp()
}

/// Probability of `n` photons in a squeezed vacuum with squeezing `r`.
pub fn squeezed_vacuum_probability(n: usize, r: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    if r == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let m = n / 2;
    let ln = -r.cosh().ln() + n as f64 * (0.5 * r.tanh()).ln() + ln_factorial(n)
        - 2.0 * ln_factorial(m);
    ln.exp()
}

/// Probability of detecting `n` photons behind a detector of efficiency
/// `eta`, coherent input `alpha`.
pub fn heralding_probability(n: usize, eta: f64, alpha: Complex64) -> Result<f64> {
    check_eta(eta)?;
    ensure_finite("alpha.re", alpha.re)?;
    ensure_finite("alpha.im", alpha.im)?;
    Ok(poisson(n, eta * alpha.norm_sqr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Coherent,
    SqueezedVacuum,
}

/// Largest achievable `n`-photon heralding probability and the drive that
/// reaches it: `|α|` for coherent input, `r` for squeezed vacuum. Odd `n`
/// with squeezed vacuum returns `(0, 0)`.
pub fn max_heralding(n: usize, kind: InputKind) -> (f64, f64) {
    match kind {
        InputKind::Coherent => {
            let a = (n as f64).sqrt();
            (a, poisson(n, n as f64))
        }
        InputKind::SqueezedVacuum => {
            if n % 2 == 1 {
                return (0.0, 0.0);
            }
            let r = (n as f64).sqrt().asinh();
            (r, squeezed_vacuum_probability(n, r))
        }
    }
}
