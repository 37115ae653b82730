//! Closed-form inverse of the tridiagonal matrix `T = 1 − i(μ/2)X̃` in a
//! truncated Fock basis, and the rotating-wave transfer matrix built from it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::ln_factorial;

/// Leading-principal-minor and trailing-minor recurrences of `T`, stored as
/// natural logarithms (every term is positive).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagRecurrences {
    dim: usize,
    /// `ln θ_j`, `j = 0..=dim`.
    log_theta: Vec<f64>,
    /// `ln φ_j` at index `j`, `j = 1..=dim + 1`; index 0 is unused.
    log_phi: Vec<f64>,
    /// Whether the plain recurrence overflowed and the log form was used.
    pub log_scaled: bool,
}

impl TridiagRecurrences {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn log_theta(&self, j: usize) -> f64 {
        self.log_theta[j]
    }
    pub fn log_phi(&self, j: usize) -> f64 {
        assert!(j >= 1, "phi is indexed from 1");
        self.log_phi[j]
    }
    pub fn theta(&self, j: usize) -> f64 {
        self.log_theta[j].exp()
    }
    pub fn phi(&self, j: usize) -> f64 {
        self.log_phi(j).exp()
    }
}

/// `θ_j = θ_{j−1} + (j−1)(μ²/8)θ_{j−2}` with `θ_0 = θ_1 = 1` and
/// `φ_j = φ_{j+1} + j(μ²/8)φ_{j+2}` with `φ_{N+1} = φ_N = 1`, for an
/// `N × N` matrix (`N = dim`).
pub fn recurrences(dim: usize, mu: f64) -> Result<TridiagRecurrences> {
    if dim == 0 {
        return Err(Error::Domain("truncation must be at least 1".into()));
    }
    if !mu.is_finite() {
        return Err(Error::Domain(format!("mu must be finite, got {mu}")));
    }
    let c = mu * mu / 8.0;
    if let Some(r) = plain(dim, c) {
        return Ok(r);
    }

    let mut lt = vec![0.0f64; dim + 1];
    for j in 2..=dim {
        let ratio = (lt[j - 2] - lt[j - 1]).exp();
        lt[j] = lt[j - 1] + ((j - 1) as f64 * c * ratio).ln_1p();
    }
    let mut lp = vec![f64::NAN; dim + 2];
    lp[dim + 1] = 0.0;
    lp[dim] = 0.0;
    for j in (1..dim).rev() {
        let ratio = (lp[j + 2] - lp[j + 1]).exp();
        lp[j] = lp[j + 1] + (j as f64 * c * ratio).ln_1p();
    }
    Ok(TridiagRecurrences { dim, log_theta: lt, log_phi: lp, log_scaled: true })
}

fn plain(dim: usize, c: f64) -> Option<TridiagRecurrences> {
    const LIMIT: f64 = 1e280;
    let mut t = vec![1.0; dim + 1];
    for j in 2..=dim {
        t[j] = t[j - 1] + (j - 1) as f64 * c * t[j - 2];
        if !(t[j] < LIMIT) {
            return None;
        }
    }
    let mut p = vec![f64::NAN; dim + 2];
    p[dim + 1] = 1.0;
    p[dim] = 1.0;
    for j in (1..dim).rev() {
        p[j] = p[j + 1] + j as f64 * c * p[j + 2];
        if !(p[j] < LIMIT) {
            return None;
        }
    }
    Some(TridiagRecurrences {
        dim,
        log_theta: t.iter().map(|v| v.ln()).collect(),
        log_phi: p.iter().map(|v| v.ln()).collect(),
        log_scaled: false,
    })
}

/// `C_ij` with `T⁻¹_ij = C_ij e^{i(i−j)ω_m t}` (1-based `i, j`), stored at
/// `[(i − 1, j − 1)]`. Assembled from log-magnitudes so large truncations do
/// not overflow.
pub fn inverse_coefficients(rec: &TridiagRecurrences, mu: f64) -> DMatrix<Complex64> {
    let n = rec.dim();
    let a = mu / (2.0 * 2f64.sqrt());
    let ln_a = a.ln();
    let lf: Vec<f64> = (0..=n).map(ln_factorial).collect();
    let ln_theta_n = rec.log_theta(n);
    // i^{|i−j|}
    const I_POW: [Complex64; 4] = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    DMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r + 1, c + 1);
        let (lo, hi) = (i.min(j), i.max(j));
        let k = hi - lo;
        if k > 0 && a == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let ln_mag = k as f64 * if k > 0 { ln_a } else { 0.0 }
            + 0.5 * (lf[hi - 1] - lf[lo - 1])
            + rec.log_theta(lo - 1)
            + rec.log_phi(hi + 1)
            - ln_theta_n;
        I_POW[k % 4] * ln_mag.exp()
    })
}

/// `d_{r,c}` (1-based): `⟨r − 1|T†|c − 1⟩` at `t = 0`, zero outside `1..=dim`.
fn d_coeff(r: isize, c: isize, dim: isize, a: f64) -> Complex64 {
    if r < 1 || c < 1 || r > dim || c > dim {
        return Complex64::new(0.0, 0.0);
    }
    if r == c {
        Complex64::new(1.0, 0.0)
    } else if r == c - 1 {
        Complex64::new(0.0, a * ((c - 1) as f64).sqrt())
    } else if r == c + 1 {
        Complex64::new(0.0, a * (c as f64).sqrt())
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn c_coeff(cm: &DMatrix<Complex64>, i: isize, j: isize) -> Complex64 {
    let n = cm.nrows() as isize;
    if i < 1 || j < 1 || i > n || j > n {
        return Complex64::new(0.0, 0.0);
    }
    cm[((i - 1) as usize, (j - 1) as usize)]
}

/// `F_{n,m,q,k} = C_{m+1,n+1} d_{m+1+q,m+1} C*_{k+1+q,n+1} d*_{m+1+q,k+1+q}`.
fn f_term(cm: &DMatrix<Complex64>, a: f64, n: isize, m: isize, q: isize, k: isize) -> Complex64 {
    let dim = cm.nrows() as isize;
    c_coeff(cm, m + 1, n + 1)
        * d_coeff(m + 1 + q, m + 1, dim, a)
        * c_coeff(cm, k + 1 + q, n + 1).conj()
        * d_coeff(m + 1 + q, k + 1 + q, dim, a).conj()
}

/// Rotating-wave transfer matrix `Φ[(n, l)]`: the time-averaged population
/// moved from level `n` to level `l` by one application of `f̃ρf̃†`.
pub fn rwa_transfer(cm: &DMatrix<Complex64>, mu: f64) -> DMatrix<f64> {
    let dim = cm.nrows();
    let a = mu / (2.0 * 2f64.sqrt());
    let cols: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|l| {
            let l = l as isize;
            (0..dim as isize)
                .map(|n| {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in l..=l + 2 {
                        s += f_term(cm, a, n, l + 1, -1, k);
                    }
                    for k in (l - 1).max(0)..=l + 1 {
                        s += f_term(cm, a, n, l, 0, k);
                    }
                    if l > 0 {
                        for k in l - 2..=l {
                            s += f_term(cm, a, n, l - 1, 1, k);
                        }
                    }
                    s.re
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(dim, dim, |n, l| cols[l][n])
}
