//! Scaled complementary error function `erfcx(z) = exp(z²) erfc(z)` for
//! complex arguments.
//!
//! In the right half-plane `erfcx(z) = w(iz)` with `w` the Faddeeva function,
//! evaluated with Weideman's rational expansion (SIAM J. Numer. Anal. 31,
//! 1994) for moderate arguments and the Laplace continued fraction far from
//! the origin. The left half-plane uses the reflection
//! `erfcx(z) = 2 exp(z²) − erfcx(−z)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const WEIDEMAN_TERMS: usize = 40;
const CONTINUED_FRACTION_RADIUS: f64 = 12.0;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

struct Weideman {
    l: f64,
    // coefficients of the polynomial in Z, lowest degree first
    coeffs: Vec<f64>,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_TERMS;
        let m = 2 * n;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        // F(k) = exp(−t²)(L² + t²), t = L tan(kπ/2M); F is even in k and
        // vanishes at k = ±M, so the DFT reduces to a cosine sum.
        let big_f = |k: usize| {
            let t = l * (k as f64 * PI / (2 * m) as f64).tan();
            (-t * t).exp() * (l * l + t * t)
        };
        let samples: Vec<f64> = (0..m).map(big_f).collect();
        let coeffs = (1..=n)
            .map(|j| {
                let mut s = samples[0];
                for (k, fk) in samples.iter().enumerate().skip(1) {
                    s += 2.0 * fk * (PI * (k * j) as f64 / m as f64).cos();
                }
                s / (2 * m) as f64
            })
            .collect();
        Weideman { l, coeffs }
    })
}

/// Faddeeva function `w(z) = exp(−z²) erfc(−iz)` for `Im z >= 0`.
fn faddeeva_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    if z.norm() > CONTINUED_FRACTION_RADIUS {
        laplace_continued_fraction(z)
    } else {
        weideman_expansion(z)
    }
}

fn weideman_expansion(z: Complex64) -> Complex64 {
    let tab = weideman();
    let i = Complex64::i();
    let lz = Complex64::new(tab.l, 0.0) - i * z;
    let big_z = (Complex64::new(tab.l, 0.0) + i * z) / lz;
    let mut p = Complex64::new(0.0, 0.0);
    for &c in tab.coeffs.iter().rev() {
        p = p * big_z + c;
    }
    2.0 * p / (lz * lz) + FRAC_1_SQRT_PI / lz
}

/// `w(z) = (i/√π) / (z − (1/2)/(z − 1/(z − (3/2)/(z − …))))`, accurate for
/// large `|z|` in the upper half-plane.
fn laplace_continued_fraction(z: Complex64) -> Complex64 {
    let mut tail = z;
    for k in (1..=40).rev() {
        tail = z - (0.5 * k as f64) / tail;
    }
    Complex64::new(0.0, FRAC_1_SQRT_PI) / tail
}

/// `exp(z²) erfc(z)` with no overflow for `Re z >= 0`.
///
/// For `Re z < 0` the value itself grows like `2 exp(z²)`; see
/// [`erfcx_split`] to keep that factor separate.
pub fn erfcx(z: Complex64) -> Complex64 {
    let (scaled, reflected) = erfcx_split(z);
    match reflected {
        Some(exponent) => 2.0 * exponent.exp() - scaled,
        None => scaled,
    }
}

/// Decomposes `erfcx(z) = 2·exp(E) − S` (left half-plane) or `erfcx(z) = S`
/// (right half-plane), returning `(S, Some(E))` or `(S, None)`. `S` is always
/// bounded so callers can fold the exponent `E = z²` into other factors.
pub fn erfcx_split(z: Complex64) -> (Complex64, Option<Complex64>) {
    let i = Complex64::i();
    if z.re >= 0.0 {
        (faddeeva_upper(i * z), None)
    } else {
        (faddeeva_upper(-i * z), Some(z * z))
    }
}
