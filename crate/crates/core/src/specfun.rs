//! Special functions: log-Gamma, Pochhammer symbols and Kummer's confluent
//! hypergeometric function ₁F₁(a; b; z) for real arguments.
//!
//! Everything here is a pure function of its arguments. Products of Gamma
//! and Pochhammer factors are meant to be combined in log space by callers
//! and exponentiated once.

use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation.
///
/// Keeps a running compensation term so that alternating series with large
/// intermediate terms lose as little as possible to cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
const LANCZOS_G: f64 = 607.0 / 128.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_091_82,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// Lanczos evaluation of ln Γ(x), valid for x ≥ 0.5.
fn ln_gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// Natural logarithm of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return Ok(ln_gamma_lanczos(x + 1.0) - x.ln());
    }
    Ok(ln_gamma_lanczos(x))
}

/// ln |Γ(x)| together with the sign of Γ(x), for any real x that is not a
/// non-positive integer.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x > 0.0 {
        return Ok((ln_gamma(x)?, 1.0));
    }
    if x == x.floor() {
        return Err(Error::Domain(format!("Γ has a pole at {x}")));
    }
    // Reflection: Γ(x) Γ(1 - x) = π / sin(πx), with Γ(1 - x) > 0 here.
    let s = (std::f64::consts::PI * x).sin();
    let ln_abs = std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x)?;
    Ok((ln_abs, s.signum()))
}

/// Reciprocal Gamma function; zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    match ln_gamma_signed(x) {
        Ok((ln_abs, sign)) => sign * (-ln_abs).exp(),
        Err(_) => 0.0,
    }
}

const POCHHAMMER_DIRECT_MAX: u32 = 20;

/// Rising factorial (γ)ₘ = γ(γ+1)⋯(γ+m−1), with (γ)₀ = 1.
///
/// Direct product up to m = 20, log space beyond that.
pub fn pochhammer(gamma: f64, m: u32) -> f64 {
    if m <= POCHHAMMER_DIRECT_MAX {
        (0..m).fold(1.0, |acc, j| acc * (gamma + j as f64))
    } else {
        ln_pochhammer(gamma, m).exp()
    }
}

/// ln (γ)ₘ for γ > 0.
pub fn ln_pochhammer(gamma: f64, m: u32) -> f64 {
    if m <= POCHHAMMER_DIRECT_MAX {
        return pochhammer(gamma, m).ln();
    }
    // Both arguments are positive, so ln_gamma cannot fail here.
    ln_gamma(gamma + m as f64).unwrap_or(f64::NAN) - ln_gamma(gamma).unwrap_or(f64::NAN)
}

/// ln m!
pub fn ln_factorial(m: u32) -> f64 {
    if m < 2 {
        0.0
    } else if m <= POCHHAMMER_DIRECT_MAX {
        (2..=m).map(f64::from).product::<f64>().ln()
    } else {
        ln_gamma(m as f64 + 1.0).unwrap_or(f64::NAN)
    }
}

/// The terminating series ₁F₁(−m; γ; z) = Σₖ (−m)ₖ / ((γ)ₖ k!) zᵏ, k = 0..=m.
pub fn kummer_terminating(m: u32, gamma: f64, z: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut term = 1.0;
    acc.add(term);
    for k in 0..m {
        let kf = k as f64;
        term *= (kf - m as f64) / ((gamma + kf) * (kf + 1.0)) * z;
        acc.add(term);
    }
    acc.value()
}

/// Parameters of ₁F₁(a; b; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricArgs {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl HypergeometricArgs {
    pub fn new(a: f64, b: f64, z: f64) -> Self {
        Self { a, b, z }
    }

    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.z.is_finite()) {
            return Err(Error::Domain(format!("non-finite ₁F₁ argument {self:?}")));
        }
        if !(self.b > 0.0) {
            return Err(Error::Domain(format!(
                "₁F₁ requires b > 0, got b = {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// Arguments below this use Kummer's transformation.
pub const KUMMER_TRANSFORM_THRESHOLD: f64 = 0.0;
const MAX_SERIES_TERMS: usize = 1_000_000;
const SERIES_EPS: f64 = 1e-17;

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z) for real
/// arguments with b > 0.
///
/// Non-negative z is summed directly. For negative z the value is
/// e^z · ₁F₁(b − a; b; −z), whose series has no large alternating terms;
/// once −z is large enough the algebraic asymptotic expansion
/// Γ(b)/Γ(b − a) · (−z)^(−a) · Σ (a)ₙ(a − b + 1)ₙ / (n! (−z)ⁿ) takes over.
pub fn kummer_general(args: HypergeometricArgs) -> Result<f64> {
    args.validate()?;
    let HypergeometricArgs { a, b, z } = args;
    if z >= KUMMER_TRANSFORM_THRESHOLD {
        return kummer_series(a, b, z);
    }
    let x = -z;
    if let Some(v) = kummer_asymptotic_negative(a, b, x) {
        return Ok(v);
    }
    kummer_transformed(a, b, z)
}

/// Direct Taylor series Σ (a)ₙ / (b)ₙ · zⁿ / n!, summed until the tail is
/// below machine precision.
pub fn kummer_series(a: f64, b: f64, z: f64) -> Result<f64> {
    series_scaled(a, b, z, 1.0)
}

/// e^z · ₁F₁(b − a; b; −z), mathematically equal to ₁F₁(a; b; z).
pub fn kummer_transformed(a: f64, b: f64, z: f64) -> Result<f64> {
    let c = b - a;
    let scale = z.exp();
    if c <= 0.0 && c == c.floor() {
        // Terminating: e^z times a polynomial, combined in log space so a
        // legitimately tiny result underflows gracefully instead of failing.
        let poly = series_scaled(c, b, -z, 1.0)?;
        if poly == 0.0 {
            return Ok(0.0);
        }
        return Ok(poly.signum() * (z + poly.abs().ln()).exp());
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::NonConvergence { a, b, z, terms: 0 });
    }
    series_scaled(c, b, -z, scale).map_err(|_| Error::NonConvergence {
        a,
        b,
        z,
        terms: MAX_SERIES_TERMS,
    })
}

/// `scale` · Σ (a)ₙ/(b)ₙ zⁿ/n!, with the scale folded into the first term
/// so that neither the partial sums nor the final product overflow.
fn series_scaled(a: f64, b: f64, z: f64, scale: f64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    let mut term = scale;
    acc.add(term);
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        term *= (a + nf) / ((b + nf) * (nf + 1.0)) * z;
        if term == 0.0 {
            return Ok(acc.value());
        }
        acc.add(term);
        if !term.is_finite() {
            break;
        }
        // Past n > |z| and a ratio below one, terms shrink monotonically.
        let ratio = ((a + nf + 1.0) / ((b + nf + 1.0) * (nf + 2.0)) * z).abs();
        if nf + 1.0 > z.abs() && ratio < 1.0 && term.abs() <= SERIES_EPS * acc.value().abs() {
            return Ok(acc.value());
        }
    }
    Err(Error::NonConvergence {
        a,
        b,
        z,
        terms: MAX_SERIES_TERMS,
    })
}

/// Asymptotic expansion of ₁F₁(a; b; −x) for large positive x, or `None`
/// when the expansion cannot reach machine precision at this x.
fn kummer_asymptotic_negative(a: f64, b: f64, x: f64) -> Option<f64> {
    if x < 20.0 {
        return None;
    }
    let c = b - a;
    if c <= 0.0 && c == c.floor() {
        // 1/Γ(b − a) = 0: the function is e^{−x} times a polynomial.
        return None;
    }
    let (ln_gamma_c, sign_c) = ln_gamma_signed(c).ok()?;
    let ln_gamma_b = ln_gamma(b).ok()?;

    // The neglected exponentially small part is
    // Γ(b)/Γ(a) e^{−x} x^{a−b}; compare it with the algebraic part.
    if a > 0.0 || a != a.floor() {
        if let Ok((ln_gamma_a, _)) = ln_gamma_signed(a) {
            let ln_exp_part = ln_gamma_b - ln_gamma_a - x + (a - b) * x.ln();
            let ln_alg_part = ln_gamma_b - ln_gamma_c - a * x.ln();
            if ln_exp_part - ln_alg_part > SERIES_EPS.ln() {
                return None;
            }
        }
    }

    let mut acc = CompensatedSum::new();
    let mut term = 1.0_f64;
    acc.add(term);
    let mut n = 0.0;
    loop {
        let next = term * (a + n) * (a - b + 1.0 + n) / ((n + 1.0) * x);
        if next == 0.0 {
            break;
        }
        if next.abs() <= SERIES_EPS * acc.value().abs() {
            acc.add(next);
            break;
        }
        // Divergent part of the asymptotic series reached before convergence.
        if n > 0.0 && next.abs() >= term.abs() && n + 1.0 > (a - b).abs() + a.abs() {
            return None;
        }
        acc.add(next);
        term = next;
        n += 1.0;
        if n > 10_000.0 {
            return None;
        }
    }
    let ln_prefactor = ln_gamma_b - ln_gamma_c - a * x.ln();
    Some(sign_c * ln_prefactor.exp() * acc.value())
}
