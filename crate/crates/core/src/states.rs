//! Eigenstates of the isotonic oscillator H = −d²/dx² + x² + A/x² on the
//! half-line, in position and momentum space.
//!
//! Position space:
//!
//! ψₘ(x) = (−1)^m √(2(γ)ₘ / (m! Γ(γ))) x^(γ−½) e^(−x²/2) ₁F₁(−m; γ; x²)
//!
//! Momentum space uses the unitary transform
//! φ(p) = (2π)^(−½) ∫₀^∞ ψ(x) e^(−ipx) dx of the zero-extended ψ, which has
//! the closed form Σₖ Cₖ [Γ(aₖ) ₁F₁(aₖ; ½; −p²/2) − i√2 p Γ(aₖ+½) ₁F₁(aₖ+½; 3/2; −p²/2)]
//! with aₖ = ¼ + k + γ/2, up to a constant factor that is fixed by
//! normalizing ∫|φ|² dp = 1 numerically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate, IntegrationSpec};
use crate::specfun::{
    kummer_general, ln_factorial, ln_gamma, ln_pochhammer, CompensatedSum, HypergeometricArgs,
};

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_2: f64 = std::f64::consts::LN_2;

/// Smallest admissible γ; corresponds to A = 0.
pub const GAMMA_MIN: f64 = 1.5;

/// The pair (m, γ) identifying one eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateLabel {
    m: u32,
    gamma: f64,
}

impl StateLabel {
    pub fn new(m: u32, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < GAMMA_MIN {
            return Err(Error::Domain(format!(
                "γ must be a finite real ≥ 3/2 (A ≥ 0), got {gamma}"
            )));
        }
        Ok(Self { m, gamma })
    }

    /// Label from the coupling A of the A/x² term.
    pub fn from_coupling(m: u32, a: f64) -> Result<Self> {
        Self::new(m, gamma_from_a(a)?)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eigenvalue(&self) -> f64 {
        eigenvalue(self)
    }

    /// Classical turning point √(eₘ).
    pub fn turning_point(&self) -> f64 {
        self.eigenvalue().sqrt()
    }

    /// Decay exponent k of the momentum density, |φ(p)|² ~ |p|^(−k).
    pub fn momentum_tail_exponent(&self) -> f64 {
        2.0 * self.gamma + 1.0
    }
}

impl std::fmt::Display for StateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(m={}, γ={})", self.m, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.re * factor, self.im * factor)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// γ = 1 + ½√(1 + 4A).
pub fn gamma_from_a(a: f64) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("coupling A must be ≥ 0, got {a}")));
    }
    Ok(1.0 + 0.5 * (1.0 + 4.0 * a).sqrt())
}

/// eₘ = 2(2m + γ).
pub fn eigenvalue(s: &StateLabel) -> f64 {
    2.0 * (2.0 * s.m as f64 + s.gamma)
}

/// ln of the position-space normalization √(2(γ)ₘ / (m! Γ(γ))).
fn ln_psi_norm(s: &StateLabel) -> f64 {
    0.5 * (LN_2 + ln_pochhammer(s.gamma, s.m) - ln_factorial(s.m) - ln_gamma_pos(s.gamma))
}

fn ln_gamma_pos(x: f64) -> f64 {
    // Callers only pass γ-derived arguments ≥ 1.
    ln_gamma(x).expect("positive argument")
}

/// ln |(−m)ₖ / (k! (γ)ₖ)| and its sign (−1)^k.
fn ln_kummer_coeff(s: &StateLabel, k: u32) -> (f64, f64) {
    let ln_abs =
        ln_factorial(s.m) - ln_factorial(s.m - k) - ln_factorial(k) - ln_pochhammer(s.gamma, k);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    (ln_abs, sign)
}

fn parity(m: u32) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// One monomial c·x^(2k+γ−½) of the finite position-space series.
#[derive(Debug, Clone, Copy)]
struct PsiTerm {
    ln_coeff: f64,
    sign: f64,
    power: f64,
}

#[derive(Debug, Clone, Copy)]
struct PhiTerm {
    /// aₖ = ¼ + k + γ/2
    a: f64,
    /// ln |Cₖ Γ(aₖ)| / √π, ln |Cₖ √2 Γ(aₖ+½)| / √π
    ln_even: f64,
    ln_odd: f64,
    sign: f64,
}

fn psi_terms(s: &StateLabel) -> Vec<PsiTerm> {
    let ln_norm = ln_psi_norm(s);
    let outer = parity(s.m);
    (0..=s.m)
        .map(|k| {
            let (ln_c, sign) = ln_kummer_coeff(s, k);
            PsiTerm {
                ln_coeff: ln_norm + ln_c,
                sign: outer * sign,
                power: 2.0 * k as f64 + s.gamma - 0.5,
            }
        })
        .collect()
}

fn sum_psi(terms: &[PsiTerm], x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let gauss = -0.5 * x * x;
    terms
        .iter()
        .map(|t| t.sign * (t.ln_coeff + t.power * ln_x + gauss).exp())
        .collect::<CompensatedSum>()
        .value()
}

fn sum_psi_derivative(terms: &[PsiTerm], x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        // Only x^(γ−½) with γ = 3/2 has a non-vanishing slope at the origin.
        return terms
            .iter()
            .filter(|t| (t.power - 1.0).abs() < 1e-15)
            .map(|t| t.sign * t.ln_coeff.exp())
            .sum();
    }
    let ln_x = x.ln();
    let gauss = -0.5 * x * x;
    let mut acc = CompensatedSum::new();
    for t in terms {
        // d/dx [x^n e^{−x²/2}] = (n x^{n−1} − x^{n+1}) e^{−x²/2}
        let lower = t.power * ((t.ln_coeff + (t.power - 1.0) * ln_x + gauss).exp());
        let upper = (t.ln_coeff + (t.power + 1.0) * ln_x + gauss).exp();
        acc.add(t.sign * lower);
        acc.add(-t.sign * upper);
    }
    acc.value()
}

/// ψₘ(x) for x ≥ 0; zero at the origin.
pub fn eval_psi(s: &StateLabel, x: f64) -> f64 {
    sum_psi(&psi_terms(s), x)
}

/// dψₘ/dx, by differentiating the finite series term by term. At x = 0 the
/// one-sided limit is returned.
pub fn eval_psi_derivative(s: &StateLabel, x: f64) -> f64 {
    sum_psi_derivative(&psi_terms(s), x)
}

/// ln |Cₖ(γ, m)| and sign, where
/// Cₖ = (−1)^m 2^(−¾+k+γ/2) (−m)ₖ / (k! (γ)ₖ) · √((γ)ₘ / (π m! Γ(γ))).
fn ln_coefficient_ck(s: &StateLabel, k: u32) -> (f64, f64) {
    let (ln_c, sign) = ln_kummer_coeff(s, k);
    let ln_pow2 = (-0.75 + k as f64 + 0.5 * s.gamma) * LN_2;
    let ln_root =
        0.5 * (ln_pochhammer(s.gamma, s.m) - LN_PI - ln_factorial(s.m) - ln_gamma_pos(s.gamma));
    (ln_pow2 + ln_c + ln_root, parity(s.m) * sign)
}

/// The momentum-space expansion coefficient Cₖ(γ, m), 0 ≤ k ≤ m.
pub fn coefficient_ck(s: &StateLabel, k: u32) -> Result<f64> {
    if k > s.m {
        return Err(Error::Index { k, m: s.m });
    }
    let (ln_abs, sign) = ln_coefficient_ck(s, k);
    Ok(sign * ln_abs.exp())
}

fn phi_terms(s: &StateLabel) -> Vec<PhiTerm> {
    (0..=s.m)
        .map(|k| {
            let (ln_ck, sign) = ln_coefficient_ck(s, k);
            let a = 0.25 + k as f64 + 0.5 * s.gamma;
            PhiTerm {
                a,
                ln_even: ln_ck + ln_gamma_pos(a) - 0.5 * LN_PI,
                ln_odd: ln_ck + 0.5 * LN_2 + ln_gamma_pos(a + 0.5) - 0.5 * LN_PI,
                sign,
            }
        })
        .collect()
}

fn sum_phi(terms: &[PhiTerm], p: f64) -> Result<ComplexAmplitude> {
    let z = -0.5 * p * p;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for t in terms {
        let even = kummer_general(HypergeometricArgs::new(t.a, 0.5, z))?;
        let odd = kummer_general(HypergeometricArgs::new(t.a + 0.5, 1.5, z))?;
        re.add(t.sign * t.ln_even.exp() * even);
        // e^{−ipx} puts a minus sign on the sine transform.
        im.add(-t.sign * t.ln_odd.exp() * p * odd);
    }
    Ok(ComplexAmplitude::new(re.value(), im.value()))
}

/// Closed-form momentum amplitude before numerical normalization.
///
/// Carries an extra overall factor 1/√π relative to the unit-normalized
/// transform, so ∫|·|² dp comes out as 1/π.
pub fn eval_phi_unnormalized(s: &StateLabel, p: f64) -> Result<ComplexAmplitude> {
    sum_phi(&phi_terms(s), p)
}

/// Normalized momentum amplitude φₘ(p). Builds an [`Eigenstate`] and
/// therefore runs one normalization integral; use the struct directly for
/// repeated evaluation.
pub fn eval_phi(s: &StateLabel, p: f64) -> Result<ComplexAmplitude> {
    Eigenstate::new(*s)?.phi(p)
}

/// Position-space eigenfunction with its series coefficients precomputed.
/// Touches nothing but the finite position-space series.
#[derive(Debug, Clone)]
pub struct PositionWavefunction {
    label: StateLabel,
    terms: Vec<PsiTerm>,
}

impl PositionWavefunction {
    pub fn new(label: StateLabel) -> Self {
        Self {
            label,
            terms: psi_terms(&label),
        }
    }

    pub fn label(&self) -> StateLabel {
        self.label
    }

    pub fn psi(&self, x: f64) -> f64 {
        sum_psi(&self.terms, x)
    }

    pub fn psi_derivative(&self, x: f64) -> f64 {
        sum_psi_derivative(&self.terms, x)
    }

    /// |ψ(x)|², zero for x < 0.
    pub fn density(&self, x: f64) -> f64 {
        let v = self.psi(x);
        v * v
    }
}

/// Tolerances for the momentum normalization integral. The relative one
/// sits above the roundoff floor of the alternating C_k sum at m ≈ 10.
const MOMENTUM_NORM_ABS_TOL: f64 = 1e-12;
const MOMENTUM_NORM_REL_TOL: f64 = 1e-9;

/// An eigenstate with position series, momentum series and momentum
/// normalization precomputed.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    position: PositionWavefunction,
    phi: Vec<PhiTerm>,
    /// λ = ∫|φ_unnormalized|² dp
    momentum_norm: f64,
    phi_scale: f64,
}

impl Eigenstate {
    pub fn new(label: StateLabel) -> Result<Self> {
        let phi = phi_terms(&label);
        let spec = IntegrationSpec::half_line()
            .with_tolerances(MOMENTUM_NORM_ABS_TOL, MOMENTUM_NORM_REL_TOL)
            .with_tail_exponent(label.momentum_tail_exponent())
            .with_length_scale(label.turning_point());
        let half = try_integrate(|p| Ok(sum_phi(&phi, p)?.norm_sqr()), &spec)?;
        let momentum_norm = 2.0 * half.value;
        if !(momentum_norm > 0.0 && momentum_norm.is_finite()) {
            return Err(Error::Domain(format!(
                "momentum amplitude of {label} has norm {momentum_norm}"
            )));
        }
        Ok(Self {
            position: PositionWavefunction::new(label),
            phi,
            momentum_norm,
            phi_scale: momentum_norm.sqrt().recip(),
        })
    }

    pub fn label(&self) -> StateLabel {
        self.position.label
    }

    pub fn position(&self) -> &PositionWavefunction {
        &self.position
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.position.psi(x)
    }

    pub fn psi_derivative(&self, x: f64) -> f64 {
        self.position.psi_derivative(x)
    }

    pub fn position_density(&self, x: f64) -> f64 {
        self.position.density(x)
    }

    pub fn phi(&self, p: f64) -> Result<ComplexAmplitude> {
        Ok(sum_phi(&self.phi, p)?.scale(self.phi_scale))
    }

    pub fn phi_unnormalized(&self, p: f64) -> Result<ComplexAmplitude> {
        sum_phi(&self.phi, p)
    }

    /// |φ(p)|²
    pub fn momentum_density(&self, p: f64) -> Result<f64> {
        Ok(self.phi(p)?.norm_sqr())
    }

    /// The numerically determined λ with ∫|φ_unnormalized|² dp = λ.
    pub fn momentum_norm(&self) -> f64 {
        self.momentum_norm
    }
}
