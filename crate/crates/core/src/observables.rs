//! Per-state observables: Shannon entropies of the position and momentum
//! densities, entropy densities, quadrature variances, and the BBM,
//! Heisenberg and squeezing diagnostics built from them.
//!
//! Entropies are in nats. ⟨p⟩ vanishes for every state because |φ(p)|² is
//! even, so (Δp)² = ⟨p²⟩ throughout.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{entropy_term, try_integrate, IntegrationSpec};
use crate::states::{Eigenstate, StateLabel};

/// 1 + ln π, the BBM lower bound on S(ρ) + S(ξ).
pub const BBM_BOUND: f64 = 2.144_729_885_849_400_2;
/// (Δx)²(Δp)² ≥ ¼ with [x, p] = i.
pub const HEISENBERG_BOUND: f64 = 0.25;
/// Vacuum variance; a quadrature below it is squeezed.
pub const QUADRATURE_SQUEEZING_THRESHOLD: f64 = 0.5;
/// Guard applied to every threshold comparison.
pub const FLAG_GUARD: f64 = 1e-9;

/// ½(1 + ln π): entropy of the harmonic-oscillator ground state in either
/// space, and the entropy-squeezing threshold.
pub fn harmonic_ground_entropy() -> f64 {
    0.5 * BBM_BOUND
}

/// Quadrature tolerances used for every integral of one analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Precision {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub label: StateLabel,
    pub s_position: f64,
    pub s_momentum: f64,
    pub s_sum: f64,
    pub bbm_bound: f64,
    pub bbm_satisfied: bool,
    pub entropy_squeezed_position: bool,
    pub entropy_squeezed_momentum: bool,
}

impl EntropyReport {
    pub fn new(label: StateLabel, s_position: f64, s_momentum: f64) -> Self {
        let s_sum = s_position + s_momentum;
        let threshold = harmonic_ground_entropy();
        Self {
            label,
            s_position,
            s_momentum,
            s_sum,
            bbm_bound: BBM_BOUND,
            bbm_satisfied: s_sum >= BBM_BOUND - FLAG_GUARD,
            entropy_squeezed_position: s_position < threshold - FLAG_GUARD,
            entropy_squeezed_momentum: s_momentum < threshold - FLAG_GUARD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositionMoments {
    pub mean_x: f64,
    pub mean_x2: f64,
    pub var_x: f64,
}

/// Momentum-space ⟨p²⟩ with its power-law tail restored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumSpaceVariance {
    pub value: f64,
    /// 2∫₀^P p² |φ|² dp
    pub truncated: f64,
    /// Analytic remainder of the fitted C·p^(−k) beyond P, both sides.
    pub tail_correction: f64,
    pub cutoff: f64,
    pub fitted_exponent: f64,
}

/// (Δp)² by both routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumVariance {
    /// ∫₀^∞ |ψ′(x)|² dx
    pub primary: f64,
    pub momentum_space: MomentumSpaceVariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub label: StateLabel,
    pub mean_x: f64,
    pub mean_x2: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// Cross-check from the momentum density, when it was computed.
    pub var_p_momentum_space: Option<f64>,
    pub product: f64,
    pub heisenberg_bound: f64,
    pub x_squeezed: bool,
    pub p_squeezed: bool,
}

impl UncertaintyReport {
    pub fn new(label: StateLabel, moments: PositionMoments, var_p: f64) -> Self {
        Self {
            label,
            mean_x: moments.mean_x,
            mean_x2: moments.mean_x2,
            var_x: moments.var_x,
            var_p,
            var_p_momentum_space: None,
            product: moments.var_x * var_p,
            heisenberg_bound: HEISENBERG_BOUND,
            x_squeezed: moments.var_x < QUADRATURE_SQUEEZING_THRESHOLD - FLAG_GUARD,
            p_squeezed: var_p < QUADRATURE_SQUEEZING_THRESHOLD - FLAG_GUARD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Position,
    Momentum,
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Space::Position => "position",
            Space::Momentum => "momentum",
        })
    }
}

/// Samples of −ρ ln ρ on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub space: Space,
    pub label: StateLabel,
    pub samples: Vec<(f64, f64)>,
}

impl DensityCurve {
    pub fn max_value(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Coordinate of the first global maximum.
    pub fn argmax(&self) -> f64 {
        let mut best = self.samples[0];
        for &s in &self.samples[1..] {
            if s.1 > best.1 {
                best = s;
            }
        }
        best.0
    }
}

/// Number of log-spaced points in the tail fit of the momentum route.
const TAIL_FIT_POINTS: usize = 33;
const MOMENTUM_ROUTE_REL_TOL: f64 = 1e-8;

/// All observables of one eigenstate, sharing its precomputed series and
/// momentum normalization.
#[derive(Debug, Clone)]
pub struct StateAnalysis {
    state: Eigenstate,
    precision: Precision,
}

impl StateAnalysis {
    pub fn new(label: StateLabel) -> Result<Self> {
        Self::with_precision(label, Precision::default())
    }

    pub fn with_precision(label: StateLabel, precision: Precision) -> Result<Self> {
        if !(precision.abs_tol > 0.0 && precision.rel_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive, got {precision:?}"
            )));
        }
        Ok(Self {
            state: Eigenstate::new(label)?,
            precision,
        })
    }

    pub fn label(&self) -> StateLabel {
        self.state.label()
    }

    pub fn state(&self) -> &Eigenstate {
        &self.state
    }

    fn position_spec(&self) -> IntegrationSpec {
        IntegrationSpec::half_line()
            .with_tolerances(self.precision.abs_tol, self.precision.rel_tol)
            .with_length_scale(self.label().turning_point())
    }

    fn momentum_spec(&self, tail_exponent: f64) -> IntegrationSpec {
        IntegrationSpec::half_line()
            .with_tolerances(0.5 * self.precision.abs_tol, self.precision.rel_tol)
            .with_tail_exponent(tail_exponent)
            .with_length_scale(self.label().turning_point())
    }

    /// S(ρ) = −∫₀^∞ |ψ|² ln |ψ|² dx
    pub fn position_entropy(&self) -> Result<f64> {
        let wf = self.state.position();
        let r = try_integrate(|x| entropy_term(wf.density(x), x), &self.position_spec())?;
        Ok(r.value)
    }

    /// S(ξ) = −∫ |φ|² ln |φ|² dp, as twice the half-line integral.
    pub fn momentum_entropy(&self) -> Result<f64> {
        // −ξ ln ξ decays like p^{−k} ln p; shading k by ½ keeps the
        // cutoff bound honest over the log factor.
        let k = self.label().momentum_tail_exponent() - 0.5;
        let r = try_integrate(
            |p| entropy_term(self.state.momentum_density(p)?, p),
            &self.momentum_spec(k),
        )?;
        Ok(2.0 * r.value)
    }

    pub fn entropy_report(&self) -> Result<EntropyReport> {
        Ok(EntropyReport::new(
            self.label(),
            self.position_entropy()?,
            self.momentum_entropy()?,
        ))
    }

    pub fn position_moments(&self) -> Result<PositionMoments> {
        let wf = self.state.position();
        let spec = self.position_spec();
        let mean_x = try_integrate(|x| Ok(x * wf.density(x)), &spec)?.value;
        let mean_x2 = try_integrate(|x| Ok(x * x * wf.density(x)), &spec)?.value;
        Ok(PositionMoments {
            mean_x,
            mean_x2,
            var_x: mean_x2 - mean_x * mean_x,
        })
    }

    /// ⟨p²⟩ = ∫₀^∞ |ψ′|² dx.
    pub fn var_p_derivative(&self) -> Result<f64> {
        let wf = self.state.position();
        let spec = self.position_spec();
        let r = try_integrate(|x| Ok(wf.psi_derivative(x).powi(2)), &spec)?;
        Ok(r.value)
    }

    /// ⟨p²⟩ = ∫ p² |φ|² dp, integrated to a finite cutoff P with the tail
    /// restored from a least-squares fit of C·p^(−k) on [P/10, P].
    pub fn var_p_momentum_space(&self) -> Result<MomentumSpaceVariance> {
        let label = self.label();
        let cutoff = (100.0 * label.turning_point()).max(1000.0);
        let integrand = |p: f64| Ok(p * p * self.state.momentum_density(p)?);
        // Cancellation in φ at high m leaves ~1e-10 relative noise in p²ξ;
        // this route is a cross-check, so its tolerance is floored above it.
        let spec = IntegrationSpec::interval(0.0, cutoff)
            .with_tolerances(
                0.5 * self.precision.abs_tol,
                self.precision.rel_tol.max(MOMENTUM_ROUTE_REL_TOL),
            )
            .with_length_scale(label.turning_point());
        let truncated = 2.0 * try_integrate(integrand, &spec)?.value;

        let (ln_c, k) = fit_power_law(
            (0..TAIL_FIT_POINTS).map(|i| {
                let t = i as f64 / (TAIL_FIT_POINTS - 1) as f64;
                cutoff * 10f64.powf(t - 1.0)
            }),
            integrand,
        )?;
        if !(k > 1.0) {
            return Err(Error::Domain(format!(
                "momentum tail of {label} fitted with non-integrable exponent {k}"
            )));
        }
        let tail_correction = 2.0 * (ln_c + (1.0 - k) * cutoff.ln()).exp() / (k - 1.0);
        Ok(MomentumSpaceVariance {
            value: truncated + tail_correction,
            truncated,
            tail_correction,
            cutoff,
            fitted_exponent: k,
        })
    }

    pub fn variance_p(&self) -> Result<MomentumVariance> {
        Ok(MomentumVariance {
            primary: self.var_p_derivative()?,
            momentum_space: self.var_p_momentum_space()?,
        })
    }

    /// Uses the derivative route for (Δp)²; the momentum-space cross-check
    /// is filled in only when `with_momentum_route` is set.
    pub fn uncertainty_report(&self, with_momentum_route: bool) -> Result<UncertaintyReport> {
        let moments = self.position_moments()?;
        let var_p = self.var_p_derivative()?;
        let mut report = UncertaintyReport::new(self.label(), moments, var_p);
        if with_momentum_route {
            report.var_p_momentum_space = Some(self.var_p_momentum_space()?.value);
        }
        Ok(report)
    }

    /// `n` uniformly spaced samples of the entropy density on [lo, hi].
    pub fn density_samples(
        &self,
        space: Space,
        lo: f64,
        hi: f64,
        n: usize,
    ) -> Result<DensityCurve> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!("bad range [{lo}, {hi}]")));
        }
        if space == Space::Position && lo < 0.0 {
            return Err(Error::InvalidInput(format!(
                "position range must start at x ≥ 0, got {lo}"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let samples = (0..n)
            .map(|i| {
                let c = if i == n - 1 { hi } else { lo + step * i as f64 };
                let rho = match space {
                    Space::Position => self.state.position_density(c),
                    Space::Momentum => self.state.momentum_density(c)?,
                };
                Ok((c, entropy_term(rho, c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityCurve {
            space,
            label: self.label(),
            samples,
        })
    }
}

/// Least-squares fit of ln f = ln C − k ln p; returns (ln C, k).
fn fit_power_law<I, F>(points: I, f: F) -> Result<(f64, f64)>
where
    I: Iterator<Item = f64>,
    F: Fn(f64) -> Result<f64>,
{
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in points {
        let v = f(p)?;
        if v > 0.0 {
            xs.push(p.ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::Domain(
            "momentum tail vanished before the fit window".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok((my - slope * mx, -slope))
}

pub fn position_entropy(s: &StateLabel) -> Result<f64> {
    StateAnalysis::new(*s)?.position_entropy()
}

pub fn momentum_entropy(s: &StateLabel) -> Result<f64> {
    StateAnalysis::new(*s)?.momentum_entropy()
}

pub fn bbm_report(s: &StateLabel) -> Result<EntropyReport> {
    StateAnalysis::new(*s)?.entropy_report()
}

pub fn variance_x(s: &StateLabel) -> Result<PositionMoments> {
    StateAnalysis::new(*s)?.position_moments()
}

pub fn variance_p(s: &StateLabel) -> Result<MomentumVariance> {
    StateAnalysis::new(*s)?.variance_p()
}

pub fn heisenberg_report(s: &StateLabel) -> Result<UncertaintyReport> {
    StateAnalysis::new(*s)?.uncertainty_report(false)
}

pub fn density_samples(
    s: &StateLabel,
    space: Space,
    range: (f64, f64),
    n: usize,
) -> Result<DensityCurve> {
    StateAnalysis::new(*s)?.density_samples(space, range.0, range.1, n)
}
