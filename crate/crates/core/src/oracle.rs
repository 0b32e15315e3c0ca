//! Brute-force cross-checks that share no code path with the closed-form
//! momentum amplitude: a direct-quadrature Fourier transform, normalized
//! harmonic-oscillator eigenfunctions by Hermite recurrence, and the Gram
//! matrix of the position eigenfunctions.
//!
//! Nothing here calls `kummer_general` or the closed-form φ.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, IntegrationSpec};
use crate::states::{ComplexAmplitude, PositionWavefunction, StateLabel};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const PI_POW_MINUS_QUARTER: f64 = 0.751_125_544_464_942_5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Upper integration limit in x; `None` picks [`default_cutoff`].
    pub x_cutoff: Option<f64>,
    /// Initial quadrature node density per unit length.
    pub samples_per_unit: u32,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            x_cutoff: None,
            samples_per_unit: 200,
            tolerance: 1e-12,
        }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        if let Some(x) = self.x_cutoff {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "x_cutoff must be positive, got {x}"
                )));
            }
        }
        if self.samples_per_unit < 16 {
            return Err(Error::InvalidInput(format!(
                "samples_per_unit must be at least 16, got {}",
                self.samples_per_unit
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput(
                "oracle tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    fn cutoff_for(&self, wf: &PositionWavefunction) -> f64 {
        self.x_cutoff.unwrap_or_else(|| default_cutoff(wf))
    }
}

/// Smallest X on a 1/8 grid, searched outward from the classical turning
/// point, beyond which |ψ| stays below 1e-16.
pub fn default_cutoff(wf: &PositionWavefunction) -> f64 {
    const STEP: f64 = 0.125;
    let start = wf.label().turning_point();
    let mut x = start;
    // Past the turning point ψ decays monotonically up to the polynomial's
    // last node, so a run of small values over one unit settles it.
    loop {
        let below = (0..8).all(|j| wf.psi(x + j as f64 * STEP).abs() < 1e-16);
        if below {
            return x;
        }
        x += STEP;
        if x > start + 60.0 {
            return x;
        }
    }
}

fn breakpoints(cutoff: f64, samples_per_unit: u32) -> Vec<f64> {
    // One 21-point panel per 21/samples_per_unit of length.
    let panels = ((cutoff * samples_per_unit as f64) / 21.0).ceil().max(1.0) as usize;
    (0..=panels)
        .map(|i| cutoff * i as f64 / panels as f64)
        .collect()
}

fn integrate_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut total = 0.0;
    let per_panel = tol / breaks.len() as f64;
    for w in breaks.windows(2) {
        let spec = IntegrationSpec::interval(w[0], w[1]).with_tolerances(per_panel, tol);
        total += integrate(&f, &spec)?.value;
    }
    Ok(total)
}

/// φ(p) = (2π)^(−½) ∫₀^X ψ(x) (cos px − i sin px) dx by adaptive quadrature
/// of the real and imaginary parts.
pub fn fourier_oracle(s: &StateLabel, p: f64, cfg: &OracleConfig) -> Result<ComplexAmplitude> {
    cfg.validate()?;
    let wf = PositionWavefunction::new(*s);
    fourier_oracle_with(&wf, p, cfg)
}

/// Same as [`fourier_oracle`] with a prebuilt wavefunction.
pub fn fourier_oracle_with(
    wf: &PositionWavefunction,
    p: f64,
    cfg: &OracleConfig,
) -> Result<ComplexAmplitude> {
    cfg.validate()?;
    let cutoff = cfg.cutoff_for(wf);
    let breaks = breakpoints(cutoff, cfg.samples_per_unit);
    let re = integrate_panels(|x| wf.psi(x) * (p * x).cos(), &breaks, cfg.tolerance)?;
    let im = if p == 0.0 {
        0.0
    } else {
        -integrate_panels(|x| wf.psi(x) * (p * x).sin(), &breaks, cfg.tolerance)?
    };
    Ok(ComplexAmplitude::new(
        FRAC_1_SQRT_2PI * re,
        FRAC_1_SQRT_2PI * im,
    ))
}

/// Normalized harmonic-oscillator eigenfunction
/// π^(−¼) (2ⁿ n!)^(−½) Hₙ(x) e^(−x²/2), built by the three-term recurrence
/// on the normalized functions themselves.
pub fn hermite_oracle(n: u32, x: f64) -> f64 {
    let ground = PI_POW_MINUS_QUARTER * (-0.5 * x * x).exp();
    if n == 0 {
        return ground;
    }
    let mut prev = ground;
    let mut cur = std::f64::consts::SQRT_2 * x * ground;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Largest basis size accepted by [`gram_matrix`].
pub const GRAM_MAX: u32 = 10;

/// G[m][n] = ∫₀^∞ ψₘ ψₙ dx for m, n ≤ n_max at fixed γ.
pub fn gram_matrix(gamma: f64, n_max: u32) -> Result<Vec<Vec<f64>>> {
    if n_max > GRAM_MAX {
        return Err(Error::InvalidInput(format!(
            "gram_matrix supports n_max ≤ {GRAM_MAX}, got {n_max}"
        )));
    }
    let states = (0..=n_max)
        .map(|m| StateLabel::new(m, gamma).map(PositionWavefunction::new))
        .collect::<Result<Vec<_>>>()?;
    let size = states.len();
    let mut g = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in i..size {
            let cutoff = default_cutoff(&states[i]).max(default_cutoff(&states[j]));
            let spec = IntegrationSpec::interval(0.0, cutoff).with_tolerances(1e-13, 1e-13);
            let v = integrate(|x| states[i].psi(x) * states[j].psi(x), &spec)?.value;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(m: u32, g: f64) -> StateLabel {
        StateLabel::new(m, g).unwrap()
    }

    #[test]
    fn hermite_examples() {
        assert!((hermite_oracle(0, 0.0) - 0.751_125_5).abs() < 1e-7);
        for x in [-1.3, 0.2, 2.5] {
            let expected = 2f64.sqrt() * PI_POW_MINUS_QUARTER * x * (-0.5 * x * x).exp();
            assert!((hermite_oracle(1, x) - expected).abs() < 1e-15);
        }
        assert_eq!(hermite_oracle(3, 0.0), 0.0);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let spec = IntegrationSpec::full_line().with_tolerances(1e-13, 1e-13);
        for n in [0u32, 3, 7, 12, 25] {
            let norm = integrate(|x| hermite_oracle(n, x).powi(2), &spec)
                .unwrap()
                .value;
            assert!((norm - 1.0).abs() < 1e-10, "n={n}: {norm}");
        }
        let overlap = integrate(|x| hermite_oracle(3, x) * hermite_oracle(5, x), &spec)
            .unwrap()
            .value;
        assert!(overlap.abs() < 1e-12);
    }

    #[test]
    fn zero_momentum_value() {
        let v = fourier_oracle(&label(0, 1.5), 0.0, &OracleConfig::default()).unwrap();
        // (2π)^{-1/2} √(4/√π) ∫ x e^{−x²/2} dx = (2π)^{-1/2} √(4/√π)
        let expected = FRAC_1_SQRT_2PI * (4.0 / 1.772_453_850_905_516f64).sqrt();
        assert!((v.re - expected).abs() < 1e-9);
        assert!((v.re - 0.599_311).abs() < 1e-6);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn cutoff_doubling_is_invisible() {
        let s = label(2, 2.5);
        let wf = PositionWavefunction::new(s);
        let base = OracleConfig::default();
        let x = default_cutoff(&wf);
        let doubled = OracleConfig {
            x_cutoff: Some(2.0 * x),
            ..base
        };
        for p in [0.0, 0.8, 3.1, 9.5] {
            let a = fourier_oracle_with(&wf, p, &base).unwrap();
            let b = fourier_oracle_with(&wf, p, &doubled).unwrap();
            assert!((a.re - b.re).abs() < 1e-12, "p={p}");
            assert!((a.im - b.im).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn parseval_for_the_oracle() {
        // Tail of |φ|² ~ p^{-(2γ+1)} = p^{-8}; [0, 40] leaves < 1e-10.
        let s = label(1, 3.5);
        let wf = PositionWavefunction::new(s);
        let cfg = OracleConfig::default();
        let spec = IntegrationSpec::interval(0.0, 40.0).with_tolerances(1e-9, 1e-9);
        let half = integrate(
            |p| fourier_oracle_with(&wf, p, &cfg).unwrap().norm_sqr(),
            &spec,
        )
        .unwrap()
        .value;
        assert!((2.0 * half - 1.0).abs() < 1e-7, "{}", 2.0 * half);
    }

    #[test]
    fn gram_matrix_is_identity() {
        let g = gram_matrix(2.5, 5).unwrap();
        for (i, row) in g.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-8, "G[{i}][{j}] = {v}");
                assert_eq!(v, g[j][i]);
            }
        }
        assert!(gram_matrix(2.5, 11).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = OracleConfig {
            samples_per_unit: 8,
            ..OracleConfig::default()
        };
        assert!(fourier_oracle(&label(0, 1.5), 1.0, &bad).is_err());
        let bad = OracleConfig {
            x_cutoff: Some(-1.0),
            ..OracleConfig::default()
        };
        assert!(fourier_oracle(&label(0, 1.5), 1.0, &bad).is_err());
    }
}
