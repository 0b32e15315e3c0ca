//! Deterministic adaptive quadrature on finite intervals, the half-line and
//! the full line.
//!
//! The engine is globally adaptive bisection driven by the 21-point
//! Gauss–Kronrod pair: the panel with the largest error estimate is split
//! until the summed estimate meets the tolerance. Infinite tails are mapped
//! onto [0, 1) by x = s·t/(1 − t), or, when the caller knows the integrand
//! decays like x^(−k), truncated at a cutoff where that decay bounds the
//! remainder below a tenth of the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// [0, ∞)
    HalfLine,
    /// (−∞, ∞)
    FullLine,
    Interval {
        lo: f64,
        hi: f64,
    },
}

/// Everything the engine needs to know about one integration task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSpec {
    pub domain: Domain,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Known algebraic decay rate k of the integrand, |f(x)| ~ |x|^(−k).
    pub tail_exponent_hint: Option<f64>,
    pub max_subdivisions: usize,
    /// Length over which the integrand has its bulk; seeds the tail map and
    /// the cutoff search.
    pub length_scale: f64,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self {
            domain: Domain::HalfLine,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            tail_exponent_hint: None,
            max_subdivisions: 2000,
            length_scale: 1.0,
        }
    }
}

impl IntegrationSpec {
    pub fn half_line() -> Self {
        Self::default()
    }

    pub fn full_line() -> Self {
        Self {
            domain: Domain::FullLine,
            ..Self::default()
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            domain: Domain::Interval { lo, hi },
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_tail_exponent(mut self, k: f64) -> Self {
        self.tail_exponent_hint = Some(k);
        self
    }

    pub fn with_length_scale(mut self, scale: f64) -> Self {
        self.length_scale = scale;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidInput(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.length_scale > 0.0 && self.length_scale.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "length scale must be positive, got {}",
                self.length_scale
            )));
        }
        if let Some(k) = self.tail_exponent_hint {
            if !(k > 1.0) {
                return Err(Error::InvalidInput(format!(
                    "tail exponent hint {k} does not give an integrable tail"
                )));
            }
        }
        if let Domain::Interval { lo, hi } = self.domain {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// How an infinite tail was handled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TailStrategy {
    /// Finite interval; no tail.
    None,
    /// x = s·t/(1 − t) onto [0, 1).
    Transform,
    /// Integrated up to `cutoff`; `remainder_bound` bounds each dropped tail.
    Truncation { cutoff: f64, remainder_bound: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub strategy: TailStrategy,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One application of the 21-point Kronrod rule with its embedded 10-point
/// Gauss rule on [a, b].
#[derive(Debug, Clone, Copy)]
pub struct PanelEstimate {
    pub kronrod: f64,
    pub gauss: f64,
    pub error: f64,
}

pub fn kronrod_panel<F>(f: &mut F, a: f64, b: f64) -> Result<PanelEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = eval(f, center)?;
    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let kronrod_value = kronrod * half;
    let gauss_value = gauss * half;
    let error = rescale_error(
        ((kronrod - gauss) * half).abs(),
        abs_sum * half.abs(),
        asc * half.abs(),
    );
    Ok(PanelEstimate {
        kronrod: kronrod_value,
        gauss: gauss_value,
        error,
    })
}

// QUADPACK's error scaling for the 21-point pair.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[inline]
fn eval<F>(f: &mut F, x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { at: x })
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // Insertion order; breaks ties so the heap order never depends on
    // anything but the inputs.
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Adaptive {
    value: f64,
    error: f64,
    evaluations: usize,
}

/// Globally adaptive bisection over the given initial breakpoints.
fn adaptive<F>(
    f: &mut F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Adaptive>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut seq = 0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let est = kronrod_panel(f, w[0], w[1])?;
        evaluations += 21;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: est.kronrod,
            error: est.error,
            seq,
        });
        seq += 1;
    }

    let totals = |heap: &BinaryHeap<Panel>, settled: &[Panel]| {
        let value: CompensatedSum = heap.iter().chain(settled).map(|p| p.value).collect();
        let error: CompensatedSum = heap.iter().chain(settled).map(|p| p.error).collect();
        (value.value(), error.value())
    };

    let mut panels = heap.len();
    loop {
        let (value, error) = totals(&heap, &settled);
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target || heap.is_empty() {
            return Ok(Adaptive {
                value,
                error,
                evaluations,
            });
        }
        if panels >= max_subdivisions {
            return Err(Error::ToleranceNotMet {
                estimate: value,
                error_estimate: error,
                requested: target,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in double precision.
            settled.push(worst);
            continue;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let est = kronrod_panel(f, a, b)?;
            evaluations += 21;
            heap.push(Panel {
                a,
                b,
                value: est.kronrod,
                error: est.error,
                seq,
            });
            seq += 1;
        }
        panels += 1;
    }
}

/// Integrates a plain real function. Non-finite values are reported with
/// the abscissa at which they occurred.
pub fn integrate<F>(f: F, spec: &IntegrationSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), spec)
}

/// Integrates a fallible integrand; the first error aborts the integration.
pub fn try_integrate<F>(f: F, spec: &IntegrationSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    match spec.domain {
        Domain::Interval { lo, hi } => {
            if lo == hi {
                return Ok(IntegralResult {
                    value: 0.0,
                    error_estimate: 0.0,
                    evaluations: 0,
                    strategy: TailStrategy::None,
                });
            }
            let mut g = |x: f64| f(x);
            let breaks = geometric_breaks(lo, hi, spec.length_scale);
            let r = adaptive(
                &mut g,
                &breaks,
                spec.abs_tol,
                spec.rel_tol,
                spec.max_subdivisions.max(breaks.len()),
            )?;
            Ok(IntegralResult {
                value: r.value,
                error_estimate: r.error,
                evaluations: r.evaluations,
                strategy: TailStrategy::None,
            })
        }
        Domain::HalfLine => half_line(&f, spec),
        Domain::FullLine => {
            // Each half gets half the absolute budget.
            let half_spec = IntegrationSpec {
                abs_tol: 0.5 * spec.abs_tol,
                ..*spec
            };
            let right = half_line(&f, &half_spec)?;
            let left = half_line(&|x: f64| f(-x), &half_spec)?;
            let strategy = match (right.strategy, left.strategy) {
                (
                    TailStrategy::Truncation {
                        cutoff: c1,
                        remainder_bound: r1,
                    },
                    TailStrategy::Truncation {
                        cutoff: c2,
                        remainder_bound: r2,
                    },
                ) => TailStrategy::Truncation {
                    cutoff: c1.max(c2),
                    remainder_bound: r1.max(r2),
                },
                (s, _) => s,
            };
            Ok(IntegralResult {
                value: right.value + left.value,
                error_estimate: right.error_estimate + left.error_estimate,
                evaluations: right.evaluations + left.evaluations,
                strategy,
            })
        }
    }
}

const CUTOFF_LIMIT: f64 = 1e12;

/// lo, lo + s, lo + 2s, lo + 4s, … , hi. Long intervals get panels that
/// widen away from lo, where the integrands here keep their structure.
fn geometric_breaks(lo: f64, hi: f64, s: f64) -> Vec<f64> {
    let mut breaks = vec![lo];
    let mut step = s;
    while lo + 2.0 * step < hi {
        breaks.push(lo + step);
        step *= 2.0;
    }
    breaks.push(hi);
    breaks
}

fn half_line<F>(f: &F, spec: &IntegrationSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let s = spec.length_scale;
    match spec.tail_exponent_hint {
        None => {
            let mut g = |t: f64| {
                let one_minus = 1.0 - t;
                let x = s * t / one_minus;
                Ok(f(x)? * s / (one_minus * one_minus))
            };
            // Finer initial panels near t = 1, where the map stretches.
            let breaks = [0.0, 0.25, 0.5, 0.75, 0.875, 0.9375, 1.0];
            let r = adaptive(
                &mut g,
                &breaks,
                spec.abs_tol,
                spec.rel_tol,
                spec.max_subdivisions,
            )?;
            Ok(IntegralResult {
                value: r.value,
                error_estimate: r.error,
                evaluations: r.evaluations,
                strategy: TailStrategy::Transform,
            })
        }
        Some(k) => {
            let (cutoff, remainder_bound, probes) = find_cutoff(f, s, k, spec.abs_tol)?;
            let breaks = geometric_breaks(0.0, cutoff, s);
            let mut g = |x: f64| f(x);
            let budget = (spec.abs_tol - remainder_bound).max(0.5 * spec.abs_tol);
            let r = adaptive(
                &mut g,
                &breaks,
                budget,
                spec.rel_tol,
                spec.max_subdivisions.max(breaks.len() + 1),
            )?;
            Ok(IntegralResult {
                value: r.value,
                error_estimate: r.error + remainder_bound,
                evaluations: r.evaluations + probes,
                strategy: TailStrategy::Truncation {
                    cutoff,
                    remainder_bound,
                },
            })
        }
    }
}

/// Smallest cutoff X (doubling from 4·scale) for which the algebraic decay
/// |f(x)| ≤ |f(X)|·(X/x)^k bounds ∫_X^∞ |f| below abs_tol/10.
///
/// The bound is sampled on [X, 2X] and the worst sample is used, so a
/// single node of an oscillating integrand cannot fake a small tail. A
/// factor of two covers sub-leading corrections to the power law.
fn find_cutoff<F>(f: &F, scale: f64, k: f64, abs_tol: f64) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    const PROBES: usize = 9;
    let mut x = 4.0 * scale;
    let mut evaluations = 0;
    while x <= CUTOFF_LIMIT {
        let mut bound: f64 = 0.0;
        for j in 0..PROBES {
            let xj = x * 2f64.powf(j as f64 / (PROBES - 1) as f64);
            let v = eval(&mut |t| f(t), xj)?;
            evaluations += 1;
            bound = bound.max(2.0 * v.abs() * xj / (k - 1.0));
        }
        if bound < 0.1 * abs_tol {
            return Ok((x, bound, evaluations));
        }
        x *= 2.0;
    }
    Err(Error::ToleranceNotMet {
        estimate: f64::NAN,
        error_estimate: f64::INFINITY,
        requested: abs_tol,
    })
}

/// Below this a density is treated as exactly zero in −ρ ln ρ.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// −ρ ln ρ with 0·ln 0 := 0. `at` is only used to report a negative density.
pub fn entropy_term(rho: f64, at: f64) -> Result<f64> {
    if rho < 0.0 {
        return Err(Error::NegativeDensity { at, value: rho });
    }
    if rho < DENSITY_FLOOR {
        return Ok(0.0);
    }
    Ok(-rho * rho.ln())
}

/// Wraps a density into the Shannon entropy integrand x ↦ −ρ(x) ln ρ(x).
pub fn entropy_integrand<D>(density: D) -> impl Fn(f64) -> Result<f64>
where
    D: Fn(f64) -> f64,
{
    move |x| entropy_term(density(x), x)
}
