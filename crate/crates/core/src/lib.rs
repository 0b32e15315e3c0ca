//! Shannon information entropies, quadrature variances and squeezing
//! diagnostics for the eigenstates of the isotonic oscillator
//! H = −d²/dx² + x² + A/x² on the half-line.
//!
//! Modules, bottom-up:
//!
//! - [`specfun`]: log-Gamma, Pochhammer symbols, Kummer's ₁F₁.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration with tail control.
//! - [`states`]: position and momentum eigenfunctions.
//! - [`oracle`]: independent brute-force cross-checks.
//! - [`observables`]: entropies, variances, BBM and squeezing reports.
//! - [`cli`]: the `isotonic` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod states;

pub use error::{Error, Result};

pub use observables::{
    bbm_report, density_samples, harmonic_ground_entropy, heisenberg_report, momentum_entropy,
    position_entropy, variance_p, variance_x, DensityCurve, EntropyReport, Precision, Space,
    StateAnalysis, UncertaintyReport,
};
pub use states::{ComplexAmplitude, Eigenstate, StateLabel};
