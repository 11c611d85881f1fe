//! Support size estimation for discrete distributions.
//!
//! The crate is organised around the fingerprint (counts of counts) of a sample:
//!
//! - [`ingest`] turns token streams or fingerprint files into [`Histogram`]s and
//!   [`Fingerprint`]s.
//! - [`chebyshev`] builds the shifted Chebyshev polynomial `P_L` on `[l, r]` with
//!   `P_L(0) = -1` and the estimator weights `g_L(j)` derived from its coefficients.
//! - [`estimators`] evaluates the Chebyshev linear estimator and the classical
//!   baselines (plug-in, Good-Turing coverage, Chao-Lee, Efron-Thisted, Good-Toulmin).
//! - [`synth`] provides the synthetic families and seeded samplers used for simulation.
//! - [`theory`] is a numerical laboratory for the minimax lower-bound machinery: best
//!   uniform approximation of `1/x`, moment-matched priors and total variation between
//!   Poisson mixtures.
//!
//! The numerical core is generic over the floating point type through [`Scalar`];
//! the `*64` / `*32` aliases below fix the common choices. Coefficient tables are
//! computed in exact rational arithmetic and rounded once at the end.
//!
//! `k` throughout is the reciprocal of the minimum nonzero probability mass, not the
//! true support size.

pub mod chebyshev;
pub mod error;
pub mod estimators;
pub mod ingest;
pub mod scalar;
pub mod synth;
pub mod theory;

pub use chebyshev::{
    cheb_derivatives, cheb_eval, g_table, poly_eval, poly_eval_direct, shifted_coeffs,
    CoefficientTable,
};
pub use error::{Error, Result};
pub use estimators::{
    chao_lee, degree_params, efron_thisted, estimate, good_toulmin, good_turing, plug_in, wy_estimate,
    ChaoLeeVariant, DegreeParams, Estimate, EstimatorConfig, EstimatorKind,
};
pub use ingest::{
    build_histogram, fingerprint_of, read_fingerprint_file, resample, tokenize,
    write_fingerprint_file, CensoredTail, Fingerprint, Histogram, ResampleUnit, SymbolId,
    TokenCounter, TokenizerConfig,
};
pub use scalar::Scalar;
pub use synth::DiscreteDistribution;

pub type CoefficientTable64 = CoefficientTable<f64>;
pub type CoefficientTable32 = CoefficientTable<f32>;
pub type Estimate64 = Estimate<f64>;
pub type Estimate32 = Estimate<f32>;
pub type EstimatorConfig64 = EstimatorConfig<f64>;
pub type EstimatorConfig32 = EstimatorConfig<f32>;
pub type DegreeParams64 = DegreeParams<f64>;
