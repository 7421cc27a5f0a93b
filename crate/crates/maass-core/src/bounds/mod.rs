//! Moment bounds from short Dirichlet polynomials over primes.
//!
//! Combinatorial identities, Satake data (computed or random), the
//! coefficients of the twisted `L`-functions, deviation counts and the
//! Chernoff integration that turns counts into a moment bound.

mod chernoff;
mod coefficients;
mod combinatorics;
mod satake;

pub use chernoff::{
    chernoff_moment_bound, deviation_count, deviation_values, dirichlet_moment_check,
    fit_log_exponent, gaussian_identity_check, ChernoffConfig, ChernoffReport, DeviationCount,
    GaussianCheck, MomentCheck, RegimeContribution, XChoice,
};
pub use coefficients::{
    deviation_polynomial, deviation_weights, lambda_coefficient, log_l_upper_bound,
    prime_sum_variance, sym_power_eigenvalue, ExponentTriple, LambdaKind, LogLBound, VarianceValue,
};
pub use combinatorics::{
    binomial, composition_bound, compositions, d_coefficient, d_coefficient_recursive, factorial,
    moment_coefficient_ratio, parity_sum_identity, power_expansion_residual, CompositionBound,
};
pub use satake::{angle_from_eigenvalue, SatakeEntry, SatakeModel, SatakeSpectrum, TwistData};
