//! The Kuznetsov trace formula apparatus: Kloosterman sums, the averaging
//! weights `h(t, T, M)` and `Φ_{X,Y,M}`, the Bessel transform, zeta on the
//! 1-line, and harnesses for the trace identity and the spectral average.
//!
//! Normalisation: with `w_j = 2π / L(1, sym² u_j)`,
//!
//! ```text
//! Σ_j w_j λ_j(n) λ_j(m) h(t_j) + ∫_ℝ h(t) η_t(n) η_t(m) / |ζ(1+2it)|² dt
//!   = δ(n,m)/π ∫_ℝ h(t) t tanh(πt) dt + Σ_{c≥1} S(n,m;c)/c 𝒥(4π√(nm)/c).
//! ```

mod kloosterman;
mod trace;
mod transform;
mod weights;
mod zeta;

pub use kloosterman::{kloosterman, kloosterman_block, kloosterman_row};
pub use trace::{
    diagonal_main_term, diagonal_term, diagonal_with, spectral_average, trace_check, weyl_count,
    TraceReport,
};
pub use transform::{
    bessel_transform, bessel_transform_phi, bessel_transform_weighted, transform_integrand_pair,
    TransformValue,
};
pub use weights::{h_test, phi_regime, phi_weight, PhiRegime, PhiRegimeCheck, SpectralWindow};
pub(crate) use zeta::zeta_times_pole;
pub use zeta::{continuous_weight, zeta_one_line};
