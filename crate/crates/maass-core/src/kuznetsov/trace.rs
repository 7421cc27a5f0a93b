//! Diagonal term, spectral average and the trace-formula harness.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::kloosterman::kloosterman;
use super::transform::bessel_transform_phi;
use super::weights::{h_test, phi_weight, SpectralWindow};
use super::zeta::continuous_weight;
use crate::automorphic::{eta, MaassForm};
use crate::quad::gauss_legendre;
use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, width: f64, order: usize) -> f64 {
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            s += 0.5 * h * wi * f(lo + 0.5 * h * (xi + 1.0));
        }
    }
    s
}

/// `(1/(π^{3/2} M)) ∫_X^{X+Y} ∫_ℝ h(t, T, M) tanh(πt) t dt dT`, by
/// Gauss–Legendre in both variables.
pub fn diagonal_term(w: &SpectralWindow) -> Result<f64> {
    diagonal_with(w, |t| (PI * t).tanh())
}

/// As [`diagonal_term`] with `tanh(πt)` replaced by `shape(t)`.
pub fn diagonal_with<F: Fn(f64) -> f64>(w: &SpectralWindow, shape: F) -> Result<f64> {
    let (xs, ws) = gauss_legendre(24);
    let panels = (w.y / w.m).ceil().max(1.0) as usize;
    let hp = w.y / panels as f64;
    let mut outer = 0.0;
    for p in 0..panels {
        let a = w.x + hp * p as f64;
        for (xi, wi) in xs.iter().zip(&ws) {
            let tt = a + 0.5 * hp * (xi + 1.0);
            // The integrand is even in t; integrate t >= 0 and double.
            let hi = tt + 9.0 * w.m;
            let inner = 2.0
                * composite(
                    |t| h_test(t, tt, w.m).unwrap_or(0.0) * shape(t) * t,
                    0.0,
                    hi,
                    0.5 * w.m,
                    20,
                );
            outer += 0.5 * hp * wi * inner;
        }
    }
    let v = outer / (PI.powf(1.5) * w.m);
    if !v.is_finite() {
        return Err(Error::Numerical {
            what: "diagonal quadrature produced a non-finite value",
            estimate: v,
        });
    }
    Ok(v)
}

/// `(2/π) X Y + (1/π) Y²`.
pub fn diagonal_main_term(w: &SpectralWindow) -> f64 {
    (2.0 / PI) * w.x * w.y + w.y * w.y / PI
}

/// `Σ_j (2π / L(1, sym² u_j)) λ_j(n) Φ(t_j)`.
pub fn spectral_average(
    n: u64,
    w: &SpectralWindow,
    forms: &[MaassForm],
    l_values: &[f64],
) -> Result<f64> {
    if forms.is_empty() {
        return Err(Error::Domain("spectral average needs at least one form"));
    }
    if forms.len() != l_values.len() {
        return Err(Error::Contract("one L-value per form is required"));
    }
    let mut s = 0.0;
    for (f, &l) in forms.iter().zip(l_values) {
        s += 2.0 * PI / l * f.hecke_eigenvalue(n)? * phi_weight(f.t, w);
    }
    Ok(s)
}

/// Both sides of the trace formula aggregated over the window.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub spectral_cusp: f64,
    pub spectral_continuous: f64,
    pub geometric_diagonal: f64,
    pub geometric_kloosterman: f64,
    /// `(cusp + continuous) - (diagonal + kloosterman)`.
    pub mismatch: f64,
    /// Weil-bound estimate of the Kloosterman terms beyond `c_max`.
    pub kloosterman_tail: f64,
    pub c_max: usize,
    pub spectrum_completeness_note: String,
}

/// Expected number of cusp forms (both parities) with `t <= T`.
pub fn weyl_count(tt: f64) -> f64 {
    if tt <= 1.0 {
        return 0.0;
    }
    tt * tt / 12.0
        - (2.0 * tt / PI) * (tt / (core::f64::consts::E * (PI / 2.0).sqrt())).ln()
        - 131.0 / 144.0
}

fn completeness_note(w: &SpectralWindow, forms: &[MaassForm]) -> String {
    let (lo, hi) = w.support();
    let mut ts: Vec<f64> = forms
        .iter()
        .map(|f| f.t)
        .filter(|t| *t >= lo && *t <= hi)
        .collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let expected = weyl_count(hi) - weyl_count(lo);
    let mut note = format!(
        "{} forms with t in [{:.3}, {:.3}]; Weyl law expects about {:.1}",
        ts.len(),
        lo,
        hi,
        expected
    );
    let max_t = forms.iter().map(|f| f.t).fold(0.0, f64::max);
    if max_t < hi {
        note.push_str(&format!("; GAP: no forms supplied above t = {max_t:.3}"));
    }
    // Flag gaps much longer than the mean spacing near their location.
    let mut prev = lo.max(9.0);
    for &t in ts.iter().chain(core::iter::once(&hi.min(max_t))) {
        let mid = 0.5 * (prev + t);
        let density = (weyl_count(mid + 0.5) - weyl_count(mid - 0.5)).max(0.1);
        if (t - prev) * density > 4.0 {
            note.push_str(&format!("; sparse stretch ({prev:.3}, {t:.3})"));
        }
        prev = t;
    }
    note
}

/// Assembles the four pieces of the trace formula for the weight `Φ`.
pub fn trace_check(
    n: u64,
    m: u64,
    w: &SpectralWindow,
    forms: &[MaassForm],
    l_values: &[f64],
    c_max: usize,
) -> Result<TraceReport> {
    if n == 0 || m == 0 {
        return Err(Error::Domain("trace check needs n, m >= 1"));
    }
    if c_max == 0 {
        return Err(Error::Domain("trace check needs c_max >= 1"));
    }
    if forms.len() != l_values.len() {
        return Err(Error::Contract("one L-value per form is required"));
    }
    let mut cusp = 0.0;
    for (f, &l) in forms.iter().zip(l_values) {
        cusp += 2.0 * PI / l * f.hecke_eigenvalue(n)? * f.hecke_eigenvalue(m)? * phi_weight(f.t, w);
    }
    let (_, hi) = w.support();
    let continuous = 2.0
        * composite(
            |t| continuous_weight(t) * phi_weight(t, w) * eta(t, n) * eta(t, m),
            0.0,
            hi,
            0.25,
            20,
        );
    let diagonal = if n == m { diagonal_term(w)? } else { 0.0 };
    let x0 = 4.0 * PI * ((n * m) as f64).sqrt();
    let mut kl = 0.0;
    let mut envelope: f64 = 0.0;
    for c in 1..=c_max {
        let s = kloosterman(n as i64, m as i64, c as i64)?;
        let j = bessel_transform_phi(x0 / c as f64, w)?;
        kl += s / c as f64 * j.value;
        if 2 * c > c_max {
            envelope = envelope.max(j.value.abs() + j.error);
        }
    }
    let cm = c_max as f64;
    let tail = envelope * (2.0 * (cm.ln() + 2.0 * EULER_GAMMA) + 4.0) / cm.sqrt();
    Ok(TraceReport {
        spectral_cusp: cusp,
        spectral_continuous: continuous,
        geometric_diagonal: diagonal,
        geometric_kloosterman: kl,
        mismatch: (cusp + continuous) - (diagonal + kl),
        kloosterman_tail: tail,
        c_max,
        spectrum_completeness_note: completeness_note(w, forms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matches_main_term() {
        let w = SpectralWindow::new(100.0, 50.0, 5.0).unwrap();
        let d = diagonal_term(&w).unwrap();
        assert!((d - diagonal_main_term(&w)).abs() <= 5.0 * w.m * w.y);
        let no_tanh = diagonal_with(&w, |_| 1.0).unwrap();
        assert!((no_tanh - d).abs() < 1e-10 * d);
    }

    #[test]
    fn weyl_count_is_increasing() {
        let mut prev = 0.0;
        for k in 10..100 {
            let v = weyl_count(k as f64);
            assert!(v >= prev);
            prev = v;
        }
    }
}
