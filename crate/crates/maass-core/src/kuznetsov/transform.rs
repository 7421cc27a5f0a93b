//! The Bessel transform `𝒥(x) = 2i ∫_ℝ J_{2it}(x) h(t) t / cosh(πt) dt`.
//!
//! Since `J_{-2it}(x)` is the conjugate of `J_{2it}(x)` for real `x`, an
//! even weight gives `𝒥(x) = -4 ∫_0^∞ Im J_{2it}(x) h(t) t / cosh(πt) dt`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::weights::{h_test, phi_weight, SpectralWindow};
use crate::quad::gauss_legendre;
use crate::specfun::j_bessel_imag_scaled;
use crate::{Error, Result};

/// Value and estimated absolute error of a transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: f64,
    pub error: f64,
    /// `∫ |integrand|`, the scale for relative accuracy.
    pub scale: f64,
}

const RELATIVE_TARGET: f64 = 1e-6;

/// `𝒥` for an even weight supported (to negligible error) in `[t_lo, t_hi]`, `t_lo >= 0`.
pub fn bessel_transform_weighted<F: Fn(f64) -> f64>(
    x: f64,
    weight: F,
    t_lo: f64,
    t_hi: f64,
) -> Result<TransformValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain("Bessel transform needs x > 0"));
    }
    if !(t_hi > t_lo && t_lo >= 0.0) {
        return Err(Error::Domain("Bessel transform needs 0 <= t_lo < t_hi"));
    }
    // Phase speed of J_{2it}(x) in t is about 2 |log(x/(4t))|.
    let speed = 2.0 * (x / (4.0 * t_hi.max(1.0))).ln().abs()
        + 2.0 * (x / (4.0 * t_lo.max(1.0))).ln().abs()
        + 2.0;
    let width = (6.0 / speed).min(0.5);
    let panels = ((t_hi - t_lo) / width).ceil() as usize;
    let (n20, w20) = gauss_legendre(20);
    let (n12, w12) = gauss_legendre(12);
    let h = (t_hi - t_lo) / panels as f64;
    let integrand = |t: f64| -> Result<(f64, f64)> {
        let wt = weight(t);
        if wt == 0.0 {
            return Ok((0.0, 0.0));
        }
        let j = j_bessel_imag_scaled(t, x)?;
        Ok((j.value.im * wt * t, j.error * wt.abs() * t))
    };
    let (mut v20, mut v12, mut scale, mut jerr) = (0.0, 0.0, 0.0, 0.0);
    for p in 0..panels {
        let a = t_lo + h * p as f64;
        for (xi, wi) in n20.iter().zip(&w20) {
            let (g, e) = integrand(a + 0.5 * h * (xi + 1.0))?;
            v20 += 0.5 * h * wi * g;
            scale += 0.5 * h * wi * g.abs();
            jerr += 0.5 * h * wi * e;
        }
        for (xi, wi) in n12.iter().zip(&w12) {
            let (g, _) = integrand(a + 0.5 * h * (xi + 1.0))?;
            v12 += 0.5 * h * wi * g;
        }
    }
    let value = -4.0 * v20;
    let error = 4.0 * ((v20 - v12).abs() + jerr);
    let scale = 4.0 * scale;
    if error > RELATIVE_TARGET * scale.max(value.abs()) && error > 1e-300 {
        return Err(Error::Numerical {
            what: "Bessel transform accuracy not met",
            estimate: error,
        });
    }
    Ok(TransformValue {
        value,
        error,
        scale,
    })
}

/// `𝒥(x)` for `h(t, T, M)`, integrating over `|t| <= T + 12M`.
pub fn bessel_transform(x: f64, tt: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain("Bessel transform needs M > 0"));
    }
    let lo = (tt - 12.0 * m).max(0.0);
    let hi = tt + 12.0 * m;
    Ok(bessel_transform_weighted(x, |t| h_test(t, tt, m).unwrap_or(0.0), lo, hi)?.value)
}

/// `𝒥` for the window weight `Φ_{X,Y,M}`, the `T`-average of `𝒥_T`.
pub fn bessel_transform_phi(x: f64, w: &SpectralWindow) -> Result<TransformValue> {
    let (lo, hi) = w.support();
    bessel_transform_weighted(x, |t| phi_weight(t, w), lo, hi)
}

/// Integrand values at `±t` for the symmetry check: returns
/// `(g(t), g(-t))` with `g(t) = J_{2it}(x) t / cosh(πt)` as complex pairs.
pub fn transform_integrand_pair(x: f64, t: f64) -> Result<Vec<(f64, f64)>> {
    let a = j_bessel_imag_scaled(t, x)?.value * t;
    let b = j_bessel_imag_scaled(-t, x)?.value * (-t);
    Ok(alloc::vec![(a.re, a.im), (b.re, b.im)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflected_integrand_is_minus_conjugate() {
        for &(x, t) in &[(0.5, 3.0), (5.0, 12.5), (20.0, 1.0)] {
            let v = transform_integrand_pair(x, t).unwrap();
            // g(-t) = -conj(g(t)), so 2i (g(t) + g(-t)) is real.
            assert!((v[0].0 + v[1].0).abs() < 1e-12 * (1.0 + v[0].0.abs()));
            assert!((v[0].1 - v[1].1).abs() < 1e-12 * (1.0 + v[0].1.abs()));
        }
    }

    #[test]
    fn small_argument_is_negligible() {
        let (tt, m) = (20.0, 2.0);
        let v = bessel_transform(0.01 * m * tt, tt, m).unwrap();
        assert!(v.abs() < tt.powi(-5), "{v}");
    }
}
