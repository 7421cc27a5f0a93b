//! Special functions used throughout the crate.
//!
//! The K-Bessel function is always returned in the scaled form
//! `e^{πt/2} K_{it}(y)`, which stays of moderate size for every `t` and
//! `y` of interest. Exponentially small weights travel as [`LogScaleValue`].

mod gamma;
mod jbessel;

mod kbessel;
mod logscale;

pub use gamma::{log_gamma, log_gamma_real};

pub use jbessel::{j_bessel_imag_miller, j_bessel_imag_scaled, j_bessel_imag_series, JValue};
pub use kbessel::{k_bessel_imag, k_bessel_tail_cutoff, KTable};
pub use logscale::LogScaleValue;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// `n!!` with the conventions `(-1)!! = 0!! = 1`.
///
/// Fails for `n < -1` and when the result does not fit in a `u128`.
pub fn double_factorial(n: i64) -> Result<u128> {
    if n < -1 {
        return Err(Error::Domain("double factorial needs n >= -1"));
    }
    let mut acc: u128 = 1;
    let mut k = n;
    while k > 1 {
        acc = acc
            .checked_mul(k as u128)
            .ok_or(Error::Capacity("double factorial overflows u128"))?;
        k -= 2;
    }
    Ok(acc)
}

/// The additive character `e(x) = exp(2πix)`.
///
/// The argument is reduced modulo 1 first, so large `x` keeps full accuracy.
pub fn additive_character(x: f64) -> Complex64 {
    let frac = x - x.floor();
    // sin/cos of 2π·frac with frac in [0,1); exact at the quarter points.
    let (s, c) = sin_cos_turns(frac);
    Complex64::new(c, s)
}

/// `(sin 2πu, cos 2πu)` with exact values at multiples of 1/4.
pub(crate) fn sin_cos_turns(u: f64) -> (f64, f64) {
    let q = u * 4.0;
    if q == q.floor() {
        return match (q as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    let a = core::f64::consts::TAU * u;
    (a.sin(), a.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), 1);
        assert_eq!(double_factorial(0).unwrap(), 1);
        assert_eq!(double_factorial(5).unwrap(), 15);
        assert_eq!(double_factorial(7).unwrap(), 105);
        assert_eq!(double_factorial(10).unwrap(), 3840);
        assert!(double_factorial(-2).is_err());
    }

    #[test]
    fn additive_character_quarter_points() {
        assert_eq!(additive_character(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(additive_character(0.5), Complex64::new(-1.0, 0.0));
        assert_eq!(additive_character(0.25), Complex64::new(0.0, 1.0));
        assert_eq!(additive_character(-0.75), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn additive_character_unit_modulus() {
        let mut x = 0.123_f64;
        for _ in 0..10_000 {
            x = (x * 9301.0 + 0.49297).rem_euclid(233.0) - 116.0;
            let e = additive_character(x);
            assert!((e.norm() - 1.0).abs() < 1e-15);
        }
    }
}
