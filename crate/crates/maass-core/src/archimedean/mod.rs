//! Archimedean exponents and Stirling weights.
//!
//! `Q` and `Q1` are piecewise linear in `t_j`; each has a direct
//! absolute-value form and a case table, and the two must agree. The weight
//! `H` is a ratio of gamma factors, evaluated in log scale.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::automorphic::Parity;
use crate::specfun::{log_gamma, LogScaleValue};
use crate::{Error, Result};

/// `|t_f + t_j/2| + |t_f - t_j/2| + |t_g + t_j/2| + |t_g - t_j/2| - 2t_f - 2t_g`.
pub fn q_direct(tj: f64, tf: f64, tg: f64) -> f64 {
    let h = 0.5 * tj;
    (tf + h).abs() + (tf - h).abs() + (tg + h).abs() + (tg - h).abs() - 2.0 * tf - 2.0 * tg
}

/// Case table for `Q`; needs `0 <= t_f <= t_g`. `t_j` is folded to `|t_j|`.
pub fn q_piecewise(tj: f64, tf: f64, tg: f64) -> Result<f64> {
    if tf > tg {
        return Err(Error::Contract("q_piecewise needs t_f <= t_g"));
    }
    if tf < 0.0 {
        return Err(Error::Domain("q_piecewise needs t_f >= 0"));
    }
    let tj = tj.abs();
    Ok(if tj <= 2.0 * tf {
        0.0
    } else if tj <= 2.0 * tg {
        tj - 2.0 * tf
    } else {
        2.0 * tj - 2.0 * tf - 2.0 * tg
    })
}

/// `|t_f + t_j/2| + |t_f - t_j/2|
///  + (|t_j+t_g+t_k| + |t_j+t_g-t_k| + |t_j-t_g+t_k| + |t_j-t_g-t_k|)/2
///  - t_j - 2t_f - t_k - t_g`.
pub fn q1_direct(tj: f64, tf: f64, tg: f64, tk: f64) -> f64 {
    let h = 0.5 * tj;
    let first = (tf + h).abs() + (tf - h).abs();
    let second = 0.5
        * ((tj + tg + tk).abs()
            + (tj + tg - tk).abs()
            + (tj - tg + tk).abs()
            + (tj - tg - tk).abs());
    first + second - tj - 2.0 * tf - tk - tg
}

/// Case tables for `Q1`, selected by the position of `2t_f` relative to
/// `d = |t_g - t_k|` and `s = t_g + t_k`. Rows are half-open with the upper
/// endpoint included.
pub fn q1_piecewise(tj: f64, tf: f64, tg: f64, tk: f64) -> Result<f64> {
    if tj < 0.0 || tk < 0.0 || !(tf > 0.0) || !(tg > 0.0) {
        return Err(Error::Domain(
            "q1_piecewise needs t_j, t_k >= 0 and t_f, t_g > 0",
        ));
    }
    let f2 = 2.0 * tf;
    let d = (tg - tk).abs();
    let s = tg + tk;
    let v = if f2 <= d {
        if tj <= f2 {
            d - tj
        } else if tj <= d {
            d - f2
        } else if tj <= s {
            tj - f2
        } else {
            2.0 * tj - f2 - s
        }
    } else if f2 <= s {
        if tj <= d {
            d - tj
        } else if tj <= f2 {
            0.0
        } else if tj <= s {
            tj - f2
        } else {
            2.0 * tj - f2 - s
        }
    } else if tj <= d {
        d - tj
    } else if tj <= s {
        0.0
    } else if tj <= f2 {
        tj - s
    } else {
        2.0 * tj - f2 - s
    };
    Ok(v)
}

/// `ln |Γ_R(1/2 + i τ)|`-style helper: `Re ln Γ_R(σ + iτ)` with
/// `Γ_R(s) = π^{-s/2} Γ(s/2)`.
fn ln_gamma_r(sigma: f64, tau: f64) -> Result<f64> {
    let lg = log_gamma(Complex64::new(0.5 * sigma, 0.5 * tau))?;
    Ok(-0.5 * sigma * PI.ln() + lg.re)
}

/// `ln L_∞(σ, ·)` for a list of imaginary shifts.
fn ln_factor(sigma: f64, shifts: &[f64]) -> Result<f64> {
    shifts.iter().map(|&s| ln_gamma_r(sigma, s)).sum()
}

/// `H(t_j; t_f, t_g)` for an even form `u_j`:
///
/// ```text
/// L_∞(1/2, u_j) L_∞(1/2, sym²f × u_j)^{1/2} L_∞(1/2, sym²g × u_j)^{1/2}
///   / (L_∞(1, sym²f) L_∞(1, sym²g) L_∞(1, sym²u_j))
/// ```
///
/// with `L_∞(s, u_j) = Γ_R(s ± it_j)`, `L_∞(s, sym²f) = Γ_R(s)Γ_R(s ± 2it_f)`
/// and `L_∞(s, sym²f × u_j)` the product of `Γ_R(s + i(±2t_f ± t_j))` and
/// `Γ_R(s ± it_j)`. Every factor comes in conjugate pairs, so `H > 0`.
pub fn h_weight_log(tj: f64, tf: f64, tg: f64) -> Result<LogScaleValue> {
    if !(tj != 0.0) || !tj.is_finite() {
        return Err(Error::Domain("h_weight_log needs t_j != 0"));
    }
    let uj = ln_factor(0.5, &[tj, -tj])?;
    let sym_f_uj = ln_factor(
        0.5,
        &[
            2.0 * tf + tj,
            2.0 * tf - tj,
            -2.0 * tf + tj,
            -2.0 * tf - tj,
            tj,
            -tj,
        ],
    )?;
    let sym_g_uj = ln_factor(
        0.5,
        &[
            2.0 * tg + tj,
            2.0 * tg - tj,
            -2.0 * tg + tj,
            -2.0 * tg - tj,
            tj,
            -tj,
        ],
    )?;
    let sym_f = ln_factor(1.0, &[0.0, 2.0 * tf, -2.0 * tf])?;
    let sym_g = ln_factor(1.0, &[0.0, 2.0 * tg, -2.0 * tg])?;
    let sym_uj = ln_factor(1.0, &[0.0, 2.0 * tj, -2.0 * tj])?;
    Ok(LogScaleValue::from_log(
        uj + 0.5 * sym_f_uj + 0.5 * sym_g_uj - sym_f - sym_g - sym_uj,
    ))
}

/// As [`h_weight_log`], refusing odd `u_j`, whose gamma factors carry an
/// extra shift that the exponent tables do not cover.
pub fn h_weight_log_for(parity: Parity, tj: f64, tf: f64, tg: f64) -> Result<LogScaleValue> {
    match parity {
        Parity::Even => h_weight_log(tj, tf, tg),
        Parity::Odd => Err(Error::Domain("h_weight_log covers even u_j only")),
    }
}

/// `ln H + (π/2) Q + (1/4) Σ± ln(1 + |t_j ± 2t_f|) + (1/4) Σ± ln(1 + |t_j ± 2t_g|) + ln |t_j|`,
/// which stays bounded if the envelope is right.
pub fn h_envelope_residual(tj: f64, tf: f64, tg: f64) -> Result<f64> {
    let lh = h_weight_log(tj, tf, tg)?.log_magnitude;
    let alg = 0.25
        * ((1.0 + (tj + 2.0 * tf).abs()).ln()
            + (1.0 + (tj - 2.0 * tf).abs()).ln()
            + (1.0 + (tj + 2.0 * tg).abs()).ln()
            + (1.0 + (tj - 2.0 * tg).abs()).ln());
    Ok(lh + 0.5 * PI * q_direct(tj, tf, tg) + alg + tj.abs().ln())
}

/// Width of the band that [`h_envelope_residual`] must stay in.
pub const ENVELOPE_BAND: f64 = 8.0;

/// `exp(-(π/2)(|t_f + t_g/2| + |t_f - t_g/2| - 2t_f)) / (t_g^{1/2} ∏± (1 + |t_g ± 2t_f|)^{1/4})`.
pub fn watson_envelope_f2g(tf: f64, tg: f64) -> Result<LogScaleValue> {
    if !(tf > 0.0 && tg > 0.0) {
        return Err(Error::Domain("watson envelope needs t_f, t_g > 0"));
    }
    let expo = (tf + 0.5 * tg).abs() + (tf - 0.5 * tg).abs() - 2.0 * tf;
    let den = 0.5 * tg.ln()
        + 0.25 * ((1.0 + (tg + 2.0 * tf).abs()).ln() + (1.0 + (tg - 2.0 * tf).abs()).ln());
    Ok(LogScaleValue::from_log(-0.5 * PI * expo - den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn q_examples() {
        assert_eq!(q_direct(0.0, 5.0, 7.0), 0.0);
        assert_eq!(q_direct(12.0, 5.0, 7.0), 2.0);
        assert_eq!(q_direct(20.0, 5.0, 7.0), 16.0);
        assert_eq!(q_piecewise(8.0, 5.0, 7.0).unwrap(), 0.0);
        assert_eq!(q_piecewise(12.0, 5.0, 7.0).unwrap(), 2.0);
        assert_eq!(q_piecewise(20.0, 5.0, 7.0).unwrap(), 16.0);
        assert!(matches!(
            q_piecewise(1.0, 8.0, 7.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn q1_examples() {
        assert_eq!(q1_direct(10.0, 3.0, 20.0, 2.0), 12.0);
        assert_eq!(q1_direct(19.0, 10.0, 20.0, 2.0), 0.0);
        assert_eq!(q1_direct(30.0, 12.0, 20.0, 2.0), 14.0);
        assert_eq!(q1_piecewise(1.0, 3.0, 20.0, 2.0).unwrap(), 17.0);
        assert_eq!(q1_piecewise(21.0, 3.0, 20.0, 2.0).unwrap(), 15.0);
        assert_eq!(q1_piecewise(25.0, 3.0, 20.0, 2.0).unwrap(), 22.0);
    }

    #[test]
    fn h_is_even_in_tj() {
        let a = h_weight_log(7.3, 5.0, 9.0).unwrap();
        let b = h_weight_log(-7.3, 5.0, 9.0).unwrap();
        assert!((a.log_magnitude - b.log_magnitude).abs() < 1e-12);
        assert!(h_weight_log_for(Parity::Odd, 1.0, 2.0, 3.0).is_err());
    }

    #[test]
    fn h_matches_reflection_recursion_oracle() {
        // Second path for ln|Γ(1/4 + iτ/2)| etc.: Γ(z) = Γ(z+n)/(z(z+1)...(z+n-1))
        // with Γ(z+n) from the reflection formula at 1 - (z+n).
        fn ln_abs_gamma(z: Complex64) -> f64 {
            let n = 12;
            let mut w = z;
            let mut acc = 0.0;
            for _ in 0..n {
                acc -= w.norm().ln();
                w += 1.0;
            }
            // ln|Γ(w)| = ln π - ln|sin πw| - ln|Γ(1-w)|, and Γ(1-w) via Stirling
            // after shifting 1-w right again.
            let v = Complex64::new(1.0, 0.0) - w;
            let mut u = v;
            let mut acc2 = 0.0;
            while u.re < 15.0 {
                acc2 -= u.norm().ln();
                u += 1.0;
            }
            let st = (u - 0.5) * u.ln() - u + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * u)
                - 1.0 / (360.0 * u * u * u)
                + 1.0 / (1260.0 * u.powi(5));
            let ln_g_v = st.re + acc2;
            let s = (w * PI).sin();
            acc + PI.ln() - s.norm().ln() - ln_g_v
        }
        let (tj, tf, tg) = (20.0, 10.0, 10.0);
        let lgr = |sigma: f64, tau: f64| {
            -0.5 * sigma * PI.ln() + ln_abs_gamma(Complex64::new(0.5 * sigma, 0.5 * tau))
        };
        let f = |sigma: f64, sh: &[f64]| sh.iter().map(|&s| lgr(sigma, s)).sum::<f64>();
        let want = f(0.5, &[tj, -tj])
            + 0.5
                * f(
                    0.5,
                    &[
                        2.0 * tf + tj,
                        2.0 * tf - tj,
                        -2.0 * tf + tj,
                        -2.0 * tf - tj,
                        tj,
                        -tj,
                    ],
                )
            + 0.5
                * f(
                    0.5,
                    &[
                        2.0 * tg + tj,
                        2.0 * tg - tj,
                        -2.0 * tg + tj,
                        -2.0 * tg - tj,
                        tj,
                        -tj,
                    ],
                )
            - f(1.0, &[0.0, 2.0 * tf, -2.0 * tf])
            - f(1.0, &[0.0, 2.0 * tg, -2.0 * tg])
            - f(1.0, &[0.0, 2.0 * tj, -2.0 * tj]);
        let got = h_weight_log(tj, tf, tg).unwrap().log_magnitude;
        assert!(got.is_finite());
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn watson_examples() {
        let tf = 6.0;
        let e = watson_envelope_f2g(tf, 2.0 * tf).unwrap();
        let want = -0.5 * (2.0 * tf).ln() - 0.25 * (1.0 + 4.0 * tf).ln();
        assert!((e.log_magnitude - want).abs() < 1e-13);
        let e2 = watson_envelope_f2g(tf, 2.0 * tf + 4.0).unwrap();
        let tg: f64 = 2.0 * tf + 4.0;
        let alg = -0.5 * tg.ln() - 0.25 * ((1.0 + tg + 2.0 * tf).ln() + (1.0f64 + 4.0).ln());
        assert!((e2.log_magnitude - (-2.0 * PI + alg)).abs() < 1e-12);
        let e3 = watson_envelope_f2g(tf, tf).unwrap();
        let alg3 = -0.5 * tf.ln() - 0.25 * ((1.0 + 3.0 * tf).ln() + (1.0 + tf).ln());
        assert!((e3.log_magnitude - alg3).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn q_tables_agree(tj in 0.0f64..100.0, a in 0.0f64..40.0, b in 0.0f64..40.0) {
            let (tf, tg) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!((q_piecewise(tj, tf, tg).unwrap() - q_direct(tj, tf, tg)).abs() <= 1e-12);
        }

        #[test]
        fn q1_tables_agree(tj in 0.0f64..100.0, tf in 0.01f64..40.0, tg in 0.01f64..40.0, tk in 0.0f64..40.0) {
            prop_assert!((q1_piecewise(tj, tf, tg, tk).unwrap() - q1_direct(tj, tf, tg, tk)).abs() <= 1e-12);
            prop_assert!(q1_direct(tj, tf, tg, tk) >= -1e-12);
        }
    }
}

#[cfg(test)]
mod sweeps {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_tables_agree_on_many_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let tj = rng.gen_range(0.0..120.0);
            let a: f64 = rng.gen_range(0.0..50.0);
            let b: f64 = rng.gen_range(0.0..50.0);
            let (tf, tg) = (a.min(b), a.max(b));
            assert!((q_piecewise(tj, tf, tg).unwrap() - q_direct(tj, tf, tg)).abs() <= 1e-12);
        }
    }

    #[test]
    fn q1_tables_agree_on_many_samples_and_breakpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 0..100_000 {
            let tf: f64 = rng.gen_range(0.05..40.0);
            let tg: f64 = rng.gen_range(0.05..40.0);
            let tk: f64 = rng.gen_range(0.0..40.0);
            let tj = match i % 5 {
                0 => 2.0 * tf,
                1 => (tg - tk).abs(),
                2 => tg + tk,
                _ => rng.gen_range(0.0..120.0),
            };
            let d = q1_direct(tj, tf, tg, tk);
            assert!(
                (q1_piecewise(tj, tf, tg, tk).unwrap() - d).abs() <= 1e-12,
                "{tj} {tf} {tg} {tk}"
            );
            assert!(d >= -1e-12);
        }
    }

    #[test]
    fn slopes_are_in_allowed_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = 1e-4;
        let allowed = [-1.0, 0.0, 1.0, 2.0];
        for _ in 0..20_000 {
            let tf: f64 = rng.gen_range(0.5..30.0);
            let tg: f64 = rng.gen_range(tf..40.0);
            let tk: f64 = rng.gen_range(0.0..30.0);
            let tj: f64 = rng.gen_range(0.01..100.0);
            let bps = [2.0 * tf, 2.0 * tg, (tg - tk).abs(), tg + tk];
            if bps.iter().any(|b| (tj - b).abs() < 2.0 * h) {
                continue;
            }
            let s = (q_direct(tj + h, tf, tg) - q_direct(tj - h, tf, tg)) / (2.0 * h);
            assert!(allowed.iter().any(|a| (s - a).abs() < 1e-6), "Q slope {s}");
            let s1 = (q1_direct(tj + h, tf, tg, tk) - q1_direct(tj - h, tf, tg, tk)) / (2.0 * h);
            assert!(
                allowed.iter().any(|a| (s1 - a).abs() < 1e-6),
                "Q1 slope {s1}"
            );
        }
    }

    #[test]
    fn h_envelope_combination_is_bounded() {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=14 {
            let tf = 5.0 + 2.5 * i as f64;
            for k in 0..=14 {
                let tg = 5.0 + 2.5 * k as f64;
                for m in 0..=200 {
                    let tj = 0.5 + 0.4975 * m as f64;
                    let r = h_envelope_residual(tj, tf, tg).unwrap();
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
            }
        }
        std::println!("envelope residual range [{lo}, {hi}]");
        assert!(lo > -ENVELOPE_BAND && hi < ENVELOPE_BAND, "[{lo}, {hi}]");
    }
}
