//! The Riemann zeta function on the line `Re s = 1`.

use num_complex::Complex64;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// `B_{2k}/(2k)!` for `k = 1..=12`.
const BERNOULLI_OVER_FACT: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -6.613_756_613_756_614e-10,
    1.592_325_834_325_834_4e-11,
    -3.811_735_278_125_277e-13,
    9.131_355_731_602_254e-15,
    -2.187_690_738_539_129e-16,
    5.241_448_434_093_89e-18,
    -1.255_729_784_017_612_4e-19,
];

/// `(s - 1) ζ(s)` by Euler–Maclaurin with `n_direct` direct terms and
/// `k_terms` Bernoulli corrections. The product is entire, so the pole at
/// `s = 1` causes no cancellation.
pub(crate) fn zeta_times_pole(s: Complex64, n_direct: usize, k_terms: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let sm1 = s - one;
    let nf = n_direct as f64;
    let ln_n = nf.ln();
    let mut head = Complex64::new(0.0, 0.0);
    for n in 1..n_direct {
        head += (-s * (n as f64).ln()).exp();
    }
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    let mut tail = n_pow * 0.5;
    // B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut rising = s;
    let mut npow = n_pow / nf;
    for k in 0..k_terms.min(BERNOULLI_OVER_FACT.len()) {
        tail += rising * npow * BERNOULLI_OVER_FACT[k];
        rising = rising * (s + (2 * k + 1) as f64) * (s + (2 * k + 2) as f64);
        npow /= nf * nf;
    }
    // N^{1-s}/(s-1) times (s-1) is N^{1-s}.
    (head + tail) * sm1 + n_pow * nf
}

fn direct_terms(t: f64) -> usize {
    (2.0 * t.abs()).ceil() as usize + 20
}

/// `ζ(1 + 2it)`, accurate to about `1e-13` relative.
///
/// Fails for `|t| <= 0.01`, where the pole dominates; use
/// [`continuous_weight`] there.
pub fn zeta_one_line(t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::Domain("zeta argument must be finite"));
    }
    if t.abs() <= 0.01 {
        return Err(Error::Domain("zeta on the 1-line needs |t| > 0.01"));
    }
    let s = Complex64::new(1.0, 2.0 * t);
    Ok(zeta_times_pole(s, direct_terms(t), 12) / Complex64::new(0.0, 2.0 * t))
}

/// `1/|ζ(1 + 2it)|²`, extended continuously by `0` at `t = 0`.
pub fn continuous_weight(t: f64) -> f64 {
    let s = Complex64::new(1.0, 2.0 * t);
    let p = zeta_times_pole(s, direct_terms(t), 12);
    4.0 * t * t / p.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath, 30 digits.
    const REFERENCE: [(f64, f64, f64); 8] = [
        (0.02, 0.577_223_417_440_128, -24.997087344273762),
        (0.5, 0.582_158_059_752_003_6, -0.926_848_564_330_807_1),
        (1.0, 0.598_165_569_762_381_8, -0.35185474521784529),
        (3.5, 1.026_032_239_112_865, 0.303627757730839),
        (7.0, 0.33328811436390117, -0.03067812432056665),
        (20.0, 0.849_795_479_246_806_8, -0.491_776_286_460_718_7),
        (35.0, 0.741_614_373_976_579_8, 0.425_382_163_668_728),
        (60.0, 1.5516529576358822, -0.503_928_137_319_443_2),
    ];

    #[test]
    fn matches_reference_values() {
        for &(t, re, im) in &REFERENCE {
            let z = zeta_one_line(t).unwrap();
            let want = Complex64::new(re, im);
            assert!(
                (z - want).norm() < 1e-12 * want.norm(),
                "t={t}: {z} vs {want}"
            );
        }
    }

    #[test]
    fn agrees_with_a_differently_truncated_evaluator() {
        for k in 1..200 {
            let t = 0.05 * k as f64 + 0.013;
            let s = Complex64::new(1.0, 2.0 * t);
            let a = zeta_one_line(t).unwrap();
            let b = zeta_times_pole(s, 3 * direct_terms(t) + 7, 6) / Complex64::new(0.0, 2.0 * t);
            assert!((a - b).norm() < 1e-10 * a.norm(), "t={t}");
        }
    }

    #[test]
    fn conjugate_symmetry_and_weight() {
        let a = zeta_one_line(7.0).unwrap();
        let b = zeta_one_line(-7.0).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
        assert!(a.norm_sqr() > 0.0);
        assert_eq!(continuous_weight(0.0), 0.0);
        let w = continuous_weight(1e-3);
        assert!((w - 4e-6).abs() < 1e-8, "{w}");
        assert!(zeta_one_line(0.005).is_err());
    }
}
