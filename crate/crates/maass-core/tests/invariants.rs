//! Cross-module invariants checked on random inputs.

use maass_core::archimedean::{q1_direct, q1_piecewise, q_direct, q_piecewise};
use maass_core::bounds::{
    deviation_count, gaussian_identity_check, ExponentTriple, SatakeModel, SatakeSpectrum,
    TwistData,
};
use maass_core::domain::{reduce_to_fundamental, HalfPlanePoint};
use maass_core::kuznetsov::{
    kloosterman, kloosterman_block, phi_regime, phi_weight, SpectralWindow,
};
use maass_core::primes::{divisor_count, gcd};
use maass_core::specfun::log_gamma_real;
use proptest::prelude::*;

fn window() -> impl Strategy<Value = SpectralWindow> {
    (20.0f64..5000.0, 0.1f64..1.0, 0.0f64..1.0).prop_map(|(x, yf, mf)| {
        let y = yf * x;
        let m_hi = y / x.ln();
        let m = if m_hi <= 1.0 {
            1.0
        } else {
            1.0 + mf * (m_hi - 1.0)
        };
        let y = y.max(x.ln());
        SpectralWindow::new(x, y.min(x), m).expect("window in range")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exponent_forms_agree(tj in 0.01f64..400.0, u in 0.01f64..200.0, v in 0.01f64..200.0, tk in 0.01f64..400.0) {
        let (tf, tg) = (u.min(v), u.max(v));
        prop_assert!(q_piecewise(tj, tg + 1.0, tg).is_err());
        let q = q_piecewise(tj, tf, tg).unwrap();
        prop_assert!((q - q_direct(tj, tf, tg)).abs() <= 1e-12 * (1.0 + q.abs()));
        let q1 = q1_piecewise(tj, tf, tg, tk).unwrap();
        prop_assert!((q1 - q1_direct(tj, tf, tg, tk)).abs() <= 1e-12 * (1.0 + q1.abs()));
    }

    #[test]
    fn reduction_lands_in_the_domain(x in -50.0f64..50.0, y in 1e-3f64..10.0) {
        let z = HalfPlanePoint::new(x, y).unwrap();
        let (w, g) = reduce_to_fundamental(z).unwrap();
        prop_assert!(w.in_fundamental_domain(1e-9));
        prop_assert!(g.act(z).distance(w) < 1e-9 * (1.0 + w.y));
        // Translates of z reduce to the same point.
        let (w2, _) = reduce_to_fundamental(HalfPlanePoint::new(x + 3.0, y).unwrap()).unwrap();
        prop_assert!(w2.distance(w) < 1e-8);
    }

    #[test]
    fn kloosterman_block_invariants(c in 1usize..400) {
        let n = 6;
        let block = kloosterman_block(n, c);
        let weil = divisor_count(c as u64) as f64 * (c as f64).sqrt();
        for m in 1..=n {
            for k in 1..=n {
                let s = block[(m - 1) * n + k - 1];
                prop_assert!((s - block[(k - 1) * n + m - 1]).abs() < 1e-9);
                let g = gcd(gcd(m as u64, k as u64), c as u64) as f64;
                prop_assert!(s.abs() <= weil * g.sqrt() + 1e-9);
                let shifted = kloosterman((m + c) as i64, k as i64, c as i64).unwrap();
                prop_assert!((s - shifted).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn phi_weight_is_a_smoothed_indicator(w in window(), u in -0.5f64..1.5) {
        let t = w.x + u * w.y;
        let phi = phi_weight(t, &w);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&phi));
        prop_assert!((phi - phi_weight(-t, &w)).abs() < 1e-12);
        prop_assert!(phi_regime(t, &w).holds());
    }

    #[test]
    fn gaussian_identity_for_random_sigma(sigma in 0.3f64..6.0) {
        prop_assert!(gaussian_identity_check(sigma).unwrap().relative_error < 1e-8);
    }

    #[test]
    fn log_gamma_recurrence(x in 0.1f64..200.0) {
        let lhs = log_gamma_real(x + 1.0).unwrap();
        let rhs = log_gamma_real(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn deviation_count_is_monotone(seed in 0u64..1000, v1 in -2.0f64..4.0, dv in 0.0f64..3.0) {
        let w = SpectralWindow::new(200.0, 100.0, 5.0).unwrap();
        let s = SatakeSpectrum::synthetic(SatakeModel::SatoTate, 200, (200.0, 300.0), 200, seed).unwrap();
        let tw = TwistData::synthetic(SatakeModel::SatoTate, 10.0, 20.0, 200, seed).unwrap();
        let e = ExponentTriple::new(1.0, 1.0, 1.0).unwrap();
        let lo = deviation_count(&s, &tw, &e, v1, &w, 200.0).unwrap();
        let hi = deviation_count(&s, &tw, &e, v1 + dv, &w, 200.0).unwrap();
        prop_assert!(hi.count <= lo.count);
        prop_assert!(lo.count <= 200.0);
    }
}
