//! The real-valued completed Eisenstein series.
//!
//! With `ξ(s) = π^{-s/2} Γ(s/2) ζ(s)` and `θ = arg ξ(1 + 2it)` we evaluate
//!
//! ```text
//! E*_t(z) = ξ(1+2it) E(z, 1/2+it) / |ξ(1+2it)|
//!         = 2√y cos(t log y + θ)
//!           + 4 √(cosh πt) e^{-πt/2} / |ζ(1+2it)| · √y Σ_{n≥1} η_t(n) K̃(2πny) cos(2πnx),
//! ```
//!
//! where `η_t(n) = Σ_{ad=n} (a/d)^{it}`. `E*_t` is real, even in `t` and
//! vanishes at `t = 0`; `|⟨F, E_t⟩|² = |⟨F, E*_t⟩|²` for real `F`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Parity, TAIL_EPS, Y_MIN_DOMAIN};
use crate::domain::{reduce_to_fundamental, HalfPlanePoint, QuadratureGrid};
use crate::kuznetsov::zeta_times_pole;
use crate::primes::divisors;
use crate::specfun::{k_bessel_imag, k_bessel_tail_cutoff, log_gamma, KTable};
use crate::{Error, Result};

fn zeta_pole_product(t: f64) -> Complex64 {
    zeta_times_pole(
        Complex64::new(1.0, 2.0 * t),
        (2.0 * t.abs()).ceil() as usize + 20,
        12,
    )
}

/// `θ(t) = arg ξ(1 + 2it) = -t log π + arg Γ(1/2 + it) + arg ζ(1 + 2it)`.
pub fn completed_phase(t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Domain("phase of ξ(1+2it) is undefined at t = 0"));
    }
    let lg = log_gamma(Complex64::new(0.5, t))?;
    // ζ(1+2it) = P(t)/(2it)
    let p = zeta_pole_product(t);
    let arg_zeta = p.arg() - core::f64::consts::FRAC_PI_2 * t.signum();
    Ok(-t * PI.ln() + lg.im + arg_zeta)
}

/// `φ(1/2 + it) = ξ(2it)/ξ(1 + 2it) = e^{-2iθ}` by the functional equation.
pub fn scattering_coefficient(t: f64) -> Result<Complex64> {
    let th = completed_phase(t)?;
    Ok(Complex64::new((2.0 * th).cos(), -(2.0 * th).sin()))
}

/// `η_t(n) = Σ_{ad=n} (a/d)^{it}` (real).
pub fn eta(t: f64, n: u64) -> f64 {
    divisors(n)
        .iter()
        .map(|&a| (t * ((a * a) as f64 / n as f64).ln()).cos())
        .sum()
}

/// Evaluates `E*_t`, see the module documentation.
#[derive(Debug, Clone)]
pub struct EisensteinEvaluator {
    pub t: f64,
    /// Number of Fourier terms kept.
    pub truncation: usize,
    theta: f64,
    coef: f64,
    eta: Vec<f64>,
    x_cut: f64,
    y_min: f64,
    table: Option<KTable>,
}

impl EisensteinEvaluator {
    /// Evaluator for points of the fundamental domain, direct K-Bessel calls.
    pub fn new(t: f64) -> Result<Self> {
        Self::build(t, Y_MIN_DOMAIN, false)
    }

    /// Evaluator for heights `y >= y_min`, with a tabulated K-Bessel.
    pub fn tabulated(t: f64, y_min: f64) -> Result<Self> {
        Self::build(t, y_min, true)
    }

    fn build(t: f64, y_min: f64, table: bool) -> Result<Self> {
        if !t.is_finite() || !(y_min > 0.0) {
            return Err(Error::Domain(
                "Eisenstein evaluator needs finite t and y_min > 0",
            ));
        }
        let t = t.abs();
        let x_cut = k_bessel_tail_cutoff(t, TAIL_EPS)?;
        let truncation = (x_cut / (2.0 * PI * y_min)).ceil() as usize;
        let (theta, coef) = if t == 0.0 {
            (0.0, 0.0)
        } else {
            let p = zeta_pole_product(t);
            // 4 √cosh(πt) e^{-πt/2} |2t| / |P|, written to avoid overflow.
            let sqrt_cosh_scaled = (0.5 * (1.0 + (-2.0 * PI * t).exp())).sqrt();
            (
                completed_phase(t)?,
                4.0 * sqrt_cosh_scaled * 2.0 * t / p.norm(),
            )
        };
        let eta = (1..=truncation as u64).map(|n| eta(t, n)).collect();
        let table = if table && t > 0.0 {
            Some(KTable::new(t, 2.0 * PI * y_min * 0.999, x_cut)?)
        } else {
            None
        };
        Ok(Self {
            t,
            truncation,
            theta,
            coef,
            eta,
            x_cut,
            y_min,
            table,
        })
    }

    /// Fourier expansion at `z` (no reduction); needs `z.y >= y_min`.
    pub fn eval_fourier(&self, z: HalfPlanePoint) -> Result<f64> {
        if z.y < self.y_min * (1.0 - 1e-12) {
            return Err(Error::Capacity(
                "Eisenstein truncation too short for this height",
            ));
        }
        if self.t == 0.0 {
            return Ok(0.0);
        }
        let sy = z.y.sqrt();
        let constant = 2.0 * sy * (self.t * z.y.ln() + self.theta).cos();
        let mut s = 0.0;
        for n in 1..=self.truncation {
            let x = 2.0 * PI * n as f64 * z.y;
            if x >= self.x_cut {
                break;
            }
            let k = match &self.table {
                Some(tab) => tab.eval(x),
                None => k_bessel_imag(self.t, x)?,
            };
            s += self.eta[n - 1] * k * Parity::Even.trig_turns(n as f64 * z.x);
        }
        Ok(constant + self.coef * sy * s)
    }

    /// `E*_t(z)` after reduction to the fundamental domain.
    pub fn eval(&self, z: HalfPlanePoint) -> Result<f64> {
        let (w, _) = reduce_to_fundamental(z)?;
        self.eval_fourier(w)
    }

    /// Values at every node of a grid of reduced points.
    pub fn values_on(&self, grid: &QuadratureGrid) -> Result<Vec<f64>> {
        grid.nodes.iter().map(|z| self.eval_fourier(*z)).collect()
    }
}

/// `E*_t(z)`; see [`EisensteinEvaluator`].
pub fn evaluate_eisenstein(e: &EisensteinEvaluator, z: HalfPlanePoint) -> Result<f64> {
    e.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Sl2z;

    #[test]
    fn automorphy() {
        for &t in &[0.7, 3.0, 9.3, 17.5] {
            let e = EisensteinEvaluator::tabulated(t, 0.25).unwrap();
            let g = Sl2z::new(1, 0, 1, 1).unwrap();
            for k in 0..20 {
                let w =
                    HalfPlanePoint::new(-0.45 + 0.045 * k as f64, 1.05 + 0.1 * k as f64).unwrap();
                let z = g.inverse().act(w);
                if z.y < 0.25 {
                    continue;
                }
                let a = e.eval_fourier(z).unwrap();
                let b = e.eval(z).unwrap();
                assert!((a - b).abs() < 1e-8, "t={t} k={k}: {a} {b}");
            }
        }
    }

    #[test]
    fn scattering_is_unitary_and_limit_is_continuous() {
        for &t in &[0.3, 5.0, 21.0] {
            assert!((scattering_coefficient(t).unwrap().norm() - 1.0).abs() < 1e-14);
        }
        let z = HalfPlanePoint::new(0.1, 1.3).unwrap();
        let e0 = EisensteinEvaluator::new(0.0).unwrap().eval(z).unwrap();
        let ep = EisensteinEvaluator::new(1e-3).unwrap().eval(z).unwrap();
        let em = EisensteinEvaluator::new(-1e-3).unwrap().eval(z).unwrap();
        assert_eq!(e0, 0.0);
        assert!(ep.abs() < 1e-2 && (ep - em).abs() < 1e-15);
    }

    #[test]
    fn laplace_eigenfunction() {
        // Δ = -y²(∂xx + ∂yy) applied by finite differences.
        let t = 4.0;
        let e = EisensteinEvaluator::new(t).unwrap();
        let z = HalfPlanePoint::new(0.17, 1.4).unwrap();
        let h = 1e-3;
        let f = |dx: f64, dy: f64| {
            e.eval_fourier(HalfPlanePoint {
                x: z.x + dx,
                y: z.y + dy,
            })
            .unwrap()
        };
        let lap =
            -z.y * z.y * (f(h, 0.0) + f(-h, 0.0) + f(0.0, h) + f(0.0, -h) - 4.0 * f(0.0, 0.0))
                / (h * h);
        let v = f(0.0, 0.0);
        assert!((lap - (0.25 + t * t) * v).abs() < 1e-4 * (0.25 + t * t) * v.abs().max(1.0));
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(2.0, 1), 1.0);
        let v = eta(2.0, 6);
        let want = 2.0 * ((2.0 * 6f64.ln()).cos() + (2.0 * (3.0f64 / 2.0).ln()).cos());
        assert!((v - want).abs() < 1e-14);
    }
}
