//! The test function `h(t, T, M)` and its average `Φ_{X,Y,M}` over `T`.

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Averaging window `(X, Y, M)` with `Y <= X` and `1 <= M <= Y/log X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWindow {
    pub x: f64,
    pub y: f64,
    pub m: f64,
}

impl SpectralWindow {
    pub fn new(x: f64, y: f64, m: f64) -> Result<Self> {
        if !(x > 1.0 && y > 0.0 && m > 0.0) || !(x.is_finite() && y.is_finite() && m.is_finite()) {
            return Err(Error::Domain("window needs X > 1, Y > 0, M > 0"));
        }
        if y > x {
            return Err(Error::Domain("window needs Y <= X"));
        }
        if m < 1.0 || m > y / x.ln() * (1.0 + 1e-12) {
            return Err(Error::Domain("window needs 1 <= M <= Y/log X"));
        }
        Ok(Self { x, y, m })
    }

    /// Range of `t >= 0` outside which `Φ` is below `1e-20`.
    pub fn support(&self) -> (f64, f64) {
        let pad = 7.0 * self.m;
        ((self.x - pad).max(0.0), self.x + self.y + pad)
    }
}

/// `h(t, T, M) = e^{-((t-T)/M)²} + e^{-((t+T)/M)²}`.
pub fn h_test(t: f64, tt: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain("h needs M > 0"));
    }
    let a = (t - tt) / m;
    let b = (t + tt) / m;
    Ok((-a * a).exp() + (-b * b).exp())
}

/// `erf(b) - erf(a)` without cancellation in the tails.
pub(crate) fn erf_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 && b >= 0.0 {
        libm::erfc(a) - libm::erfc(b)
    } else if a <= 0.0 && b <= 0.0 {
        libm::erfc(-b) - libm::erfc(-a)
    } else {
        libm::erf(b) - libm::erf(a)
    }
}

/// `Φ(t) = (1/(√π M)) ∫_X^{X+Y} h(t, T, M) dT` in closed form.
pub fn phi_weight(t: f64, w: &SpectralWindow) -> f64 {
    let (x, y, m) = (w.x, w.y, w.m);
    0.5 * erf_diff((x - t) / m, (x + y - t) / m) + 0.5 * erf_diff((x + t) / m, (x + y + t) / m)
}

/// Which part of the window a point `t` sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiRegime {
    /// At least `2 M √(log X)` inside `[X, X + Y]`.
    Bulk,
    /// Within `10 M √(log X)` of an endpoint but not in the bulk.
    Transition,
    /// At least `10 M √(log X)` outside `[X, X + Y]`.
    Exterior,
}

/// A point of `Φ` checked against the regime description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiRegimeCheck {
    pub regime: PhiRegime,
    pub value: f64,
    /// `|Φ - 1|` in the bulk, `Φ` outside, `|Φ - 1_{[X,X+Y]}|` in the transition.
    pub deviation: f64,
    /// `1e-4`, `X^{-5}`, or `10 M³/(M + dist)³`.
    pub allowed: f64,
}

impl PhiRegimeCheck {
    pub fn holds(&self) -> bool {
        self.deviation <= self.allowed
    }
}

/// Classifies `t >= 0` and compares `Φ(t)` with its regime.
pub fn phi_regime(t: f64, w: &SpectralWindow) -> PhiRegimeCheck {
    let scale = w.m * w.x.ln().sqrt();
    let (a, b) = (w.x, w.x + w.y);
    let inside = t >= a && t <= b;
    let dist = if inside {
        (t - a).min(b - t)
    } else {
        (a - t).max(t - b)
    };
    let value = phi_weight(t, w);
    if inside && dist >= 2.0 * scale {
        PhiRegimeCheck {
            regime: PhiRegime::Bulk,
            value,
            deviation: (value - 1.0).abs(),
            allowed: 1e-4,
        }
    } else if !inside && dist >= 10.0 * scale {
        PhiRegimeCheck {
            regime: PhiRegime::Exterior,
            value,
            deviation: value.abs(),
            allowed: w.x.powi(-5),
        }
    } else {
        let step = if inside { 1.0 } else { 0.0 };
        let allowed = 10.0 * (w.m / (w.m + dist)).powi(3);
        PhiRegimeCheck {
            regime: PhiRegime::Transition,
            value,
            deviation: (value - step).abs(),
            allowed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;

    #[test]
    fn h_examples() {
        let (tt, m) = (7.0, 1.5);
        assert!(
            (h_test(tt, tt, m).unwrap() - (1.0 + (-4.0 * tt * tt / (m * m)).exp())).abs() < 1e-15
        );
        assert_eq!(h_test(-3.2, tt, m).unwrap(), h_test(3.2, tt, m).unwrap());
        let v = h_test(tt + m, tt, m).unwrap();
        let want = (-1.0f64).exp() + (-((2.0 * tt + m) / m).powi(2)).exp();
        assert!((v - want).abs() < 1e-15);
        assert!(h_test(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let w = SpectralWindow::new(40.0, 20.0, 3.0).unwrap();
        for k in 0..50 {
            let t = 20.0 + 1.0 * k as f64;
            let (q, _) = adaptive(|tt| h_test(t, tt, w.m).unwrap(), w.x, w.x + w.y, 1e-13).unwrap();
            let q = q / (core::f64::consts::PI.sqrt() * w.m);
            assert!((q - phi_weight(t, &w)).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn window_validation() {
        assert!(SpectralWindow::new(10.0, 20.0, 1.0).is_err());
        assert!(SpectralWindow::new(100.0, 50.0, 20.0).is_err());
        assert!(SpectralWindow::new(100.0, 50.0, 5.0).is_ok());
    }

    #[test]
    fn midpoint_is_half() {
        let w = SpectralWindow::new(200.0, 100.0, 2.0).unwrap();
        assert!((phi_weight(200.0, &w) - 0.5).abs() < 1e-12);
        assert!((phi_weight(250.0, &w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regimes_hold_on_examples() {
        let w = SpectralWindow::new(200.0, 100.0, 2.0).unwrap();
        let s = 2.0 * 200f64.ln().sqrt();
        let c = phi_regime(250.0, &w);
        assert_eq!(c.regime, PhiRegime::Bulk);
        assert!(c.holds());
        let c = phi_regime(200.0 - 10.0 * s - 1e-9, &w);
        assert_eq!(c.regime, PhiRegime::Exterior);
        assert!(c.holds() && c.value < 200f64.powi(-5));
        let c = phi_regime(200.0, &w);
        assert_eq!(c.regime, PhiRegime::Transition);
        assert!(c.holds() && (c.value - 0.5).abs() < 1e-12);
    }
}
