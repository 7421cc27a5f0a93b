//! Hecke–Maass cusp forms for `SL2(Z)`: the Hejhal solver, Hecke
//! eigenvalues, evaluation, Eisenstein series and normalisation.
//!
//! A form is stored through its Fourier coefficients
//!
//! ```text
//! f(z) = Σ_{n≥1} a(n) √y K̃(2πny) cs(2πnx),   K̃(x) = e^{πt/2} K_{it}(x),
//! ```
//!
//! with `cs = cos` for even and `sin` for odd forms.

mod eisenstein;
mod hejhal;
mod norm;

pub use eisenstein::{
    completed_phase, eta, evaluate_eisenstein, scattering_coefficient, EisensteinEvaluator,
};
pub use hejhal::{
    default_truncation, extend_coefficients, solve_maass, solve_window, SolverConfig,
};
pub use norm::{
    inner_product, l2_norm_squared, l2_normalize, sym2_l1_euler, sym2_l1_rankin_selberg,
    EulerProductValue,
};

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::domain::{reduce_to_fundamental, HalfPlanePoint, QuadratureGrid};
use crate::primes::{factor, gcd};
use crate::specfun::{k_bessel_imag, k_bessel_tail_cutoff, KTable};
use crate::{Error, Result};

/// Tail level below which K-Bessel terms are dropped.
pub(crate) const TAIL_EPS: f64 = 1e-17;
/// Smallest imaginary part in the fundamental domain.
pub(crate) const Y_MIN_DOMAIN: f64 = 0.866_025_403_784_438_6;

/// Behaviour under `z ↦ -z̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `cos(2πu)` for even, `sin(2πu)` for odd forms.
    #[inline]
    pub fn trig_turns(self, u: f64) -> f64 {
        let r = u - u.round();
        let a = 2.0 * PI * r;
        match self {
            Parity::Even => a.cos(),
            Parity::Odd => a.sin(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::Domain("parity must be even or odd")),
        }
    }
}

/// Which scalar multiple of the form the coefficients represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `a(1) = 1`.
    Hecke,
    /// `(1/vol) ∫ f² dμ = 1`.
    L2,
}

/// A Hecke–Maass cusp form given by its first `N_max` Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MaassForm {
    pub parity: Parity,
    /// Spectral parameter; the Laplace eigenvalue is `1/4 + t²`.
    pub t: f64,
    /// `a(n)` for `n = 1..=N_max`, stored at index `n - 1`.
    pub coefficients: Vec<f64>,
    pub normalization: Normalization,
    pub certified_error: f64,
}

impl MaassForm {
    pub fn n_max(&self) -> usize {
        self.coefficients.len()
    }

    /// `a(n)` as stored (includes any normalising scalar).
    pub fn coefficient(&self, n: usize) -> f64 {
        self.coefficients[n - 1]
    }

    /// `λ(n) = a(n)/a(1)`, extended multiplicatively past `N_max`.
    pub fn hecke_eigenvalue(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("Hecke eigenvalues are indexed by n >= 1"));
        }
        let a1 = self.coefficients[0];
        if (n as usize) <= self.n_max() {
            return Ok(self.coefficients[n as usize - 1] / a1);
        }
        let mut out = 1.0;
        for (p, e) in factor(n) {
            let pk = p.checked_pow(e);
            if let Some(pk) = pk {
                if (pk as usize) <= self.n_max() {
                    out *= self.coefficients[pk as usize - 1] / a1;
                    continue;
                }
            }
            if p as usize > self.n_max() {
                return Err(Error::Capacity("Hecke eigenvalue needs an unstored prime"));
            }
            let lp = self.coefficients[p as usize - 1] / a1;
            let (mut prev, mut cur) = (1.0, lp);
            for _ in 1..e {
                let next = lp * cur - prev;
                prev = cur;
                cur = next;
            }
            out *= cur;
        }
        Ok(out)
    }

    /// `max |λ(m)λ(n) - Σ_{d|(m,n)} λ(mn/d²)|` over `m, n >= 2`, `mn <= limit`.
    pub fn hecke_residual(&self, limit: usize) -> f64 {
        let limit = limit.min(self.n_max());
        let a1 = self.coefficients[0];
        let l = |k: usize| self.coefficients[k - 1] / a1;
        let mut worst: f64 = 0.0;
        for m in 2..=limit {
            for n in m..=limit / m {
                let g = gcd(m as u64, n as u64) as usize;
                let mut rhs = 0.0;
                for d in 1..=g {
                    if g.is_multiple_of(d) {
                        rhs += l(m * n / (d * d));
                    }
                }
                worst = worst.max((l(m) * l(n) - rhs).abs());
            }
        }
        worst
    }

    /// The same form with every coefficient multiplied by `s`.
    pub fn scaled(&self, s: f64, normalization: Normalization) -> Self {
        let mut out = self.clone();
        out.coefficients.iter_mut().for_each(|c| *c *= s);
        out.certified_error *= s.abs().max(1.0);
        out.normalization = normalization;
        out
    }

    /// Truncation point of the Fourier series at height `y`.
    fn terms_needed(&self, x_cut: f64, y: f64) -> usize {
        (x_cut / (2.0 * PI * y)).ceil() as usize
    }

    /// Fourier series at `z` without reduction.
    pub fn evaluate_fourier(&self, z: HalfPlanePoint) -> Result<f64> {
        let x_cut = k_bessel_tail_cutoff(self.t, TAIL_EPS)?;
        let n = self.terms_needed(x_cut, z.y);
        if n > self.n_max() {
            return Err(Error::Capacity(
                "too few stored coefficients for this height",
            ));
        }
        let sy = z.y.sqrt();
        let mut s = 0.0;
        for k in 1..=n {
            let x = 2.0 * PI * k as f64 * z.y;
            if x >= x_cut {
                break;
            }
            s += self.coefficients[k - 1]
                * k_bessel_imag(self.t, x)?
                * self.parity.trig_turns(k as f64 * z.x);
        }
        Ok(sy * s)
    }

    /// `f(z)`, reducing `z` into the fundamental domain first.
    pub fn evaluate(&self, z: HalfPlanePoint) -> Result<f64> {
        let (w, _) = reduce_to_fundamental(z)?;
        self.evaluate_fourier(w)
    }
}

/// Fast evaluator: interpolates `K̃` with a [`KTable`].
#[derive(Debug, Clone)]
pub struct FormEvaluator {
    parity: Parity,
    coefficients: Vec<f64>,
    table: KTable,
    x_cut: f64,
    y_min: f64,
}

impl FormEvaluator {
    /// Evaluator valid for heights `y >= y_min`.
    pub fn new(form: &MaassForm, y_min: f64) -> Result<Self> {
        if !(y_min > 0.0) {
            return Err(Error::Domain("evaluator needs y_min > 0"));
        }
        let x_cut = k_bessel_tail_cutoff(form.t, TAIL_EPS)?;
        let n = (x_cut / (2.0 * PI * y_min)).ceil() as usize;
        if n > form.n_max() {
            return Err(Error::Capacity(
                "too few stored coefficients for this height",
            ));
        }
        let lo = 2.0 * PI * y_min * 0.999;
        let table = KTable::new(form.t, lo.min(x_cut * 0.5), x_cut)?;
        Ok(Self {
            parity: form.parity,
            coefficients: form.coefficients[..n].to_vec(),
            table,
            x_cut,
            y_min,
        })
    }

    /// Evaluator for reduced points.
    pub fn for_domain(form: &MaassForm) -> Result<Self> {
        Self::new(form, Y_MIN_DOMAIN)
    }

    /// Fourier series at `z`; `z.y` must be at least `y_min`.
    pub fn eval_fourier(&self, z: HalfPlanePoint) -> f64 {
        debug_assert!(z.y >= self.y_min * (1.0 - 1e-12));
        let mut s = 0.0;
        let step = 2.0 * PI * z.y;
        // cs(2πkx) by the Chebyshev recurrence.
        let r = z.x - z.x.round();
        let (s1, c1) = (2.0 * PI * r).sin_cos();
        let (mut cp, mut cc) = (1.0, c1);
        let (mut sp, mut sc) = (0.0, s1);
        for k in 1..=self.coefficients.len() {
            let x = step * k as f64;
            if x >= self.x_cut {
                break;
            }
            let trig = match self.parity {
                Parity::Even => cc,
                Parity::Odd => sc,
            };
            s += self.coefficients[k - 1] * self.table.eval(x) * trig;
            let cn = 2.0 * c1 * cc - cp;
            let sn = 2.0 * c1 * sc - sp;
            cp = cc;
            cc = cn;
            sp = sc;
            sc = sn;
        }
        z.y.sqrt() * s
    }

    /// `f(z)` after reduction.
    pub fn eval(&self, z: HalfPlanePoint) -> f64 {
        match reduce_to_fundamental(z) {
            Ok((w, _)) => self.eval_fourier(w),
            Err(_) => 0.0,
        }
    }

    /// Values at every grid node (nodes are assumed reduced).
    pub fn values_on(&self, grid: &QuadratureGrid) -> Vec<f64> {
        grid.nodes.iter().map(|z| self.eval_fourier(*z)).collect()
    }
}

/// `f(z)` per the Fourier expansion; see [`MaassForm::evaluate`].
pub fn evaluate_form(form: &MaassForm, z: HalfPlanePoint) -> Result<f64> {
    form.evaluate(z)
}

/// `λ(n)`; see [`MaassForm::hecke_eigenvalue`].
pub fn hecke_eigenvalue(form: &MaassForm, n: u64) -> Result<f64> {
    form.hecke_eigenvalue(n)
}
