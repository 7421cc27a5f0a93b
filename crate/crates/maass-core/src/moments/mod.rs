//! Joint moments of Maass forms, Gaussian constants and the Parseval check.
//!
//! Forms are normalised so that `(1/vol) ∫ f² dμ = 1` with
//! `dμ = dx dy / y²`, so a form behaves like a standard Gaussian under the
//! probability measure `dμ / vol`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::automorphic::{EisensteinEvaluator, FormEvaluator, MaassForm, Parity};
use crate::domain::{HalfPlanePoint, Observable, QuadratureGrid};
use crate::kuznetsov::weyl_count;
use crate::specfun::double_factorial;
use crate::{Error, Result, VOLUME};

/// Largest number of factors a moment may have.
pub const MAX_FACTORS: usize = 4;

/// `E(X^n)` for a standard normal `X`: `(n-1)!!` for even `n`, else 0.
pub fn gaussian_moment(n: u32) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    // (n-1)!! fits u128 far beyond any n used here.
    double_factorial(n as i64 - 1)
        .map(|v| v as f64)
        .unwrap_or(f64::INFINITY)
}

/// The integrand weight: a bump or the constant 1.
#[derive(Debug, Clone, Copy)]
pub enum Weight<'a> {
    Constant,
    Bump(&'a Observable),
}

impl Weight<'_> {
    fn eval(&self, z: HalfPlanePoint) -> f64 {
        match self {
            Weight::Constant => 1.0,
            Weight::Bump(o) => o.eval(z),
        }
    }

    /// `∫ ψ dμ` over the whole surface.
    pub fn mass(&self, grid: &QuadratureGrid) -> f64 {
        match self {
            Weight::Constant => VOLUME,
            Weight::Bump(o) => grid.integrate(|z| o.eval(z)),
        }
    }
}

/// `∫ ψ ∏ f_j^{a_j} dμ` on a grid.
#[derive(Debug, Clone)]
pub struct MomentSpec<'a> {
    pub factors: Vec<(&'a MaassForm, u32)>,
    pub weight: Weight<'a>,
    pub grid: &'a QuadratureGrid,
}

/// A moment with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub value: f64,
    /// Grid error plus propagated coefficient errors.
    pub error_estimate: f64,
    /// The grid part of `error_estimate`.
    pub grid_error: f64,
}

fn check_resolution(grid: &QuadratureGrid, frequency: f64) -> Result<()> {
    if grid.design_frequency + 1e-9 < frequency {
        return Err(Error::Capacity("grid does not resolve the integrand"));
    }
    Ok(())
}

fn values(form: &MaassForm, grid: &QuadratureGrid) -> Result<Vec<f64>> {
    Ok(FormEvaluator::for_domain(form)?.values_on(grid))
}

/// Evaluates a joint moment.
///
/// Coefficient errors enter to first order: a relative error `e_j` in `f_j`
/// adds `a_j e_j ∫ |ψ ∏ f^a| dμ`. The grid error scales the grid's unit
/// estimate by the largest integrand value.
pub fn joint_moment(spec: &MomentSpec) -> Result<MomentValue> {
    if spec.factors.is_empty() || spec.factors.len() > MAX_FACTORS {
        return Err(Error::Domain("a moment needs between one and four factors"));
    }
    if spec.factors.iter().any(|(_, a)| *a == 0) {
        return Err(Error::Domain("moment powers must be positive"));
    }
    let freq: f64 = spec.factors.iter().map(|(f, a)| f.t * *a as f64).sum();
    check_resolution(spec.grid, freq)?;
    let grid = spec.grid;
    let mut prod: Vec<f64> = grid.nodes.iter().map(|z| spec.weight.eval(*z)).collect();
    for (f, a) in &spec.factors {
        let v = values(f, grid)?;
        for (p, x) in prod.iter_mut().zip(&v) {
            *p *= x.powi(*a as i32);
        }
    }
    let value = grid.integrate_values(&prod);
    let abs_int: f64 = prod
        .iter()
        .zip(&grid.weights)
        .map(|(p, w)| p.abs() * w)
        .sum();
    let sup = prod.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let grid_error = grid.estimated_error * sup.max(1e-300);
    let coef_error: f64 = spec
        .factors
        .iter()
        .map(|(f, a)| *a as f64 * f.certified_error)
        .sum::<f64>()
        * abs_int;
    Ok(MomentValue {
        value,
        error_estimate: grid_error + coef_error,
        grid_error,
    })
}

/// Measured joint moment of two forms against the Gaussian prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub t_f: f64,
    pub t_g: f64,
    pub a: u32,
    pub b: u32,
    pub measured: f64,
    /// `c_a c_b ∫ ψ dμ`.
    pub conjectured: f64,
    pub difference: f64,
    pub error_estimate: f64,
    pub grid_error: f64,
    pub y_cutoff: f64,
}

/// `∫ ψ f^a g^b dμ` next to `c_a c_b ∫ ψ dμ`, without a verdict.
pub fn independence_report(
    f: &MaassForm,
    g: &MaassForm,
    a: u32,
    b: u32,
    weight: Weight,
    grid: &QuadratureGrid,
) -> Result<IndependenceReport> {
    if f.parity == g.parity && f.t == g.t {
        return Err(Error::Domain(
            "independence report needs two distinct forms",
        ));
    }
    let m = joint_moment(&MomentSpec {
        factors: alloc::vec![(f, a), (g, b)],
        weight,
        grid,
    })?;
    let conjectured = gaussian_moment(a) * gaussian_moment(b) * weight.mass(grid);
    Ok(IndependenceReport {
        t_f: f.t,
        t_g: g.t,
        a,
        b,
        measured: m.value,
        conjectured,
        difference: m.value - conjectured,
        error_estimate: m.error_estimate,
        grid_error: m.grid_error,
        y_cutoff: grid.y_cutoff,
    })
}

/// `t`-grid for the continuous part of the Parseval identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisensteinGrid {
    /// Truncation `T_E`.
    pub t_max: f64,
    pub spacing: f64,
}

impl EisensteinGrid {
    /// `T_E = 2 max(t_f, t_g)`, spacing 0.25.
    pub fn default_for(f: &MaassForm, g: &MaassForm) -> Self {
        Self {
            t_max: 2.0 * f.t.max(g.t),
            spacing: 0.25,
        }
    }
}

/// One cusp form's contribution to the Parseval sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalTerm {
    pub t: f64,
    pub parity: Parity,
    /// `⟨f², u⟩`.
    pub with_f: f64,
    /// `⟨u, g²⟩`.
    pub with_g: f64,
    /// `⟨u, u⟩`.
    pub norm_squared: f64,
}

impl ParsevalTerm {
    /// `⟨f², u⟩⟨u, g²⟩ / ⟨u, u⟩`.
    pub fn contribution(&self) -> f64 {
        self.with_f * self.with_g / self.norm_squared
    }
}

/// Both sides of the spectral expansion of `⟨f², g²⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsevalReport {
    /// `⟨f², g²⟩` by direct quadrature.
    pub direct_value: f64,
    /// `(3/π) ⟨f², 1⟩⟨1, g²⟩`.
    pub constant_term: f64,
    /// Cusp contributions with `t_j <= cutoff`.
    pub cusp_sum: f64,
    /// `(1/4π) ∫_{|t| <= T_E} ⟨f², E_t⟩⟨E_t, g²⟩ dt`.
    pub eisenstein_integral: f64,
    /// Estimate of the neglected `|t| > T_E` part.
    pub eisenstein_tail: f64,
    pub cutoff: f64,
    /// `direct - (constant + cusp + eisenstein)`.
    pub residual: f64,
    pub terms: Vec<ParsevalTerm>,
    /// Set when the basis looks incomplete below the cutoff.
    pub gap_warning: Option<String>,
    pub grid_error: f64,
}

impl ParsevalReport {
    /// The same report truncated to forms with `t_j <= cutoff`.
    pub fn at_cutoff(&self, cutoff: f64) -> Self {
        let terms: Vec<ParsevalTerm> = self
            .terms
            .iter()
            .copied()
            .filter(|t| t.t <= cutoff)
            .collect();
        let cusp_sum = terms.iter().map(ParsevalTerm::contribution).sum();
        let residual =
            self.direct_value - (self.constant_term + cusp_sum + self.eisenstein_integral);
        Self {
            cusp_sum,
            residual,
            cutoff,
            terms,
            ..self.clone()
        }
    }
}

fn basis_gap(basis: &[MaassForm], cutoff: f64) -> Option<String> {
    let have = basis.iter().filter(|u| u.t <= cutoff).count();
    let expected = weyl_count(cutoff);
    let max_t = basis.iter().map(|u| u.t).fold(0.0, f64::max);
    let mut msg = String::new();
    if (have as f64) + 3.0 < expected {
        msg.push_str(&format!(
            "basis has {have} forms below t = {cutoff:.3}, Weyl law expects about {expected:.1}"
        ));
    }
    if max_t + 1.0 < cutoff {
        if !msg.is_empty() {
            msg.push_str("; ");
        }
        msg.push_str(&format!(
            "no basis forms between {max_t:.3} and the cutoff {cutoff:.3}"
        ));
    }
    if msg.is_empty() {
        None
    } else {
        Some(msg)
    }
}

/// Checks `⟨f², g²⟩ = (3/π)⟨f², 1⟩⟨1, g²⟩ + Σ ⟨f², u_j⟩⟨u_j, g²⟩/⟨u_j, u_j⟩
/// + (1/4π) ∫ ⟨f², E_t⟩⟨E_t, g²⟩ dt` with every pairing done on one grid.
///
/// The continuous part uses the trapezoid rule on `[0, T_E]`, since the
/// integrand is even in `t` and vanishes at `t = 0`.
pub fn parseval_check(
    f: &MaassForm,
    g: &MaassForm,
    basis: &[MaassForm],
    eis: EisensteinGrid,
    grid: &QuadratureGrid,
) -> Result<ParsevalReport> {
    if f.parity == g.parity && f.t == g.t {
        return Err(Error::Domain("Parseval check needs two distinct forms"));
    }
    if !(eis.spacing > 0.0) || !(eis.t_max >= 0.0) {
        return Err(Error::Domain("Eisenstein grid needs positive spacing"));
    }
    let cutoff = basis.iter().map(|u| u.t).fold(0.0, f64::max);
    let top = 2.0 * f.t.max(g.t);
    check_resolution(
        grid,
        (2.0 * f.t + 2.0 * g.t).max(top + cutoff.max(eis.t_max)),
    )?;

    let fv = values(f, grid)?;
    let gv = values(g, grid)?;
    let f2: Vec<f64> = fv.iter().map(|v| v * v).collect();
    let g2: Vec<f64> = gv.iter().map(|v| v * v).collect();
    let fg: Vec<f64> = f2.iter().zip(&g2).map(|(a, b)| a * b).collect();
    let direct_value = grid.integrate_values(&fg);
    let constant_term = (3.0 / PI) * grid.integrate_values(&f2) * grid.integrate_values(&g2);
    let sup = fg.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let pair = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(&grid.weights)
            .map(|((x, y), w)| x * y * w)
            .sum()
    };

    let mut terms = Vec::with_capacity(basis.len());
    for u in basis {
        let uv = values(u, grid)?;
        terms.push(ParsevalTerm {
            t: u.t,
            parity: u.parity,
            with_f: pair(&f2, &uv),
            with_g: pair(&uv, &g2),
            norm_squared: pair(&uv, &uv),
        });
    }
    let cusp_sum = terms.iter().map(ParsevalTerm::contribution).sum();

    let steps = (eis.t_max / eis.spacing).round() as usize;
    let mut eisenstein_integral = 0.0;
    let mut last = 0.0;
    for k in 1..=steps {
        let t = k as f64 * eis.spacing;
        let e =
            EisensteinEvaluator::tabulated(t, crate::automorphic::Y_MIN_DOMAIN)?.values_on(grid)?;
        let v = pair(&f2, &e) * pair(&e, &g2);
        let w = if k == steps { 0.5 } else { 1.0 };
        eisenstein_integral += w * eis.spacing * v;
        last = v;
    }
    // (1/4π) over the real line is (1/2π) over the half line.
    eisenstein_integral /= 2.0 * PI;
    // Beyond 2 max(t_f, t_g) the integrand decays roughly like e^{-πt/2}.
    let eisenstein_tail = last.abs() / (2.0 * PI) / (0.5 * PI);

    let residual = direct_value - (constant_term + cusp_sum + eisenstein_integral);
    Ok(ParsevalReport {
        direct_value,
        constant_term,
        cusp_sum,
        eisenstein_integral,
        eisenstein_tail,
        cutoff,
        residual,
        terms,
        gap_warning: basis_gap(basis, cutoff),
        grid_error: grid.estimated_error * sup.max(1e-300),
    })
}

/// `⟨ψ, u⟩` for one basis form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCoefficient {
    pub t: f64,
    pub parity: Parity,
    pub value: f64,
    pub error: f64,
}

/// Coefficients of an observable and the fitted power-law exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub coefficients: Vec<SpectralCoefficient>,
    /// Slope of `ln |⟨ψ, u⟩|` against `ln t` over coefficients above their
    /// error bars; `None` if fewer than three qualify.
    pub fitted_exponent: Option<f64>,
}

/// `⟨ψ, u_j⟩` over a normalised basis.
pub fn observable_spectral_decay(
    weight: Weight,
    basis: &[MaassForm],
    grid: &QuadratureGrid,
) -> Result<DecayReport> {
    let tmax = basis.iter().map(|u| u.t).fold(0.0, f64::max);
    check_resolution(grid, tmax)?;
    let psi: Vec<f64> = grid.nodes.iter().map(|z| weight.eval(*z)).collect();
    let mut coefficients = Vec::with_capacity(basis.len());
    for u in basis {
        let uv = values(u, grid)?;
        let prod: Vec<f64> = psi.iter().zip(&uv).map(|(a, b)| a * b).collect();
        let value = grid.integrate_values(&prod);
        let sup = prod.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let abs_int: f64 = prod
            .iter()
            .zip(&grid.weights)
            .map(|(p, w)| p.abs() * w)
            .sum();
        let error = grid.estimated_error * sup + u.certified_error * abs_int;
        coefficients.push(SpectralCoefficient {
            t: u.t,
            parity: u.parity,
            value,
            error,
        });
    }
    let pts: Vec<(f64, f64)> = coefficients
        .iter()
        .filter(|c| c.value.abs() > 2.0 * c.error && c.value != 0.0)
        .map(|c| (c.t.ln(), c.value.abs().ln()))
        .collect();
    let fitted_exponent = if pts.len() >= 3 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx > 0.0 {
            Some(sxy / sxx)
        } else {
            None
        }
    } else {
        None
    };
    Ok(DecayReport {
        coefficients,
        fitted_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_moment(0), 1.0);
        assert_eq!(gaussian_moment(1), 0.0);
        assert_eq!(gaussian_moment(2), 1.0);
        assert_eq!(gaussian_moment(4), 3.0);
        assert_eq!(gaussian_moment(6), 15.0);
        assert_eq!(gaussian_moment(7), 0.0);
    }

    #[test]
    fn gaussian_moment_matches_quadrature() {
        // ∫ x^n e^{-x²/2} dx / √(2π) by composite Gauss on [-12, 12].
        for n in 0..=8u32 {
            let v = crate::quad::composite_gauss(
                |x| x.powi(n as i32) * (-0.5 * x * x).exp(),
                -12.0,
                12.0,
                48,
                20,
            ) / (2.0 * PI).sqrt();
            assert!((v - gaussian_moment(n)).abs() < 1e-3, "n = {n}: {v}");
        }
    }

    #[test]
    fn basis_gap_flags_sparse_bases() {
        assert!(basis_gap(&[], 20.0).is_some());
    }
}
