//! Normalisation, inner products and `L(1, sym² f)`.
//!
//! For a Hecke-normalised form (`a(1) = 1`) in our Fourier convention the
//! Rankin–Selberg method gives
//!
//! ```text
//! L(1, sym² f) = 4 (1 + e^{-2πt}) ∫_{Γ\H} f² dμ,
//! ```
//!
//! which is an independent route to the Euler product.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::{FormEvaluator, MaassForm, Normalization};
use crate::domain::QuadratureGrid;
use crate::primes::primes_up_to;
use crate::{Error, Result, VOLUME};

fn check_grid(grid: &QuadratureGrid, frequency: f64) -> Result<()> {
    if grid.design_frequency + 1e-9 < frequency {
        return Err(Error::Capacity("grid does not resolve the integrand"));
    }
    Ok(())
}

/// `∫ f² dμ` over the grid.
pub fn l2_norm_squared(form: &MaassForm, grid: &QuadratureGrid) -> Result<f64> {
    check_grid(grid, 2.0 * form.t)?;
    let ev = FormEvaluator::for_domain(form)?;
    Ok(grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(z, w)| {
            let v = ev.eval_fourier(*z);
            w * v * v
        })
        .sum())
}

/// `∫ f g dμ` over the grid.
pub fn inner_product(f: &MaassForm, g: &MaassForm, grid: &QuadratureGrid) -> Result<f64> {
    check_grid(grid, f.t + g.t)?;
    let ef = FormEvaluator::for_domain(f)?;
    let eg = FormEvaluator::for_domain(g)?;
    Ok(grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(z, w)| w * ef.eval_fourier(*z) * eg.eval_fourier(*z))
        .sum())
}

/// Rescales so that `(1/vol) ∫ f² dμ = 1`. Returns the form and the scalar used.
pub fn l2_normalize(form: &MaassForm, grid: &QuadratureGrid) -> Result<(MaassForm, f64)> {
    let n2 = l2_norm_squared(form, grid)?;
    if !(n2 > 0.0) {
        return Err(Error::Numerical {
            what: "form has vanishing norm on the grid",
            estimate: n2,
        });
    }
    let s = (VOLUME / n2).sqrt();
    Ok((form.scaled(s, Normalization::L2), s))
}

/// `L(1, sym² f)` from the Petersson norm of the Hecke-normalised form.
pub fn sym2_l1_rankin_selberg(form: &MaassForm, grid: &QuadratureGrid) -> Result<f64> {
    let a1 = form.coefficients[0];
    let n2 = l2_norm_squared(form, grid)? / (a1 * a1);
    Ok(4.0 * (1.0 + (-2.0 * PI * form.t).exp()) * n2)
}

/// Partial Euler product with a heuristic bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerProductValue {
    pub value: f64,
    /// Bound on `|log L - log(partial product)|`.
    pub log_tail_bound: f64,
    pub p_max: usize,
}

/// `∏_{p<=p_max} [(1 - 1/p)(1 - (λ(p)² - 2)/p + 1/p²)]^{-1}`.
///
/// The tail `Σ_{p>P} λ_{sym²}(p)/p` is modelled as a sum of terms of random
/// sign and unit variance; its bound is three standard deviations,
/// `3 (Σ_{p>P} 1/p²)^{1/2} ≈ 3/(P log P)^{1/2}`.
pub fn sym2_l1_euler(form: &MaassForm, p_max: usize) -> Result<EulerProductValue> {
    if p_max > form.n_max() {
        return Err(Error::Capacity(
            "Euler product needs λ(p) beyond the stored range",
        ));
    }
    if p_max < 2 {
        return Err(Error::Domain("Euler product needs p_max >= 2"));
    }
    let mut log_l = 0.0;
    for p in primes_up_to(p_max) {
        let lp = form.hecke_eigenvalue(p as u64)?;
        let x = 1.0 / p as f64;
        let local = (1.0 - x) * (1.0 - (lp * lp - 2.0) * x + x * x);
        log_l -= local.ln();
    }
    let pf = p_max as f64;
    Ok(EulerProductValue {
        value: log_l.exp(),
        log_tail_bound: 3.0 / (pf * pf.ln()).sqrt(),
        p_max,
    })
}
