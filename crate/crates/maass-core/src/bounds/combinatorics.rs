//! Coefficients of Hecke powers and the counting sums built on them.
//!
//! `λ(p)^k = Σ_{l ≡ k (2)} D_{k,l} λ(p^l)` with `λ(p^l) = U_l(cos θ)`, the
//! Chebyshev polynomial of the second kind.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use twofloat::TwoFloat;

use crate::{Error, Result};

/// `n!` as a `u128`; fails beyond `33!`.
pub fn factorial(n: u32) -> Result<u128> {
    let mut acc: u128 = 1;
    for k in 2..=n as u128 {
        acc = acc
            .checked_mul(k)
            .ok_or(Error::Capacity("factorial overflows u128"))?;
    }
    Ok(acc)
}

/// `binom(n, k)` as a `u128`.
pub fn binomial(n: u32, k: u32) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc
            .checked_mul(n as u128 - i)
            .ok_or(Error::Capacity("binomial overflows u128"))?
            / (i + 1);
    }
    Ok(acc)
}

fn check_kl(k: u32, l: u32) -> Result<()> {
    if l > k || !(k - l).is_multiple_of(2) {
        return Err(Error::Domain("D_{k,l} needs 0 <= l <= k with l = k mod 2"));
    }
    Ok(())
}

/// `D_{k,l} = k! (l+1) / (((k+l)/2 + 1)! ((k-l)/2)!)`.
pub fn d_coefficient(k: u32, l: u32) -> Result<u128> {
    check_kl(k, l)?;
    let num = factorial(k)?
        .checked_mul(l as u128 + 1)
        .ok_or(Error::Capacity("D_{k,l} overflows u128"))?;
    let den = factorial((k + l) / 2 + 1)? * factorial((k - l) / 2)?;
    debug_assert_eq!(num % den, 0);
    Ok(num / den)
}

/// `D_{k,l}` from `D_{k,l} = binom(k, (k-l)/2) - Σ_{0<m<=(k-l)/2} D_{k,l+2m}`
/// and `D_{k,k} = 1`.
pub fn d_coefficient_recursive(k: u32, l: u32) -> Result<u128> {
    check_kl(k, l)?;
    // row[i] = D_{k, k - 2i}
    let steps = ((k - l) / 2) as usize;
    let mut row: Vec<u128> = vec![1];
    for i in 1..=steps {
        let b = binomial(k, i as u32)?;
        let s: u128 = row.iter().sum();
        row.push(b.checked_sub(s).ok_or(Error::Numerical {
            what: "recursion went negative",
            estimate: -1.0,
        })?);
    }
    Ok(row[steps])
}

/// `U_l(c)` for `l = 0..=k` in double-double, by the three-term recurrence.
fn chebyshev_u_dd(k: usize, c: f64) -> Vec<TwoFloat> {
    let two_c = TwoFloat::from(2.0 * c);
    let mut out = Vec::with_capacity(k + 1);
    out.push(TwoFloat::from(1.0));
    if k >= 1 {
        out.push(two_c);
    }
    for n in 2..=k {
        let v = two_c * out[n - 1] - out[n - 2];
        out.push(v);
    }
    out
}

/// `max_θ |(2 cos θ)^k - Σ_l D_{k,l} sin((l+1)θ)/sin θ|` over `n_grid`
/// equally spaced `θ` in `[0, π]`.
///
/// The grid point is `c = cos θ` rounded to a double, and both sides are
/// evaluated at that `c` in double-double arithmetic, so the result
/// measures the identity and not the rounding of `2^k`-sized terms.
/// `sin((l+1)θ)/sin θ = U_l(cos θ)` is evaluated by its recurrence, which
/// also gives the limit `l + 1` at `θ = 0`.
pub fn power_expansion_residual(k: u32, n_grid: usize) -> Result<f64> {
    if n_grid < 2 {
        return Err(Error::Domain("power expansion grid needs two points"));
    }
    let d: Vec<(usize, u128)> = (0..=k)
        .filter(|l| (k - l).is_multiple_of(2))
        .map(|l| d_coefficient(k, l).map(|v| (l as usize, v)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..n_grid {
        let theta = PI * i as f64 / (n_grid - 1) as f64;
        let c = theta.cos();
        let u = chebyshev_u_dd(k as usize, c);
        let mut lhs = TwoFloat::from(1.0);
        let two_c = TwoFloat::from(2.0 * c);
        for _ in 0..k {
            lhs *= two_c;
        }
        let mut rhs = TwoFloat::from(0.0);
        for &(l, dk) in &d {
            rhs += u[l] * TwoFloat::from(dk as f64);
        }
        let r = f64::from(lhs - rhs).abs();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// `Σ_{l ≡ e (2)} e! (l+1) / (((e+l)/2 + 1)! ((e-l)/2)!)` and
/// `e! / (⌈e/2⌉! ⌊e/2⌋!)`, which should agree.
pub fn parity_sum_identity(e: u32) -> Result<(u128, u128)> {
    let mut lhs: u128 = 0;
    let mut l = e % 2;
    while l <= e {
        lhs += d_coefficient(e, l)?;
        l += 2;
    }
    let rhs = factorial(e)? / (factorial(e.div_ceil(2))? * factorial(e / 2)?);
    Ok((lhs, rhs))
}

/// Every composition of `n` into positive parts, in lexicographic order.
pub fn compositions(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for e in 1..=left {
            cur.push(e);
            rec(left - e, cur, out);
            cur.pop();
        }
    }
    if n > 0 {
        rec(n, &mut cur, &mut out);
    }
    out
}

/// The composition sum with and without the multinomial factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionBound {
    pub r: u32,
    /// `Σ_{e_1+…+e_q=2r} (2r)!/∏e_i! · ∏ e_i!/(⌈e_i/2⌉! ⌊e_i/2⌋!)`.
    pub literal_sum: u128,
    /// `Σ_{e_1+…+e_q=2r} ∏ e_i!/(⌈e_i/2⌉! ⌊e_i/2⌋!)`.
    pub per_part_sum: u128,
    /// `Σ_{q <= 2r} 2^{2q}`.
    pub intermediate: u128,
    /// `2^{4r+1}`.
    pub stated_bound: u128,
    /// `2^{4r-1}`, the bound the per-part sum satisfies.
    pub per_part_bound: u128,
}

impl CompositionBound {
    pub fn literal_holds(&self) -> bool {
        self.literal_sum <= self.intermediate && self.literal_sum < self.stated_bound
    }

    pub fn per_part_holds(&self) -> bool {
        self.per_part_sum <= self.per_part_bound && self.per_part_sum < self.stated_bound
    }
}

/// Enumerates all compositions of `2r` for [`CompositionBound`].
pub fn composition_bound(r: u32) -> Result<CompositionBound> {
    if r == 0 || r > 16 {
        return Err(Error::Domain("composition bound needs 1 <= r <= 16"));
    }
    let n = 2 * r;
    let fact_n = factorial(n)?;
    let central: Vec<u128> = (0..=n).map(|e| binomial(e, e / 2)).collect::<Result<_>>()?;
    let mut literal: u128 = 0;
    let mut per_part: u128 = 0;
    for comp in compositions(n) {
        let mut multinomial = fact_n;
        let mut prod: u128 = 1;
        for &e in &comp {
            multinomial /= factorial(e)?;
            prod *= central[e as usize];
        }
        literal += multinomial * prod;
        per_part += prod;
    }
    let intermediate = (1..=n).map(|q| 1u128 << (2 * q)).sum();
    Ok(CompositionBound {
        r,
        literal_sum: literal,
        per_part_sum: per_part,
        intermediate,
        stated_bound: 1u128 << (4 * r + 1),
        per_part_bound: 1u128 << (4 * r - 1),
    })
}

/// `(2r)!/∏(f_i!(f_i+1)!) <= (2r)!/(r! 2^r) · r!/∏ f_i!` over every
/// composition `f` of `r`; returns the largest ratio of left to right.
pub fn moment_coefficient_ratio(r: u32) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for comp in compositions(r) {
        // Both sides share (2r)!/∏ f_i!, leaving 1/∏(f_i+1)! against 1/2^r.
        let den: u128 = comp
            .iter()
            .map(|&f| factorial(f + 1))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .product();
        let ratio = (1u128 << r) as f64 / den as f64;
        worst = worst.max(ratio);
    }
    Ok(worst)
}
