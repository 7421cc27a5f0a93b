//! Prime-power coefficients, the log-L upper bound and the prime sums fed
//! into the deviation counts.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::satake::{SatakeEntry, SatakeSpectrum, TwistData};
use crate::{Error, Result};

/// `(ℓ1, ℓ2, ℓ3)`, the powers of `L(1/2, u_j)`, `L(1/2, sym²f × u_j)` and
/// `L(1/2, sym²g × u_j)`.
///
/// Zero entries are allowed so that single sums can be isolated; the
/// Chernoff bound itself asks for positive entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTriple {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl ExponentTriple {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !(ok(l1) && ok(l2) && ok(l3)) || l1 + l2 + l3 == 0.0 {
            return Err(Error::Domain(
                "exponents must be nonnegative and not all zero",
            ));
        }
        Ok(Self { l1, l2, l3 })
    }

    pub fn is_positive(&self) -> bool {
        self.l1 > 0.0 && self.l2 > 0.0 && self.l3 > 0.0
    }

    pub fn sum(&self) -> f64 {
        self.l1 + self.l2 + self.l3
    }

    pub fn sum_squares(&self) -> f64 {
        self.l1 * self.l1 + self.l2 * self.l2 + self.l3 * self.l3
    }

    /// `Σ ℓ_i (ℓ_i - 1) / 2`.
    pub fn target_exponent(&self) -> f64 {
        0.5 * (self.sum_squares() - self.sum())
    }
}

/// Which coefficient sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaKind {
    /// `Λ_{u_j}`.
    Uj,
    /// `Λ_{sym²f × u_j}`.
    Sym2FUj,
    /// `Λ_{sym²g × u_j}`.
    Sym2GUj,
}

/// `λ_{sym^k}(p) = sin((k+1)θ)/sin θ`, with the limits `(±1)^k (k+1)` at
/// `θ ∈ {0, π}`.
pub fn sym_power_eigenvalue(k: u32, theta: f64) -> f64 {
    let s = theta.sin();
    if s.abs() > 1e-6 {
        return ((k as f64 + 1.0) * theta).sin() / s;
    }
    // U_k(cos θ) by recurrence near the endpoints.
    let c = theta.cos();
    let (mut a, mut b) = (1.0, 2.0 * c);
    if k == 0 {
        return 1.0;
    }
    for _ in 1..k {
        let n = 2.0 * c * b - a;
        a = b;
        b = n;
    }
    b
}

/// `Λ(p^n)` from Satake angles:
/// `Λ_{u_j}(p^n) = α^n + β^n = 2 cos(nθ_j)` and
/// `Λ_{sym²f × u_j}(p^n) = (2 cos(2nθ_f) + 1) · 2 cos(nθ_j)`.
pub fn lambda_coefficient(kind: LambdaKind, theta_j: f64, theta_twist: f64, n: u32) -> f64 {
    let nf = n as f64;
    let uj = 2.0 * (nf * theta_j).cos();
    match kind {
        LambdaKind::Uj => uj,
        LambdaKind::Sym2FUj | LambdaKind::Sym2GUj => {
            (2.0 * (2.0 * nf * theta_twist).cos() + 1.0) * uj
        }
    }
}

/// The explicit prime sum and the size of the error term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLBound {
    /// `Σ_{p^n <= x} Λ(p^n) / (n p^{n(1/2 + 1/log x)}) · log(x/p^n)/log x`.
    pub sum: f64,
    /// `C (log Q / log x + 1)`, with `Q = X` for `u_j` and `X + t_f` (or
    /// `X + t_g`) for the twists.
    pub envelope: f64,
}

/// Upper bound for `log L(1/2, ·)` as an explicit sum plus its envelope.
///
/// `theta_j` and `theta_twist` are aligned with `spectrum.primes`;
/// `conductor_scale` is `Q` above and `c` the envelope constant.
pub fn log_l_upper_bound(
    kind: LambdaKind,
    spectrum: &SatakeSpectrum,
    theta_j: &[f64],
    theta_twist: Option<&[f64]>,
    x: f64,
    conductor_scale: f64,
    c: f64,
) -> Result<LogLBound> {
    if !(x > 10.0) || !x.is_finite() {
        return Err(Error::Domain("log-L bound needs x > 10"));
    }
    if !(conductor_scale > 1.0) {
        return Err(Error::Domain("log-L bound needs a conductor scale above 1"));
    }
    let count = spectrum.prime_count_to(x)?;
    if theta_j.len() < count {
        return Err(Error::Capacity("missing Satake angles below x"));
    }
    let twist = match (kind, theta_twist) {
        (LambdaKind::Uj, _) => None,
        (_, Some(t)) if t.len() >= count => Some(t),
        _ => return Err(Error::Capacity("missing twist angles below x")),
    };
    let lx = x.ln();
    let sigma = 0.5 + 1.0 / lx;
    let mut sum = 0.0;
    for i in 0..count {
        let p = spectrum.primes[i] as f64;
        let mut pn = p;
        let mut n = 1u32;
        while pn <= x {
            let lam = lambda_coefficient(kind, theta_j[i], twist.map_or(0.0, |t| t[i]), n);
            let weight = (x / pn).ln() / lx;
            sum += lam / (n as f64 * pn.powf(sigma)) * weight;
            n += 1;
            pn *= p;
        }
    }
    Ok(LogLBound {
        sum,
        envelope: c * (conductor_scale.ln() / lx + 1.0),
    })
}

/// Left and main side of the prime-sum variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceValue {
    /// `Σ_{y<p<=x} (ℓ1 + ℓ2 λ_{sym²f}(p) + ℓ3 λ_{sym²g}(p))² / p`.
    pub left: f64,
    /// `(ℓ1² + ℓ2² + ℓ3²) log(log x / log y)`.
    pub main: f64,
}

fn twist_weight(e: &ExponentTriple, twist: &TwistData, i: usize) -> f64 {
    e.l1 + e.l2 * sym_power_eigenvalue(2, twist.theta_f[i])
        + e.l3 * sym_power_eigenvalue(2, twist.theta_g[i])
}

fn check_twist(twist: &TwistData, count: usize) -> Result<()> {
    if twist.theta_f.len() < count || twist.theta_g.len() < count {
        return Err(Error::Capacity(
            "missing twist angles below the prime cutoff",
        ));
    }
    Ok(())
}

/// Prime-sum variance over `(y, x]`.
pub fn prime_sum_variance(
    e: &ExponentTriple,
    x: f64,
    y: f64,
    spectrum: &SatakeSpectrum,
    twist: &TwistData,
) -> Result<VarianceValue> {
    if !(y >= 2.0 && y <= x) {
        return Err(Error::Domain("variance needs 2 <= y <= x"));
    }
    let count = spectrum.prime_count_to(x)?;
    check_twist(twist, count)?;
    let mut left = 0.0;
    for i in 0..count {
        let p = spectrum.primes[i] as f64;
        if p <= y {
            continue;
        }
        let a = twist_weight(e, twist, i);
        left += a * a / p;
    }
    Ok(VarianceValue {
        left,
        main: e.sum_squares() * (x.ln() / y.ln()).ln(),
    })
}

/// Per-prime weights `b_p` with `𝒫(t_j; x, y) = Σ_{p<=y} b_p λ_{u_j}(p)`:
/// `b_p = (ℓ1 + ℓ2 λ_{sym²f}(p) + ℓ3 λ_{sym²g}(p)) p^{-1/2-1/log x} (1 - log p/log x)`.
pub fn deviation_weights(
    e: &ExponentTriple,
    spectrum: &SatakeSpectrum,
    twist: &TwistData,
    x: f64,
    y: f64,
) -> Result<Vec<f64>> {
    if !(y >= 2.0 && y <= x) {
        return Err(Error::Domain("deviation polynomial needs 2 <= y <= x"));
    }
    let count = spectrum.prime_count_to(y)?;
    check_twist(twist, count)?;
    let lx = x.ln();
    Ok((0..count)
        .map(|i| {
            let p = spectrum.primes[i] as f64;
            twist_weight(e, twist, i) * p.powf(-0.5 - 1.0 / lx) * (1.0 - p.ln() / lx)
        })
        .collect())
}

/// `𝒫(t_j; x, y)` for one entry.
pub fn deviation_polynomial(
    e: &ExponentTriple,
    entry: &SatakeEntry,
    spectrum: &SatakeSpectrum,
    twist: &TwistData,
    x: f64,
    y: f64,
) -> Result<f64> {
    let w = deviation_weights(e, spectrum, twist, x, y)?;
    Ok(apply_weights(&w, entry))
}

/// `Σ_i b_i · 2 cos θ_i`.
pub(crate) fn apply_weights(w: &[f64], entry: &SatakeEntry) -> f64 {
    w.iter()
        .zip(&entry.angles)
        .map(|(b, th)| b * 2.0 * th.cos())
        .sum()
}
