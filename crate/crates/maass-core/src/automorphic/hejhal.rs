//! Hejhal's collocation method.
//!
//! Take `Q` points `z_m = x_m + iY` with `x_m = (2m-1)/(4Q)` below the
//! fundamental domain and their pullbacks `z*_m`. Automorphy `f(z_m) =
//! f(z*_m)` and discrete Fourier inversion give, for `n = 1..M0`,
//!
//! ```text
//! Σ_l a_l [ (2/Q) Σ_m φ_l(z*_m) cs(2πn x_m) - δ_{nl} √Y K̃(2πnY) ] = 0,
//! ```
//!
//! with `φ_l(z) = √y K̃(2πly) cs(2πlx)`. The spectral parameter is located as
//! a zero of the determinant; coefficients then follow by least squares with
//! `a_1 = 1`. Solving at two heights `Y` gives an independent check.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::{MaassForm, Normalization, Parity, TAIL_EPS, Y_MIN_DOMAIN};
use crate::domain::{reduce_to_fundamental, HalfPlanePoint};
use crate::linalg::{condition_estimate, least_squares, Lu, Matrix};
use crate::specfun::{k_bessel_imag, k_bessel_tail_cutoff, KTable};
use crate::{Error, Result};

/// Tunables of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Collocation height of the primary system.
    pub y1: f64,
    /// Collocation height of the checking system.
    pub y2: f64,
    /// Number of unknowns; `None` derives it from the K-Bessel tail.
    pub truncation: Option<usize>,
    /// Extra collocation points beyond the aliasing minimum.
    pub q_margin: usize,
    /// Scan step in `t`.
    pub step: f64,
    /// Number of stored coefficients.
    pub n_coeffs: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            y1: 0.82,
            y2: 0.76,
            truncation: None,
            q_margin: 6,
            step: 0.01,
            n_coeffs: 1000,
        }
    }
}

/// Truncation `M0` that makes `K̃(2π M0 y)` negligible on the domain.
pub fn default_truncation(t_hi: f64) -> Result<usize> {
    let x_cut = k_bessel_tail_cutoff(t_hi, TAIL_EPS)?;
    Ok((x_cut / (2.0 * PI * Y_MIN_DOMAIN)).ceil() as usize)
}

/// Table of `cs(2π k/(4Q))`, `k = 0..4Q`, so `cs(2πn x_m)` is a lookup.
struct TurnTable {
    q4: usize,
    vals: Vec<f64>,
}

impl TurnTable {
    fn new(parity: Parity, q: usize) -> Self {
        let q4 = 4 * q;
        let vals = (0..q4)
            .map(|k| parity.trig_turns(k as f64 / q4 as f64))
            .collect();
        Self { q4, vals }
    }

    /// `cs(2π n x_m)` with `x_m = (2m-1)/(4Q)`, `m` one-based.
    #[inline]
    fn at(&self, n: usize, m: usize) -> f64 {
        self.vals[(n * (2 * m - 1)) % self.q4]
    }
}

/// Collocation points at one height, pulled back into the domain.
struct Collocation {
    parity: Parity,
    y: f64,
    q: usize,
    pulled: Vec<HalfPlanePoint>,
    turns: TurnTable,
}

impl Collocation {
    fn new(parity: Parity, y: f64, q: usize) -> Result<Self> {
        let mut pulled = Vec::with_capacity(q);
        for m in 1..=q {
            let x = (2 * m - 1) as f64 / (4 * q) as f64;
            let (w, _) = reduce_to_fundamental(HalfPlanePoint { x, y })?;
            pulled.push(w);
        }
        Ok(Self {
            parity,
            y,
            q,
            pulled,
            turns: TurnTable::new(parity, q),
        })
    }
}

/// The square collocation system of one height.
struct System {
    col: Collocation,
    m0: usize,
    x_cut: f64,
}

impl System {
    fn new(parity: Parity, y: f64, m0: usize, x_cut: f64, q_margin: usize) -> Result<Self> {
        if !(y > 0.0 && y < Y_MIN_DOMAIN) {
            return Err(Error::Domain(
                "collocation height must lie below the domain",
            ));
        }
        // Terms up to x_cut/(2πY) must not alias onto indices <= M0.
        let q = ((m0 as f64 + x_cut / (2.0 * PI * y)) / 2.0).ceil() as usize + q_margin;
        Ok(Self {
            col: Collocation::new(parity, y, q)?,
            m0,
            x_cut,
        })
    }

    fn matrix(&self, t: f64) -> Result<Matrix> {
        let (m0, q) = (self.m0, self.col.q);
        // phi[m][l] = φ_{l+1}(z*_m)
        let mut phi = alloc::vec![0.0; q * m0];
        for (m, z) in self.col.pulled.iter().enumerate() {
            let sy = z.y.sqrt();
            for l in 1..=m0 {
                let x = 2.0 * PI * l as f64 * z.y;
                if x >= self.x_cut {
                    break;
                }
                phi[m * m0 + l - 1] =
                    sy * k_bessel_imag(t, x)? * self.col.parity.trig_turns(l as f64 * z.x);
            }
        }
        let mut v = Matrix::zeros(m0, m0);
        let scale = 2.0 / q as f64;
        for n in 1..=m0 {
            for m in 1..=q {
                let c = scale * self.col.turns.at(n, m);
                let row = &phi[(m - 1) * m0..m * m0];
                for l in 0..m0 {
                    v.add(n - 1, l, c * row[l]);
                }
            }
            let sy = self.col.y.sqrt();
            let kd = k_bessel_imag(t, 2.0 * PI * n as f64 * self.col.y)?;
            v.add(n - 1, n - 1, -sy * kd);
        }
        Ok(v)
    }

    fn sign_log_det(&self, t: f64) -> Result<(f64, f64)> {
        Ok(Lu::new(&self.matrix(t)?).sign_log_det())
    }

    /// Least-squares coefficients with `a_1 = 1`, the relative residual and
    /// the condition estimate of the constrained square system.
    fn coefficients(&self, t: f64) -> Result<(Vec<f64>, f64, f64)> {
        let v = self.matrix(t)?;
        let m0 = self.m0;
        let mut a = Matrix::zeros(m0, m0 - 1);
        let mut b = alloc::vec![0.0; m0];
        for n in 0..m0 {
            b[n] = -v.get(n, 0);
            for l in 1..m0 {
                a.set(n, l - 1, v.get(n, l));
            }
        }
        let mut constrained = v.clone();
        for l in 0..m0 {
            constrained.set(0, l, if l == 0 { 1.0 } else { 0.0 });
        }
        let cond = condition_estimate(&equilibrate(constrained));
        let (x, res) = least_squares(&a, &b)?;
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let mut out = alloc::vec![1.0];
        out.extend(x);
        Ok((out, res / bnorm, cond))
    }
}

/// Row then column scaling to unit max-norm, so the condition estimate
/// ignores the harmless decay of `K̃` along rows and columns.
fn equilibrate(mut m: Matrix) -> Matrix {
    for i in 0..m.rows {
        let s = (0..m.cols).map(|j| m.get(i, j).abs()).fold(0.0, f64::max);
        if s > 0.0 {
            for j in 0..m.cols {
                m.set(i, j, m.get(i, j) / s);
            }
        }
    }
    for j in 0..m.cols {
        let s = (0..m.rows).map(|i| m.get(i, j).abs()).fold(0.0, f64::max);
        if s > 0.0 {
            for i in 0..m.rows {
                m.set(i, j, m.get(i, j) / s);
            }
        }
    }
    m
}

/// Brent's method on a bracketed sign change.
fn brent<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Contract("brent needs a sign change"));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Ok(b)
}

/// Scans `[lo, hi]` for sign changes of the determinant, subdividing around
/// local minima of `log|det|` so that close pairs are not stepped over.
fn scan(sys: &System, lo: f64, hi: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    let n = ((hi - lo) / step).ceil().max(2.0) as usize;
    let ts: Vec<f64> = (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect();
    let vals: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| sys.sign_log_det(t))
        .collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    for k in 0..n {
        if vals[k].0 != vals[k + 1].0 {
            brackets.push((ts[k], ts[k + 1]));
        }
    }
    for k in 1..n {
        let is_min = vals[k].1 < vals[k - 1].1 && vals[k].1 < vals[k + 1].1;
        let no_change = vals[k - 1].0 == vals[k].0 && vals[k].0 == vals[k + 1].0;
        if is_min && no_change {
            subdivide(sys, ts[k - 1], ts[k + 1], 2, &mut brackets)?;
        }
    }
    brackets.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(brackets)
}

fn subdivide(sys: &System, a: f64, b: f64, depth: usize, out: &mut Vec<(f64, f64)>) -> Result<()> {
    const PARTS: usize = 16;
    let ts: Vec<f64> = (0..=PARTS)
        .map(|k| a + (b - a) * k as f64 / PARTS as f64)
        .collect();
    let vals: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| sys.sign_log_det(t))
        .collect::<Result<_>>()?;
    let mut found = false;
    for k in 0..PARTS {
        if vals[k].0 != vals[k + 1].0 {
            out.push((ts[k], ts[k + 1]));
            found = true;
        }
    }
    if found || depth == 0 {
        return Ok(());
    }
    for k in 1..PARTS {
        if vals[k].1 < vals[k - 1].1 && vals[k].1 < vals[k + 1].1 {
            subdivide(sys, ts[k - 1], ts[k + 1], depth - 1, out)?;
        }
    }
    Ok(())
}

fn refine(sys: &System, a: f64, b: f64) -> Result<f64> {
    let (_, lref) = sys.sign_log_det(a)?;
    brent(
        |t| {
            let (s, l) = sys.sign_log_det(t)?;
            Ok(s * (l - lref).exp())
        },
        a,
        b,
        1e-13,
    )
}

/// Number of leading coefficients (counting `a_1`) accurate enough to compare.
fn checked_coefficients(m0: usize) -> usize {
    6.min(m0 / 2 + 1)
}

struct Candidate {
    t: f64,
    coeffs: Vec<f64>,
    error: f64,
}

fn certify(
    parity: Parity,
    bracket: (f64, f64),
    primary: &System,
    check: &System,
) -> Result<Option<Candidate>> {
    let t1 = refine(primary, bracket.0, bracket.1)?;
    // The checking system must have its own zero close by.
    let w = 0.02;
    let probe = scan(check, t1 - w, t1 + w, w / 8.0)?;
    let near = probe.iter().min_by(|p, q| {
        let dp = (0.5 * (p.0 + p.1) - t1).abs();
        let dq = (0.5 * (q.0 + q.1) - t1).abs();
        dp.partial_cmp(&dq).unwrap()
    });
    let Some(&(ca, cb)) = near else {
        return Ok(None);
    };
    let t2 = refine(check, ca, cb)?;
    let (c1, r1, cond) = primary.coefficients(t1)?;
    if !cond.is_finite() || cond > 1e13 {
        return Err(Error::Numerical {
            what: "collocation system is ill-conditioned",
            estimate: cond,
        });
    }
    let (c2, r2, _) = check.coefficients(t1)?;
    // Only the well-determined low coefficients are compared.
    let k = checked_coefficients(c1.len());
    let disc = (1..k).map(|i| (c1[i] - c2[i]).abs()).fold(0.0, f64::max);
    // A spurious zero has unrelated coefficients at the two heights.
    if disc > 1e-3 || (t1 - t2).abs() > 1e-4 {
        return Ok(None);
    }
    let _ = parity;
    let error = disc.max((t1 - t2).abs()).max(r1).max(r2);
    Ok(Some(Candidate {
        t: t1,
        coeffs: c1,
        error,
    }))
}

/// All forms of the given parity with `t` in `[lo, hi]` (length at most 1).
pub fn solve_window(
    parity: Parity,
    lo: f64,
    hi: f64,
    cfg: &SolverConfig,
) -> Result<Vec<MaassForm>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain("window must satisfy 0 < lo < hi"));
    }
    if hi - lo > 1.0 + 1e-12 {
        return Err(Error::Domain("window length must be at most 1"));
    }
    let x_cut = k_bessel_tail_cutoff(hi, TAIL_EPS)?;
    let m0 = match cfg.truncation {
        Some(m) => m,
        None => default_truncation(hi)?,
    };
    if m0 < 3 {
        return Err(Error::Domain("truncation must be at least 3"));
    }
    let primary = System::new(parity, cfg.y1, m0, x_cut, cfg.q_margin)?;
    let check = System::new(parity, cfg.y2, m0, x_cut, cfg.q_margin)?;
    let mut out: Vec<MaassForm> = Vec::new();
    for br in scan(&primary, lo, hi, cfg.step)? {
        if let Some(c) = certify(parity, br, &primary, &check)? {
            if c.t < lo || c.t > hi || out.iter().any(|f| (f.t - c.t).abs() < 1e-9) {
                continue;
            }
            let coefficients =
                extend_coefficients(parity, c.t, &c.coeffs, cfg.n_coeffs.max(c.coeffs.len()))?;
            let mut form = MaassForm {
                parity,
                t: c.t,
                coefficients,
                normalization: Normalization::Hecke,
                certified_error: c.error,
            };
            let stage_gap = (1..checked_coefficients(c.coeffs.len()))
                .map(|i| (c.coeffs[i] - form.coefficients[i]).abs())
                .fold(0.0, f64::max);
            form.certified_error = form
                .certified_error
                .max(stage_gap)
                .max(form.hecke_residual(100));
            out.push(form);
        }
    }
    Ok(out)
}

/// The lowest form of the given parity in `window`.
pub fn solve_maass(
    parity: Parity,
    window: (f64, f64),
    n_coeffs: usize,
    truncation: Option<usize>,
) -> Result<MaassForm> {
    let cfg = SolverConfig {
        truncation,
        n_coeffs,
        ..SolverConfig::default()
    };
    solve_window(parity, window.0, window.1, &cfg)?
        .into_iter()
        .next()
        .ok_or(Error::NotFound("no eigenvalue in the window"))
}

/// Collocation heights tried for small `n`, where `2πnY` is oscillatory.
const SMALL_N_HEIGHTS: [f64; 12] = [
    0.80, 0.77, 0.74, 0.71, 0.68, 0.65, 0.62, 0.59, 0.56, 0.53, 0.50, 0.47,
];

/// Computes `a(1..=n_max)` from the first coefficients `base` (with
/// `a(1) = 1`) by Fourier inversion at heights where `K̃(2πnY)` is not small.
pub fn extend_coefficients(parity: Parity, t: f64, base: &[f64], n_max: usize) -> Result<Vec<f64>> {
    let x_cut = k_bessel_tail_cutoff(t, TAIL_EPS)?;
    let table = KTable::new(t, 2.0 * PI * Y_MIN_DOMAIN * 0.999, x_cut)?;
    let m0 = base.len();
    // f at pulled-back points from the base expansion.
    let f_at = |z: HalfPlanePoint| -> f64 {
        let sy = z.y.sqrt();
        let mut s = 0.0;
        for l in 1..=m0 {
            let x = 2.0 * PI * l as f64 * z.y;
            if x >= x_cut {
                break;
            }
            s += base[l - 1] * table.eval(x) * parity.trig_turns(l as f64 * z.x);
        }
        sy * s
    };
    // Fourier coefficients c_n = a_n √Y K̃(2πnY) for n in [n_lo, n_hi].
    let batch = |y: f64, n_lo: usize, n_hi: usize| -> Result<Vec<(f64, f64)>> {
        let q = ((n_hi as f64 + x_cut / (2.0 * PI * y)) / 2.0).ceil() as usize + 8;
        let col = Collocation::new(parity, y, q)?;
        let vals: Vec<f64> = col.pulled.iter().map(|z| f_at(*z)).collect();
        let mut out = Vec::with_capacity(n_hi + 1 - n_lo);
        for n in n_lo..=n_hi {
            let mut s = 0.0;
            for (m, v) in vals.iter().enumerate() {
                s += v * col.turns.at(n, m + 1);
            }
            let c = 2.0 * s / q as f64;
            let w = y.sqrt() * k_bessel_imag(t, 2.0 * PI * n as f64 * y)?;
            out.push((c, w));
        }
        Ok(out)
    };
    let mut a = alloc::vec![0.0; n_max];
    a[0] = 1.0;
    // Small n: best of several heights.
    let y_top = SMALL_N_HEIGHTS[0];
    let n_small = ((t / (2.0 * PI * y_top)).floor() as usize).min(n_max);
    if n_small >= 2 {
        let mut best = alloc::vec![(0.0f64, 0.0f64); n_small + 1];
        for &y in &SMALL_N_HEIGHTS {
            for (i, (c, w)) in batch(y, 2, n_small)?.into_iter().enumerate() {
                let n = i + 2;
                if w.abs() > best[n].1.abs() {
                    best[n] = (c, w);
                }
            }
        }
        for n in 2..=n_small {
            a[n - 1] = best[n].0 / best[n].1;
        }
    }
    // Large n: 2πnY sweeps [t, t + W] past the turning point.
    let r = t.max(1.0);
    let k0 = k_bessel_imag(t, r)?.abs();
    let mut width = 1.0;
    while width < 200.0 && k_bessel_imag(t, r + width)?.abs() > 1e-3 * k0 {
        width += 0.5;
    }
    let mut n_lo = n_small.max(1) + 1;
    while n_lo <= n_max {
        let y = (r / (2.0 * PI * n_lo as f64)).min(y_top);
        let n_hi = (((r + width) / (2.0 * PI * y)).floor() as usize).clamp(n_lo, n_max);
        for (i, (c, w)) in batch(y, n_lo, n_hi)?.into_iter().enumerate() {
            a[n_lo + i - 1] = c / w;
        }
        n_lo = n_hi + 1;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cosine_root() {
        let r = brent(|x| Ok(x.cos()), 1.0, 2.0, 1e-14).unwrap();
        assert!((r - core::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }
}
