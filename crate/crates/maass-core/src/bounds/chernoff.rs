//! Deviation counts and the Chernoff integration.
//!
//! The sum of `𝓛(t_j)` over a window is written as
//! `e^{μ} ∫ e^V ℬ(V + μ) dV`, the count `ℬ(V + μ)` is bounded by the
//! deviation count `𝒜(V(1 - 2ε); x)`, and the trivial count is used below
//! `V = √(log log X)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::coefficients::{apply_weights, deviation_weights, ExponentTriple};
use super::satake::{SatakeSpectrum, TwistData};
use crate::kuznetsov::{diagonal_main_term, SpectralWindow};
use crate::quad::adaptive;
use crate::{Error, Result};

/// `∫ e^{-v²/2σ² + v} dv` by quadrature next to `√(2π) σ e^{σ²/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCheck {
    pub sigma: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub relative_error: f64,
}

/// Integrates over `|v| <= 12σ + 12`.
pub fn gaussian_identity_check(sigma: f64) -> Result<GaussianCheck> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain("Gaussian check needs sigma > 0"));
    }
    let closed = (2.0 * PI).sqrt() * sigma * (0.5 * sigma * sigma).exp();
    let half = 12.0 * sigma + 12.0;
    let s2 = sigma * sigma;
    // Split at the peak v = σ² so each half is unimodal.
    let f = |v: f64| (-v * v / (2.0 * s2) + v).exp();
    let peak = s2.min(half);
    let (a, _) = adaptive(f, -half, peak, 1e-13 * closed)?;
    let (b, _) = adaptive(f, peak, half, 1e-13 * closed)?;
    let numeric = a + b;
    Ok(GaussianCheck {
        sigma,
        numeric,
        closed_form: closed,
        relative_error: (numeric / closed - 1.0).abs(),
    })
}

/// `𝒜_{X,Y}(V; x)`: entries with `X < t_j <= X + Y` and `𝒫(t_j; x, x) > V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationCount {
    pub v: f64,
    /// Weighted count, weight 1 per entry.
    pub count: f64,
    pub window: SpectralWindow,
    pub x: f64,
}

fn in_window(t: f64, w: &SpectralWindow) -> bool {
    t > w.x && t <= w.x + w.y
}

/// `𝒫(t_j; x, x)` for every entry inside the window, in entry order.
pub fn deviation_values(
    spectrum: &SatakeSpectrum,
    twist: &TwistData,
    e: &ExponentTriple,
    w: &SpectralWindow,
    x: f64,
) -> Result<Vec<f64>> {
    let weights = deviation_weights(e, spectrum, twist, x, x)?;
    let vals: Vec<f64> = spectrum
        .entries
        .iter()
        .filter(|en| in_window(en.t, w))
        .map(|en| apply_weights(&weights, en))
        .collect();
    if vals.is_empty() {
        return Err(Error::Domain("no spectrum entries in the window"));
    }
    Ok(vals)
}

/// Counts entries with `𝒫(t_j; x, x) > V`.
pub fn deviation_count(
    spectrum: &SatakeSpectrum,
    twist: &TwistData,
    e: &ExponentTriple,
    v: f64,
    w: &SpectralWindow,
    x: f64,
) -> Result<DeviationCount> {
    let vals = deviation_values(spectrum, twist, e, w, x)?;
    let count = vals.iter().filter(|p| **p > v).count() as f64;
    Ok(DeviationCount {
        v,
        count,
        window: *w,
        x,
    })
}

/// Empirical `E[𝒫^{2r}]` against `(2r)!/(r! 2^r) σ^{2r}` with
/// `σ² = Σ_{p<=x} b_p²`, the random-model form of the moment estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub r: u32,
    pub empirical: f64,
    pub predicted: f64,
    pub sigma2: f64,
    /// `empirical / predicted`.
    pub ratio: f64,
}

/// Monte Carlo even moments of `𝒫` over the entries of a window.
pub fn dirichlet_moment_check(
    spectrum: &SatakeSpectrum,
    twist: &TwistData,
    e: &ExponentTriple,
    w: &SpectralWindow,
    x: f64,
    r: u32,
) -> Result<MomentCheck> {
    if r == 0 {
        return Err(Error::Domain("moment check needs r >= 1"));
    }
    let weights = deviation_weights(e, spectrum, twist, x, x)?;
    let sigma2: f64 = weights.iter().map(|b| b * b).sum();
    let vals = deviation_values(spectrum, twist, e, w, x)?;
    let empirical = vals.iter().map(|p| p.powi(2 * r as i32)).sum::<f64>() / vals.len() as f64;
    let mut c = 1.0;
    for k in 1..=r {
        c *= (2 * k - 1) as f64;
    }
    let predicted = c * sigma2.powi(r as i32);
    Ok(MomentCheck {
        r,
        empirical,
        predicted,
        sigma2,
        ratio: empirical / predicted,
    })
}

/// How the prime cutoff `x` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XChoice {
    /// `x = (X + t_g)^θ` for every `V`.
    Power(f64),
    /// `x = (X + t_g)^{1/(εV)}`.
    Proof,
    /// `x = min{(X + t_g)^{1/(εV)}, Y^{(16 - 0.0001)/(9εV)}}`.
    ProofWithY,
}

/// Settings for [`chernoff_moment_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffConfig {
    pub eps: f64,
    /// `C` in the upper limit `C log(X + t_g) / log log(X + t_g)`.
    pub c_upper: f64,
    pub x_choice: XChoice,
    /// Logarithmically placed integration nodes.
    pub v_nodes: usize,
}

impl Default for ChernoffConfig {
    fn default() -> Self {
        Self {
            eps: 0.1,
            c_upper: 2.0,
            x_choice: XChoice::Power(1.0),
            v_nodes: 1000,
        }
    }
}

/// One `V`-range of the integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeContribution {
    pub name: &'static str,
    pub v_lo: f64,
    pub v_hi: f64,
    pub value: f64,
}

/// The assembled bound with its pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct ChernoffReport {
    pub bound: f64,
    /// `bound` divided by the number of entries in the window.
    pub per_entry: f64,
    pub entries: usize,
    /// Entries at `t_f` or `t_g`, left out of the counts; their own
    /// `𝓛(t_f)`, `𝓛(t_g)` terms need central values and are not added.
    pub self_terms: usize,
    /// `(-1/2 + ε)(ℓ1 + ℓ2 + ℓ3) log log(X + t_g)`.
    pub mu: f64,
    /// `(ℓ1² + ℓ2² + ℓ3²) log log(X + t_g)`.
    pub sigma2: f64,
    /// `Σ_{p<=x} b_p²` at the cutoff used for the first node.
    pub sigma2_measured: f64,
    /// `√(2π) σ e^{σ²/2}`.
    pub gaussian_reference: f64,
    /// `(2/π) X Y + (1/π) Y²`.
    pub g_main: f64,
    pub breakdown: Vec<RegimeContribution>,
    /// Whether some `x` had to be lowered to the largest available prime.
    pub x_capped: bool,
    pub x_first: f64,
}

fn x_at(cfg: &ChernoffConfig, w: &SpectralWindow, t_g: f64, v: f64) -> f64 {
    let q = w.x + t_g;
    match cfg.x_choice {
        XChoice::Power(th) => q.powf(th),
        XChoice::Proof => q.powf(1.0 / (cfg.eps * v)),
        XChoice::ProofWithY => q
            .powf(1.0 / (cfg.eps * v))
            .min(w.y.powf((16.0 - 0.0001) / (9.0 * cfg.eps * v))),
    }
}

/// Sorted `𝒫` values for a cutoff, excluding the self terms.
struct Sample {
    sorted: Vec<f64>,
}

impl Sample {
    fn count_above(&self, v: f64) -> f64 {
        (self.sorted.len() - self.sorted.partition_point(|p| *p <= v)) as f64
    }
}

/// Runs the Chernoff pipeline on one window.
pub fn chernoff_moment_bound(
    spectrum: &SatakeSpectrum,
    twist: &TwistData,
    e: &ExponentTriple,
    w: &SpectralWindow,
    cfg: &ChernoffConfig,
) -> Result<ChernoffReport> {
    if !e.is_positive() {
        return Err(Error::Domain("Chernoff bound needs positive exponents"));
    }
    if !(cfg.eps > 0.0 && cfg.eps < 0.5) || !(cfg.c_upper >= 1.0) || cfg.v_nodes < 2 {
        return Err(Error::Domain(
            "Chernoff settings need 0 < eps < 1/2, C >= 1 and two nodes",
        ));
    }
    if let XChoice::Power(th) = cfg.x_choice {
        if !(th > 0.0) {
            return Err(Error::Domain("x exponent must be positive"));
        }
    }
    let q = w.x + twist.t_g;
    let llq = q.ln().ln();
    let mu = (-0.5 + cfg.eps) * e.sum() * llq;
    let sigma2 = e.sum_squares() * llq;
    let v_lo = w.x.ln().ln().max(0.0).sqrt();
    let v_hi = cfg.c_upper * q.ln() / llq;
    if !(v_hi > v_lo) {
        return Err(Error::Domain("window too small for the integration range"));
    }
    let is_self = |t: f64| (t - twist.t_f).abs() < 1e-9 || (t - twist.t_g).abs() < 1e-9;
    let in_win: Vec<usize> = (0..spectrum.entries.len())
        .filter(|&j| in_window(spectrum.entries[j].t, w))
        .collect();
    if in_win.is_empty() {
        return Err(Error::Domain("no spectrum entries in the window"));
    }
    let self_terms = in_win
        .iter()
        .filter(|&&j| is_self(spectrum.entries[j].t))
        .count();
    let counted: Vec<usize> = in_win
        .iter()
        .copied()
        .filter(|&j| !is_self(spectrum.entries[j].t))
        .collect();
    let n = counted.len();

    let p_cap = spectrum.p_max as f64;
    let mut x_capped = false;
    let mut cutoff = |v: f64| -> f64 {
        let x = x_at(cfg, w, twist.t_g, v);
        if x > p_cap {
            x_capped = true;
            p_cap
        } else {
            x
        }
    };
    let sample_at = |x: f64| -> Result<(Sample, f64)> {
        let weights = deviation_weights(e, spectrum, twist, x, x)?;
        let s2: f64 = weights.iter().map(|b| b * b).sum();
        let mut sorted: Vec<f64> = counted
            .iter()
            .map(|&j| apply_weights(&weights, &spectrum.entries[j]))
            .collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        Ok((Sample { sorted }, s2))
    };

    // Log-spaced nodes on [v_lo, v_hi]; x is refreshed once per block of
    // nodes when it depends on V.
    let nodes: Vec<f64> = {
        let a = v_lo.max(1e-3).ln();
        let b = v_hi.ln();
        (0..cfg.v_nodes)
            .map(|i| (a + (b - a) * i as f64 / (cfg.v_nodes - 1) as f64).exp())
            .collect()
    };
    let block = match cfg.x_choice {
        XChoice::Power(_) => cfg.v_nodes,
        _ => (cfg.v_nodes / 50).max(1),
    };
    let shrink = 1.0 - 2.0 * cfg.eps;
    let mut values = Vec::with_capacity(nodes.len());
    let mut x_first = 0.0;
    let mut sigma2_measured = 0.0;
    for (bi, chunk) in nodes.chunks(block).enumerate() {
        let mid = chunk[chunk.len() / 2];
        let x = cutoff(mid).max(2.0);
        let (sample, s2) = sample_at(x)?;
        if bi == 0 {
            x_first = x;
            sigma2_measured = s2;
        }
        for &v in chunk {
            values.push(v.exp() * sample.count_above(v * shrink));
        }
    }
    let v_mid = (0.1 * cfg.eps * sigma2 * llq).clamp(nodes[0], v_hi);
    let mut moderate = 0.0;
    let mut large = 0.0;
    for i in 1..nodes.len() {
        let piece = 0.5 * (values[i] + values[i - 1]) * (nodes[i] - nodes[i - 1]);
        if nodes[i] <= v_mid {
            moderate += piece;
        } else {
            large += piece;
        }
    }
    let em = mu.exp();
    let trivial = em * n as f64 * nodes[0].exp();
    let breakdown = alloc::vec![
        RegimeContribution {
            name: "trivial",
            v_lo: f64::NEG_INFINITY,
            v_hi: nodes[0],
            value: trivial
        },
        RegimeContribution {
            name: "moderate",
            v_lo: nodes[0],
            v_hi: v_mid,
            value: em * moderate
        },
        RegimeContribution {
            name: "large",
            v_lo: v_mid,
            v_hi,
            value: em * large
        },
    ];
    let bound: f64 = breakdown.iter().map(|r| r.value).sum();
    Ok(ChernoffReport {
        bound,
        per_entry: if n > 0 { bound / n as f64 } else { 0.0 },
        entries: n,
        self_terms,
        mu,
        sigma2,
        sigma2_measured,
        gaussian_reference: (2.0 * PI * sigma2).sqrt() * (0.5 * sigma2).exp(),
        g_main: diagonal_main_term(w),
        breakdown,
        x_capped,
        x_first,
    })
}

/// Least-squares slope of `ln(value)` against `ln ln(scale)`.
pub fn fit_log_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Domain("exponent fit needs two points"));
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|(s, v)| (s.ln().ln(), v.ln())).collect();
    if pts.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::Domain(
            "exponent fit needs scales above e and positive values",
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("exponent fit needs distinct scales"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::super::satake::SatakeModel;
    use super::*;

    #[test]
    fn gaussian_identity() {
        for s in [1.0, 2.0, 5.0] {
            let c = gaussian_identity_check(s).unwrap();
            assert!(c.relative_error < 1e-8, "{c:?}");
        }
    }

    fn setup(
        model: SatakeModel,
        n: usize,
        x: f64,
        p_max: u64,
    ) -> (SatakeSpectrum, TwistData, SpectralWindow) {
        let w = SpectralWindow::new(x, x / 2.0, 10.0).unwrap();
        let s = SatakeSpectrum::synthetic(model, n, (x, x + x / 2.0), p_max, 11).unwrap();
        let tw = TwistData::synthetic(model, 10.0, 20.0, p_max, 11).unwrap();
        (s, tw, w)
    }

    #[test]
    fn count_extremes_and_monotonicity() {
        let (s, tw, w) = setup(SatakeModel::SatoTate, 500, 1000.0, 1000);
        let e = ExponentTriple::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            deviation_count(&s, &tw, &e, -1e6, &w, 1000.0)
                .unwrap()
                .count,
            500.0
        );
        assert_eq!(
            deviation_count(&s, &tw, &e, 1e6, &w, 1000.0).unwrap().count,
            0.0
        );
        let mut prev = f64::INFINITY;
        for k in -20..=20 {
            let c = deviation_count(&s, &tw, &e, 0.25 * k as f64, &w, 1000.0)
                .unwrap()
                .count;
            assert!(c <= prev);
            prev = c;
        }
        let empty = SpectralWindow::new(5000.0, 100.0, 10.0).unwrap();
        assert!(deviation_count(&s, &tw, &e, 0.0, &empty, 1000.0).is_err());
    }

    #[test]
    fn moments_under_sato_tate() {
        let (s, tw, w) = setup(SatakeModel::SatoTate, 4000, 1000.0, 1000);
        let e = ExponentTriple::new(1.0, 1.0, 1.0).unwrap();
        for r in 1..=3 {
            let m = dirichlet_moment_check(&s, &tw, &e, &w, 1000.0, r).unwrap();
            assert!(m.ratio > 0.5 && m.ratio < 2.0, "{m:?}");
        }
    }

    #[test]
    fn fit_recovers_a_power() {
        let pts: Vec<(f64, f64)> = [1e3f64, 1e4, 1e5]
            .iter()
            .map(|&x| (x, 3.0 * x.ln().powf(1.7)))
            .collect();
        assert!((fit_log_exponent(&pts).unwrap() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn count_against_gaussian_tail() {
        // Uniform model: E[λ²] = 2, so Var 𝒫 = 2 Σ b_p². The tail at 2σ is
        // 0.02275. A few small primes carry large weights, which makes the
        // tail lighter than Gaussian for some twist draws.
        let x = 1000.0;
        let w = SpectralWindow::new(x, x / 2.0, 10.0).unwrap();
        let e = ExponentTriple::new(1.0, 1.0, 1.0).unwrap();
        let mut ratios = Vec::new();
        for seed in 1..=5 {
            let s =
                SatakeSpectrum::synthetic(SatakeModel::Uniform, 10_000, (x, 1.5 * x), 1000, seed)
                    .unwrap();
            let tw = TwistData::synthetic(SatakeModel::Uniform, 10.0, 20.0, 1000, seed).unwrap();
            let b2: f64 = deviation_weights(&e, &s, &tw, x, x)
                .unwrap()
                .iter()
                .map(|b| b * b)
                .sum();
            let sigma = (2.0 * b2).sqrt();
            let c = deviation_count(&s, &tw, &e, 2.0 * sigma, &w, x).unwrap();
            ratios.push(c.count / 10_000.0 / 0.02275);
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(ratios[2] > 1.0 / 3.0 && ratios[2] < 3.0, "{ratios:?}");
        assert!(ratios.iter().all(|r| *r > 0.1 && *r < 10.0), "{ratios:?}");
    }

    #[test]
    fn bound_grows_with_each_exponent() {
        // e^{μ} falls with ℓ while the measured variance grows slowly at
        // this X, so the growth only sets in near ℓ = 2. Past ℓ = 3.5 the
        // upper limit of the V-integral cuts off the tail and it falls again.
        let (s, tw, w) = setup(SatakeModel::SatoTate, 2000, 1000.0, 1100);
        let cfg = ChernoffConfig::default();
        let b = |l: (f64, f64, f64)| {
            let e = ExponentTriple::new(l.0, l.1, l.2).unwrap();
            chernoff_moment_bound(&s, &tw, &e, &w, &cfg).unwrap().bound
        };
        let grid = [2.5, 2.75, 3.0, 3.25, 3.5];
        for k in 0..3 {
            let mut prev = 0.0;
            for &l in &grid {
                let mut t = [1.0, 1.0, 1.0];
                t[k] = l;
                let v = b((t[0], t[1], t[2]));
                assert!(v >= prev, "component {k} at {l}: {v} < {prev}");
                prev = v;
            }
        }
    }

    #[test]
    fn report_pieces_add_up() {
        let (s, tw, w) = setup(SatakeModel::SatoTate, 1000, 1000.0, 1100);
        let e = ExponentTriple::new(1.0, 1.0, 1.0).unwrap();
        let r = chernoff_moment_bound(&s, &tw, &e, &w, &ChernoffConfig::default()).unwrap();
        let sum: f64 = r.breakdown.iter().map(|p| p.value).sum();
        assert!((sum - r.bound).abs() <= 1e-12 * r.bound);
        assert_eq!(r.entries, 1000);
        assert!(!r.x_capped);
        let zero = ExponentTriple::new(1.0, 0.0, 1.0).unwrap();
        assert!(chernoff_moment_bound(&s, &tw, &zero, &w, &ChernoffConfig::default()).is_err());
    }
}
