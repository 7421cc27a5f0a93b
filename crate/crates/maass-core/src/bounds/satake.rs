//! Satake angles: computed from forms or drawn from a random model.
//!
//! With `α(p) = e^{iθ}`, `β(p) = e^{-iθ}` and `θ ∈ [0, π]` we have
//! `λ(p) = 2 cos θ`. The random models draw `θ` independently for every
//! prime and every entry, either uniformly or from the Sato–Tate density
//! `(2/π) sin²θ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automorphic::MaassForm;
use crate::primes::primes_up_to;
use crate::{Error, Result};

/// Where the angles come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatakeModel {
    Computed,
    Uniform,
    SatoTate,
}

impl SatakeModel {
    pub fn as_str(self) -> &'static str {
        match self {
            SatakeModel::Computed => "computed",
            SatakeModel::Uniform => "uniform",
            SatakeModel::SatoTate => "sato-tate",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "computed" => Ok(SatakeModel::Computed),
            "uniform" | "synthetic-uniform" => Ok(SatakeModel::Uniform),
            "sato-tate" | "synthetic-sato-tate" => Ok(SatakeModel::SatoTate),
            _ => Err(Error::Domain("unknown Satake model")),
        }
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            SatakeModel::Computed | SatakeModel::Uniform => rng.gen_range(0.0..PI),
            SatakeModel::SatoTate => loop {
                let th: f64 = rng.gen_range(0.0..PI);
                let s = th.sin();
                if rng.gen::<f64>() < s * s {
                    break th;
                }
            },
        }
    }
}

/// One spectral parameter with its angles at the primes of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SatakeEntry {
    pub t: f64,
    /// `angles[i]` belongs to `primes[i]`.
    pub angles: Vec<f64>,
}

/// Angles at a common list of primes.
#[derive(Debug, Clone, PartialEq)]
pub struct SatakeSpectrum {
    pub model: SatakeModel,
    pub primes: Vec<u64>,
    /// Every prime up to `p_max` is present.
    pub p_max: u64,
    pub entries: Vec<SatakeEntry>,
}

/// Angles of the fixed forms `f` and `g` entering the `sym²` twists.
///
/// For synthetic runs `t_f` and `t_g` are free parameters of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistData {
    pub t_f: f64,
    pub t_g: f64,
    pub theta_f: Vec<f64>,
    pub theta_g: Vec<f64>,
}

/// `θ = arccos(λ/2)`, clamping `λ` into `[-2, 2]`.
pub fn angle_from_eigenvalue(lambda: f64) -> f64 {
    (0.5 * lambda).clamp(-1.0, 1.0).acos()
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl SatakeSpectrum {
    /// `n` entries with `t` uniform in `(t_lo, t_hi]` and angles for every
    /// prime up to `p_max`.
    ///
    /// Entry `j` takes its angles from its own random stream, so the same
    /// seed gives the same angles at every window position and every `p_max`.
    pub fn synthetic(
        model: SatakeModel,
        n: usize,
        t_range: (f64, f64),
        p_max: u64,
        seed: u64,
    ) -> Result<Self> {
        if model == SatakeModel::Computed {
            return Err(Error::Domain("synthetic spectra need a random model"));
        }
        let (lo, hi) = t_range;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain("synthetic spectrum needs t_lo < t_hi"));
        }
        let primes: Vec<u64> = primes_up_to(p_max as usize)
            .into_iter()
            .map(|p| p as u64)
            .collect();
        let mut entries = Vec::with_capacity(n);
        for j in 0..n {
            let mut rng = stream(seed, j as u64 + 2);
            // hi - u (hi - lo) with u in [0,1) lands in (lo, hi].
            let u: f64 = rng.gen();
            let t = hi - u * (hi - lo);
            let angles = primes.iter().map(|_| model.draw(&mut rng)).collect();
            entries.push(SatakeEntry { t, angles });
        }
        Ok(Self {
            model,
            primes,
            p_max,
            entries,
        })
    }

    /// Angles of computed forms at every prime up to `p_max`.
    pub fn from_forms(forms: &[MaassForm], p_max: u64) -> Result<Self> {
        let primes: Vec<u64> = primes_up_to(p_max as usize)
            .into_iter()
            .map(|p| p as u64)
            .collect();
        let mut entries = Vec::with_capacity(forms.len());
        for f in forms {
            let angles = primes
                .iter()
                .map(|&p| f.hecke_eigenvalue(p).map(angle_from_eigenvalue))
                .collect::<Result<_>>()?;
            entries.push(SatakeEntry { t: f.t, angles });
        }
        Ok(Self {
            model: SatakeModel::Computed,
            primes,
            p_max,
            entries,
        })
    }

    /// Number of primes `<= x`, or a capacity error if `x` exceeds the data.
    pub fn prime_count_to(&self, x: f64) -> Result<usize> {
        if x.floor() > self.p_max as f64 {
            return Err(Error::Capacity("Satake data do not reach the prime cutoff"));
        }
        Ok(self.primes.partition_point(|&p| (p as f64) <= x))
    }
}

impl TwistData {
    /// Random angles for `f` and `g` from their own streams.
    pub fn synthetic(
        model: SatakeModel,
        t_f: f64,
        t_g: f64,
        p_max: u64,
        seed: u64,
    ) -> Result<Self> {
        if !(t_f > 0.0 && t_g > 0.0) {
            return Err(Error::Domain("twist data need t_f, t_g > 0"));
        }
        let n = primes_up_to(p_max as usize).len();
        let mut rf = stream(seed, 0);
        let mut rg = stream(seed, 1);
        Ok(Self {
            t_f,
            t_g,
            theta_f: (0..n).map(|_| model.draw(&mut rf)).collect(),
            theta_g: (0..n).map(|_| model.draw(&mut rg)).collect(),
        })
    }

    /// Angles of two computed forms.
    pub fn from_forms(f: &MaassForm, g: &MaassForm, p_max: u64) -> Result<Self> {
        let primes = primes_up_to(p_max as usize);
        let th = |h: &MaassForm| -> Result<Vec<f64>> {
            primes
                .iter()
                .map(|&p| h.hecke_eigenvalue(p as u64).map(angle_from_eigenvalue))
                .collect()
        };
        Ok(Self {
            t_f: f.t,
            t_g: g.t,
            theta_f: th(f)?,
            theta_g: th(g)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_is_reproducible_and_nested() {
        let a = SatakeSpectrum::synthetic(SatakeModel::SatoTate, 5, (10.0, 20.0), 100, 7).unwrap();
        let b = SatakeSpectrum::synthetic(SatakeModel::SatoTate, 5, (10.0, 20.0), 100, 7).unwrap();
        assert_eq!(a, b);
        let c = SatakeSpectrum::synthetic(SatakeModel::SatoTate, 5, (10.0, 20.0), 50, 7).unwrap();
        for (x, y) in a.entries.iter().zip(&c.entries) {
            assert_eq!(x.t, y.t);
            assert_eq!(&x.angles[..c.primes.len()], &y.angles[..]);
        }
        for e in &a.entries {
            assert!(e.t > 10.0 && e.t <= 20.0);
            assert!(e.angles.iter().all(|th| (0.0..=PI).contains(th)));
        }
    }

    #[test]
    fn sato_tate_moments() {
        // E[λ²] = 1 and E[λ⁴] = 2 under Sato–Tate; E[λ²] = 2 under the uniform model.
        let s = SatakeSpectrum::synthetic(SatakeModel::SatoTate, 4000, (1.0, 2.0), 30, 3).unwrap();
        let u = SatakeSpectrum::synthetic(SatakeModel::Uniform, 4000, (1.0, 2.0), 30, 3).unwrap();
        let m = |sp: &SatakeSpectrum, k: i32| {
            let v: Vec<f64> = sp
                .entries
                .iter()
                .flat_map(|e| e.angles.iter().map(|th| (2.0 * th.cos()).powi(k)))
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!((m(&s, 2) - 1.0).abs() < 0.03);
        assert!((m(&s, 4) - 2.0).abs() < 0.08);
        assert!((m(&u, 2) - 2.0).abs() < 0.05);
    }

    #[test]
    fn coverage() {
        let s = SatakeSpectrum::synthetic(SatakeModel::Uniform, 1, (1.0, 2.0), 100, 3).unwrap();
        assert_eq!(s.prime_count_to(100.0).unwrap(), 25);
        assert_eq!(s.prime_count_to(100.9).unwrap(), 25);
        assert!(s.prime_count_to(101.0).is_err());
        assert_eq!(s.prime_count_to(2.0).unwrap(), 1);
    }
}
