//! Smooth bump observables on the modular surface.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{reduce_to_fundamental, HalfPlanePoint, Sl2z};
use crate::{Error, Result};

const ENTRY_BOUND: i64 = 8;

/// `ψ(z) = exp(1 - 1/(1 - r²))` with `r = d(z, center)/radius`, extended by
/// zero, and made `Γ`-invariant by summing over the images of the center.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub center: HalfPlanePoint,
    pub radius: f64,
    /// Images of the center whose ball can meet the fundamental domain.
    images: Vec<HalfPlanePoint>,
}

fn profile(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Group elements with entries bounded by [`ENTRY_BOUND`], one per sign class.
fn small_elements() -> Vec<Sl2z> {
    let mut out = Vec::new();
    let b = ENTRY_BOUND;
    for c in -b..=b {
        for d in -b..=b {
            if c < 0 || (c == 0 && d <= 0) {
                continue;
            }
            if crate::primes::gcd(c.unsigned_abs(), d.unsigned_abs()) != 1 {
                continue;
            }
            for a in -b..=b {
                if c == 0 {
                    if a != d {
                        continue;
                    }
                    for bb in -b..=b {
                        out.push(Sl2z { a, b: bb, c, d });
                    }
                    continue;
                }
                if (a * d - 1) % c == 0 {
                    let bb = (a * d - 1) / c;
                    if bb.abs() <= b {
                        out.push(Sl2z { a, b: bb, c, d });
                    }
                }
            }
        }
    }
    out
}

impl Observable {
    /// A bump of hyperbolic `radius` around `center`.
    ///
    /// Fails if the ball does not inject into the modular surface, that is
    /// if some nontrivial group element moves the center by less than
    /// `2·radius`, or if a sampled boundary point reduces onto another
    /// sampled point's image inside the ball.
    pub fn new(center: HalfPlanePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain("bump radius must be positive"));
        }
        let (c, _) = reduce_to_fundamental(center)?;
        let elems = small_elements();
        let mut images = Vec::new();
        for g in &elems {
            let w = g.act(c);
            let moved = !(g.same_action(Sl2z::IDENTITY));
            if moved && w.distance(c) < 2.0 * radius {
                return Err(Error::Domain(
                    "bump ball does not inject into the modular surface",
                ));
            }
            // Euclidean disk of the hyperbolic ball around w.
            let ec = w.y * radius.cosh();
            let er = w.y * radius.sinh();
            let meets_strip = (w.x.abs() - er) <= 0.5;
            let leaves_unit_disk = (w.x * w.x + ec * ec).sqrt() + er >= 1.0;
            if meets_strip && leaves_unit_disk {
                images.push(w);
            }
        }
        // Boundary samples must reduce to points at distance exactly `radius`
        // from the nearest image (no overlap from an unlisted image).
        for k in 0..64 {
            let th = 2.0 * core::f64::consts::PI * k as f64 / 64.0;
            let ec = c.y * radius.cosh();
            let er = c.y * radius.sinh();
            let p = HalfPlanePoint {
                x: c.x + er * th.cos(),
                y: ec + er * th.sin(),
            };
            let (q, _) = reduce_to_fundamental(p)?;
            let d = images
                .iter()
                .map(|w| w.distance(q))
                .fold(f64::INFINITY, f64::min);
            if d < radius - 1e-9 {
                return Err(Error::Domain(
                    "bump ball does not inject into the modular surface",
                ));
            }
        }
        Ok(Self {
            center: c,
            radius,
            images,
        })
    }

    /// `ψ(z)`, valid for any `z` in the upper half-plane.
    pub fn eval(&self, z: HalfPlanePoint) -> f64 {
        let (w, _) = match reduce_to_fundamental(z) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        let mut best: f64 = 0.0;
        for img in &self.images {
            best = best.max(profile(img.distance(w) / self.radius));
        }
        best
    }

    /// Hyperbolic ball support: `(center, radius)`.
    pub fn support(&self) -> (HalfPlanePoint, f64) {
        (self.center, self.radius)
    }
}
