//! Geometry of the modular surface: points of the upper half-plane,
//! `SL2(Z)` actions, reduction to the standard fundamental domain,
//! quadrature grids and smooth bump observables.

mod bump;
mod grid;

pub use bump::Observable;
pub use grid::{
    build_grid, build_grid_for_frequency, default_y_cutoff, GridResolution, QuadratureGrid,
};

use core::ops::Mul;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// A point `x + iy` with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain("point must satisfy y > 0"));
        }
        Ok(Self { x, y })
    }

    /// Reflection `z ↦ -z̄`.
    pub fn reflect(self) -> Self {
        Self {
            x: -self.x,
            y: self.y,
        }
    }

    /// Hyperbolic distance.
    pub fn distance(self, other: Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * self.y * other.y);
        arg.acosh()
    }

    /// `|Re z| <= 1/2` and `|z| >= 1` up to `tol`.
    pub fn in_fundamental_domain(self, tol: f64) -> bool {
        self.x.abs() <= 0.5 + tol && self.x * self.x + self.y * self.y >= 1.0 - tol
    }
}

/// An element of `SL2(Z)`, acting by `z ↦ (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sl2z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2z {
    pub const IDENTITY: Sl2z = Sl2z {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    /// `z ↦ -1/z`.
    pub const S: Sl2z = Sl2z {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Domain("matrix must have determinant 1"));
        }
        Ok(Self { a, b, c, d })
    }

    /// Translation `z ↦ z + n`.
    pub fn translation(n: i64) -> Self {
        Self {
            a: 1,
            b: n,
            c: 0,
            d: 1,
        }
    }

    pub fn inverse(self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Equal as Möbius maps (that is, up to sign).
    pub fn same_action(self, other: Self) -> bool {
        self == other
            || self
                == Sl2z {
                    a: -other.a,
                    b: -other.b,
                    c: -other.c,
                    d: -other.d,
                }
    }

    pub fn act(self, z: HalfPlanePoint) -> HalfPlanePoint {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        // (az+b)/(cz+d) = [(ax+b)(cx+d) + a c y² + i y] / |cz+d|²
        let re_den = c * z.x + d;
        let den = re_den * re_den + c * c * z.y * z.y;
        let x = ((a * z.x + b) * re_den + a * c * z.y * z.y) / den;
        HalfPlanePoint { x, y: z.y / den }
    }

    /// `|cz + d|^{-2}`, the factor by which the action scales `y`; its
    /// square is the Jacobian of the action.
    pub fn y_factor(self, z: HalfPlanePoint) -> f64 {
        let re = self.c as f64 * z.x + self.d as f64;
        let im = self.c as f64 * z.y;
        1.0 / (re * re + im * im)
    }
}

impl Mul for Sl2z {
    type Output = Sl2z;
    fn mul(self, o: Sl2z) -> Sl2z {
        Sl2z {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

const REDUCTION_CAP: usize = 10_000;

/// Maps `z` into the standard fundamental domain.
///
/// Returns the reduced point `z'` and `γ` with `γ·z = z'`. On the boundary
/// the representative with `Re z' < 1/2` is chosen, and on the unit circle
/// the one with `Re z' <= 0`.
pub fn reduce_to_fundamental(z: HalfPlanePoint) -> Result<(HalfPlanePoint, Sl2z)> {
    if !(z.y > 0.0) || !z.x.is_finite() || !z.y.is_finite() {
        return Err(Error::Domain("point must satisfy y > 0"));
    }
    let mut g = Sl2z::IDENTITY;
    let mut w = z;
    for _ in 0..REDUCTION_CAP {
        let n = (w.x + 0.5).floor();
        if n != 0.0 {
            let t = Sl2z::translation(-(n as i64));
            g = t * g;
            w = HalfPlanePoint { x: w.x - n, y: w.y };
        }
        let r2 = w.x * w.x + w.y * w.y;
        if r2 < 1.0 - 1e-15 {
            g = Sl2z::S * g;
            w = HalfPlanePoint {
                x: -w.x / r2,
                y: w.y / r2,
            };
            continue;
        }
        // Canonical boundary representatives.
        if (r2 - 1.0).abs() <= 1e-15 && w.x > 0.0 {
            g = Sl2z::S * g;
            w = HalfPlanePoint {
                x: -w.x / r2,
                y: w.y / r2,
            };
        }
        // Recompute from the exact matrix to avoid accumulated drift.
        let w2 = g.act(z);
        let w = if (w2.x - w.x).abs() < 1e-9 && (w2.y - w.y).abs() < 1e-9 * w.y.max(1.0) {
            w2
        } else {
            w
        };
        return Ok((w, g));
    }
    Err(Error::Numerical {
        what: "reduction did not terminate",
        estimate: z.y,
    })
}
