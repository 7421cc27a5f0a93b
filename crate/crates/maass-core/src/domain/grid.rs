//! Quadrature on the truncated fundamental domain
//! `{|x| <= 1/2, x² + y² >= 1, y <= y_cutoff}` with measure `dx dy / y²`.
//!
//! The bulk `y <= 2` is a tensor Gauss–Legendre rule in `(x, s)` where
//! `y = y_low(x) + s (2 - y_low(x))` follows the curved lower boundary.
//! The cusp strip `2 < y <= y_cutoff` uses geometrically graded panels in
//! `y`, matching the `cos(t log y)` oscillation of the integrands.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::HalfPlanePoint;
use crate::quad::gauss_legendre;
use crate::{Error, Result, VOLUME};

const BULK_TOP: f64 = 2.0;
const PANEL_ORDER: usize = 24;
const MAX_NODES: usize = 4_000_000;

/// Node counts of a grid; see [`build_grid_for_frequency`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResolution {
    /// Gauss–Legendre panels across `|x| <= 1/2` in the bulk.
    pub bulk_x_panels: usize,
    /// Gauss–Legendre order in the bulk `y` direction.
    pub bulk_y_order: usize,
    /// Panels across `|x| <= 1/2` in the cusp strip.
    pub cusp_x_panels: usize,
    /// Ratio between consecutive `y` panel endpoints in the cusp strip.
    pub cusp_ratio: f64,
}

impl GridResolution {
    /// Resolution adequate for integrands whose spectral parameters add up to `omega`.
    pub fn for_frequency(omega: f64) -> Self {
        let omega = omega.max(1.0);
        // Oscillations across the bulk in x and y.
        let cycles_x = (omega + 20.0) / (2.0 * PI * 0.85);
        let cycles_y = omega * (BULK_TOP / 0.85f64).ln() / (2.0 * PI);
        let cusp_cycles_x = (omega + 20.0) / (2.0 * PI * BULK_TOP);
        Self {
            bulk_x_panels: (cycles_x / 3.0).ceil() as usize + 1,
            bulk_y_order: (PI * cycles_y + 16.0).ceil() as usize,
            cusp_x_panels: (cusp_cycles_x / 3.0).ceil() as usize + 1,
            cusp_ratio: (6.0 * PI / omega).exp().min(2.0),
        }
    }

    fn refined(self, f: f64) -> Self {
        Self {
            bulk_x_panels: ((self.bulk_x_panels as f64) * f).ceil() as usize,
            bulk_y_order: ((self.bulk_y_order as f64) * f).ceil() as usize,
            cusp_x_panels: ((self.cusp_x_panels as f64) * f).ceil() as usize,
            cusp_ratio: self.cusp_ratio.powf(1.0 / f),
        }
    }

    fn node_count(&self, y_cutoff: f64) -> usize {
        let cusp_panels = if y_cutoff > BULK_TOP {
            ((y_cutoff / BULK_TOP).ln() / self.cusp_ratio.ln()).ceil() as usize
        } else {
            0
        };
        self.bulk_x_panels * PANEL_ORDER * self.bulk_y_order
            + self.cusp_x_panels * PANEL_ORDER * cusp_panels * PANEL_ORDER
    }
}

/// Nodes and hyperbolic-measure weights on the truncated domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<HalfPlanePoint>,
    pub weights: Vec<f64>,
    pub y_cutoff: f64,
    /// Estimated absolute error for integrands of the design frequency and unit size.
    pub estimated_error: f64,
    /// Sum of spectral parameters the grid was built to resolve.
    pub design_frequency: f64,
}

impl QuadratureGrid {
    /// `π/3 - 1/y_cutoff`.
    pub fn exact_volume(&self) -> f64 {
        VOLUME - 1.0 / self.y_cutoff
    }

    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f dμ` by the grid rule, in fixed node order.
    pub fn integrate<F: FnMut(HalfPlanePoint) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * f(*z))
            .sum()
    }

    /// `∫ f dμ` from precomputed node values.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

fn lower_boundary(x: f64) -> f64 {
    (1.0 - x * x).sqrt()
}

fn assemble(y_cutoff: f64, res: GridResolution) -> QuadratureGrid {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let (gx, gw) = gauss_legendre(PANEL_ORDER);
    let (yx, yw) = gauss_legendre(res.bulk_y_order);
    let top = y_cutoff.min(BULK_TOP);
    let px = 1.0 / res.bulk_x_panels as f64;
    for p in 0..res.bulk_x_panels {
        let x0 = -0.5 + px * p as f64;
        for (xi, wi) in gx.iter().zip(&gw) {
            let x = x0 + 0.5 * px * (xi + 1.0);
            let wx = 0.5 * px * wi;
            let lo = lower_boundary(x);
            let h = top - lo;
            for (si, swi) in yx.iter().zip(&yw) {
                let y = lo + 0.5 * h * (si + 1.0);
                nodes.push(HalfPlanePoint { x, y });
                weights.push(wx * 0.5 * h * swi / (y * y));
            }
        }
    }
    if y_cutoff > BULK_TOP {
        let panels = ((y_cutoff / BULK_TOP).ln() / res.cusp_ratio.ln())
            .ceil()
            .max(1.0) as usize;
        let ratio = (y_cutoff / BULK_TOP).powf(1.0 / panels as f64);
        let cx = 1.0 / res.cusp_x_panels as f64;
        let mut y0 = BULK_TOP;
        for k in 0..panels {
            let y1 = if k + 1 == panels {
                y_cutoff
            } else {
                y0 * ratio
            };
            for (si, swi) in gx.iter().zip(&gw) {
                let y = y0 + 0.5 * (y1 - y0) * (si + 1.0);
                let wy = 0.5 * (y1 - y0) * swi / (y * y);
                for p in 0..res.cusp_x_panels {
                    let x0 = -0.5 + cx * p as f64;
                    for (xi, wi) in gx.iter().zip(&gw) {
                        let x = x0 + 0.5 * cx * (xi + 1.0);
                        nodes.push(HalfPlanePoint { x, y });
                        weights.push(0.5 * cx * wi * wy);
                    }
                }
            }
            y0 = y1;
        }
    }
    QuadratureGrid {
        nodes,
        weights,
        y_cutoff,
        estimated_error: 0.0,
        design_frequency: 0.0,
    }
}

/// A bounded test integrand oscillating at the design frequency.
fn probe(z: HalfPlanePoint, omega: f64, m: f64) -> f64 {
    (omega * z.y.ln() + 2.0 * PI * m * z.x).cos() * (-0.3 * z.y).exp()
}

/// Grid resolving integrands whose spectral parameters sum to `omega`.
///
/// The error estimate compares the grid with a 1.5 times finer one on an
/// oscillatory probe, and adds the volume defect.
pub fn build_grid_for_frequency(
    y_cutoff: f64,
    target_error: f64,
    omega: f64,
) -> Result<QuadratureGrid> {
    if !(y_cutoff >= 2.0) || !y_cutoff.is_finite() {
        return Err(Error::Domain("grid needs y_cutoff >= 2"));
    }
    if !(target_error > 0.0) {
        return Err(Error::Domain("grid needs a positive target error"));
    }
    let omega = omega.max(0.0);
    let m = ((omega + 20.0) / (2.0 * PI * 0.85)).floor();
    let mut res = GridResolution::for_frequency(omega);
    loop {
        if res.refined(1.5).node_count(y_cutoff) > MAX_NODES {
            return Err(Error::Capacity(
                "grid target error not reachable within the node budget",
            ));
        }
        let mut grid = assemble(y_cutoff, res);
        let fine = assemble(y_cutoff, res.refined(1.5));
        let a = grid.integrate(|z| probe(z, omega, m));
        let b = fine.integrate(|z| probe(z, omega, m));
        let vol_err = (grid.volume() - grid.exact_volume()).abs();
        let err = (a - b).abs() + vol_err + 1e-15;
        if err <= target_error {
            grid.estimated_error = err;
            grid.design_frequency = omega;
            return Ok(grid);
        }
        res = res.refined(1.3);
    }
}

/// Grid for slowly varying integrands; see [`build_grid_for_frequency`].
pub fn build_grid(y_cutoff: f64, target_error: f64) -> Result<QuadratureGrid> {
    build_grid_for_frequency(y_cutoff, target_error, 1.0)
}

/// `8 + t_max/π`.
pub fn default_y_cutoff(t_max: f64) -> f64 {
    8.0 + t_max / PI
}
