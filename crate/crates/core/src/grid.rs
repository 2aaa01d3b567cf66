//! Rectangular phase-space grids shared by histograms and Q functions.

use crate::error::{Error, Result};
use crate::params::PhasePoint;

/// Axis-aligned `(X, P)` window split into `nx × np` cells. Values live at
/// cell centres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        p_min: f64,
        p_max: f64,
        nx: usize,
        np: usize,
    ) -> Result<Self> {
        if nx < 2 || np < 2 {
            return Err(Error::InvalidParameter {
                name: "resolution",
                reason: format!("need at least 2 cells per axis, got {nx}x{np}"),
            });
        }
        let ordered = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && hi > lo;
        if !ordered(x_min, x_max) || !ordered(p_min, p_max) {
            return Err(Error::InvalidParameter {
                name: "bounds",
                reason: format!("empty window X [{x_min}, {x_max}], P [{p_min}, {p_max}]"),
            });
        }
        Ok(GridSpec {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        })
    }

    /// Square window `[-half, half]²` with `n` cells per axis.
    pub fn centered(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, ix: usize, ip: usize) -> PhasePoint {
        PhasePoint::new(
            self.x_min + (ix as f64 + 0.5) * self.dx(),
            self.p_min + (ip as f64 + 0.5) * self.dp(),
        )
    }

    /// Cell containing `pp`, or `None` outside the window.
    pub fn cell_of(&self, pp: PhasePoint) -> Option<(usize, usize)> {
        let fx = (pp.x - self.x_min) / (self.x_max - self.x_min);
        let fp = (pp.p - self.p_min) / (self.p_max - self.p_min);
        if !(0.0..=1.0).contains(&fx) || !(0.0..=1.0).contains(&fp) {
            return None;
        }
        let ix = ((fx * self.nx as f64) as usize).min(self.nx - 1);
        let ip = ((fp * self.np as f64) as usize).min(self.np - 1);
        Some((ix, ip))
    }

    /// Bilinear interpolation of cell-centre `values` (indexed `[ix][ip]`,
    /// row-major in `ix`) at `pp`; `None` outside the hull of the centres.
    pub fn interpolate(&self, values: &[f64], pp: PhasePoint) -> Option<f64> {
        debug_assert_eq!(values.len(), self.len());
        let gx = (pp.x - self.x_min) / self.dx() - 0.5;
        let gp = (pp.p - self.p_min) / self.dp() - 0.5;
        if gx < 0.0 || gp < 0.0 || gx > (self.nx - 1) as f64 || gp > (self.np - 1) as f64 {
            return None;
        }
        let ix = (gx.floor() as usize).min(self.nx - 2);
        let ip = (gp.floor() as usize).min(self.np - 2);
        let tx = gx - ix as f64;
        let tp = gp - ip as f64;
        let at = |i: usize, j: usize| values[i * self.np + j];
        Some(
            (1.0 - tx) * (1.0 - tp) * at(ix, ip)
                + tx * (1.0 - tp) * at(ix + 1, ip)
                + (1.0 - tx) * tp * at(ix, ip + 1)
                + tx * tp * at(ix + 1, ip + 1),
        )
    }

    /// Pearson correlation between `values` and the same field rotated by
    /// `angle` about the phase-space origin. Only cells whose rotated source
    /// lies inside the grid contribute.
    pub fn rotational_correlation(&self, values: &[f64], angle: f64) -> f64 {
        let (s, c) = angle.sin_cos();
        let mut pairs = Vec::with_capacity(self.len());
        for ix in 0..self.nx {
            for ip in 0..self.np {
                let pt = self.center(ix, ip);
                let src = PhasePoint::new(c * pt.x + s * pt.p, -s * pt.x + c * pt.p);
                if let Some(v) = self.interpolate(values, src) {
                    pairs.push((values[ix * self.np + ip], v));
                }
            }
        }
        pearson(&pairs)
    }
}

fn pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let (ma, mb) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &(a, b) in pairs {
        sab += (a - ma) * (b - mb);
        saa += (a - ma) * (a - ma);
        sbb += (b - mb) * (b - mb);
    }
    sab / (saa * sbb).sqrt()
}
