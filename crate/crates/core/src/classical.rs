//! Classical stroboscopic map of the delta-kicked harmonic oscillator.
//!
//! One period is a kick `P ← P + A·sin(wX)` followed by a clockwise rotation
//! by `θ = ντ`. With `w = 2π` and `A = 2√2κ/π` this is the classical limit of
//! the quantum Floquet operator in [`crate::fockspace`].

use std::f64::consts::{PI, SQRT_2, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::PhasePoint;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalMap {
    /// Rotation angle per period.
    pub theta: f64,
    /// Kick impulse amplitude.
    pub amplitude: f64,
    /// Spatial frequency of the kick in radians per unit X.
    pub spatial_freq: f64,
}

/// Impulse amplitude equivalent to the quantum kick strength κ.
pub fn amplitude_from_kappa(kappa: f64) -> f64 {
    2.0 * SQRT_2 * kappa / PI
}

impl ClassicalMap {
    pub fn new(theta: f64, amplitude: f64, spatial_freq: f64) -> Result<Self> {
        if !(spatial_freq.is_finite() && spatial_freq > 0.0) {
            return Err(Error::InvalidParameter {
                name: "spatial_freq",
                reason: format!("must be positive, got {spatial_freq}"),
            });
        }
        if !amplitude.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: "amplitude and theta must be finite".into(),
            });
        }
        Ok(ClassicalMap {
            theta,
            amplitude,
            spatial_freq,
        })
    }

    /// Map matching a quantum kick strength κ at rotation angle `theta`.
    pub fn from_kappa(theta: f64, kappa: f64) -> Result<Self> {
        Self::new(theta, amplitude_from_kappa(kappa), TAU)
    }

    pub fn kick(&self, pp: PhasePoint) -> PhasePoint {
        PhasePoint::new(
            pp.x,
            pp.p + self.amplitude * (self.spatial_freq * pp.x).sin(),
        )
    }

    pub fn step(&self, pp: PhasePoint) -> PhasePoint {
        rotate(self.kick(pp), self.theta)
    }

    /// `n + 1` stroboscopic points starting with `pp0`.
    pub fn orbit(&self, pp0: PhasePoint, n: usize) -> Vec<PhasePoint> {
        let mut out = Vec::with_capacity(n + 1);
        let mut pp = pp0;
        out.push(pp);
        for _ in 0..n {
            pp = self.step(pp);
            out.push(pp);
        }
        out
    }

    /// Jacobian of one period evaluated at `pp`.
    pub fn step_jacobian(&self, pp: PhasePoint) -> [[f64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let g = self.amplitude * self.spatial_freq * (self.spatial_freq * pp.x).cos();
        // R(θ) · [[1, 0], [g, 1]]
        [[c + s * g, s], [-s + c * g, c]]
    }

    /// Histogram of visited cells over the orbits of all `ics`.
    ///
    /// Each orbit contributes its `n + 1` points; points outside `grid` are
    /// counted in [`WebHistogram::outside`]. Orbits run in parallel and the
    /// merge is an integer sum, so the result is independent of thread count.
    pub fn web_scan(&self, ics: &[PhasePoint], n: usize, grid: &GridSpec) -> Result<WebHistogram> {
        if ics.is_empty() {
            return Err(Error::Empty("initial condition list"));
        }
        let empty = || WebHistogram {
            grid: *grid,
            counts: vec![0; grid.len()],
            outside: 0,
        };
        let hist = ics
            .par_iter()
            .map(|&ic| {
                let mut h = empty();
                let mut pp = ic;
                h.record(pp);
                for _ in 0..n {
                    pp = self.step(pp);
                    h.record(pp);
                }
                h
            })
            .reduce(empty, |mut a, b| {
                a.counts
                    .iter_mut()
                    .zip(&b.counts)
                    .for_each(|(x, y)| *x += y);
                a.outside += b.outside;
                a
            });
        Ok(hist)
    }

    /// Linear stability of the periodic orbit through `pp0`.
    pub fn orbit_stability(
        &self,
        pp0: PhasePoint,
        period: usize,
        tol: &StabilityTolerances,
    ) -> Result<OrbitStability> {
        if period == 0 {
            return Err(Error::InvalidParameter {
                name: "period",
                reason: "must be at least 1".into(),
            });
        }
        let mut m = [[1.0, 0.0], [0.0, 1.0]];
        let mut pp = pp0;
        for _ in 0..period {
            m = matmul2(&self.step_jacobian(pp), &m);
            pp = self.step(pp);
        }
        let distance = pp.distance(&pp0);
        if distance.is_nan() || distance > tol.closure {
            return Err(Error::NotPeriodic {
                period,
                distance,
                tolerance: tol.closure,
            });
        }
        let trace = m[0][0] + m[1][1];
        Ok(OrbitStability {
            trace,
            classification: Classification::from_trace(trace, tol.parabolic_band),
        })
    }
}

/// Free harmonic rotation `(X, P) → (X cosθ + P sinθ, −X sinθ + P cosθ)`.
pub fn rotate(pp: PhasePoint, theta: f64) -> PhasePoint {
    let (s, c) = theta.sin_cos();
    PhasePoint::new(pp.x * c + pp.p * s, -pp.x * s + pp.p * c)
}

fn matmul2(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityTolerances {
    pub closure: f64,
    pub parabolic_band: f64,
}

impl Default for StabilityTolerances {
    fn default() -> Self {
        StabilityTolerances {
            closure: 1e-6,
            parabolic_band: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl Classification {
    pub fn from_trace(trace: f64, band: f64) -> Self {
        let t = trace.abs();
        if (t - 2.0).abs() <= band {
            Classification::Parabolic
        } else if t > 2.0 {
            Classification::Hyperbolic
        } else {
            Classification::Elliptic
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitStability {
    pub trace: f64,
    pub classification: Classification,
}

/// Visit counts of stroboscopic points, indexed `[ix * np + ip]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WebHistogram {
    pub grid: GridSpec,
    pub counts: Vec<u64>,
    pub outside: u64,
}

impl WebHistogram {
    fn record(&mut self, pp: PhasePoint) {
        match self.grid.cell_of(pp) {
            Some((ix, ip)) => self.counts[ix * self.grid.np + ip] += 1,
            None => self.outside += 1,
        }
    }

    pub fn count(&self, ix: usize, ip: usize) -> u64 {
        self.counts[ix * self.grid.np + ip]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.outside
    }

    pub fn occupied_cells(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Correlation of the count field with its rotation by `2π/order`.
    pub fn symmetry_score(&self, order: u32) -> f64 {
        let v: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        self.grid.rotational_correlation(&v, TAU / order as f64)
    }
}

/// Uniform square lattice of starting points (`per_axis` per side) clipped to
/// the disk of radius `spread` about `center`.
pub fn seed_disk(center: PhasePoint, spread: f64, per_axis: usize) -> Vec<PhasePoint> {
    if per_axis < 2 || spread == 0.0 {
        return vec![center];
    }
    let step = 2.0 * spread / (per_axis - 1) as f64;
    let mut seeds = Vec::new();
    for i in 0..per_axis {
        for j in 0..per_axis {
            let (dx, dp) = (-spread + i as f64 * step, -spread + j as f64 * step);
            if dx.hypot(dp) <= spread {
                seeds.push(PhasePoint::new(center.x + dx, center.p + dp));
            }
        }
    }
    seeds
}

/// `count` starting points evenly spaced on a circle of radius `spread` about `center`.
pub fn seed_ring(center: PhasePoint, spread: f64, count: usize) -> Vec<PhasePoint> {
    if count == 1 {
        return vec![center];
    }
    (0..count)
        .map(|i| {
            let a = TAU * i as f64 / count as f64;
            PhasePoint::new(center.x + spread * a.cos(), center.p + spread * a.sin())
        })
        .collect()
}
