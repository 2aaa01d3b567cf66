//! Two-Hamiltonian overlap evolution, Ramsey readout and Husimi Q functions.
//!
//! Two internal ground states see kick strengths `κ₁`, `κ₂`. Their motional
//! states evolve in parallel under `F₁`, `F₂`; the cross overlap
//! `⟨α|F₂^{†n} F₁ⁿ|α⟩` determines the Peres overlap `O(n)` and, with the
//! internal-state phase `φₙ = δκ·n/(√2η²)`, the two measurable populations.

use std::f64::consts::{FRAC_1_PI, PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fockspace::{
    coherent_amplitudes, coherent_state, evolve_visit, FloquetOperator, FockVector, LeakageMonitor,
    LeakagePolicy, COHERENT_TOLERANCE,
};
use crate::grid::GridSpec;
use crate::params::{alpha_from_phasepoint, check_eta};

/// Default lower bound on `|cos 2φₙ|` for overlap reconstruction.
pub const SINGULAR_THRESHOLD: f64 = 1e-3;

/// Tolerated excursion of computed probabilities outside `[0, 1]`.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Grid points whose coherent projector loses more than this much norm are masked.
pub const Q_MASK_DEFICIENCY: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapRecord {
    pub n: u64,
    /// `⟨α|F₂^{†n} F₁ⁿ|α⟩`.
    pub cross: Complex64,
    /// `|cross|²`.
    pub overlap: f64,
    pub p_g: f64,
    pub p_g_prime: f64,
    /// `|cos 2φₙ|`, the determinant of the reconstruction system.
    pub det: f64,
}

#[derive(Clone, Debug)]
pub struct OverlapSeries {
    pub records: Vec<OverlapRecord>,
    pub leakage1: LeakageMonitor,
    pub leakage2: LeakageMonitor,
}

impl OverlapSeries {
    pub fn overlaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.overlap).collect()
    }
}

/// Internal-state phase `φₙ = δκ·n/(√2η²)`.
pub fn ramsey_phase(n: u64, delta_kappa: f64, eta: f64) -> f64 {
    delta_kappa * n as f64 / (SQRT_2 * eta * eta)
}

fn compatible(f1: &FloquetOperator, f2: &FloquetOperator) -> Result<()> {
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch {
            expected: f1.dim(),
            found: f2.dim(),
        });
    }
    if f1.eta != f2.eta || f1.theta != f2.theta {
        return Err(Error::IncompatibleOperators(format!(
            "eta {} vs {}, theta {} vs {}",
            f1.eta, f2.eta, f1.theta, f2.theta
        )));
    }
    Ok(())
}

/// Evolves `|α⟩` under both operators for `n_max` kicks, one matrix-vector
/// product per operator per kick.
pub fn overlap_series(
    f1: &FloquetOperator,
    f2: &FloquetOperator,
    alpha: Complex64,
    n_max: u64,
    policy: &LeakagePolicy,
) -> Result<OverlapSeries> {
    compatible(f1, f2)?;
    let psi0 = coherent_state(alpha, f1.dim(), COHERENT_TOLERANCE)?;
    let delta_kappa = f2.kappa - f1.kappa;
    let eta = f1.eta;

    let mut psi1 = psi0.clone();
    let mut psi2 = psi0;
    let mut scratch = psi1.clone();
    let mut leakage1 = LeakageMonitor::default();
    let mut leakage2 = LeakageMonitor::default();
    let mut records = Vec::with_capacity(n_max as usize + 1);

    for n in 0..=n_max {
        if n > 0 {
            for (f, psi) in [(f1, &mut psi1), (f2, &mut psi2)] {
                f.apply_into(
                    psi.amplitudes.as_slice().expect("contiguous"),
                    scratch.amplitudes.as_slice_mut().expect("contiguous"),
                );
                std::mem::swap(psi, &mut scratch);
            }
        }
        leakage1.check(&psi1, n, policy)?;
        leakage2.check(&psi2, n, policy)?;
        let cross = if n == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            psi2.inner(&psi1)
        };
        let (p_g, p_g_prime) = ramsey_probabilities(cross, n, delta_kappa, eta)?;
        let phi = ramsey_phase(n, delta_kappa, eta);
        records.push(OverlapRecord {
            n,
            cross,
            overlap: cross.norm_sqr(),
            p_g,
            p_g_prime,
            det: (2.0 * phi).cos().abs(),
        });
    }
    Ok(OverlapSeries {
        records,
        leakage1,
        leakage2,
    })
}

fn check_probability(what: &'static str, value: f64) -> Result<f64> {
    if (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Consistency { what, value })
    }
}

/// Populations `(P_g, P_g′)` of the first ground state after the final π/2
/// pulse, for the real and imaginary preparations:
///
/// `P_g  = ½[1 − cosφ·Re c − sinφ·Im c]`,
/// `P_g′ = ½[1 − sinφ·Re c − cosφ·Im c]`.
pub fn ramsey_probabilities(
    cross: Complex64,
    n: u64,
    delta_kappa: f64,
    eta: f64,
) -> Result<(f64, f64)> {
    check_eta(eta)?;
    let (s, c) = ramsey_phase(n, delta_kappa, eta).sin_cos();
    let p_g = 0.5 * (1.0 - c * cross.re - s * cross.im);
    let p_g_prime = 0.5 * (1.0 - s * cross.re - c * cross.im);
    Ok((
        check_probability("P_g", p_g)?,
        check_probability("P_g'", p_g_prime)?,
    ))
}

/// Recovers the cross overlap from measured populations by solving the 2×2
/// system of [`ramsey_probabilities`].
pub fn reconstruct_cross(
    p_g: f64,
    p_g_prime: f64,
    delta_kappa: f64,
    eta: f64,
    n: u64,
    singular_threshold: f64,
) -> Result<Complex64> {
    check_eta(eta)?;
    let (s, c) = ramsey_phase(n, delta_kappa, eta).sin_cos();
    let det = c * c - s * s;
    if det.abs() <= singular_threshold {
        return Err(Error::SingularKickIndex { n, det: det.abs() });
    }
    let a = 1.0 - 2.0 * p_g;
    let b = 1.0 - 2.0 * p_g_prime;
    Ok(Complex64::new((c * a - s * b) / det, (c * b - s * a) / det))
}

/// Peres overlap `O = Re² + Im²` from measured populations.
pub fn reconstruct_overlap(
    p_g: f64,
    p_g_prime: f64,
    delta_kappa: f64,
    eta: f64,
    n: u64,
    singular_threshold: f64,
) -> Result<f64> {
    reconstruct_cross(p_g, p_g_prime, delta_kappa, eta, n, singular_threshold).map(|z| z.norm_sqr())
}

/// Husimi Q function sampled at cell centres of a phase-space grid.
#[derive(Clone, Debug, PartialEq)]
pub struct QGrid {
    pub grid: GridSpec,
    pub eta: f64,
    /// `Q(β)` indexed `[ix * np + ip]`; zero where masked.
    pub values: Vec<f64>,
    /// Cells whose coherent projector does not fit the Fock basis.
    pub masked: Vec<bool>,
}

impl QGrid {
    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.grid.np + ip]
    }

    pub fn masked_count(&self) -> usize {
        self.masked.iter().filter(|&&m| m).count()
    }

    /// Area of one cell in the `d²α` measure, `(π/2η)² dX dP`.
    pub fn cell_area(&self) -> f64 {
        let s = PI / (2.0 * self.eta);
        s * s * self.grid.dx() * self.grid.dp()
    }

    /// `Σ Q d²α` over the window.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    /// `Σ Q d²α` over cells with centre radius `√(X²+P²) > radius`.
    pub fn mass_outside_radius(&self, radius: f64) -> f64 {
        let mut acc = 0.0;
        for ix in 0..self.grid.nx {
            for ip in 0..self.grid.np {
                if self.grid.center(ix, ip).radius() > radius {
                    acc += self.value(ix, ip);
                }
            }
        }
        acc * self.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Coherent projector at one grid point, restricted to its numerical support.
struct Projector {
    offset: usize,
    conj_amps: Vec<Complex64>,
}

fn projector(beta: Complex64, dim: usize) -> Option<Projector> {
    let ca = coherent_amplitudes(beta, dim);
    if ca.deficiency > Q_MASK_DEFICIENCY {
        return None;
    }
    let peak = ca.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cutoff = peak * 1e-18;
    let lo = ca
        .amplitudes
        .iter()
        .position(|z| z.norm() > cutoff)
        .unwrap_or(0);
    let hi = ca
        .amplitudes
        .iter()
        .rposition(|z| z.norm() > cutoff)
        .map_or(dim, |i| i + 1);
    Some(Projector {
        offset: lo,
        conj_amps: ca.amplitudes[lo..hi].iter().map(|z| z.conj()).collect(),
    })
}

impl Projector {
    /// `|⟨β|ψ⟩|²/π`.
    fn q(&self, psi: &FockVector) -> f64 {
        let amps = psi.amplitudes.as_slice().expect("contiguous");
        let z: Complex64 = self
            .conj_amps
            .iter()
            .zip(&amps[self.offset..])
            .map(|(a, b)| a * b)
            .sum();
        z.norm_sqr() * FRAC_1_PI
    }
}

/// Mean Q function over `states`, evaluated cell by cell in parallel.
fn averaged_q(states: &[FockVector], grid: &GridSpec, eta: f64) -> Result<QGrid> {
    check_eta(eta)?;
    let first = states.first().ok_or(Error::Empty("state list"))?;
    let dim = first.dim();
    let weight = 1.0 / states.len() as f64;
    let cells: Vec<(f64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let pt = grid.center(idx / grid.np, idx % grid.np);
            match projector(alpha_from_phasepoint(pt, eta), dim) {
                None => (0.0, true),
                Some(proj) => (
                    states.iter().map(|s| proj.q(s)).sum::<f64>() * weight,
                    false,
                ),
            }
        })
        .collect();
    let (values, masked) = cells.into_iter().unzip();
    Ok(QGrid {
        grid: *grid,
        eta,
        values,
        masked,
    })
}

/// `Q(β) = |⟨β|ψ⟩|²/π` on the grid, with `β` the coherent amplitude of each cell centre.
pub fn q_function(psi: &FockVector, grid: &GridSpec, eta: f64) -> Result<QGrid> {
    averaged_q(std::slice::from_ref(psi), grid, eta)
}

/// Mean Q function of `Fᵏ|α₀⟩` over `k = 0, stride, 2·stride, … ≤ n_kicks`.
pub fn time_averaged_q(
    f: &FloquetOperator,
    alpha0: Complex64,
    n_kicks: u64,
    stride: u64,
    grid: &GridSpec,
    policy: &LeakagePolicy,
) -> Result<(QGrid, LeakageMonitor)> {
    if stride == 0 {
        return Err(Error::InvalidParameter {
            name: "stride",
            reason: "must be at least 1".into(),
        });
    }
    let psi0 = coherent_state(alpha0, f.dim(), COHERENT_TOLERANCE)?;
    let mut samples = Vec::with_capacity((n_kicks / stride) as usize + 1);
    let monitor = evolve_visit(f, &psi0, n_kicks, policy, |k, psi, _| {
        if k % stride == 0 {
            samples.push(psi.clone());
        }
    })?;
    Ok((averaged_q(&samples, grid, f.eta)?, monitor))
}
