//! Truncated Fock-space linear algebra for the kicked oscillator.
//!
//! The kick `exp(−i κ cos[2η(a†+a)] / (√2 η²))` is built exactly from the
//! eigendecomposition of the truncated quadrature `a†+a`, and the Floquet
//! operator applies the kick first and then the free rotation `exp(−i a†a θ)`.

use std::f64::consts::{PI, SQRT_2};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{check_eta, PhasePoint};
use crate::tridiag::symmetric_tridiagonal_eigen;

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "fock_dim",
            reason: format!("must be at least 2, got {n}"),
        });
    }
    Ok(())
}

/// Truncated `a† + a`: zero diagonal, off-diagonals `√1 … √(N−1)`.
pub fn ladder_matrix(n: usize) -> Result<Array2<f64>> {
    check_dim(n)?;
    let mut m = Array2::zeros((n, n));
    for k in 1..n {
        let v = (k as f64).sqrt();
        m[[k - 1, k]] = v;
        m[[k, k - 1]] = v;
    }
    Ok(m)
}

/// Motional state as amplitudes over Fock states `|0⟩ … |N−1⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    pub amplitudes: Array1<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Array1<Complex64>) -> Self {
        FockVector { amplitudes }
    }

    /// Number state `|n⟩` in a basis of `dim` states.
    pub fn number_state(n: usize, dim: usize) -> Self {
        let mut a = Array1::zeros(dim);
        a[n] = Complex64::new(1.0, 0.0);
        FockVector { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨a⟩ = Σ c̄ₙ cₙ₊₁ √(n+1)`.
    pub fn annihilation_expectation(&self) -> Complex64 {
        let c = &self.amplitudes;
        (0..c.len() - 1)
            .map(|n| c[n].conj() * c[n + 1] * ((n + 1) as f64).sqrt())
            .sum()
    }

    /// Population in the top `fraction` of the basis (at least one state).
    pub fn leakage(&self, fraction: f64) -> f64 {
        let n = self.dim();
        let window = ((n as f64 * fraction).ceil() as usize).clamp(1, n);
        self.amplitudes
            .iter()
            .skip(n - window)
            .map(Complex64::norm_sqr)
            .sum()
    }
}

/// Centroid of a state in `(X, P)` units: `X + iP = 2η⟨a⟩/π`.
pub fn expectation_xp(psi: &FockVector, eta: f64) -> PhasePoint {
    let a = psi.annihilation_expectation();
    let s = 2.0 * eta / PI;
    PhasePoint::new(s * a.re, s * a.im)
}

/// Truncated coherent amplitudes `e^{−|α|²/2} αⁿ/√(n!)` and the deficiency
/// `1 − Σ|cₙ|²` of the truncation.
#[derive(Clone, Debug)]
pub struct CoherentAmplitudes {
    pub amplitudes: Vec<Complex64>,
    pub deficiency: f64,
}

const RESCALE_AT: f64 = 1e150;

/// Fills `out` with coherent amplitudes via `c_{n+1} = c_n α/√(n+1)`, carrying
/// a separate exponent so large `|α|` neither underflows `c₀` nor overflows.
fn coherent_recurrence(alpha: Complex64, out: &mut [Complex64]) {
    let mut v = Complex64::new(1.0, 0.0);
    let mut log_scale = -0.5 * alpha.norm_sqr();
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            v *= alpha / (n as f64).sqrt();
            let mag = v.norm();
            if mag > RESCALE_AT {
                v /= mag;
                log_scale += mag.ln();
            }
        }
        *slot = v * log_scale.exp();
    }
}

/// Poisson tail `Σ_{n ≥ dim} |cₙ|²`, and the smallest dimension whose tail is
/// at most `tol`.
fn poisson_tail(alpha: Complex64, dim: usize, tol: f64) -> (f64, usize) {
    let mean = alpha.norm_sqr();
    if mean == 0.0 {
        return (0.0, dim);
    }
    // log p_n for n = dim, dim+1, ... until negligible beyond the peak
    let ln_mean = mean.ln();
    let mut ln_p = -mean;
    for k in 1..=dim {
        ln_p += ln_mean - (k as f64).ln();
    }
    let mut terms = Vec::new();
    let mut n = dim;
    loop {
        let p = ln_p.exp();
        terms.push(p);
        n += 1;
        ln_p += ln_mean - (n as f64).ln();
        if n as f64 > mean && (p < 1e-300 || ln_p < -745.0) {
            break;
        }
    }
    let tail: f64 = terms.iter().rev().sum();
    let mut required = dim;
    let mut acc = 0.0;
    for (k, p) in terms.iter().enumerate().rev() {
        acc += p;
        if acc > tol {
            required = dim + k + 1;
            break;
        }
    }
    (tail, required)
}

/// Coherent amplitudes without a truncation check; `deficiency` is `1 − ‖c‖²`
/// clamped at zero, so it resolves only down to roundoff.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> CoherentAmplitudes {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    coherent_recurrence(alpha, &mut amplitudes);
    let kept: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
    let deficiency = (1.0 - kept).max(0.0);
    CoherentAmplitudes {
        amplitudes,
        deficiency,
    }
}

/// Default tolerated norm deficiency of a truncated coherent state.
pub const COHERENT_TOLERANCE: f64 = 1e-8;

/// Truncated coherent state `|α⟩`, failing if more than `tol` of its norm
/// lies beyond the basis.
pub fn coherent_state(alpha: Complex64, dim: usize, tol: f64) -> Result<FockVector> {
    check_dim(dim)?;
    let (deficiency, required) = poisson_tail(alpha, dim, tol);
    if deficiency > tol {
        return Err(Error::Truncation {
            what: "coherent-state norm deficiency",
            value: deficiency,
            limit: tol,
            suggested_dim: required,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    coherent_recurrence(alpha, &mut amps);
    Ok(FockVector::new(Array1::from(amps)))
}

/// Norm deficiency `1 − Σ_{n<dim}|cₙ|²` of a truncated coherent state.
pub fn coherent_deficiency(alpha: Complex64, dim: usize) -> f64 {
    poisson_tail(alpha, dim, 0.0).0
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of truncated `a†+a`.
#[derive(Clone, Debug)]
pub struct QuadratureEigensystem {
    pub eigenvalues: Vec<f64>,
    /// `vectors[[i, j]]` is component `i` of eigenvector `j`.
    pub vectors: Array2<f64>,
}

impl QuadratureEigensystem {
    pub fn new(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let diag = vec![0.0; dim];
        let off: Vec<f64> = (1..dim).map(|k| (k as f64).sqrt()).collect();
        let eig = symmetric_tridiagonal_eigen(&diag, &off)?;
        let vectors = Array2::from_shape_fn((dim, dim), |(i, j)| eig.component(i, j));
        Ok(QuadratureEigensystem {
            eigenvalues: eig.values,
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(xᵢ)) Vᵀ` for real `f`.
    pub fn real_function(&self, f: impl Fn(f64) -> f64) -> Array2<f64> {
        let weights = Array1::from_iter(self.eigenvalues.iter().map(|&x| f(x)));
        let scaled = &self.vectors * &weights;
        scaled.dot(&self.vectors.t())
    }

    /// `max |VᵀV − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.vectors.t().dot(&self.vectors);
        g.indexed_iter()
            .map(|((i, j), v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }
}

/// Prefactor `κ/(√2 η²)` of the kick phase.
pub fn kick_phase_scale(kappa: f64, eta: f64) -> f64 {
    kappa / (SQRT_2 * eta * eta)
}

/// `exp(−i κ cos[2η(a†+a)]/(√2η²))` on the truncated basis described by `eig`.
pub fn kick_unitary_with(
    kappa: f64,
    eta: f64,
    eig: &QuadratureEigensystem,
) -> Result<Array2<Complex64>> {
    check_eta(eta)?;
    let scale = kick_phase_scale(kappa, eta);
    let phase = |x: f64| -scale * (2.0 * eta * x).cos();
    let re = eig.real_function(|x| phase(x).cos());
    let im = eig.real_function(|x| phase(x).sin());
    Ok(Array2::from_shape_fn(re.dim(), |ij| {
        Complex64::new(re[ij], im[ij])
    }))
}

pub fn kick_unitary(kappa: f64, eta: f64, dim: usize) -> Result<Array2<Complex64>> {
    let eig = QuadratureEigensystem::new(dim)?;
    kick_unitary_with(kappa, eta, &eig)
}

/// One-period propagator `exp(−i a†a θ) · kick`.
///
/// The constant phase `exp(−iκ/(√2η²))` from the uniform part of the optical
/// potential is not included; [`crate::protocol`] accounts for it.
#[derive(Clone, Debug)]
pub struct FloquetOperator {
    pub matrix: Array2<Complex64>,
    pub kappa: f64,
    pub eta: f64,
    pub theta: f64,
}

impl FloquetOperator {
    pub fn new(kappa: f64, eta: f64, theta: f64, dim: usize) -> Result<Self> {
        let eig = QuadratureEigensystem::new(dim)?;
        Self::with_eigensystem(kappa, eta, theta, &eig)
    }

    /// Reuses a precomputed eigensystem; operators for several κ share one.
    pub fn with_eigensystem(
        kappa: f64,
        eta: f64,
        theta: f64,
        eig: &QuadratureEigensystem,
    ) -> Result<Self> {
        let mut matrix = kick_unitary_with(kappa, eta, eig)?;
        for (n, mut row) in matrix.rows_mut().into_iter().enumerate() {
            let rot = Complex64::cis(-(n as f64) * theta);
            row.mapv_inplace(|z| rot * z);
        }
        Ok(FloquetOperator {
            matrix,
            kappa,
            eta,
            theta,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `out = U psi`.
    pub fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        assert!(psi.len() == n && out.len() == n);
        let u = self.matrix.as_slice().expect("standard layout");
        for (row, o) in u.chunks_exact(n).zip(out.iter_mut()) {
            *o = complex_dot(row, psi);
        }
    }

    pub fn apply(&self, psi: &FockVector) -> Result<FockVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let mut out = Array1::zeros(self.dim());
        self.apply_into(
            psi.amplitudes.as_slice().expect("contiguous"),
            out.as_slice_mut().expect("contiguous"),
        );
        Ok(FockVector::new(out))
    }

    /// `max |U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let adj = self.matrix.t().mapv(|z| z.conj());
        let g = adj.dot(&self.matrix);
        g.indexed_iter()
            .map(|((i, j), v)| (v - if i == j { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max)
    }
}

/// Unconjugated `Σ aᵢ bᵢ`, split into independent accumulators.
fn complex_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            re[k] += x[k].re * y[k].re - x[k].im * y[k].im;
            im[k] += x[k].re * y[k].im + x[k].im * y[k].re;
        }
    }
    let mut acc = Complex64::new(re.iter().sum(), im.iter().sum());
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        acc += x * y;
    }
    acc
}

/// Truncation-leakage thresholds for long evolutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeakagePolicy {
    /// Fraction of the basis, counted from the top, treated as the leakage window.
    pub window_fraction: f64,
    pub warn: f64,
    pub error: f64,
}

impl Default for LeakagePolicy {
    fn default() -> Self {
        LeakagePolicy {
            window_fraction: 0.1,
            warn: 1e-6,
            error: 1e-3,
        }
    }
}

/// Running leakage bookkeeping shared by single and paired evolutions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LeakageMonitor {
    pub max_leakage: f64,
    /// First kick index whose leakage exceeded the warning threshold.
    pub first_warning: Option<u64>,
}

impl LeakageMonitor {
    pub fn check(&mut self, psi: &FockVector, kick: u64, policy: &LeakagePolicy) -> Result<f64> {
        let leak = psi.leakage(policy.window_fraction);
        self.max_leakage = self.max_leakage.max(leak);
        if leak > policy.error {
            return Err(Error::Truncation {
                what: "top-of-basis leakage",
                value: leak,
                limit: policy.error,
                suggested_dim: 2 * psi.dim(),
            });
        }
        if leak > policy.warn && self.first_warning.is_none() {
            log::warn!(
                "leakage {leak:.2e} at kick {kick} exceeds {:.1e}; consider a larger Fock basis",
                policy.warn
            );
            self.first_warning = Some(kick);
        }
        Ok(leak)
    }
}

/// States after `0..=n` kicks with per-kick leakage.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub states: Vec<FockVector>,
    pub leakage: Vec<f64>,
    pub monitor: LeakageMonitor,
}

pub fn evolve_series(
    f: &FloquetOperator,
    psi0: &FockVector,
    n: u64,
    policy: &LeakagePolicy,
) -> Result<Evolution> {
    let mut states = Vec::with_capacity(n as usize + 1);
    let mut leakage = Vec::with_capacity(n as usize + 1);
    let monitor = evolve_visit(f, psi0, n, policy, |_, psi, leak| {
        states.push(psi.clone());
        leakage.push(leak);
    })?;
    Ok(Evolution {
        states,
        leakage,
        monitor,
    })
}

/// Calls `visit(k, state)` for the states after `0..=n` kicks without storing them.
pub fn evolve_visit(
    f: &FloquetOperator,
    psi0: &FockVector,
    n: u64,
    policy: &LeakagePolicy,
    mut visit: impl FnMut(u64, &FockVector, f64),
) -> Result<LeakageMonitor> {
    if psi0.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: psi0.dim(),
        });
    }
    let mut monitor = LeakageMonitor::default();
    let mut psi = psi0.clone();
    let mut next = psi0.clone();
    let leak = monitor.check(&psi, 0, policy)?;
    visit(0, &psi, leak);
    for k in 1..=n {
        f.apply_into(
            psi.amplitudes.as_slice().expect("contiguous"),
            next.amplitudes.as_slice_mut().expect("contiguous"),
        );
        std::mem::swap(&mut psi, &mut next);
        let leak = monitor.check(&psi, k, policy)?;
        visit(k, &psi, leak);
    }
    Ok(monitor)
}
