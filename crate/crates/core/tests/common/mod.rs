//! Test-only oracles, independent of the eigendecomposition route.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64;

pub type CMatrix = Array2<Complex64>;

/// Truncated `a† + a` built directly from its matrix elements.
pub fn quadrature(n: usize) -> CMatrix {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else if i == j + 1 {
            Complex64::new((i as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn identity(n: usize) -> CMatrix {
    Array2::from_shape_fn((n, n), |(i, j)| {
        Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
    })
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a 30-term Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings as i32));
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..=30 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// `cos(B) = (e^{iB} + e^{−iB})/2`.
pub fn cosm(b: &CMatrix) -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    let plus = expm(&b.mapv(|z| i * z));
    let minus = expm(&b.mapv(|z| -i * z));
    (plus + minus).mapv(|z| z * 0.5)
}

/// `exp(−i κ cos[2η(a†+a)]/(√2η²))` evaluated without any eigensolver.
pub fn kick_oracle(kappa: f64, eta: f64, n: usize) -> CMatrix {
    let scale = kappa / (std::f64::consts::SQRT_2 * eta * eta);
    let c = cosm(&quadrature(n).mapv(|z| z * (2.0 * eta)));
    expm(&c.mapv(|z| Complex64::new(0.0, -scale) * z))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Deterministic pseudo-random complex vector.
pub fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}
