//! Quantum and classical delta-kicked harmonic oscillator.
//!
//! - [`params`]: model parameters and unit conversions
//! - [`classical`]: stroboscopic kicked-oscillator map, stochastic webs, orbit stability
//! - [`fockspace`]: truncated Fock basis, coherent states, Floquet operators
//! - [`protocol`]: overlap decay, Ramsey populations and Husimi Q functions

pub mod classical;
pub mod config;
pub mod error;
pub mod fockspace;
pub mod grid;
pub mod io;
pub mod params;
pub mod protocol;
pub mod tridiag;

pub use error::{Error, Result};
pub use params::{ModelParams, PhasePoint};
