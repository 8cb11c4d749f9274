//! Simulation and inversion toolkit for stochastic time-harmonic wave
//! sources: fractional Gaussian source synthesis, acoustic/elastic
//! radiated fields via Green functions, single-realization frequency-band
//! strength estimation, and Tikhonov recovery of the strength profile.

pub mod cli;
pub mod config;
mod dd;
pub mod error;
pub mod estimator;
pub mod fftutil;
pub mod forward;
pub mod greens;
pub mod grid;
pub mod inversion;
pub mod randfield;
pub mod specialfn;

pub use error::{Error, Result};
