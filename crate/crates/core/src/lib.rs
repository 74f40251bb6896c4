//! Numerical laboratory for spectral gaps of exponential frames.
//!
//! The modules follow the chain from geometry to gap radius: [`domains`] measures sets and
//! their boundaries, [`fourier`] evaluates indicator transforms, [`spectra`] generates and
//! searches frequency sets, [`frames`] estimates frame bounds, [`bounds`] carries the shell
//! and tail estimates, and [`cli`] wires them into reproducible reports.

pub mod bessel;
pub mod bounds;
pub mod cli;
pub mod domains;
pub mod error;
pub mod fourier;
pub mod frames;
pub mod numeric;
pub mod spectra;

pub use error::{Error, Result};
