//! Spectral analysis of doubly infinite complex Jacobi matrices through their
//! characteristic functions.

pub mod chain;
pub mod cli;
pub mod config;
pub mod charfn;
pub mod cx;
pub mod error;
pub mod functional;
pub mod jet;
pub mod ladder;
pub mod oracles;
pub mod regularization;
pub mod sequence;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
