//! Normal modes, symmetry operators and Chebyshev commutants of harmonic
//! oscillator chains, cross-checked against independent eigensolvers and
//! exact integer arithmetic.

pub mod chain;
pub mod chebyshev;
pub mod cli;
pub mod commutant;
pub mod dynamics;
pub mod eigensolver;
pub mod error;
pub mod matrix;
pub mod operators;
pub mod spectra;
pub mod symmetry;
pub mod verify;

pub use chain::{ChainConfig, Topology};
pub use error::{Error, Result};
pub use matrix::{Int, IntMatrix, RealMatrix, SquareMatrix};
