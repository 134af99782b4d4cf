//! Numerical core for Feynman–Kac path integrals of the N-particle Nelson
//! model: pair-interaction kernels, Brownian path ensembles, the naive and
//! Itô-renormalized path actions, Monte Carlo matrix elements, and Kato-class
//! diagnostics.
//!
//! The crate is `no_std` (with `alloc`); file formats, the command line and
//! thread pools live in the companion `nelson-lab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod action;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod katoclass;
pub mod kernels;
pub mod paths;
pub mod quad;
pub mod rng;
pub mod stats;

pub use error::Error;
