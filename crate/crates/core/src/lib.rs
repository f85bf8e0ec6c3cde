//! Incidence counting between homogeneous point sets and regular families of
//! hypersurfaces, together with numerical checks of the analytic hypotheses
//! (gradient bounds, Monge–Ampère nonvanishing, dilation regimes), discrete
//! s-energies, and stationary-phase decay of sphere measures.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: point sets in `[0,1]^d`, generators and the homogeneity check;
//! * [`families`]: the surface-family abstraction and the shipped families;
//! * [`regularity`]: zero-set sampling, bordered determinants and regime tables;
//! * [`incidence`]: brute-force and grid-accelerated δ-incidence counting;
//! * [`energy`] / [`fourier`]: s-energy and Fourier decay kernels;
//! * [`experiment`]: config-driven sweeps, exponent fits and CSV output.

pub mod energy;
pub mod error;
pub mod experiment;
pub mod families;
pub mod fourier;
pub mod geometry;
pub mod incidence;
pub mod regularity;

pub use error::{Error, Result};
