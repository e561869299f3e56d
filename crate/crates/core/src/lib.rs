//! Thermomajorization toolkit for photoswitch quantum yields.
//!
//! The crate builds Lorenz curves of population vectors relative to a
//! Gibbs state, decides the thermomajorization order between states,
//! diagonalizes coherent blocks living inside degenerate energy subspaces,
//! and uses all of that to compute the largest trans-isomer population a
//! thermal operation can reach from a photoexcited one- or two-molecule
//! state.
//!
//! Module map:
//!
//! - [`thermo`]: energy spectra, inverse temperature, population vectors, Gibbs states.
//! - [`lorenz`]: Lorenz curve construction, evaluation and comparison.
//! - [`modes`]: zero-mode coherent blocks, their diagonalization and the inverse rotation.
//! - [`model`]: the three-level single-molecule and nine-level two-molecule photoswitch.
//! - [`yields`]: exact subset-mass optimizer and the brute-force simplex-grid oracle.
//! - [`sweep`]: energy-gap sweeps, coherence-advantage maps and the exponential ridge fit.
//! - [`cli`]: the command-line front end used by the `thermoyield` binary.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod format;
pub mod lorenz;
pub mod model;
pub mod modes;
pub mod sweep;
pub mod thermo;
pub mod yields;

pub use error::{Error, Result};
pub use lorenz::{build_curve, thermomajorizes, Knot, LorenzCurve};
pub use model::PhotoswitchParams;
pub use modes::{BasisRotation, Block, CoherentBlockState};
pub use thermo::{gibbs_state, partition_function, EnergySpectrum, PopulationVector, ThermalContext};
pub use yields::{YieldDefinition, YieldReport};
