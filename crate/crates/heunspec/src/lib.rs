//! Quasi-exact bound states, quarkonium mass spectra, and partition-function
//! thermodynamics for the Cornell-plus-harmonic interaction
//! `V(r) = a r^2 + b r - g/r` in external magnetic and Aharonov-Bohm flux
//! fields (two-dimensional polar reduction, natural units).
//!
//! The closed forms come from the biconfluent-Heun series treatment of the
//! radial problem; an independent finite-difference oracle diagonalizes the
//! same radial operator, and a machine-readable audit records every place
//! the closed forms and the operator disagree instead of patching them.

pub mod error;
pub mod heun;
pub mod model;
pub mod oracle;
pub mod spectrum;
pub mod thermo;

pub use error::{Error, Result};
pub use model::{
    derive_scales, flux_ratio_from_raw, preset, preset_by_name, DerivedScales, FieldConfig,
    PhysParams, QuantumState, SeriesScales, Species, FLUX_QUANTUM,
};
