use thiserror::Error;

/// Errors produced by the spectral and thermodynamic routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The confinement scale gamma^2 = 2 mu a + (B/2)^2 vanished; no bound
    /// spectrum exists without either a quadratic term or a magnetic field.
    #[error("degenerate scale: gamma^2 = {0:.6e} (need a > 0 or B > 0)")]
    DegenerateScale(f64),

    #[error("unknown preset `{0}` (expected `charmonium` or `bottomonium`)")]
    UnknownPreset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quark mass not set; mass spectra need `quark_mass`")]
    MissingQuarkMass,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Level summation failed to converge (first term non-decaying or the
    /// term cap was exhausted).
    #[error("level sum did not converge: {0}")]
    NonConvergent(String),

    /// Richardson error estimate of the discrete eigenvalue exceeds the
    /// requested tolerance.
    #[error("grid too coarse: error estimate {estimate:.3e} > tolerance {tolerance:.3e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
