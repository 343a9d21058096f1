//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by constructors and numerical routines.
///
/// Construction errors (`Invalid*`) report domain violations up front so the
/// numerical code can assume well-formed inputs; the remaining variants report
/// conditions detected while operating on otherwise valid data.
#[derive(Debug, Error)]
pub enum Error {
    /// Wavelet order outside the supported range.
    #[error("wavelet order must be in 1..=64, got {0}")]
    InvalidOrder(u32),

    /// A scale that is not strictly positive and finite.
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),

    /// A malformed uniform time axis.
    #[error("invalid time axis: {0}")]
    InvalidAxis(String),

    /// A malformed time-scale grid.
    #[error("invalid time-scale grid: {0}")]
    InvalidGrid(String),

    /// Ray geometry or kinematics outside the physical domain.
    #[error("invalid ray: {0}")]
    InvalidRay(String),

    /// Signal samples or axis incompatible with the requested operation.
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    /// Modem configuration outside the supported range.
    #[error("invalid modem config: {0}")]
    InvalidModem(String),

    /// A scalar parameter outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An output window that cannot hold the mapped response.
    #[error(
        "output window [{got_lo:.9e}, {got_hi:.9e}] s does not cover the \
         response support [{need_lo:.9e}, {need_hi:.9e}] s"
    )]
    WindowTooSmall {
        /// Lower edge of the support the window must cover, in seconds.
        need_lo: f64,
        /// Upper edge of the support the window must cover, in seconds.
        need_hi: f64,
        /// Lower edge of the window that was supplied, in seconds.
        got_lo: f64,
        /// Upper edge of the window that was supplied, in seconds.
        got_hi: f64,
    },

    /// Two containers that must agree in shape or axis do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An internal numerical self-check failed.
    #[error("numerical self-check failed: {0}")]
    SelfCheck(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
