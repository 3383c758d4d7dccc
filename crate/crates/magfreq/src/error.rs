//! Error taxonomy shared by every module.
//!
//! Errors fall into four groups that downstream consumers treat differently:
//! invalid inputs (caller bugs, reported eagerly), degenerate signals (a valid
//! parameter point where the estimator carries no information — optimizers
//! treat these as `+∞`, scans record them), numerical-contract violations
//! (an internal formula produced something unphysical, always a bug), and
//! unachievable requests (a target outside the physically reachable range).

use thiserror::Error;

/// Everything that can go wrong inside the engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition (negative time, bad noise
    /// weights, out-of-range squeezing, …).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The measurement signal carries no information at this point: the
    /// derivative of the measured mean with respect to the frequency
    /// vanishes (or underflows), so the error-propagation variance diverges.
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    /// A reconstructed map failed complete positivity beyond tolerance.
    /// This signals a formula or convention bug upstream, never bad user input.
    #[error("non-CPTP map: {0}")]
    NonCptp(String),

    /// A requested target (e.g. a squeezing level in dB) is not achievable
    /// for the given probe size.
    #[error("unachievable target: {0}")]
    Unachievable(String),

    /// A numerical verification guard tripped (oracle disagreement,
    /// convention mismatch, step-size violation).
    #[error("verification failure: {0}")]
    Verification(String),
}

/// Convenient alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable numeric code for FFI and process exit statuses:
    /// 2 = invalid input, 3 = degenerate signal, 4 = verification/CPTP
    /// failure, 5 = unachievable target.
    pub fn code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::DegenerateSignal(_) => 3,
            Error::NonCptp(_) | Error::Verification(_) => 4,
            Error::Unachievable(_) => 5,
        }
    }
}
