//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors produced by parsing, evaluation, checks and summation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Expression syntax error at a byte offset of the input.
    Syntax { offset: usize, message: String },
    /// Identifier is not a variable, function or constant of the language.
    UnknownIdentifier { offset: usize, name: String },
    /// A function was used with the wrong number of arguments (or none).
    ArityMismatch { offset: usize, name: String },
    /// Working precision below the supported minimum.
    PrecisionTooLow { bits: usize },
    /// Index outside the declared domain of a sequence.
    OutOfDomain { index: u64, start: u64 },
    /// A magnitude evaluated to a negative value.
    NegativeMagnitude { index: u64 },
    /// Evaluation produced an infinity or NaN.
    NonFinite { what: String },
    /// A signed term (or sign expression) evaluated to zero where the
    /// periodic-sign model requires nonzero terms.
    ZeroTerm { index: u64 },
    /// Invalid piecewise definition (moduli, residues or index maps).
    BadPieces { message: String },
    /// Check window too small for the requested period.
    WindowTooSmall { lo: u64, hi: u64, need: u64 },
    /// Invalid period or window parameter (zero, or even where odd required).
    BadPeriod { p: u64, message: String },
    /// Bound references an index before the start of the sequence.
    IndexBeforeStart { index: i64, start: u64 },
    /// Certified summation requires the caller to assert the limit-zero
    /// hypothesis explicitly.
    LimitZeroNotAsserted,
    /// A structural precondition failed (not a mathematical verdict).
    Unsupported { what: String },
    /// The oracle could not certify its residual below the requested
    /// tolerance within the index budget.
    OracleUnreachable { max_index: u64 },
    /// Sampling grid is empty or malformed.
    BadGrid { message: String },
    /// Envelope pair violates ordering or declared monotonicity on the grid.
    EnvelopeInvalid { message: String },
    /// No shift up to `t_max` certifies the envelope separation on the grid.
    NoCertifiableShift { t_max: f64 },
    /// Numerical root finding failed to bracket or converge.
    RootFindFailed { message: String },
    /// Unknown corpus id.
    UnknownSeries { id: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { offset, message } => {
                write!(f, "syntax error at byte {}: {}", offset, message)
            }
            Error::UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{}` at byte {}", name, offset)
            }
            Error::ArityMismatch { offset, name } => {
                write!(f, "function `{}` takes exactly one argument (at byte {})", name, offset)
            }
            Error::PrecisionTooLow { bits } => {
                write!(f, "working precision must be at least 64 bits, got {}", bits)
            }
            Error::OutOfDomain { index, start } => {
                write!(f, "index {} is outside the domain (start = {})", index, start)
            }
            Error::NegativeMagnitude { index } => {
                write!(f, "magnitude at index {} is negative", index)
            }
            Error::NonFinite { what } => write!(f, "non-finite evaluation: {}", what),
            Error::ZeroTerm { index } => {
                write!(f, "term at index {} is zero (periodic-sign model requires nonzero terms)", index)
            }
            Error::BadPieces { message } => write!(f, "invalid piecewise definition: {}", message),
            Error::WindowTooSmall { lo, hi, need } => {
                write!(f, "window [{}, {}] too small, need span of at least {}", lo, hi, need)
            }
            Error::BadPeriod { p, message } => write!(f, "invalid period {}: {}", p, message),
            Error::IndexBeforeStart { index, start } => {
                write!(f, "bound references index {} before sequence start {}", index, start)
            }
            Error::LimitZeroNotAsserted => {
                write!(f, "certified summation requires asserting that the terms tend to zero")
            }
            Error::Unsupported { what } => write!(f, "unsupported: {}", what),
            Error::OracleUnreachable { max_index } => {
                write!(f, "oracle tolerance unreachable within {} terms", max_index)
            }
            Error::BadGrid { message } => write!(f, "bad grid: {}", message),
            Error::EnvelopeInvalid { message } => write!(f, "invalid envelope: {}", message),
            Error::NoCertifiableShift { t_max } => {
                write!(f, "no shift T <= {} separates the envelopes on the grid", t_max)
            }
            Error::RootFindFailed { message } => write!(f, "root finding failed: {}", message),
            Error::UnknownSeries { id } => write!(f, "unknown series id `{}`", id),
        }
    }
}
