//! Certified summation of alternating series with fluctuating term decay.
//!
//! The classical alternating series test requires the term magnitudes to
//! decrease monotonically to zero. This crate works with the weaker
//! *Z(p)-monotone* condition `a[k+p] <= a[k]`, which allows the magnitudes to
//! fluctuate within a period of length `p`. For an alternating series whose
//! magnitudes are Z(2w-1)-monotone and tend to zero, the series converges and
//! the remainder after the m-th partial sum admits a family of computable
//! bounds in terms of the next few magnitudes.
//!
//! The crate provides:
//!
//! * an expression language and term-sequence model ([`expr`], [`series`]),
//! * finite-window verification of Z(p)-monotonicity, midpoint convexity,
//!   slow decay and periodic sign patterns ([`monotonicity`]),
//! * the full family of remainder bounds with directed rounding and explicit
//!   precondition reports ([`bounds`]),
//! * adaptive certified summation and the interleaved-subseries
//!   decomposition cross-check ([`summation`]),
//! * envelope-based certification of the monotonicity parameter of a term
//!   function ([`envelope`]),
//! * a high-precision reference oracle ([`oracle`]) and a registry of worked
//!   example series plus a seeded generator ([`corpus`]).
//!
//! All arithmetic uses configurable-precision binary floating point via a
//! [`real::PrecisionContext`]; bound arithmetic rounds outward so that
//! rounding can never invalidate a certificate.
//!
//! The crate is `no_std` (requires `alloc`). File formats and the command
//! line front end live in the companion crate `zseries-cli`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod corpus;
pub mod envelope;
pub mod error;
pub mod expr;
pub mod monotonicity;
pub mod oracle;
pub mod parse;
pub mod real;
pub mod series;
pub mod summation;

pub use bounds::{
    delta_bounds, half_bounds, leibniz_bound, remainder_enclosure, z_bound, z_bound_improved,
    BoundMethod, BoundOptions, BoundValue, RemainderBound, ZVariant,
};
pub use corpus::{make_random_z_series, CorpusEntry, DecayProfile};
pub use envelope::{
    bound_parameter, parameter_to_window, tangent_parameter_bound, verify_envelope, Direction,
    EnvelopePair, GridSpec, ZvCertificate,
};
pub use error::Error;
pub use expr::Expression;
pub use monotonicity::{
    check_convexity, check_sign_pattern, check_slow_decay, check_z_monotone,
    infer_min_odd_period, SignPatternReport, ZReport,
};
pub use oracle::{reference_remainder, reference_sum, ClosedForm, OracleOptions, ReferenceSum};
pub use parse::parse_expression;
pub use real::{PrecisionContext, Real};
pub use series::{Magnitude, PieceRule, SignConvention, TermSequence};
pub use summation::{
    cross_check, decompose, partial_sum, sum_to_tolerance, SumMethod, SumOptions, SummationResult,
};

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
