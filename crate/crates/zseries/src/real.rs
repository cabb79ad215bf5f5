//! Extended-precision arithmetic layer.
//!
//! [`Real`] wraps a binary floating point number of configurable precision.
//! Ordinary evaluation rounds to nearest; bound arithmetic uses [`Dir`] to
//! round outward so a certificate can never be invalidated by rounding.

use alloc::string::String;
use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use core::cmp::Ordering;
use core::fmt;

use crate::error::Error;

/// Directed rounding selector for bound arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    /// Round toward plus infinity (upper bounds).
    Up,
    /// Round toward minus infinity (lower bounds).
    Down,
}

impl Dir {
    fn mode(self) -> RoundingMode {
        match self {
            Dir::Up => RoundingMode::Up,
            Dir::Down => RoundingMode::Down,
        }
    }
}

/// Working precision for term evaluation and bound arithmetic.
///
/// Holds the precision in bits (at least 64) and a cache of computed
/// mathematical constants. Results are functions of the operands and the
/// precision only; the cache is not observable state.
pub struct PrecisionContext {
    bits: usize,
    consts: spin::Mutex<Consts>,
}

impl PrecisionContext {
    /// Minimum supported working precision in bits.
    pub const MIN_BITS: usize = 64;

    /// Default working precision in bits.
    pub const DEFAULT_BITS: usize = 256;

    pub fn new(bits: usize) -> Result<Self, Error> {
        if bits < Self::MIN_BITS {
            return Err(Error::PrecisionTooLow { bits });
        }
        Ok(PrecisionContext {
            bits,
            consts: spin::Mutex::new(Consts::new().expect("constants cache allocation")),
        })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Context with doubled precision, used by the reference oracle so its
    /// error can never mask a bound violation at consumer precision.
    pub fn oracle(&self) -> PrecisionContext {
        PrecisionContext::new(self.bits * 2).expect("doubled precision is valid")
    }

    fn with_consts<T>(&self, f: impl FnOnce(&mut Consts) -> T) -> T {
        let mut guard = self.consts.lock();
        f(&mut guard)
    }

    /// The constant pi at working precision.
    pub fn pi(&self) -> Real {
        Real(self.with_consts(|cc| cc.pi(self.bits, RoundingMode::ToEven)))
    }

    /// The constant e at working precision.
    pub fn e(&self) -> Real {
        Real(self.with_consts(|cc| cc.e(self.bits, RoundingMode::ToEven)))
    }

    /// Natural logarithm of 2 at working precision.
    pub fn ln_2(&self) -> Real {
        Real(self.with_consts(|cc| cc.ln_2(self.bits, RoundingMode::ToEven)))
    }
}

impl Clone for PrecisionContext {
    fn clone(&self) -> Self {
        PrecisionContext::new(self.bits).expect("precision already validated")
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::new(Self::DEFAULT_BITS).expect("default precision is valid")
    }
}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecisionContext").field("bits", &self.bits).finish()
    }
}

/// An extended-precision binary floating point value.
#[derive(Clone)]
pub struct Real(BigFloat);

const RM: RoundingMode = RoundingMode::ToEven;

impl Real {
    pub fn zero() -> Real {
        Real(BigFloat::from_u64(0, PrecisionContext::MIN_BITS))
    }

    pub fn from_u64(v: u64, ctx: &PrecisionContext) -> Real {
        Real(BigFloat::from_u64(v, ctx.bits))
    }

    pub fn from_i64(v: i64, ctx: &PrecisionContext) -> Real {
        Real(BigFloat::from_i64(v, ctx.bits))
    }

    pub fn from_f64(v: f64, ctx: &PrecisionContext) -> Real {
        Real(BigFloat::from_f64(v, ctx.bits))
    }

    /// Parses a decimal literal (digits with optional fraction part) at
    /// working precision, rounding to nearest.
    pub fn parse_decimal(text: &str, ctx: &PrecisionContext) -> Result<Real, Error> {
        let v = ctx.with_consts(|cc| {
            BigFloat::parse(text, astro_float::Radix::Dec, ctx.bits, RM, cc)
        });
        let r = Real(v);
        if !r.is_finite() {
            return Err(Error::NonFinite { what: alloc::format!("decimal literal `{}`", text) });
        }
        Ok(r)
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn is_int(&self) -> bool {
        self.0.is_int()
    }

    pub fn add(&self, rhs: &Real, ctx: &PrecisionContext) -> Real {
        Real(self.0.add(&rhs.0, ctx.bits, RM))
    }

    pub fn sub(&self, rhs: &Real, ctx: &PrecisionContext) -> Real {
        Real(self.0.sub(&rhs.0, ctx.bits, RM))
    }

    pub fn mul(&self, rhs: &Real, ctx: &PrecisionContext) -> Real {
        Real(self.0.mul(&rhs.0, ctx.bits, RM))
    }

    pub fn div(&self, rhs: &Real, ctx: &PrecisionContext) -> Real {
        Real(self.0.div(&rhs.0, ctx.bits, RM))
    }

    pub fn add_dir(&self, rhs: &Real, ctx: &PrecisionContext, dir: Dir) -> Real {
        Real(self.0.add(&rhs.0, ctx.bits, dir.mode()))
    }

    pub fn sub_dir(&self, rhs: &Real, ctx: &PrecisionContext, dir: Dir) -> Real {
        Real(self.0.sub(&rhs.0, ctx.bits, dir.mode()))
    }

    pub fn mul_dir(&self, rhs: &Real, ctx: &PrecisionContext, dir: Dir) -> Real {
        Real(self.0.mul(&rhs.0, ctx.bits, dir.mode()))
    }

    pub fn div_dir(&self, rhs: &Real, ctx: &PrecisionContext, dir: Dir) -> Real {
        Real(self.0.div(&rhs.0, ctx.bits, dir.mode()))
    }

    pub fn recip(&self, ctx: &PrecisionContext) -> Real {
        Real(self.0.reciprocal(ctx.bits, RM))
    }

    pub fn neg(&self) -> Real {
        Real(self.0.neg())
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    /// Exact division by two (binary exponent decrement).
    pub fn halve(&self, ctx: &PrecisionContext) -> Real {
        let two = BigFloat::from_u64(2, PrecisionContext::MIN_BITS);
        Real(self.0.div(&two, ctx.bits, RM))
    }

    pub fn powi(&self, n: u64, ctx: &PrecisionContext) -> Real {
        Real(self.0.powi(n as usize, ctx.bits, RM))
    }

    /// General power via exp/ln; requires a positive base unless the
    /// exponent is an integer (use [`Real::powi`] for that case).
    pub fn pow(&self, exp: &Real, ctx: &PrecisionContext) -> Real {
        Real(ctx.with_consts(|cc| self.0.pow(&exp.0, ctx.bits, RM, cc)))
    }

    pub fn sin(&self, ctx: &PrecisionContext) -> Real {
        Real(ctx.with_consts(|cc| self.0.sin(ctx.bits, RM, cc)))
    }

    pub fn cos(&self, ctx: &PrecisionContext) -> Real {
        Real(ctx.with_consts(|cc| self.0.cos(ctx.bits, RM, cc)))
    }

    pub fn ln(&self, ctx: &PrecisionContext) -> Real {
        Real(ctx.with_consts(|cc| self.0.ln(ctx.bits, RM, cc)))
    }

    pub fn exp(&self, ctx: &PrecisionContext) -> Real {
        Real(ctx.with_consts(|cc| self.0.exp(ctx.bits, RM, cc)))
    }

    pub fn sqrt(&self, ctx: &PrecisionContext) -> Real {
        Real(self.0.sqrt(ctx.bits, RM))
    }

    pub fn floor(&self) -> Real {
        Real(self.0.floor())
    }

    /// Re-rounds the value to the working precision of `ctx` (to nearest).
    pub fn with_precision(&self, ctx: &PrecisionContext) -> Real {
        let zero = BigFloat::from_u64(0, PrecisionContext::MIN_BITS);
        Real(self.0.add(&zero, ctx.bits, RM))
    }

    /// Total order on finite values. Panics on NaN, which the evaluation
    /// layer never lets escape.
    pub fn cmp(&self, other: &Real) -> Ordering {
        self.0.partial_cmp(&other.0).expect("comparison of non-finite values")
    }

    pub fn le(&self, other: &Real) -> bool {
        self.cmp(other) != Ordering::Greater
    }

    pub fn lt(&self, other: &Real) -> bool {
        self.cmp(other) == Ordering::Less
    }

    pub fn max(&self, other: &Real) -> Real {
        if self.cmp(other) == Ordering::Less { other.clone() } else { self.clone() }
    }

    pub fn min(&self, other: &Real) -> Real {
        if self.cmp(other) == Ordering::Greater { other.clone() } else { self.clone() }
    }

    /// Exact integer extraction for values that are integers with absolute
    /// value below 2^62; `None` otherwise.
    pub fn to_i64_exact(&self) -> Option<i64> {
        if self.0.is_zero() {
            return Some(0);
        }
        if !self.0.is_int() {
            return None;
        }
        let (m, n, s, e, _inexact) = self.0.as_raw_parts()?;
        if e <= 0 || e > 62 {
            return None;
        }
        // Value = 0.m * 2^e with the mantissa normalized; the integer part
        // lives in the top `e` bits of the top word.
        let top = *m.last()?;
        let e = e as u32;
        debug_assert!(n as u32 >= e);
        let v = top >> (64 - e);
        let v = v as i64;
        Some(if s == Sign::Neg { -v } else { v })
    }

    /// Nearest-f64 approximation (for display and diagnostics only).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match self.0.as_raw_parts() {
            Some((m, _n, s, e, _)) => {
                let top = *m.last().unwrap_or(&0);
                let frac = top as f64 / 18446744073709551616.0; // 2^64
                let v = frac * 2f64.powi(e);
                if s == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            None => f64::NAN,
        }
    }

    /// Full-precision decimal rendering.
    pub fn to_decimal_string(&self, ctx: &PrecisionContext) -> String {
        ctx.with_consts(|cc| self.0.format(astro_float::Radix::Dec, RM, cc))
            .unwrap_or_else(|_| String::from("<unrepresentable>"))
    }

    /// 2^k exactly, for integer k (used for tolerances and thresholds).
    pub fn two_pow(k: i64, ctx: &PrecisionContext) -> Real {
        let two = Real::from_u64(2, ctx);
        if k >= 0 {
            two.powi(k as u64, ctx)
        } else {
            two.powi((-k) as u64, ctx).recip(ctx)
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

// Approximate renderings; use `to_decimal_string` for full precision.
impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e})", self.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}
