//! Envelope-based certification of the monotonicity parameter of a term
//! function.
//!
//! A function `f` whose graph lies between two monotone envelopes
//! `lo(x) <= f(x) <= hi(x)` is monotone "up to a horizontal shift": once the
//! trailing envelope at `x + T` clears the leading envelope at `x`, the
//! function compares monotonically across any gap larger than `T`. The
//! smallest certified shift bounds the function's monotonicity parameter
//! from above, and the smallest odd integer at least that large is a valid
//! window for the Z-monotone convergence test of the induced sequence.
//!
//! Certificates here are grid-empirical: the universally quantified
//! separation is sampled on a finite grid and reported as such. Envelopes
//! are supplied by the caller; finding good ones is the hard part and is
//! not automated.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::expr::Expression;
use crate::real::{PrecisionContext, Real};

/// Declared direction of both envelopes (non-strict).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Two monotone functions sandwiching a term function on `x >= domain_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePair {
    pub lower: Expression,
    pub upper: Expression,
    pub domain_start: f64,
    pub direction: Direction,
}

/// Uniform sampling grid `start, start + step, ..., <= end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(start: f64, end: f64, step: f64) -> Result<GridSpec, Error> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start
        {
            return Err(Error::BadGrid {
                message: format!("start {}, end {}, step {}", start, end, step),
            });
        }
        Ok(GridSpec { start, end, step })
    }

    pub fn len(&self) -> u64 {
        ((self.end - self.start) / self.step).floor() as u64 + 1
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one point
    }

    fn point(&self, i: u64, ctx: &PrecisionContext) -> Real {
        let start = Real::from_f64(self.start, ctx);
        let step = Real::from_f64(self.step, ctx);
        start.add(&Real::from_u64(i, ctx).mul(&step, ctx), ctx)
    }
}

/// Result of checking `lower <= f <= upper` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub holds: bool,
    /// Sample points where the sandwich failed: `(x, lower, f, upper)`.
    pub violations: Vec<(Real, Real, Real, Real)>,
    pub points_checked: u64,
}

/// Checks that `f` lies between the envelopes at every grid point.
pub fn verify_envelope(
    env: &EnvelopePair,
    f: &Expression,
    grid: &GridSpec,
    ctx: &PrecisionContext,
) -> Result<EnvelopeReport, Error> {
    let mut violations = Vec::new();
    let n = grid.len();
    for i in 0..n {
        let x = grid.point(i, ctx);
        let lo = env.lower.eval(&x, ctx)?;
        let hi = env.upper.eval(&x, ctx)?;
        let fx = f.eval(&x, ctx)?;
        if fx.lt(&lo) || hi.lt(&fx) {
            if violations.len() < 16 {
                violations.push((x, lo, fx, hi));
            } else {
                break;
            }
        }
    }
    Ok(EnvelopeReport { holds: violations.is_empty(), violations, points_checked: n })
}

/// Grid-empirical certificate for a shift `T` separating the envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ZvCertificate {
    /// Certified shift: any gap larger than this compares monotonically on
    /// the sampled grid.
    pub t: Real,
    pub grid: GridSpec,
    /// Minimum separation achieved at the certified shift.
    pub margin: Real,
    /// Always true: the certificate quantifies over the grid, not the
    /// continuum.
    pub empirical: bool,
}

/// Search controls for [`bound_parameter`].
#[derive(Debug, Clone, Copy)]
pub struct ParameterSearch {
    /// Largest shift tried.
    pub t_max: f64,
    /// Absolute bisection tolerance on the returned shift.
    pub t_tolerance: f64,
}

impl Default for ParameterSearch {
    fn default() -> Self {
        ParameterSearch { t_max: 64.0, t_tolerance: 1e-9 }
    }
}

fn direction_holds(a: &Real, b: &Real, direction: Direction) -> bool {
    // consecutive grid values a then b
    match direction {
        Direction::Increasing => a.le(b),
        Direction::Decreasing => b.le(a),
    }
}

/// Finds the smallest grid-certified shift `T <= t_max` (within the
/// bisection tolerance) such that the trailing envelope at `x + T` strictly
/// clears the leading envelope at `x` at every grid point, with a positive
/// rounding-safe margin. For increasing envelopes the condition is
/// `lower(x + T) > upper(x)`; for decreasing ones `upper(x + T) < lower(x)`.
pub fn bound_parameter(
    env: &EnvelopePair,
    grid: &GridSpec,
    ctx: &PrecisionContext,
    search: &ParameterSearch,
) -> Result<ZvCertificate, Error> {
    validate_pair(env, grid, ctx)?;
    // Margin threshold guards the strict inequality against rounding.
    let threshold = Real::two_pow(-((ctx.bits() / 2) as i64), ctx);

    let margin_at = |t: &Real| -> Result<Real, Error> {
        let mut min_margin: Option<Real> = None;
        for i in 0..grid.len() {
            let x = grid.point(i, ctx);
            let shifted = x.add(t, ctx);
            let gap = match env.direction {
                Direction::Increasing => {
                    env.lower.eval(&shifted, ctx)?.sub(&env.upper.eval(&x, ctx)?, ctx)
                }
                Direction::Decreasing => {
                    env.lower.eval(&x, ctx)?.sub(&env.upper.eval(&shifted, ctx)?, ctx)
                }
            };
            min_margin = Some(match min_margin {
                Some(m) => m.min(&gap),
                None => gap,
            });
        }
        Ok(min_margin.expect("grid is nonempty"))
    };

    let t_max = Real::from_f64(search.t_max, ctx);
    let margin_hi = margin_at(&t_max)?;
    if margin_hi.lt(&threshold) {
        return Err(Error::NoCertifiableShift { t_max: search.t_max });
    }
    // The envelopes are ordered (lower <= upper), so the separation fails at
    // T = 0 and the predicate is monotone in T; bisect the threshold.
    let tol = Real::from_f64(search.t_tolerance.max(1e-15), ctx);
    let mut lo = Real::zero();
    let mut hi = t_max;
    while tol.lt(&hi.sub(&lo, ctx)) {
        let mid = lo.add(&hi, ctx).halve(ctx);
        if margin_at(&mid)?.lt(&threshold) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let margin = margin_at(&hi)?;
    Ok(ZvCertificate { t: hi, grid: *grid, margin, empirical: true })
}

fn validate_pair(
    env: &EnvelopePair,
    grid: &GridSpec,
    ctx: &PrecisionContext,
) -> Result<(), Error> {
    if grid.start < env.domain_start {
        return Err(Error::EnvelopeInvalid {
            message: format!(
                "grid starts at {} before the envelope domain {}",
                grid.start, env.domain_start
            ),
        });
    }
    let mut prev: Option<(Real, Real)> = None;
    for i in 0..grid.len() {
        let x = grid.point(i, ctx);
        let lo = env.lower.eval(&x, ctx)?;
        let hi = env.upper.eval(&x, ctx)?;
        if hi.lt(&lo) {
            return Err(Error::EnvelopeInvalid {
                message: format!("lower exceeds upper at x = {}", x.to_f64()),
            });
        }
        if let Some((plo, phi)) = &prev {
            if !direction_holds(plo, &lo, env.direction) || !direction_holds(phi, &hi, env.direction)
            {
                return Err(Error::EnvelopeInvalid {
                    message: format!(
                        "envelope not monotone ({:?}) near x = {}",
                        env.direction,
                        x.to_f64()
                    ),
                });
            }
        }
        prev = Some((lo, hi));
    }
    Ok(())
}

/// Smallest odd integer window at least `max(t, 1)`: a certified shift of
/// `t` makes the induced integer sequence Z(w)-monotone for every integer
/// `w >= t`, and the convergence test needs an odd window.
pub fn parameter_to_window(t: &Real) -> Result<u64, Error> {
    if !t.is_finite() || t.is_negative() {
        return Err(Error::Unsupported {
            what: String::from("parameter must be finite and nonnegative"),
        });
    }
    let fl = t
        .floor()
        .to_i64_exact()
        .ok_or(Error::Unsupported { what: String::from("parameter too large") })?;
    let ceil = if t.is_int() { fl } else { fl + 1 };
    let mut w = ceil.max(1) as u64;
    if w % 2 == 0 {
        w += 1;
    }
    Ok(w)
}

/// Horizontal-gap bound for perturbed power functions via the tangent-line
/// construction: for `f(x) = x^alpha + p(x) * x^(alpha - 1)` with
/// `0 < alpha <= 1` and `|p(x)| < M`, the envelopes are
/// `q(x) = x^alpha + M*x^(alpha-1)` and `r(x) = x^alpha - M*x^(alpha-1)`,
/// both increasing for `x > (1-alpha)*M/alpha`. With `x1` solving
/// `r(x1) = q(x0)`, the horizontal distance between the envelope graphs to
/// the right of `x0` is below
///
/// ```text
/// T(x0) = 2M / (alpha - (1 - alpha)*M / x1)
/// ```
///
/// (`|BC| / tan(angle CAB)` with `|BC| = 2M/x1^(1-alpha)` and
/// `tan(angle CAB) = q'(x1) = alpha*x1^(alpha-1) - (1-alpha)*M*x1^(alpha-2)`).
/// The bound decreases in `x0`.
pub fn tangent_parameter_bound(
    m_bound: f64,
    alpha: f64,
    x0: f64,
    ctx: &PrecisionContext,
) -> Result<Real, Error> {
    if !(0.0 < alpha && alpha <= 1.0) || m_bound < 0.0 {
        return Err(Error::Unsupported {
            what: format!("need 0 < alpha <= 1 and M >= 0, got alpha = {}, M = {}", alpha, m_bound),
        });
    }
    let m_r = Real::from_f64(m_bound, ctx);
    let alpha_r = Real::from_f64(alpha, ctx);
    let one = Real::from_u64(1, ctx);
    // Monotonicity of the envelopes needs x0 > (1 - alpha)*M/alpha.
    let cutoff = one.sub(&alpha_r, ctx).mul(&m_r, ctx).div(&alpha_r, ctx);
    let x0_r = Real::from_f64(x0, ctx);
    if x0 <= 0.0 || x0_r.le(&cutoff) {
        return Err(Error::Unsupported {
            what: format!("x0 must exceed (1-alpha)*M/alpha = {}", cutoff.to_f64()),
        });
    }
    if m_bound == 0.0 {
        return Ok(Real::zero());
    }

    // q(x) = x^a + M x^(a-1), r(x) = x^a - M x^(a-1)
    let alpha_m1 = alpha_r.sub(&one, ctx);
    let q = |x: &Real| -> Real {
        x.pow(&alpha_r, ctx).add(&m_r.mul(&x.pow(&alpha_m1, ctx), ctx), ctx)
    };
    let r = |x: &Real| -> Real {
        x.pow(&alpha_r, ctx).sub(&m_r.mul(&x.pow(&alpha_m1, ctx), ctx), ctx)
    };

    // Solve r(x1) = q(x0) for x1 >= x0 by bracketing + bisection; r is
    // increasing past the cutoff and r(x0) < q(x0).
    let target = q(&x0_r);
    let mut hi = x0_r.clone();
    let two = Real::from_u64(2, ctx);
    let mut expansions = 0;
    while r(&hi).lt(&target) {
        hi = hi.mul(&two, ctx);
        expansions += 1;
        if expansions > 128 {
            return Err(Error::RootFindFailed {
                message: String::from("failed to bracket x1 (envelope gap does not close)"),
            });
        }
    }
    let mut lo = x0_r.clone();
    let eps = Real::two_pow(-((ctx.bits() / 2) as i64), ctx);
    loop {
        let width = hi.sub(&lo, ctx);
        if width.le(&eps.mul(&hi, ctx)) {
            break;
        }
        let mid = lo.add(&hi, ctx).halve(ctx);
        if r(&mid).lt(&target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x1 = hi;

    // T = 2M / (alpha - (1-alpha)*M/x1)
    let denom = alpha_r.sub(&one.sub(&alpha_r, ctx).mul(&m_r, ctx).div(&x1, ctx), ctx);
    if !denom.is_positive() {
        return Err(Error::RootFindFailed {
            message: String::from("tangent slope denominator is nonpositive (x0 too small)"),
        });
    }
    Ok(two.mul(&m_r, ctx).div(&denom, ctx))
}
