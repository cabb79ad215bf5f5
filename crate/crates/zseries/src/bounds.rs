//! Remainder bounds for alternating series with Z-monotone magnitudes.
//!
//! Writing `R[m] = S - S[m]` for the tail after the m-th partial sum, the
//! implemented estimators are, in terms of the magnitudes `a[n]`:
//!
//! * `leibniz`: `|R[m]| <= a[m+1]` (monotone magnitudes).
//! * `z_simple`: `|R[m]| <= a[m+1] + ... + a[m+2w-1]` (Z(2w-1) magnitudes;
//!   the tighter variant, derived from the interleaved-subseries argument).
//! * `z_stated`: the same sum extended through `a[m+2w]`.
//! * `z_improved`: `max(a[m+2] + a[m+4] + ... + a[m+2w-2],
//!   a[m+1] + a[m+3] + ... + a[m+2w-1])` - the odd- and even-offset tail
//!   sums compete instead of adding, because the subseries remainders
//!   alternate in sign.
//! * `enclosure`: the signed interval `R[m] = sum_j theta_j * t[m+j]` over
//!   `j = 1..2w-1` with each `theta_j` in `[0,1]` and `t` the signed terms,
//!   so `lo <= R[m] <= hi` with `max(|lo|, hi)` equal to `z_improved`.
//! * `half_upper`/`half_lower`: `a[m+1]/2 <= |R[m]| <= a[m]/2` for monotone
//!   midpoint-convex magnitudes.
//! * `delta_upper`/`delta_lower`: the per-subseries sandwich combined over
//!   one period, with a sharper upper form when the magnitudes also decay
//!   no faster than a geometric with ratio one half.
//!
//! Bounds never fail on a failed mathematical precondition: the value is
//! still computed and returned with `valid = false` and the failing report
//! attached, because callers often want the number for diagnostics. All
//! bound arithmetic rounds outward (up for upper bounds, down for lower
//! bounds) so rounding can never invalidate a certificate.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::monotonicity::{
    check_convexity_strided, check_slow_decay, check_z_monotone, ZReport,
};
use crate::real::{Dir, PrecisionContext, Real};
use crate::series::TermSequence;

/// Which estimator produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Leibniz,
    ZSimple,
    ZStated,
    ZImproved,
    HalfUpper,
    HalfLower,
    DeltaUpper,
    DeltaLower,
    Enclosure,
}

impl BoundMethod {
    pub fn name(self) -> &'static str {
        match self {
            BoundMethod::Leibniz => "leibniz",
            BoundMethod::ZSimple => "z_simple",
            BoundMethod::ZStated => "z_stated",
            BoundMethod::ZImproved => "z_improved",
            BoundMethod::HalfUpper => "half_upper",
            BoundMethod::HalfLower => "half_lower",
            BoundMethod::DeltaUpper => "delta_upper",
            BoundMethod::DeltaLower => "delta_lower",
            BoundMethod::Enclosure => "enclosure",
        }
    }

    /// True for estimators that bound `|R[m]|` from above.
    pub fn is_upper(self) -> bool {
        !matches!(self, BoundMethod::HalfLower | BoundMethod::DeltaLower)
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Variant of the Z-bound: the tighter `proof` form sums `2w-1` terms, the
/// `stated` form sums `2w`. The stated form is weaker (never smaller), so
/// defaulting to the proof form is sound; reports surface the discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZVariant {
    Proof,
    Stated,
}

/// Bound payload: a one-sided magnitude bound or a signed enclosure.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Magnitude(Real),
    Interval { lo: Real, hi: Real },
}

impl BoundValue {
    /// The bound as a magnitude: the value itself, or `max(|lo|, hi)` for
    /// an enclosure.
    pub fn magnitude(&self) -> Real {
        match self {
            BoundValue::Magnitude(v) => v.clone(),
            BoundValue::Interval { lo, hi } => lo.abs().max(hi),
        }
    }
}

/// A precondition report attached to a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Precondition {
    pub description: String,
    pub report: ZReport,
}

impl Precondition {
    pub fn holds(&self) -> bool {
        self.report.holds
    }
}

/// A certified (or diagnostically invalid) enclosure of the remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderBound {
    pub m: u64,
    pub method: BoundMethod,
    pub value: BoundValue,
    pub preconditions: Vec<Precondition>,
    /// True only if every attached precondition report holds.
    pub valid: bool,
    /// For floored lower bounds: the raw, possibly negative combination
    /// before flooring at zero.
    pub unfloored: Option<Real>,
}

impl RemainderBound {
    fn new(m: u64, method: BoundMethod, value: BoundValue, preconditions: Vec<Precondition>) -> Self {
        let valid = preconditions.iter().all(Precondition::holds);
        RemainderBound { m, method, value, preconditions, valid, unfloored: None }
    }

    /// The bound as a magnitude on `|R[m]|`.
    pub fn magnitude(&self) -> Real {
        self.value.magnitude()
    }
}

/// Options shared by the bound constructors.
#[derive(Debug, Clone, Copy)]
pub struct BoundOptions {
    /// Length of the tail window on which precondition reports are checked.
    pub check_window: u64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { check_window: 100 }
    }
}

/// Clamps a window end to the last valid index of a finite table.
fn clamp_hi(seq: &TermSequence, hi: u64) -> u64 {
    match seq.end() {
        Some(last) => hi.min(last),
        None => hi,
    }
}

fn require_tail_index(seq: &TermSequence, m: u64, offset: u64) -> Result<(), Error> {
    if m + offset < seq.start() {
        return Err(Error::IndexBeforeStart { index: (m + offset) as i64, start: seq.start() });
    }
    Ok(())
}

/// Magnitude source: the bound constructors evaluate the sequence directly,
/// while the adaptive summation scanner serves values from its ring buffer.
/// Both paths run the identical arithmetic below, so their results agree
/// bit for bit.
pub(crate) type Fetch<'a> = dyn FnMut(u64) -> Result<Real, Error> + 'a;

fn sum_with(
    fetch: &mut Fetch<'_>,
    indices: impl Iterator<Item = u64>,
    ctx: &PrecisionContext,
    dir: Dir,
) -> Result<Real, Error> {
    let mut acc = Real::zero();
    for n in indices {
        let t = fetch(n)?;
        acc = acc.add_dir(&t, ctx, dir);
    }
    Ok(acc)
}

/// Odd- and even-offset tail sums after `m` for window parameter `w`:
/// odd = `a[m+1] + a[m+3] + ... + a[m+2w-1]` (w terms),
/// even = `a[m+2] + a[m+4] + ... + a[m+2w-2]` (w-1 terms),
/// both rounded up. Every Z-family bound is assembled from these two
/// values so that their algebraic relations hold bit-exactly.
pub(crate) fn tail_offset_sums_with(
    fetch: &mut Fetch<'_>,
    m: u64,
    omega: u64,
    ctx: &PrecisionContext,
) -> Result<(Real, Real), Error> {
    let odd = sum_with(fetch, (1..=omega).map(|r| m + 2 * r - 1), ctx, Dir::Up)?;
    let even = sum_with(fetch, (1..omega).map(|r| m + 2 * r), ctx, Dir::Up)?;
    Ok((odd, even))
}

fn tail_offset_sums(
    seq: &TermSequence,
    m: u64,
    omega: u64,
    ctx: &PrecisionContext,
) -> Result<(Real, Real), Error> {
    tail_offset_sums_with(&mut |n| seq.eval_term(n, ctx), m, omega, ctx)
}

/// Raw delta combinations `(lower, upper)` before flooring; see
/// [`delta_bounds`].
pub(crate) fn delta_raw_with(
    fetch: &mut Fetch<'_>,
    m: u64,
    p: u64,
    slow_decay: bool,
    ctx: &PrecisionContext,
) -> Result<(Real, Real), Error> {
    let odd_down = sum_with(fetch, (1..=p).step_by(2).map(|i| m + i), ctx, Dir::Down)?;
    let even_up = sum_with(fetch, (2..p).step_by(2).map(|i| m + i), ctx, Dir::Up)?;
    let even_down = sum_with(fetch, (2..p).step_by(2).map(|i| m + i), ctx, Dir::Down)?;
    let upper = if slow_decay {
        // (a[m+1-p] + a[m+3-p] + ... + a[m] - even offsets) / 2
        let prev_odd_up = sum_with(fetch, (1..=p).step_by(2).map(|i| m + i - p), ctx, Dir::Up)?;
        prev_odd_up.sub_dir(&even_down, ctx, Dir::Up).halve(ctx)
    } else {
        let odd_up = sum_with(fetch, (1..=p).step_by(2).map(|i| m + i), ctx, Dir::Up)?;
        odd_up.sub_dir(&even_down.halve(ctx), ctx, Dir::Up)
    };
    let lower = odd_down.halve(ctx).sub_dir(&even_up, ctx, Dir::Down);
    Ok((lower, upper))
}

fn z_precondition(
    seq: &TermSequence,
    m: u64,
    omega: u64,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<Precondition, Error> {
    let p = 2 * omega - 1;
    let lo = (m + 1).max(seq.start());
    let hi = clamp_hi(seq, m + 1 + opts.check_window.max(4 * omega));
    let report = check_z_monotone(seq, p, lo, hi, ctx)?;
    Ok(Precondition {
        description: format!("Z({}) monotone decrease on [{}, {}]", p, lo, hi),
        report,
    })
}

/// `|R[m]| <= a[m+1]`, the first omitted magnitude.
pub fn leibniz_bound(
    seq: &TermSequence,
    m: u64,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<RemainderBound, Error> {
    require_tail_index(seq, m, 1)?;
    let value = seq.eval_term(m + 1, ctx)?;
    let pre = z_precondition(seq, m, 1, ctx, opts)?;
    Ok(RemainderBound::new(m, BoundMethod::Leibniz, BoundValue::Magnitude(value), alloc::vec![pre]))
}

/// Tail-sum bound for Z(2w-1) magnitudes; see [`ZVariant`] for the two
/// printed forms.
pub fn z_bound(
    seq: &TermSequence,
    m: u64,
    omega: u64,
    variant: ZVariant,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<RemainderBound, Error> {
    if omega == 0 {
        return Err(Error::BadPeriod { p: 0, message: String::from("omega must be at least 1") });
    }
    require_tail_index(seq, m, 1)?;
    let (odd, even) = tail_offset_sums(seq, m, omega, ctx)?;
    let proof = odd.add_dir(&even, ctx, Dir::Up);
    let (method, value) = match variant {
        ZVariant::Proof => (BoundMethod::ZSimple, proof),
        ZVariant::Stated => {
            let extra = seq.eval_term(m + 2 * omega, ctx)?;
            (BoundMethod::ZStated, proof.add_dir(&extra, ctx, Dir::Up))
        }
    };
    let pre = z_precondition(seq, m, omega, ctx, opts)?;
    Ok(RemainderBound::new(m, method, BoundValue::Magnitude(value), alloc::vec![pre]))
}

/// `max` of the odd- and even-offset tail sums; never exceeds the plain
/// Z-bound because both sums are nonnegative.
pub fn z_bound_improved(
    seq: &TermSequence,
    m: u64,
    omega: u64,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<RemainderBound, Error> {
    if omega == 0 {
        return Err(Error::BadPeriod { p: 0, message: String::from("omega must be at least 1") });
    }
    require_tail_index(seq, m, 1)?;
    let (odd, even) = tail_offset_sums(seq, m, omega, ctx)?;
    let value = odd.max(&even);
    let pre = z_precondition(seq, m, omega, ctx, opts)?;
    Ok(RemainderBound::new(
        m,
        BoundMethod::ZImproved,
        BoundValue::Magnitude(value),
        alloc::vec![pre],
    ))
}

/// Signed enclosure of `R[m]` itself: every omitted magnitude in the first
/// `2w-1` positions enters with its series sign and an independent factor
/// in `[0,1]`, so the endpoints are the signed one-sided sums. Requires an
/// alternating sign convention.
pub fn remainder_enclosure(
    seq: &TermSequence,
    m: u64,
    omega: u64,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<RemainderBound, Error> {
    if omega == 0 {
        return Err(Error::BadPeriod { p: 0, message: String::from("omega must be at least 1") });
    }
    if seq.sign().is_explicit() {
        return Err(Error::Unsupported {
            what: String::from("remainder enclosure requires an alternating sign convention"),
        });
    }
    require_tail_index(seq, m, 1)?;
    let (odd, even) = tail_offset_sums(seq, m, omega, ctx)?;
    let (hi, lo) = if seq.sign_at(m + 1, ctx)? > 0 {
        (odd, even.neg())
    } else {
        (even, odd.neg())
    };
    let pre = z_precondition(seq, m, omega, ctx, opts)?;
    Ok(RemainderBound::new(
        m,
        BoundMethod::Enclosure,
        BoundValue::Interval { lo, hi },
        alloc::vec![pre],
    ))
}

fn monotone_convex_preconditions(
    seq: &TermSequence,
    lo: u64,
    hi: u64,
    ctx: &PrecisionContext,
) -> Result<Vec<Precondition>, Error> {
    let mono = check_z_monotone(seq, 1, lo, hi, ctx)?;
    let convex = check_convexity_strided(seq, lo, 1, hi, ctx)?;
    Ok(alloc::vec![
        Precondition {
            description: format!("monotone decrease on [{}, {}]", lo, hi),
            report: mono,
        },
        Precondition {
            description: format!("midpoint convexity on [{}, {}]", lo, hi),
            report: convex,
        },
    ])
}

/// The sandwich `a[m+1]/2 <= |R[m]| <= a[m]/2` for monotone, midpoint-convex
/// magnitudes. Returns `(lower, upper)`.
pub fn half_bounds(
    seq: &TermSequence,
    m: u64,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<(RemainderBound, RemainderBound), Error> {
    if m < seq.start() {
        return Err(Error::IndexBeforeStart { index: m as i64, start: seq.start() });
    }
    let lower = seq.eval_term(m + 1, ctx)?.halve(ctx);
    let upper = seq.eval_term(m, ctx)?.halve(ctx);
    let hi = clamp_hi(seq, m + opts.check_window);
    let pres = monotone_convex_preconditions(seq, m, hi, ctx)?;
    Ok((
        RemainderBound::new(m, BoundMethod::HalfLower, BoundValue::Magnitude(lower), pres.clone()),
        RemainderBound::new(m, BoundMethod::HalfUpper, BoundValue::Magnitude(upper), pres),
    ))
}

/// Per-subseries sandwich combined over one period of a Z(p)-series
/// (`p` odd): with `d[i]` the magnitude of the i-th subseries remainder,
/// `d[i]` lies in `[a[m+i]/2, a[m+i]]`, and in `[a[m+i]/2, a[m+i-p]/2]`
/// under slow decay. Returns `(lower, upper)`; lower bounds are floored at
/// zero with the raw combination kept in `unfloored`.
///
/// The combination bounds the alternating sum of the `d[i]`, so it is
/// informative when the interleaved strands have comparable magnitudes
/// (the regime where `a[n] ~ a[n+k]` for fixed offsets). With a dominant
/// even-position strand the raw upper combination can go negative; it is
/// floored at zero and exposed via `unfloored` for diagnostics.
pub fn delta_bounds(
    seq: &TermSequence,
    m: u64,
    p: u64,
    slow_decay: bool,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<(RemainderBound, RemainderBound), Error> {
    if p == 0 || p % 2 == 0 {
        return Err(Error::BadPeriod { p, message: String::from("delta bounds need odd p") });
    }
    require_tail_index(seq, m, 1)?;
    if slow_decay && m + 1 < seq.start() + p {
        return Err(Error::IndexBeforeStart {
            index: m as i64 + 1 - p as i64,
            start: seq.start(),
        });
    }

    let (lower_raw, upper_raw) =
        delta_raw_with(&mut |n| seq.eval_term(n, ctx), m, p, slow_decay, ctx)?;

    // Preconditions: Z(p) on the tail plus per-subseries convexity along
    // each stride-p strand, plus the slow-decay comparison when used.
    let mut pres = Vec::new();
    pres.push(z_precondition(seq, m, (p + 1) / 2, ctx, opts)?);
    let strand_steps = (opts.check_window / p).max(4);
    for i in 1..=p {
        let first = if m + i >= seq.start() + p { m + i - p } else { m + i };
        let hi = clamp_hi(seq, first + strand_steps * p);
        let report = check_convexity_strided(seq, first, p, hi, ctx)?;
        pres.push(Precondition {
            description: format!("midpoint convexity of strand {} (stride {}) from {}", i, p, first),
            report,
        });
    }
    if slow_decay {
        let lo = m + 1 - p;
        let hi = clamp_hi(seq, m + 1 + opts.check_window.max(4 * p));
        let report = check_slow_decay(seq, p, lo, hi, ctx)?;
        pres.push(Precondition {
            description: format!("slow decay a[k] <= 2*a[k+{}] on [{}, {}]", p, lo, hi),
            report,
        });
    }

    let zero = Real::zero();
    let mut lower = RemainderBound::new(
        m,
        BoundMethod::DeltaLower,
        BoundValue::Magnitude(lower_raw.max(&zero)),
        pres.clone(),
    );
    lower.unfloored = Some(lower_raw);
    let mut upper = RemainderBound::new(
        m,
        BoundMethod::DeltaUpper,
        BoundValue::Magnitude(upper_raw.max(&zero)),
        pres,
    );
    if upper_raw.is_negative() {
        upper.unfloored = Some(upper_raw);
    }
    Ok((lower, upper))
}
