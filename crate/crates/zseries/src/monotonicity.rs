//! Finite-window verification of Z(p)-monotone decrease, midpoint
//! convexity, slow decay and periodic sign patterns.
//!
//! A sequence is Z(p)-monotone decreasing on a window when `a[k+p] <= a[k]`
//! for every applicable `k`. Verification over an infinite tail is not
//! decidable numerically, so every report records the window it covers and
//! is an empirical certificate for that window only. Comparisons use exact
//! `<=` on the computed extended-precision values; an epsilon would silently
//! weaken the defining inequality, so callers control precision instead.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::real::{PrecisionContext, Real};
use crate::series::TermSequence;

/// What a [`ZReport`] verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckKind {
    /// `a[k+p] <= a[k]` on the window.
    ZMonotone { p: u64 },
    /// `a[k+stride] <= (a[k] + a[k+2*stride]) / 2` on the window.
    Convexity { stride: u64 },
    /// `a[k] <= 2*a[k+p]` on the window.
    SlowDecay { p: u64 },
}

/// One failed comparison: the check required `lhs <= rhs` at index `k`;
/// `terms` holds the raw magnitudes involved.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub k: u64,
    pub lhs: Real,
    pub rhs: Real,
    pub terms: Vec<Real>,
}

/// Result of a window scan. `holds` is true exactly when `violations` is
/// empty; `comparison_margin` is the minimum of `rhs - lhs` over the window
/// (positive margins mean the inequality held with room to spare).
#[derive(Debug, Clone, PartialEq)]
pub struct ZReport {
    pub kind: CheckKind,
    pub window: (u64, u64),
    pub holds: bool,
    pub violations: Vec<Violation>,
    pub comparison_margin: Option<Real>,
}

impl ZReport {
    /// The period of the underlying comparison.
    pub fn p(&self) -> u64 {
        match self.kind {
            CheckKind::ZMonotone { p } | CheckKind::SlowDecay { p } => p,
            CheckKind::Convexity { stride } => stride,
        }
    }
}

/// Result of the periodic sign-pattern check `sign(a[k]) = -sign(a[k+omega])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPatternReport {
    pub omega: u64,
    pub window: (u64, u64),
    pub holds: bool,
    pub violations: Vec<u64>,
}

fn window_terms(
    seq: &TermSequence,
    n_lo: u64,
    n_hi: u64,
    ctx: &PrecisionContext,
) -> Result<Vec<Real>, Error> {
    (n_lo..=n_hi).map(|n| seq.eval_term(n, ctx)).collect()
}

fn scan<F>(
    kind: CheckKind,
    window: (u64, u64),
    terms: &[Real],
    n_lo: u64,
    last_k: u64,
    ctx: &PrecisionContext,
    compare: F,
) -> ZReport
where
    F: Fn(usize, &[Real]) -> (Real, Real, Vec<Real>),
{
    let mut violations = Vec::new();
    let mut margin: Option<Real> = None;
    for k in n_lo..=last_k {
        let i = (k - n_lo) as usize;
        let (lhs, rhs, involved) = compare(i, terms);
        let gap = rhs.sub(&lhs, ctx);
        margin = Some(match margin {
            Some(m) => m.min(&gap),
            None => gap.clone(),
        });
        if rhs.lt(&lhs) {
            violations.push(Violation { k, lhs, rhs, terms: involved });
        }
    }
    ZReport { kind, window, holds: violations.is_empty(), violations, comparison_margin: margin }
}

/// Verifies `a[k+p] <= a[k]` for every `k` in `[n_lo, n_hi - p]`.
pub fn check_z_monotone(
    seq: &TermSequence,
    p: u64,
    n_lo: u64,
    n_hi: u64,
    ctx: &PrecisionContext,
) -> Result<ZReport, Error> {
    if p == 0 {
        return Err(Error::BadPeriod { p, message: String::from("period must be positive") });
    }
    if n_lo < seq.start() {
        return Err(Error::OutOfDomain { index: n_lo, start: seq.start() });
    }
    if n_hi < n_lo + p {
        return Err(Error::WindowTooSmall { lo: n_lo, hi: n_hi, need: p });
    }
    let terms = window_terms(seq, n_lo, n_hi, ctx)?;
    Ok(scan(
        CheckKind::ZMonotone { p },
        (n_lo, n_hi),
        &terms,
        n_lo,
        n_hi - p,
        ctx,
        |i, t| {
            let a_k = t[i].clone();
            let a_kp = t[i + p as usize].clone();
            (a_kp.clone(), a_k.clone(), alloc::vec![a_k, a_kp])
        },
    ))
}

/// Smallest odd `p <= p_max` for which [`check_z_monotone`] holds on the
/// window, or `None`. Only odd periods are searched: the convergence theorem
/// needs a Z(2w-1) window, and an even period does not imply convergence.
pub fn infer_min_odd_period(
    seq: &TermSequence,
    n_lo: u64,
    n_hi: u64,
    p_max: u64,
    ctx: &PrecisionContext,
) -> Result<Option<u64>, Error> {
    if p_max == 0 || p_max % 2 == 0 {
        return Err(Error::BadPeriod { p: p_max, message: String::from("p_max must be odd") });
    }
    if n_hi < n_lo + p_max {
        return Err(Error::WindowTooSmall { lo: n_lo, hi: n_hi, need: p_max });
    }
    if n_lo < seq.start() {
        return Err(Error::OutOfDomain { index: n_lo, start: seq.start() });
    }
    let terms = window_terms(seq, n_lo, n_hi, ctx)?;
    'candidates: for p in (1..=p_max).step_by(2) {
        let last = (n_hi - p - n_lo) as usize;
        for i in 0..=last {
            if terms[i].lt(&terms[i + p as usize]) {
                continue 'candidates;
            }
        }
        return Ok(Some(p));
    }
    Ok(None)
}

/// Verifies the midpoint convexity condition
/// `a[k+1] <= (a[k] + a[k+2]) / 2` for `k` in `[n_lo, n_hi - 2]`.
pub fn check_convexity(
    seq: &TermSequence,
    n_lo: u64,
    n_hi: u64,
    ctx: &PrecisionContext,
) -> Result<ZReport, Error> {
    check_convexity_strided(seq, n_lo, 1, n_hi, ctx)
}

/// Midpoint convexity along the arithmetic progression
/// `n_lo, n_lo + stride, n_lo + 2*stride, ...` up to `n_hi`. Used to check
/// each interleaved subseries of a Z(p)-series separately.
pub fn check_convexity_strided(
    seq: &TermSequence,
    n_lo: u64,
    stride: u64,
    n_hi: u64,
    ctx: &PrecisionContext,
) -> Result<ZReport, Error> {
    if stride == 0 {
        return Err(Error::BadPeriod { p: stride, message: String::from("stride must be positive") });
    }
    if n_lo < seq.start() {
        return Err(Error::OutOfDomain { index: n_lo, start: seq.start() });
    }
    if n_hi < n_lo + 2 * stride {
        return Err(Error::WindowTooSmall { lo: n_lo, hi: n_hi, need: 2 * stride });
    }
    let steps = (n_hi - n_lo) / stride; // indices n_lo + j*stride, j in [0, steps]
    let terms: Vec<Real> =
        (0..=steps).map(|j| seq.eval_term(n_lo + j * stride, ctx)).collect::<Result<_, _>>()?;
    let mut violations = Vec::new();
    let mut margin: Option<Real> = None;
    for j in 0..=(steps - 2) {
        let k = n_lo + j * stride;
        let mid = terms[(j + 1) as usize].clone();
        let avg = terms[j as usize].add(&terms[(j + 2) as usize], ctx).halve(ctx);
        let gap = avg.sub(&mid, ctx);
        margin = Some(match margin {
            Some(m) => m.min(&gap),
            None => gap.clone(),
        });
        if avg.lt(&mid) {
            violations.push(Violation {
                k,
                lhs: mid,
                rhs: avg,
                terms: alloc::vec![
                    terms[j as usize].clone(),
                    terms[(j + 1) as usize].clone(),
                    terms[(j + 2) as usize].clone()
                ],
            });
        }
    }
    Ok(ZReport {
        kind: CheckKind::Convexity { stride },
        window: (n_lo, n_hi),
        holds: violations.is_empty(),
        violations,
        comparison_margin: margin,
    })
}

/// Verifies the slow-decay condition `a[k] <= 2*a[k+p]`, i.e. each
/// interleaved subsequence decreases no faster than a geometric with
/// ratio one half.
pub fn check_slow_decay(
    seq: &TermSequence,
    p: u64,
    n_lo: u64,
    n_hi: u64,
    ctx: &PrecisionContext,
) -> Result<ZReport, Error> {
    if p == 0 {
        return Err(Error::BadPeriod { p, message: String::from("period must be positive") });
    }
    if n_lo < seq.start() {
        return Err(Error::OutOfDomain { index: n_lo, start: seq.start() });
    }
    if n_hi < n_lo + p {
        return Err(Error::WindowTooSmall { lo: n_lo, hi: n_hi, need: p });
    }
    let terms = window_terms(seq, n_lo, n_hi, ctx)?;
    let two = Real::from_u64(2, ctx);
    Ok(scan(
        CheckKind::SlowDecay { p },
        (n_lo, n_hi),
        &terms,
        n_lo,
        n_hi - p,
        ctx,
        |i, t| {
            let a_k = t[i].clone();
            let doubled = two.mul(&t[i + p as usize], ctx);
            (a_k.clone(), doubled, alloc::vec![a_k, t[i + p as usize].clone()])
        },
    ))
}

/// Verifies the periodic sign pattern `sign(a[k]) = -sign(a[k+omega])` for
/// `k` in `[n_lo, n_hi - omega]`. Terms must be nonzero on the window.
pub fn check_sign_pattern(
    seq: &TermSequence,
    omega: u64,
    n_lo: u64,
    n_hi: u64,
    ctx: &PrecisionContext,
) -> Result<SignPatternReport, Error> {
    if omega == 0 {
        return Err(Error::BadPeriod { p: omega, message: String::from("period must be positive") });
    }
    if n_hi < n_lo + omega {
        return Err(Error::WindowTooSmall { lo: n_lo, hi: n_hi, need: omega });
    }
    let mut signs = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let t = seq.signed_term(n, ctx)?;
        if t.is_zero() {
            return Err(Error::ZeroTerm { index: n });
        }
        signs.push(t.is_positive());
    }
    let mut violations = Vec::new();
    for k in n_lo..=(n_hi - omega) {
        let i = (k - n_lo) as usize;
        if signs[i] == signs[i + omega as usize] {
            violations.push(k);
        }
    }
    Ok(SignPatternReport {
        omega,
        window: (n_lo, n_hi),
        holds: violations.is_empty(),
        violations,
    })
}
