//! Partial sums, adaptive certified summation, and the interleaved
//! subseries decomposition used as an independent cross-check.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bounds::{
    self, delta_bounds, half_bounds, leibniz_bound, z_bound, z_bound_improved, BoundOptions,
    RemainderBound, ZVariant,
};
use crate::error::Error;
use crate::real::{Dir, PrecisionContext, Real};
use crate::series::TermSequence;

/// `S[m] = sum_{n=start}^{m} sign(n) * a[n]`, accumulated in index order at
/// working precision.
pub fn partial_sum(seq: &TermSequence, m: u64, ctx: &PrecisionContext) -> Result<Real, Error> {
    if m < seq.start() {
        return Err(Error::OutOfDomain { index: m, start: seq.start() });
    }
    let mut acc = Real::zero();
    for n in seq.start()..=m {
        acc = acc.add(&seq.signed_term(n, ctx)?, ctx);
    }
    Ok(acc)
}

/// Bound selector for [`sum_to_tolerance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMethod {
    Leibniz,
    ZProof,
    ZStated,
    ZImproved,
    Half,
    Delta,
    DeltaSlow,
}

impl SumMethod {
    pub fn name(self) -> &'static str {
        match self {
            SumMethod::Leibniz => "leibniz",
            SumMethod::ZProof => "z",
            SumMethod::ZStated => "z-stated",
            SumMethod::ZImproved => "z-improved",
            SumMethod::Half => "half",
            SumMethod::Delta => "delta",
            SumMethod::DeltaSlow => "delta-slow",
        }
    }

    pub fn from_name(name: &str) -> Option<SumMethod> {
        Some(match name {
            "leibniz" => SumMethod::Leibniz,
            "z" => SumMethod::ZProof,
            "z-stated" => SumMethod::ZStated,
            "z-improved" => SumMethod::ZImproved,
            "half" => SumMethod::Half,
            "delta" => SumMethod::Delta,
            "delta-slow" => SumMethod::DeltaSlow,
            _ => return None,
        })
    }
}

/// Options for the adaptive scan.
#[derive(Debug, Clone, Copy)]
pub struct SumOptions {
    /// Hard cap on the stopping index. Conditionally convergent series can
    /// need millions of terms, hence the large default.
    pub max_index: u64,
    pub bound: BoundOptions,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { max_index: 10_000_000, bound: BoundOptions::default() }
    }
}

/// Outcome of [`sum_to_tolerance`].
#[derive(Debug, Clone, PartialEq)]
pub struct SummationResult {
    pub sum: Real,
    /// Stopping index: `sum` is the partial sum through `m`.
    pub m: u64,
    /// The bound that certified the stop (or the last bound computed when
    /// uncertified).
    pub bound: RemainderBound,
    pub tolerance: Real,
    /// True iff `bound` is valid and its magnitude is at most `tolerance`.
    pub certified: bool,
    /// Number of distinct magnitude evaluations performed.
    pub terms_evaluated: u64,
    /// Echo of the caller's limit-to-zero assertion. The library cannot
    /// verify limits; the hypothesis is recorded, not checked.
    pub assumed_limit_zero: bool,
}

/// Advances the partial sum one index at a time until the selected bound is
/// valid and at most `tol`, returning the smallest such stopping index.
///
/// The scan advances by single steps because the bounds fluctuate with the
/// same period as the magnitudes; a coarser scan could miss the earliest
/// certifiable index. When the index budget (or a finite table) is
/// exhausted the best-effort result is returned with `certified = false`
/// rather than an error.
pub fn sum_to_tolerance(
    seq: &TermSequence,
    omega: u64,
    tol: &Real,
    method: SumMethod,
    limit_zero_asserted: bool,
    ctx: &PrecisionContext,
    opts: &SumOptions,
) -> Result<SummationResult, Error> {
    if !limit_zero_asserted {
        return Err(Error::LimitZeroNotAsserted);
    }
    if omega == 0 {
        return Err(Error::BadPeriod { p: 0, message: String::from("omega must be at least 1") });
    }
    if !tol.is_positive() {
        return Err(Error::Unsupported { what: String::from("tolerance must be positive") });
    }
    let p = 2 * omega - 1;
    // How far back of m the estimator reaches (forward lookahead is handled
    // inside `estimate`).
    let back = match method {
        SumMethod::DeltaSlow => p,
        _ => 0,
    };
    let start = seq.start();
    let mut scan = Scanner { seq, ctx, buf: VecDeque::new(), evaluated: 0 };
    let mut sum = Real::zero();
    let mut last_bound: Option<RemainderBound> = None;
    let mut m_done: Option<u64> = None;
    let mut m = start;
    loop {
        // Magnitude at m enters the partial sum and, for some methods, the
        // bound; fetch it before trimming.
        let Some(mag_m) = scan.try_fetch(m)? else {
            break; // finite table exhausted before m
        };
        sum = sum.add(&scan.signed(m, &mag_m)?, ctx);
        m_done = Some(m);

        if let Some(est) = estimate(&mut scan, m, p, omega, method, ctx)? {
            if est.le(tol) {
                let bound = authoritative_bound(seq, m, omega, p, method, ctx, &opts.bound)?;
                debug_assert!(bound.magnitude() == est, "scan estimate must match bound");
                if bound.valid && bound.magnitude().le(tol) {
                    return Ok(SummationResult {
                        sum,
                        m,
                        bound,
                        tolerance: tol.clone(),
                        certified: true,
                        terms_evaluated: scan.evaluated,
                        assumed_limit_zero: limit_zero_asserted,
                    });
                }
                last_bound = Some(bound);
            }
        }
        scan.trim(m.saturating_sub(back));
        if m == opts.max_index {
            break;
        }
        m += 1;
    }

    // Uncertified best effort at the last summed index.
    let m = m_done.ok_or(Error::OutOfDomain { index: start, start })?;
    let bound = match last_bound {
        Some(b) => b,
        None => authoritative_bound(seq, m, omega, p, method, ctx, &opts.bound)?,
    };
    Ok(SummationResult {
        sum,
        m,
        bound,
        tolerance: tol.clone(),
        certified: false,
        terms_evaluated: scan.evaluated,
        assumed_limit_zero: limit_zero_asserted,
    })
}

struct Scanner<'a> {
    seq: &'a TermSequence,
    ctx: &'a PrecisionContext,
    /// Magnitudes for a contiguous index range, oldest first.
    buf: VecDeque<(u64, Real)>,
    evaluated: u64,
}

impl<'a> Scanner<'a> {
    /// Buffered magnitude at `n`, evaluating forward as needed. Returns
    /// `None` past the end of a finite table.
    fn try_fetch(&mut self, n: u64) -> Result<Option<Real>, Error> {
        if let Some(last) = self.seq.end() {
            if n > last {
                return Ok(None);
            }
        }
        let first = self.buf.front().map(|(i, _)| *i);
        if let Some(first) = first {
            if n < first {
                // Scanner only moves forward; a back-reference below the
                // trim point would be a logic error.
                return Err(Error::OutOfDomain { index: n, start: first });
            }
        }
        let mut next = self.buf.back().map(|(i, _)| i + 1).unwrap_or(n);
        while next <= n {
            let v = self.seq.eval_term(next, self.ctx)?;
            self.evaluated += 1;
            self.buf.push_back((next, v));
            next += 1;
        }
        let first = self.buf.front().map(|(i, _)| *i).expect("buffer nonempty");
        Ok(self.buf.get((n - first) as usize).map(|(_, v)| v.clone()))
    }

    fn fetch(&mut self, n: u64) -> Result<Real, Error> {
        self.try_fetch(n)?.ok_or(Error::OutOfDomain { index: n, start: self.seq.start() })
    }

    fn signed(&self, n: u64, magnitude: &Real) -> Result<Real, Error> {
        if self.seq.sign().is_explicit() && magnitude.is_zero() {
            return Err(Error::ZeroTerm { index: n });
        }
        Ok(match self.seq.sign_at(n, self.ctx)? {
            1 => magnitude.clone(),
            _ => magnitude.neg(),
        })
    }

    fn trim(&mut self, keep_from: u64) {
        while let Some((i, _)) = self.buf.front() {
            if *i < keep_from {
                self.buf.pop_front();
            } else {
                break;
            }
        }
    }
}

/// Cheap bound value at `m` from buffered magnitudes; mirrors the bound
/// constructors' arithmetic exactly. `None` when the method is not yet
/// applicable at `m` (delta-slow without enough history, or a table too
/// short for the lookahead).
fn estimate(
    scan: &mut Scanner<'_>,
    m: u64,
    p: u64,
    omega: u64,
    method: SumMethod,
    ctx: &PrecisionContext,
) -> Result<Option<Real>, Error> {
    let start = scan.seq.start();
    // Table-bounded sequences may not have the lookahead terms.
    let last_needed = match method {
        SumMethod::ZStated => m + p + 1,
        SumMethod::Leibniz | SumMethod::Half => m + 1,
        _ => m + p,
    };
    if scan.try_fetch(last_needed)?.is_none() {
        return Ok(None);
    }
    let value = match method {
        SumMethod::Leibniz => scan.fetch(m + 1)?,
        SumMethod::Half => scan.fetch(m)?.halve(ctx),
        SumMethod::ZProof | SumMethod::ZStated | SumMethod::ZImproved => {
            let mut fetch = |n: u64| scan.fetch(n);
            let (odd, even) = bounds::tail_offset_sums_with(&mut fetch, m, omega, ctx)?;
            match method {
                SumMethod::ZProof => odd.add_dir(&even, ctx, Dir::Up),
                SumMethod::ZImproved => odd.max(&even),
                SumMethod::ZStated => {
                    let proof = odd.add_dir(&even, ctx, Dir::Up);
                    let extra = scan.fetch(m + 2 * omega)?;
                    proof.add_dir(&extra, ctx, Dir::Up)
                }
                _ => unreachable!(),
            }
        }
        SumMethod::Delta | SumMethod::DeltaSlow => {
            let slow = method == SumMethod::DeltaSlow;
            if slow && m + 1 < start + p {
                return Ok(None);
            }
            let mut fetch = |n: u64| scan.fetch(n);
            let (_lower, upper) = bounds::delta_raw_with(&mut fetch, m, p, slow, ctx)?;
            upper.max(&Real::zero())
        }
    };
    Ok(Some(value))
}

fn authoritative_bound(
    seq: &TermSequence,
    m: u64,
    omega: u64,
    p: u64,
    method: SumMethod,
    ctx: &PrecisionContext,
    opts: &BoundOptions,
) -> Result<RemainderBound, Error> {
    Ok(match method {
        SumMethod::Leibniz => leibniz_bound(seq, m, ctx, opts)?,
        SumMethod::ZProof => z_bound(seq, m, omega, ZVariant::Proof, ctx, opts)?,
        SumMethod::ZStated => z_bound(seq, m, omega, ZVariant::Stated, ctx, opts)?,
        SumMethod::ZImproved => z_bound_improved(seq, m, omega, ctx, opts)?,
        SumMethod::Half => half_bounds(seq, m, ctx, opts)?.1,
        SumMethod::Delta => delta_bounds(seq, m, p, false, ctx, opts)?.1,
        SumMethod::DeltaSlow => delta_bounds(seq, m, p, true, ctx, opts)?.1,
    })
}

/// One interleaved subseries of a Z(2w-1) decomposition: the parent indices
/// `first, first + stride, first + 2*stride, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// 1-based position within the period.
    pub k: u64,
    /// First parent index of this component.
    pub first: u64,
    pub stride: u64,
}

impl Component {
    /// Parent index of the j-th term (0-based).
    pub fn parent_index(&self, j: u64) -> u64 {
        self.first + j * self.stride
    }

    /// Magnitude of the j-th term; equals the parent magnitude at
    /// `first + j*stride`.
    pub fn magnitude(
        &self,
        seq: &TermSequence,
        j: u64,
        ctx: &PrecisionContext,
    ) -> Result<Real, Error> {
        seq.eval_term(self.parent_index(j), ctx)
    }

    /// Partial sum of this component's signed terms over parent indices
    /// `<= q` (the aligned cut shared by all components).
    pub fn partial_sum_to_cut(
        &self,
        seq: &TermSequence,
        q: u64,
        ctx: &PrecisionContext,
    ) -> Result<Real, Error> {
        let mut acc = Real::zero();
        let mut n = self.first;
        while n <= q {
            acc = acc.add(&seq.signed_term(n, ctx)?, ctx);
            n += self.stride;
        }
        Ok(acc)
    }

    /// First parent index of this component strictly beyond `q`.
    pub fn next_index_after(&self, q: u64) -> u64 {
        if q < self.first {
            self.first
        } else {
            let done = (q - self.first) / self.stride + 1;
            self.first + done * self.stride
        }
    }
}

/// The 2w-1 interleaved subseries of a sequence. Each component, taken on
/// its own, is a classical alternating series with monotone magnitudes
/// whenever the parent is Z(2w-1)-monotone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubseriesDecomposition {
    pub omega: u64,
    pub components: Vec<Component>,
}

/// Splits the index range into `2*omega - 1` interleaved strands.
pub fn decompose(seq: &TermSequence, omega: u64) -> Result<SubseriesDecomposition, Error> {
    if omega == 0 {
        return Err(Error::BadPeriod { p: 0, message: String::from("omega must be at least 1") });
    }
    let stride = 2 * omega - 1;
    let components = (1..=stride)
        .map(|k| Component { k, first: seq.start() + (k - 1), stride })
        .collect();
    Ok(SubseriesDecomposition { omega, components })
}

/// Comparison of the direct partial sum with the recombined component sums,
/// plus the sum of per-component first-omitted-term bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub direct: Real,
    pub recombined: Real,
    pub component_sums: Vec<Real>,
    /// Sum of each component's first omitted magnitude after the cut;
    /// algebraically equal to the proof-variant Z-bound.
    pub max_component_bound: Real,
}

/// Verifies the regrouping identity `S[q] = sum_k sigma[q, k]` at cut `m`
/// and recombines the per-component remainder bounds.
pub fn cross_check(
    seq: &TermSequence,
    omega: u64,
    m: u64,
    ctx: &PrecisionContext,
) -> Result<CrossCheck, Error> {
    let decomposition = decompose(seq, omega)?;
    let direct = partial_sum(seq, m, ctx)?;
    let mut component_sums = Vec::with_capacity(decomposition.components.len());
    let mut recombined = Real::zero();
    let mut max_component_bound = Real::zero();
    for comp in &decomposition.components {
        let s = comp.partial_sum_to_cut(seq, m, ctx)?;
        recombined = recombined.add(&s, ctx);
        component_sums.push(s);
        let next = comp.next_index_after(m);
        let first_omitted = seq.eval_term(next, ctx)?;
        max_component_bound = max_component_bound.add_dir(&first_omitted, ctx, Dir::Up);
    }
    Ok(CrossCheck { direct, recombined, component_sums, max_component_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;
    use crate::series::tests::period6;
    use crate::series::SignConvention;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    fn harmonic() -> TermSequence {
        TermSequence::closed(1, parse_expression("1/n").unwrap(), SignConvention::AlternatingPlus)
    }

    #[test]
    fn partial_sum_single_term() {
        let c = ctx();
        let s = harmonic();
        assert_eq!(partial_sum(&s, 1, &c).unwrap().to_f64(), 1.0);
        assert!(matches!(partial_sum(&s, 0, &c), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn period6_partial_sums_closed_forms() {
        let c = ctx();
        let s = period6();
        let tol = Real::two_pow(-240, &c);
        for k in 1..=20u64 {
            // S[6k] = 2*(1 - 2^-k)
            let got = partial_sum(&s, 6 * k, &c).unwrap();
            let want = Real::from_u64(2, &c)
                .mul(&Real::from_u64(1, &c).sub(&Real::two_pow(-(k as i64), &c), &c), &c);
            assert!(got.sub(&want, &c).abs().le(&tol), "S[6*{}]", k);
            // S[6k+5] = 2*(1 - 2^-(k+1)) + 1/(k+1)
            let got = partial_sum(&s, 6 * k + 5, &c).unwrap();
            let want = Real::from_u64(2, &c)
                .mul(&Real::from_u64(1, &c).sub(&Real::two_pow(-(k as i64 + 1), &c), &c), &c)
                .add(&Real::from_u64(k + 1, &c).recip(&c), &c);
            assert!(got.sub(&want, &c).abs().le(&tol), "S[6*{}+5]", k);
        }
        // S[5] = 2 exactly (k = 0 case of the second identity)
        let s5 = partial_sum(&s, 5, &c).unwrap();
        assert!(s5.sub(&Real::from_u64(2, &c), &c).abs().le(&tol));
    }

    #[test]
    fn certified_sum_harmonic_alternating() {
        let c = ctx();
        let s = harmonic();
        let tol = Real::from_f64(1e-4, &c);
        let r = sum_to_tolerance(&s, 1, &tol, SumMethod::Half, true, &c, &SumOptions::default())
            .unwrap();
        assert!(r.certified);
        assert!(r.bound.valid);
        assert!(r.bound.magnitude().le(&tol));
        let err = r.sum.sub(&c.ln_2(), &c).abs();
        assert!(err.le(&tol));
        // half bound certifies at a[m]/2 <= tol, i.e. m = 5000
        assert_eq!(r.m, 5000);
    }

    #[test]
    fn monotone_certification_in_tolerance() {
        let c = ctx();
        let s = harmonic();
        let loose = Real::from_f64(1e-2, &c);
        let tight = Real::from_f64(1e-3, &c);
        let a = sum_to_tolerance(&s, 1, &loose, SumMethod::Leibniz, true, &c, &SumOptions::default())
            .unwrap();
        let b = sum_to_tolerance(&s, 1, &tight, SumMethod::Leibniz, true, &c, &SumOptions::default())
            .unwrap();
        assert!(a.certified && b.certified);
        assert!(a.m <= b.m);
    }

    #[test]
    fn missing_limit_assertion_is_an_error() {
        let c = ctx();
        let tol = Real::from_f64(1e-3, &c);
        assert!(matches!(
            sum_to_tolerance(&harmonic(), 1, &tol, SumMethod::Leibniz, false, &c, &SumOptions::default()),
            Err(Error::LimitZeroNotAsserted)
        ));
    }

    #[test]
    fn zero_table_certifies_immediately() {
        let c = ctx();
        let s = TermSequence::table(
            1,
            alloc::vec![Real::zero(), Real::zero(), Real::zero()],
            SignConvention::AlternatingPlus,
        );
        let tol = Real::from_f64(1e-30, &c);
        let r = sum_to_tolerance(&s, 1, &tol, SumMethod::Leibniz, true, &c, &SumOptions::default())
            .unwrap();
        assert!(r.certified);
        assert_eq!(r.m, 1);
        assert!(r.sum.is_zero());
        assert!(r.bound.magnitude().is_zero());
    }

    #[test]
    fn max_index_exhaustion_returns_uncertified() {
        let c = ctx();
        let s = harmonic();
        let tol = Real::from_f64(1e-9, &c);
        let opts = SumOptions { max_index: 100, ..Default::default() };
        let r = sum_to_tolerance(&s, 1, &tol, SumMethod::Leibniz, true, &c, &opts).unwrap();
        assert!(!r.certified);
        assert_eq!(r.m, 100);
        assert!(r.bound.magnitude().to_f64() > 1e-9);
    }

    #[test]
    fn scan_results_are_deterministic() {
        let c1 = ctx();
        let c2 = ctx();
        let s = period6();
        let tol = Real::from_f64(1e-3, &c1);
        let opts = SumOptions::default();
        let a = sum_to_tolerance(&s, 2, &tol, SumMethod::ZImproved, true, &c1, &opts).unwrap();
        let b = sum_to_tolerance(&s, 2, &tol, SumMethod::ZImproved, true, &c2, &opts).unwrap();
        assert_eq!(a.sum, b.sum);
        assert_eq!(a.m, b.m);
        assert_eq!(a.bound.magnitude(), b.bound.magnitude());
    }

    #[test]
    fn scan_sum_matches_partial_sum() {
        let c = ctx();
        let s = period6();
        let tol = Real::from_f64(1e-2, &c);
        let r = sum_to_tolerance(&s, 2, &tol, SumMethod::ZImproved, true, &c, &SumOptions::default())
            .unwrap();
        assert_eq!(r.sum, partial_sum(&s, r.m, &c).unwrap());
    }

    #[test]
    fn decompose_identity_omega1() {
        let c = ctx();
        let s = harmonic();
        let d = decompose(&s, 1).unwrap();
        assert_eq!(d.components.len(), 1);
        let r = cross_check(&s, 1, 100, &c).unwrap();
        // single component: identical accumulation order, exact equality
        assert_eq!(r.direct, r.recombined);
    }

    #[test]
    fn decompose_period6_omega2_components() {
        let c = ctx();
        let s = period6();
        let d = decompose(&s, 2).unwrap();
        assert_eq!(d.components.len(), 3);
        assert_eq!(d.components[0].parent_index(0), 1);
        assert_eq!(d.components[0].parent_index(1), 4);
        assert_eq!(d.components[0].parent_index(2), 7);
        let a4 = s.eval_term(4, &c).unwrap();
        assert_eq!(d.components[0].magnitude(&s, 1, &c).unwrap(), a4);
    }

    #[test]
    fn recombination_matches_direct_sum() {
        let c = ctx();
        let s = period6();
        let tol = Real::two_pow(-(256 - 10), &c);
        for m in [6u64, 13, 60, 200] {
            let r = cross_check(&s, 2, m, &c).unwrap();
            let diff = r.direct.sub(&r.recombined, &c).abs();
            assert!(diff.le(&tol), "cut {}: diff {:?}", m, diff);
        }
    }

    #[test]
    fn component_bound_sum_equals_proof_z_bound() {
        let c = ctx();
        let s = period6();
        let r = cross_check(&s, 2, 60, &c).unwrap();
        let z = z_bound(&s, 60, 2, ZVariant::Proof, &c, &BoundOptions::default()).unwrap();
        // both are a[61] + a[62] + a[63], summed in different groupings
        let diff = r.max_component_bound.sub(&z.magnitude(), &c).abs();
        assert!(diff.le(&Real::two_pow(-(256 - 10), &c)));
    }
}
