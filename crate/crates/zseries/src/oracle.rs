//! High-precision reference sums and remainders for validating bounds.
//!
//! The oracle works at (at least) twice the consumer's working precision so
//! its own error can never mask a bound violation. Reference sums come from
//! a registered closed form when one exists, otherwise from a far partial
//! sum whose own certified residual is below the requested oracle
//! tolerance. The far-summation path deliberately reuses the library's
//! improved Z-bound at the far index; the closed-form corpus entries
//! validate that bound independently first.

use crate::bounds::{z_bound_improved, BoundOptions, RemainderBound};
use crate::error::Error;
use crate::real::{PrecisionContext, Real};
use crate::series::TermSequence;
use crate::summation::partial_sum;

/// Closed forms registered for corpus series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    Integer(i64),
    NaturalLog2,
}

impl ClosedForm {
    pub fn eval(&self, ctx: &PrecisionContext) -> Real {
        match self {
            ClosedForm::Integer(v) => Real::from_i64(*v, ctx),
            ClosedForm::NaturalLog2 => ctx.ln_2(),
        }
    }
}

/// Where a reference sum came from.
#[derive(Debug, Clone, PartialEq)]
pub enum SumSource {
    ClosedForm,
    FarSummation { far_index: u64, residual: RemainderBound },
}

/// A reference value for the series sum, with an explicit bound on its own
/// error.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSum {
    pub value: Real,
    pub source: SumSource,
    /// Bound on `|true sum - value|`: certified residual (if any) plus a
    /// crude, generously dominated allowance for summation rounding.
    pub error_bound: Real,
}

/// Controls for the far-summation search.
#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Residual the far partial sum must certify.
    pub tolerance: f64,
    /// Index budget for the search.
    pub max_index: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { tolerance: 1e-8, max_index: 10_000_000 }
    }
}

fn rounding_allowance(value: &Real, terms: u64, octx: &PrecisionContext) -> Real {
    let one = Real::from_u64(1, octx);
    let scale = value.abs().max(&one);
    let ops = Real::from_u64(terms + 1, octx);
    scale.mul(&ops, octx).mul(&Real::two_pow(-((octx.bits() - 8) as i64), octx), octx)
}

/// Reference sum at oracle precision (twice the consumer's working
/// precision).
pub fn reference_sum(
    seq: &TermSequence,
    closed: Option<&ClosedForm>,
    omega: u64,
    ctx: &PrecisionContext,
    opts: &OracleOptions,
) -> Result<ReferenceSum, Error> {
    let octx = ctx.oracle();
    if let Some(form) = closed {
        let value = form.eval(&octx);
        let error_bound = rounding_allowance(&value, 1, &octx);
        return Ok(ReferenceSum { value, source: SumSource::ClosedForm, error_bound });
    }

    let tol = Real::from_f64(opts.tolerance, &octx);
    if !tol.is_positive() {
        return Err(Error::Unsupported {
            what: alloc::string::String::from("oracle tolerance must be positive"),
        });
    }
    let bound_opts = BoundOptions { check_window: 64 };
    let mut far = (seq.start() + 4 * omega).max(seq.start() + 64);
    loop {
        let residual = z_bound_improved(seq, far, omega, &octx, &bound_opts)?;
        if residual.valid && residual.magnitude().le(&tol) {
            let value = partial_sum(seq, far, &octx)?;
            let error_bound = residual
                .magnitude()
                .add(&rounding_allowance(&value, far - seq.start() + 1, &octx), &octx);
            return Ok(ReferenceSum {
                value,
                source: SumSource::FarSummation { far_index: far, residual },
                error_bound,
            });
        }
        if far >= opts.max_index {
            return Err(Error::OracleUnreachable { max_index: opts.max_index });
        }
        far = (far * 2).min(opts.max_index);
    }
}

/// A signed reference remainder `S - S[m]` with its own error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderEstimate {
    pub value: Real,
    pub error_bound: Real,
}

/// Signed reference remainder at oracle precision.
pub fn reference_remainder(
    seq: &TermSequence,
    closed: Option<&ClosedForm>,
    omega: u64,
    m: u64,
    ctx: &PrecisionContext,
    opts: &OracleOptions,
) -> Result<RemainderEstimate, Error> {
    let reference = reference_sum(seq, closed, omega, ctx, opts)?;
    let octx = ctx.oracle();
    let s_m = partial_sum(seq, m, &octx)?;
    let value = reference.value.sub(&s_m, &octx);
    let error_bound = reference
        .error_bound
        .add(&rounding_allowance(&s_m, m - seq.start() + 1, &octx), &octx);
    Ok(RemainderEstimate { value, error_bound })
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

    #[test]
    fn closed_forms_evaluate() {
        let c = ctx();
        assert_eq!(ClosedForm::Integer(2).eval(&c), Real::from_u64(2, &c));
        assert!((ClosedForm::NaturalLog2.eval(&c).to_f64() - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn far_summation_agrees_with_closed_form() {
        let c = ctx();
        let s = period6();
        let opts = OracleOptions { tolerance: 1e-3, max_index: 1 << 20 };
        let closed = reference_sum(&s, Some(&ClosedForm::Integer(2)), 2, &c, &opts).unwrap();
        let far = reference_sum(&s, None, 2, &c, &opts).unwrap();
        assert!(matches!(far.source, SumSource::FarSummation { .. }));
        let diff = closed.value.sub(&far.value, &c).abs();
        let budget = far.error_bound.add(&closed.error_bound, &c);
        assert!(diff.le(&budget), "diff {:?} budget {:?}", diff, budget);
    }

    #[test]
    fn oracle_unreachable_within_budget() {
        let c = ctx();
        let s = TermSequence::closed(
            1,
            parse_expression("1/n").unwrap(),
            SignConvention::AlternatingPlus,
        );
        let opts = OracleOptions { tolerance: 1e-9, max_index: 1000 };
        assert!(matches!(
            reference_sum(&s, None, 1, &c, &opts),
            Err(Error::OracleUnreachable { max_index: 1000 })
        ));
    }

    #[test]
    fn period6_reference_remainders() {
        let c = ctx();
        let s = period6();
        let opts = OracleOptions::default();
        let closed = ClosedForm::Integer(2);
        // R[6k] = 2^(1-k)
        for k in [1u64, 3, 10, 25] {
            let r = reference_remainder(&s, Some(&closed), 2, 6 * k, &c, &opts).unwrap();
            let want = Real::two_pow(1 - k as i64, &c.oracle());
            let diff = r.value.sub(&want, &c.oracle()).abs();
            assert!(diff.le(&Real::two_pow(-400, &c)), "k = {}", k);
        }
    }

    #[test]
    fn ln2_remainder_integral_sandwich_sample() {
        let c = ctx();
        let octx = c.oracle();
        let s = TermSequence::closed(
            1,
            parse_expression("1/n").unwrap(),
            SignConvention::AlternatingPlus,
        );
        let opts = OracleOptions::default();
        let one = Real::from_u64(1, &octx);
        for m in [2u64, 10, 137, 1000] {
            let r = reference_remainder(&s, Some(&ClosedForm::NaturalLog2), 1, m, &c, &opts)
                .unwrap()
                .value
                .abs();
            let lo = one.div(&Real::from_u64(m + 1, &octx), &octx).add(&one, &octx).ln(&octx).halve(&octx);
            let hi = one.div(&Real::from_u64(m - 1, &octx), &octx).add(&one, &octx).ln(&octx).halve(&octx);
            assert!(lo.lt(&r) && r.lt(&hi), "m = {}", m);
        }
    }
}
