//! Built-in registry of worked example series plus a seeded generator of
//! Z(p)-monotone sequences for property tests.
//!
//! The five registered series exercise every part of the library:
//!
//! * `div_z2` - period-2 magnitudes that are Z(2)-monotone and tend to
//!   zero while the alternating series diverges: an even window proves
//!   nothing.
//! * `z3_sum2` - period-6 piecewise magnitudes, Z(3)-monotone but not
//!   monotone, alternating sum exactly 2, with closed remainder forms at
//!   the period boundaries.
//! * `ln2` - the alternating harmonic series.
//! * `rd2` - interleaved `1/k` and `1/k - 2^-k` magnitudes with sum 1 and
//!   closed remainders `2^-k` / `2^-k - 1/k`; the accuracy of the
//!   first-omitted-term bound fluctuates between perfect and useless.
//! * `cos_shift` - magnitudes `1/(n + 2 cos n)`, Z(5)-monotone via the
//!   envelope certificate with shift 4 (and Z(7) via the cruder shift
//!   2*pi).

use alloc::string::String;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};

use crate::envelope::{Direction, EnvelopePair};
use crate::error::Error;
use crate::expr::Expression;
use crate::oracle::ClosedForm;
use crate::parse::parse_expression;
use crate::real::{PrecisionContext, Real};
use crate::series::{Magnitude, PieceRule, SignConvention, TermSequence};

/// A check the registry claims holds (or fails) on a window; the test suite
/// validates every one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedCheck {
    pub kind: ExpectedKind,
    pub p: u64,
    pub window: (u64, u64),
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedKind {
    ZMonotone,
    Convexity,
    SlowDecay,
}

/// Remainder closed form: signed `S - S[m]` where known, `None` elsewhere.
pub type RemainderFormula = fn(u64, &PrecisionContext) -> Option<Real>;

/// One registry entry.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: &'static str,
    pub seq: TermSequence,
    /// Window parameter for the convergence test (`None` for the divergent
    /// witness).
    pub omega: Option<u64>,
    /// Period for Z-monotonicity checks (`2*omega - 1` when omega is set).
    pub z_period: u64,
    /// Coarser alternative window parameter, when one is documented.
    pub alt_omega: Option<u64>,
    pub closed_sum: Option<ClosedForm>,
    pub remainder_formula: Option<RemainderFormula>,
    pub envelopes: Option<EnvelopePair>,
    pub expected: Vec<ExpectedCheck>,
    pub notes: &'static str,
}

fn expr(text: &str) -> Expression {
    parse_expression(text).expect("registry expression parses")
}

fn pieces(start: u64, sign: SignConvention, rules: Vec<PieceRule>) -> TermSequence {
    TermSequence::new(start, Magnitude::Piecewise(rules), sign, PrecisionContext::DEFAULT_BITS)
        .expect("registry sequence is valid")
}

fn rule(modulus: u64, residue: u64, index: &str, magnitude: &str) -> PieceRule {
    PieceRule::new(modulus, residue, expr(index), expr(magnitude)).expect("registry rule is valid")
}

/// Stable ids of the registered series.
pub fn list() -> [&'static str; 5] {
    ["div_z2", "z3_sum2", "ln2", "rd2", "cos_shift"]
}

/// Builds the entry with the given id.
pub fn get(id: &str) -> Result<CorpusEntry, Error> {
    Ok(match id {
        "div_z2" => CorpusEntry {
            id: "div_z2",
            seq: pieces(
                1,
                SignConvention::AlternatingMinus,
                alloc::vec![
                    rule(2, 1, "(n+1)/2", "1/k^2"),
                    rule(2, 0, "n/2", "1/k"),
                ],
            ),
            omega: None,
            z_period: 2,
            alt_omega: None,
            closed_sum: None,
            remainder_formula: None,
            envelopes: None,
            expected: alloc::vec![
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 2, window: (1, 2000), holds: true },
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 1, window: (1, 100), holds: false },
            ],
            notes: "Z(2)-monotone magnitudes tending to zero whose alternating series \
                    diverges; partial sums grow like half the harmonic series",
        },
        "z3_sum2" => CorpusEntry {
            id: "z3_sum2",
            seq: pieces(
                1,
                SignConvention::AlternatingPlus,
                alloc::vec![
                    rule(6, 1, "(n+5)/6", "1/k + 1/2^k"),
                    rule(6, 2, "(n+4)/6", "1/10^k"),
                    rule(6, 3, "(n+3)/6", "1/k + 1/2^k"),
                    rule(6, 4, "(n+2)/6", "1/k"),
                    rule(6, 5, "(n+1)/6", "1/10^k"),
                    rule(6, 0, "n/6", "1/k"),
                ],
            ),
            omega: Some(2),
            z_period: 3,
            alt_omega: None,
            closed_sum: Some(ClosedForm::Integer(2)),
            remainder_formula: Some(z3_sum2_remainder),
            envelopes: None,
            expected: alloc::vec![
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 3, window: (1, 600), holds: true },
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 1, window: (1, 600), holds: false },
            ],
            notes: "period-6 piecewise magnitudes, Z(3)-monotone but not monotone; \
                    alternating sum 2 with closed partial sums at period boundaries",
        },
        "ln2" => CorpusEntry {
            id: "ln2",
            seq: TermSequence::closed(1, expr("1/n"), SignConvention::AlternatingPlus),
            omega: Some(1),
            z_period: 1,
            alt_omega: None,
            closed_sum: Some(ClosedForm::NaturalLog2),
            remainder_formula: None,
            envelopes: None,
            expected: alloc::vec![
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 1, window: (1, 1000), holds: true },
                ExpectedCheck { kind: ExpectedKind::Convexity, p: 1, window: (1, 1000), holds: true },
                ExpectedCheck { kind: ExpectedKind::SlowDecay, p: 1, window: (1, 1000), holds: true },
            ],
            notes: "alternating harmonic series; remainder behaves like 1/(2m)",
        },
        "rd2" => CorpusEntry {
            id: "rd2",
            seq: pieces(
                1,
                SignConvention::AlternatingPlus,
                alloc::vec![
                    rule(2, 1, "(n+1)/2", "1/k"),
                    rule(2, 0, "n/2", "1/k - 1/2^k"),
                ],
            ),
            omega: Some(1),
            z_period: 1,
            alt_omega: None,
            closed_sum: Some(ClosedForm::Integer(1)),
            remainder_formula: Some(rd2_remainder),
            envelopes: None,
            expected: alloc::vec![
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 1, window: (9, 500), holds: true },
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 1, window: (1, 100), holds: false },
                // The interleaved 2^-k defect breaks midpoint convexity at
                // every even center from 16 on, so no tail window is convex.
                ExpectedCheck { kind: ExpectedKind::Convexity, p: 1, window: (8, 500), holds: false },
            ],
            notes: "magnitudes 1/k interleaved with 1/k - 2^-k, sum 1; remainders \
                    collapse to 2^-k at even cuts, so the first-omitted-term bound \
                    is off by a factor k there and tight at odd cuts",
        },
        "cos_shift" => CorpusEntry {
            id: "cos_shift",
            seq: TermSequence::closed(1, expr("1/(n + 2*cos(n))"), SignConvention::AlternatingPlus),
            omega: Some(3),
            z_period: 5,
            alt_omega: Some(4),
            closed_sum: None,
            remainder_formula: None,
            envelopes: Some(EnvelopePair {
                lower: expr("x - 2"),
                upper: expr("x + 2"),
                domain_start: 1.0,
                direction: Direction::Increasing,
            }),
            expected: alloc::vec![
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 5, window: (1, 5000), holds: true },
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 3, window: (1, 600), holds: false },
                ExpectedCheck { kind: ExpectedKind::ZMonotone, p: 1, window: (1, 100), holds: false },
                ExpectedCheck { kind: ExpectedKind::SlowDecay, p: 5, window: (11, 3000), holds: true },
            ],
            notes: "reciprocal of a shifted-cosine perturbation of n; the envelope \
                    pair (x-2, x+2) certifies shift 4 hence window 5, while the \
                    crude shift 2*pi gives window 7",
        },
        other => return Err(Error::UnknownSeries { id: String::from(other) }),
    })
}

/// Signed remainders of `z3_sum2` at the period boundaries:
/// `R[6k] = 2^(1-k)` and `R[6k+3] = 2^-k + 10^-(k+1) - 2/(k+1)`.
fn z3_sum2_remainder(m: u64, ctx: &PrecisionContext) -> Option<Real> {
    if m >= 6 && m % 6 == 0 {
        let k = (m / 6) as i64;
        return Some(Real::two_pow(1 - k, ctx));
    }
    if m >= 3 && m % 6 == 3 {
        let k = (m - 3) / 6;
        let pow2 = Real::two_pow(-(k as i64), ctx);
        let pow10 = Real::from_u64(10, ctx).powi(k + 1, ctx).recip(ctx);
        let frac = Real::from_u64(2, ctx).div(&Real::from_u64(k + 1, ctx), ctx);
        return Some(pow2.add(&pow10, ctx).sub(&frac, ctx));
    }
    None
}

/// Signed remainders of `rd2`: `R[2k] = 2^-k`, `R[2k-1] = 2^(1-k) - 1/k`
/// (at odd cuts the pending `a[2k]` recombines into the next telescoping
/// pair, doubling the binary part).
fn rd2_remainder(m: u64, ctx: &PrecisionContext) -> Option<Real> {
    if m == 0 {
        return None;
    }
    if m % 2 == 0 {
        let k = (m / 2) as i64;
        Some(Real::two_pow(-k, ctx))
    } else {
        let k = (m + 1) / 2;
        Some(Real::two_pow(1 - k as i64, ctx).sub(&Real::from_u64(k, ctx).recip(ctx), ctx))
    }
}

/// Decay families for the generated sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayProfile {
    /// Every strand decays like `c/(j + j0)`.
    HarmonicLike,
    /// Every strand decays geometrically with ratio in (0.5, 0.97).
    Geometric,
    /// Strand families drawn at random (harmonic, geometric, power 3/2).
    Mixed,
}

/// Builds a table-backed sequence of `len` magnitudes by interleaving `p`
/// independently generated strands, each strictly decreasing to zero. The
/// result is Z(p)-monotone by construction: `a[n+p]` and `a[n]` always sit
/// on the same strand, one step apart.
pub fn make_random_z_series(
    p: u64,
    seed: u64,
    profile: DecayProfile,
    len: usize,
) -> Result<TermSequence, Error> {
    if p == 0 || p % 2 == 0 {
        return Err(Error::BadPeriod { p, message: String::from("generator needs odd p") });
    }
    // Generation precision: values are exact 128-bit dyadics, so evaluation
    // at any working precision >= 128 reproduces them exactly.
    let gctx = PrecisionContext::new(128).expect("generation precision is valid");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (p << 32));

    enum Family {
        Harmonic { j0: u64 },
        Geometric { q: Real, current: Real },
        Power32 { j0: u64 },
    }

    let mut strands: Vec<(Real, Family)> = (0..p)
        .map(|_| {
            let scale_num = 64 + (rng.next_u64() % 961); // in [64, 1024]
            let scale = Real::from_u64(scale_num, &gctx)
                .div(&Real::from_u64(256, &gctx), &gctx); // in [0.25, 4]
            let pick = match profile {
                DecayProfile::HarmonicLike => 0,
                DecayProfile::Geometric => 1,
                DecayProfile::Mixed => rng.next_u64() % 3,
            };
            let family = match pick {
                0 => Family::Harmonic { j0: 1 + rng.next_u64() % 8 },
                1 => {
                    let q_num = 129 + rng.next_u64() % 120; // (0.5, 0.97)
                    let q = Real::from_u64(q_num, &gctx).div(&Real::from_u64(256, &gctx), &gctx);
                    Family::Geometric { q, current: scale.clone() }
                }
                _ => Family::Power32 { j0: 1 + rng.next_u64() % 8 },
            };
            (scale, family)
        })
        .collect();

    let mut table = Vec::with_capacity(len);
    for offset in 0..len {
        let strand = offset % p as usize;
        let step = (offset / p as usize) as u64;
        let (scale, family) = &mut strands[strand];
        let value = match family {
            Family::Harmonic { j0 } => {
                scale.div(&Real::from_u64(step + *j0, &gctx), &gctx)
            }
            Family::Geometric { q, current } => {
                let v = current.clone();
                *current = current.mul(q, &gctx);
                v
            }
            Family::Power32 { j0 } => {
                let j = Real::from_u64(step + *j0, &gctx);
                scale.div(&j.mul(&j.sqrt(&gctx), &gctx), &gctx)
            }
        };
        table.push(value);
    }
    Ok(TermSequence::table(1, table, SignConvention::AlternatingPlus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotonicity::{check_convexity, check_slow_decay, check_z_monotone};
    use crate::oracle::{reference_remainder, OracleOptions};
    use crate::summation::partial_sum;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    #[test]
    fn registry_lists_and_rejects() {
        for id in list() {
            assert_eq!(get(id).unwrap().id, id);
        }
        assert!(matches!(get("nope"), Err(Error::UnknownSeries { .. })));
    }

    #[test]
    fn registry_metadata() {
        assert_eq!(get("z3_sum2").unwrap().closed_sum, Some(ClosedForm::Integer(2)));
        assert_eq!(get("ln2").unwrap().omega, Some(1));
        assert!(get("div_z2").unwrap().closed_sum.is_none());
        assert!(get("div_z2").unwrap().omega.is_none());
        assert_eq!(get("cos_shift").unwrap().z_period, 5);
        assert_eq!(get("cos_shift").unwrap().alt_omega, Some(4));
    }

    #[test]
    fn expected_checks_validate() {
        let c = ctx();
        for id in list() {
            let entry = get(id).unwrap();
            for exp in &entry.expected {
                let report = match exp.kind {
                    ExpectedKind::ZMonotone => {
                        check_z_monotone(&entry.seq, exp.p, exp.window.0, exp.window.1, &c).unwrap()
                    }
                    ExpectedKind::Convexity => {
                        check_convexity(&entry.seq, exp.window.0, exp.window.1, &c).unwrap()
                    }
                    ExpectedKind::SlowDecay => {
                        check_slow_decay(&entry.seq, exp.p, exp.window.0, exp.window.1, &c).unwrap()
                    }
                };
                assert_eq!(
                    report.holds, exp.holds,
                    "{}: {:?} p={} on {:?}",
                    id, exp.kind, exp.p, exp.window
                );
            }
        }
    }

    #[test]
    fn rd2_piecewise_matches_closed_print() {
        // a[n] = 1/floor((n+1)/2) - (1 + (-1)^n) / 2^(n/2 + 1) for n in [1, 40]
        let c = ctx();
        let entry = get("rd2").unwrap();
        let closed = parse_expression("1/floor((n + 1)/2) - (1 + (-1)^n)/2^(n/2 + 1)").unwrap();
        for n in 1..=40u64 {
            let direct = entry.seq.eval_term(n, &c).unwrap();
            let printed = closed.eval(&Real::from_u64(n, &c), &c).unwrap();
            let diff = direct.sub(&printed, &c).abs();
            assert!(diff.le(&Real::two_pow(-240, &c)), "n = {}", n);
        }
    }

    #[test]
    fn rd2_remainder_formula_matches_oracle() {
        let c = ctx();
        let entry = get("rd2").unwrap();
        let formula = entry.remainder_formula.unwrap();
        let opts = OracleOptions::default();
        for m in [7u64, 8, 20, 21, 40] {
            let want = formula(m, &c.oracle()).unwrap();
            let got = reference_remainder(&entry.seq, entry.closed_sum.as_ref(), 1, m, &c, &opts)
                .unwrap();
            let diff = got.value.sub(&want, &c.oracle()).abs();
            assert!(diff.le(&Real::two_pow(-400, &c)), "m = {}", m);
        }
    }

    #[test]
    fn z3_remainder_formula_matches_oracle() {
        let c = ctx();
        let entry = get("z3_sum2").unwrap();
        let formula = entry.remainder_formula.unwrap();
        let opts = OracleOptions::default();
        for m in [3u64, 6, 9, 12, 33, 60] {
            let want = formula(m, &c.oracle()).unwrap();
            let got = reference_remainder(&entry.seq, entry.closed_sum.as_ref(), 2, m, &c, &opts)
                .unwrap();
            let diff = got.value.sub(&want, &c.oracle()).abs();
            assert!(diff.le(&Real::two_pow(-400, &c)), "m = {}", m);
        }
    }

    #[test]
    fn div_z2_partial_sums_grow() {
        let c = ctx();
        let entry = get("div_z2").unwrap();
        let s100 = partial_sum(&entry.seq, 100, &c).unwrap().to_f64();
        let s10000 = partial_sum(&entry.seq, 10000, &c).unwrap().to_f64();
        assert!(s100 > 2.0);
        assert!(s10000 > s100 + 2.0);
    }

    #[test]
    fn generator_is_z_p_monotone_by_construction() {
        let c = ctx();
        for (p, seed) in [(1u64, 7u64), (3, 42), (5, 1), (7, 99)] {
            let s = make_random_z_series(p, seed, DecayProfile::Mixed, 3200).unwrap();
            let r = check_z_monotone(&s, p, 1, 3000, &c).unwrap();
            assert!(r.holds, "p = {}, seed = {}", p, seed);
        }
        assert!(make_random_z_series(2, 1, DecayProfile::Mixed, 100).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let c = ctx();
        let a = make_random_z_series(3, 42, DecayProfile::Mixed, 500).unwrap();
        let b = make_random_z_series(3, 42, DecayProfile::Mixed, 500).unwrap();
        for n in [1u64, 7, 100, 499] {
            assert_eq!(a.eval_term(n, &c).unwrap(), b.eval_term(n, &c).unwrap());
        }
    }

    #[test]
    fn incomparable_strands_break_plain_monotonicity() {
        let c = ctx();
        // strand scales 1, 0.01, 1: consecutive terms increase somewhere
        let mut table = Vec::new();
        for step in 1..=50u64 {
            for scale in [100u64, 1, 100] {
                let v = Real::from_u64(scale, &c)
                    .div(&Real::from_u64(100, &c), &c)
                    .div(&Real::from_u64(step, &c), &c);
                table.push(v);
            }
        }
        let s = TermSequence::table(1, table, SignConvention::AlternatingPlus);
        assert!(check_z_monotone(&s, 3, 1, 150, &c).unwrap().holds);
        assert!(!check_z_monotone(&s, 1, 1, 150, &c).unwrap().holds);
    }
}
