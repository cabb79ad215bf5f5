//! Term-sequence model: nonnegative magnitudes `a[n]` plus a sign rule.
//!
//! The series under study is `sum_n sign(n) * a[n]` where the magnitudes are
//! given by a closed-form expression in `n`, a piecewise definition
//! dispatching on `n mod modulus` with an affine index remap, or an explicit
//! finite table. Signs are factored out of the magnitudes because every
//! monotonicity condition and remainder bound constrains the magnitudes
//! alone.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::expr::{BinaryOp, Expression};
use crate::real::{PrecisionContext, Real};

/// Sign rule applied on top of the nonnegative magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum SignConvention {
    /// `(-1)^(n+1)`: positive at odd indices.
    AlternatingPlus,
    /// `(-1)^n`: positive at even indices.
    AlternatingMinus,
    /// Sign of an expression evaluated at `n`. Zero terms are an error in
    /// this mode (the periodic-sign model requires nonzero terms).
    Explicit(Expression),
}

impl SignConvention {
    pub fn is_explicit(&self) -> bool {
        matches!(self, SignConvention::Explicit(_))
    }
}

/// Affine index remap `n -> (a*n + b) / d` with integer result.
///
/// Extracted from an expression that must be affine in the variable;
/// integrality over a residue class is decidable and checked up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    num_a: i128,
    num_b: i128,
    den: i128,
}

impl AffineMap {
    /// Extracts the affine form of an expression in one variable. Fails if
    /// the expression is not affine with rational coefficients.
    pub fn from_expression(expr: &Expression) -> Result<AffineMap, Error> {
        let (a, b) = linear_form(expr)?;
        let den = lcm(a.1, b.1);
        Ok(AffineMap { num_a: a.0 * (den / a.1), num_b: b.0 * (den / b.1), den })
    }

    /// Applies the map, requiring an exact positive integer result.
    pub fn apply(&self, n: u64) -> Result<u64, Error> {
        let v = self.num_a * n as i128 + self.num_b;
        if v % self.den != 0 {
            return Err(Error::BadPieces {
                message: format!("index map produces non-integer at n = {}", n),
            });
        }
        let k = v / self.den;
        if k < 1 {
            return Err(Error::BadPieces {
                message: format!("index map produces non-positive index {} at n = {}", k, n),
            });
        }
        u64::try_from(k).map_err(|_| Error::BadPieces {
            message: format!("index map overflows at n = {}", n),
        })
    }

    /// Verifies that the map yields a positive integer for every
    /// `n = first, first + modulus, first + 2*modulus, ...`.
    fn check_class(&self, first: u64, modulus: u64) -> Result<(), Error> {
        let slope = self.num_a * modulus as i128;
        if slope % self.den != 0 {
            return Err(Error::BadPieces {
                message: format!("index map is non-integer on the class of n = {}", first),
            });
        }
        if slope < 0 {
            return Err(Error::BadPieces {
                message: format!("index map decreases along the class of n = {}", first),
            });
        }
        // Slope is a nonnegative integer, so integrality and positivity at
        // the first member extend to the whole class.
        self.apply(first).map(|_| ())
    }
}

/// Rational linear form (a, b) with `expr = a*var + b`; each coefficient is
/// a reduced fraction (numerator, positive denominator).
type Frac = (i128, i128);

fn reduce(f: Frac) -> Frac {
    let (mut n, mut d) = f;
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = gcd(n.unsigned_abs(), d.unsigned_abs()) as i128;
    if g > 1 {
        (n / g, d / g)
    } else {
        (n, d)
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd(a.unsigned_abs(), b.unsigned_abs()) as i128 * b
}

fn frac_add(x: Frac, y: Frac) -> Frac {
    reduce((x.0 * y.1 + y.0 * x.1, x.1 * y.1))
}

fn frac_mul(x: Frac, y: Frac) -> Frac {
    reduce((x.0 * y.0, x.1 * y.1))
}

fn not_affine(expr: &Expression) -> Error {
    Error::BadPieces { message: format!("index map must be affine in the variable: `{}`", expr) }
}

fn linear_form(expr: &Expression) -> Result<(Frac, Frac), Error> {
    match expr {
        Expression::Number(d) => {
            let text = d.as_str();
            let (int, frac) = match text.split_once('.') {
                Some((i, fr)) => (i, fr),
                None => (text, ""),
            };
            let digits = format!("{}{}", int, frac);
            let num: i128 = digits.parse().map_err(|_| not_affine(expr))?;
            let den = 10i128.checked_pow(frac.len() as u32).ok_or_else(|| not_affine(expr))?;
            Ok(((0, 1), reduce((num, den))))
        }
        Expression::Var(_) => Ok(((1, 1), (0, 1))),
        Expression::Neg(inner) => {
            let (a, b) = linear_form(inner)?;
            Ok(((-a.0, a.1), (-b.0, b.1)))
        }
        Expression::Binary(BinaryOp::Add, l, r) => {
            let (la, lb) = linear_form(l)?;
            let (ra, rb) = linear_form(r)?;
            Ok((frac_add(la, ra), frac_add(lb, rb)))
        }
        Expression::Binary(BinaryOp::Sub, l, r) => {
            let (la, lb) = linear_form(l)?;
            let (ra, rb) = linear_form(r)?;
            Ok((frac_add(la, (-ra.0, ra.1)), frac_add(lb, (-rb.0, rb.1))))
        }
        Expression::Binary(BinaryOp::Mul, l, r) => {
            let (la, lb) = linear_form(l)?;
            let (ra, rb) = linear_form(r)?;
            match (la.0 == 0, ra.0 == 0) {
                (true, _) => Ok((frac_mul(lb, ra), frac_mul(lb, rb))),
                (_, true) => Ok((frac_mul(rb, la), frac_mul(rb, lb))),
                _ => Err(not_affine(expr)),
            }
        }
        Expression::Binary(BinaryOp::Div, l, r) => {
            let (la, lb) = linear_form(l)?;
            let (ra, rb) = linear_form(r)?;
            if ra.0 != 0 || rb.0 == 0 {
                return Err(not_affine(expr));
            }
            let inv = reduce((rb.1, rb.0));
            Ok((frac_mul(la, inv), frac_mul(lb, inv)))
        }
        _ => Err(not_affine(expr)),
    }
}

/// One case of a piecewise magnitude definition: for `n = residue (mod
/// modulus)`, the magnitude is `expr` evaluated at `k = index_map(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceRule {
    pub modulus: u64,
    pub residue: u64,
    pub index_expr: Expression,
    pub magnitude: Expression,
    map: AffineMap,
}

impl PieceRule {
    pub fn new(
        modulus: u64,
        residue: u64,
        index_expr: Expression,
        magnitude: Expression,
    ) -> Result<PieceRule, Error> {
        if modulus == 0 {
            return Err(Error::BadPieces { message: String::from("modulus must be positive") });
        }
        if residue >= modulus {
            return Err(Error::BadPieces {
                message: format!("residue {} not in [0, {})", residue, modulus),
            });
        }
        let map = AffineMap::from_expression(&index_expr)?;
        Ok(PieceRule { modulus, residue, index_expr, magnitude, map })
    }

    pub fn index_map(&self) -> &AffineMap {
        &self.map
    }
}

/// Magnitude definition of a term sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitude {
    /// Single expression in `n`.
    Closed(Expression),
    /// Piecewise by residue class with affine index remaps.
    Piecewise(Vec<PieceRule>),
    /// Explicit finite table (intended for tests); entry `i` is the
    /// magnitude at index `start + i`, stored exactly as given.
    Table(Vec<Real>),
}

/// A lazily evaluated sequence of nonnegative term magnitudes with a sign
/// convention; models the series `sum_{n>=start} sign(n) * a[n]`.
///
/// Immutable after construction; evaluation is a pure function of the
/// inputs and the precision context.
#[derive(Debug, Clone, PartialEq)]
pub struct TermSequence {
    start: u64,
    magnitude: Magnitude,
    sign: SignConvention,
    precision_bits: usize,
}

impl TermSequence {
    /// Validates and builds a sequence. For piecewise magnitudes the rules
    /// must share one modulus, cover every residue class exactly once, and
    /// have index maps that stay positive integers on their class.
    pub fn new(
        start: u64,
        magnitude: Magnitude,
        sign: SignConvention,
        precision_bits: usize,
    ) -> Result<TermSequence, Error> {
        if precision_bits < PrecisionContext::MIN_BITS {
            return Err(Error::PrecisionTooLow { bits: precision_bits });
        }
        if let Magnitude::Piecewise(rules) = &magnitude {
            validate_pieces(rules, start)?;
        }
        Ok(TermSequence { start, magnitude, sign, precision_bits })
    }

    /// Closed-form magnitude with the given sign, at default precision.
    pub fn closed(start: u64, magnitude: Expression, sign: SignConvention) -> TermSequence {
        TermSequence::new(start, Magnitude::Closed(magnitude), sign, PrecisionContext::DEFAULT_BITS)
            .expect("closed-form construction cannot fail")
    }

    /// Table-backed sequence (for tests), at default precision.
    pub fn table(start: u64, values: Vec<Real>, sign: SignConvention) -> TermSequence {
        TermSequence::new(start, Magnitude::Table(values), sign, PrecisionContext::DEFAULT_BITS)
            .expect("table construction cannot fail")
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn magnitude(&self) -> &Magnitude {
        &self.magnitude
    }

    pub fn sign(&self) -> &SignConvention {
        &self.sign
    }

    /// Declared default working precision in bits.
    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }

    /// Last valid index for table-backed sequences, `None` when unbounded.
    pub fn end(&self) -> Option<u64> {
        match &self.magnitude {
            Magnitude::Table(v) => Some(self.start + v.len() as u64 - 1),
            _ => None,
        }
    }

    /// The magnitude `a[n] >= 0` at working precision.
    ///
    /// Out-of-domain indices, negative magnitudes and non-finite values are
    /// hard errors; bounds are only meaningful if the model's preconditions
    /// hold.
    pub fn eval_term(&self, n: u64, ctx: &PrecisionContext) -> Result<Real, Error> {
        if n < self.start {
            return Err(Error::OutOfDomain { index: n, start: self.start });
        }
        let v = match &self.magnitude {
            Magnitude::Closed(expr) => expr.eval(&Real::from_u64(n, ctx), ctx)?,
            Magnitude::Piecewise(rules) => {
                let r = n % rules[0].modulus;
                let rule = rules
                    .iter()
                    .find(|rule| rule.residue == r)
                    .expect("coverage validated at construction");
                let k = rule.map.apply(n)?;
                rule.magnitude.eval(&Real::from_u64(k, ctx), ctx)?
            }
            Magnitude::Table(values) => {
                let i = (n - self.start) as usize;
                match values.get(i) {
                    Some(v) => v.with_precision(ctx),
                    None => return Err(Error::OutOfDomain { index: n, start: self.start }),
                }
            }
        };
        if v.is_negative() {
            return Err(Error::NegativeMagnitude { index: n });
        }
        Ok(v)
    }

    /// Sign factor at index `n`: +1 or -1.
    pub fn sign_at(&self, n: u64, ctx: &PrecisionContext) -> Result<i8, Error> {
        match &self.sign {
            SignConvention::AlternatingPlus => Ok(if n % 2 == 1 { 1 } else { -1 }),
            SignConvention::AlternatingMinus => Ok(if n % 2 == 0 { 1 } else { -1 }),
            SignConvention::Explicit(expr) => {
                let s = expr.eval(&Real::from_u64(n, ctx), ctx)?;
                if s.is_zero() {
                    return Err(Error::ZeroTerm { index: n });
                }
                Ok(if s.is_negative() { -1 } else { 1 })
            }
        }
    }

    /// The signed term `sign(n) * a[n]`. The sign comes solely from the
    /// convention, never from the magnitude.
    pub fn signed_term(&self, n: u64, ctx: &PrecisionContext) -> Result<Real, Error> {
        let mag = self.eval_term(n, ctx)?;
        if self.sign.is_explicit() && mag.is_zero() {
            return Err(Error::ZeroTerm { index: n });
        }
        Ok(match self.sign_at(n, ctx)? {
            1 => mag,
            _ => mag.neg(),
        })
    }
}

fn validate_pieces(rules: &[PieceRule], start: u64) -> Result<(), Error> {
    let Some(first) = rules.first() else {
        return Err(Error::BadPieces { message: String::from("no rules given") });
    };
    let modulus = first.modulus;
    if rules.iter().any(|r| r.modulus != modulus) {
        return Err(Error::BadPieces { message: String::from("rules must share one modulus") });
    }
    if rules.len() as u64 != modulus {
        return Err(Error::BadPieces {
            message: format!("{} rules do not cover modulus {}", rules.len(), modulus),
        });
    }
    let mut seen: Vec<bool> = alloc::vec![false; modulus as usize];
    for rule in rules {
        let slot = &mut seen[rule.residue as usize];
        if *slot {
            return Err(Error::BadPieces {
                message: format!("residue {} covered twice", rule.residue),
            });
        }
        *slot = true;
        // First index >= start in this residue class.
        let first_n = start + (rule.residue + modulus - start % modulus) % modulus;
        rule.map.check_class(first_n, modulus)?;
    }
    Ok(())
}
