//! Expression language for term magnitudes, sign rules and envelopes.
//!
//! One free variable (spelled `n`, `k` or `x`), rational/decimal literals,
//! the binary operators `+ - * / ^`, unary negation, the functions
//! `sin cos ln exp sqrt abs floor` and the constants `pi` and `e`.
//!
//! Printing an expression and re-parsing it yields a structurally identical
//! tree; the printer inserts the minimal parentheses required by the
//! grammar's precedence rules (`^` before unary minus before `* /` before
//! `+ -`, with `^` right-associative and its exponent never starting with a
//! bare unary minus).

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use core::fmt;

use crate::error::Error;
use crate::real::{PrecisionContext, Real};

/// Spelling of the single free variable. All three names denote the same
/// value during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarName {
    N,
    K,
    X,
}

impl VarName {
    pub fn as_str(self) -> &'static str {
        match self {
            VarName::N => "n",
            VarName::K => "k",
            VarName::X => "x",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MathConst {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Ln,
    Exp,
    Sqrt,
    Abs,
    Floor,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Ln => "ln",
            Function::Exp => "exp",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
            Function::Floor => "floor",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Some(match name {
            "sin" => Function::Sin,
            "cos" => Function::Cos,
            "ln" => Function::Ln,
            "exp" => Function::Exp,
            "sqrt" => Function::Sqrt,
            "abs" => Function::Abs,
            "floor" => Function::Floor,
            _ => return None,
        })
    }
}

/// A decimal literal kept in its source spelling, so printing reproduces the
/// input and evaluation rounds the exact decimal once at working precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal(String);

impl Decimal {
    /// Accepts `digits` or `digits.digits`.
    pub fn new(text: &str) -> Option<Decimal> {
        let mut parts = text.split('.');
        let int = parts.next()?;
        let ok_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !ok_digits(int) {
            return None;
        }
        if let Some(frac) = parts.next() {
            if !ok_digits(frac) || parts.next().is_some() {
                return None;
            }
        }
        Some(Decimal(String::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Abstract syntax tree over one free variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Number(Decimal),
    Var(VarName),
    Constant(MathConst),
    Neg(Box<Expression>),
    Binary(BinaryOp, Box<Expression>, Box<Expression>),
    Call(Function, Box<Expression>),
}

impl Expression {
    /// Evaluates at `x`, rounding each node to nearest at working precision.
    /// Any non-finite intermediate value is an error, never a NaN result.
    pub fn eval(&self, x: &Real, ctx: &PrecisionContext) -> Result<Real, Error> {
        let v = match self {
            Expression::Number(d) => Real::parse_decimal(d.as_str(), ctx)?,
            Expression::Var(_) => x.with_precision(ctx),
            Expression::Constant(MathConst::Pi) => ctx.pi(),
            Expression::Constant(MathConst::E) => ctx.e(),
            Expression::Neg(inner) => inner.eval(x, ctx)?.neg(),
            Expression::Call(f, arg) => {
                let a = arg.eval(x, ctx)?;
                match f {
                    Function::Sin => a.sin(ctx),
                    Function::Cos => a.cos(ctx),
                    Function::Ln => a.ln(ctx),
                    Function::Exp => a.exp(ctx),
                    Function::Sqrt => a.sqrt(ctx),
                    Function::Abs => a.abs(),
                    Function::Floor => a.floor(),
                }
            }
            Expression::Binary(op, l, r) => {
                let a = l.eval(x, ctx)?;
                let b = r.eval(x, ctx)?;
                match op {
                    BinaryOp::Add => a.add(&b, ctx),
                    BinaryOp::Sub => a.sub(&b, ctx),
                    BinaryOp::Mul => a.mul(&b, ctx),
                    BinaryOp::Div => a.div(&b, ctx),
                    BinaryOp::Pow => eval_pow(&a, &b, ctx),
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFinite { what: format!("`{}` at {}", self, x.to_f64()) });
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expression::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expression::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expression::Neg(_) => 3,
            Expression::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

/// Integer exponents use repeated squaring (valid for any base, including
/// negative); everything else goes through exp/ln and requires a positive
/// base, surfacing as a non-finite error otherwise.
fn eval_pow(base: &Real, exp: &Real, ctx: &PrecisionContext) -> Real {
    match exp.to_i64_exact() {
        Some(i) if i >= 0 => base.powi(i as u64, ctx),
        Some(i) => base.powi(i.unsigned_abs(), ctx).recip(ctx),
        None => base.pow(exp, ctx),
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

fn write_child(
    child: &Expression,
    f: &mut fmt::Formatter<'_>,
    needs_parens: bool,
) -> fmt::Result {
    if needs_parens {
        write!(f, "(")?;
        write_expr(child, f)?;
        write!(f, ")")
    } else {
        write_expr(child, f)
    }
}

fn write_expr(e: &Expression, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expression::Number(d) => write!(f, "{}", d.as_str()),
        Expression::Var(v) => write!(f, "{}", v.as_str()),
        Expression::Constant(MathConst::Pi) => write!(f, "pi"),
        Expression::Constant(MathConst::E) => write!(f, "e"),
        Expression::Neg(inner) => {
            write!(f, "-")?;
            write_child(inner, f, inner.precedence() < 3)
        }
        Expression::Call(func, arg) => {
            write!(f, "{}(", func.name())?;
            write_expr(arg, f)?;
            write!(f, ")")
        }
        Expression::Binary(op, l, r) => {
            let (sym, level, spaced) = match op {
                BinaryOp::Add => ("+", 1, true),
                BinaryOp::Sub => ("-", 1, true),
                BinaryOp::Mul => ("*", 2, false),
                BinaryOp::Div => ("/", 2, false),
                BinaryOp::Pow => ("^", 4, false),
            };
            if *op == BinaryOp::Pow {
                // Right-associative; the exponent may not start with a bare
                // unary minus, so a Neg child is parenthesized.
                write_child(l, f, l.precedence() <= 4)?;
                write!(f, "^")?;
                write_child(r, f, r.precedence() < 4)
            } else {
                write_child(l, f, l.precedence() < level)?;
                if spaced {
                    write!(f, " {} ", sym)?;
                } else {
                    write!(f, "{}", sym)?;
                }
                write_child(r, f, r.precedence() <= level)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    fn eval_at(text: &str, x: f64) -> f64 {
        let c = ctx();
        parse_expression(text)
            .unwrap()
            .eval(&Real::from_f64(x, &c), &c)
            .unwrap()
            .to_f64()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval_at("1 + 2*3", 0.0), 7.0);
        assert_eq!(eval_at("2^3^2", 0.0), 512.0); // right-associative
        assert_eq!(eval_at("-2^2", 0.0), -4.0); // ^ binds tighter than unary -
        assert_eq!(eval_at("(-2)^2", 0.0), 4.0);
        assert_eq!(eval_at("2*-3", 0.0), -6.0);
        assert_eq!(eval_at("7/2/2", 0.0), 1.75);
    }

    #[test]
    fn functions_and_constants() {
        assert!((eval_at("sin(pi/2)", 0.0) - 1.0).abs() < 1e-15);
        assert!((eval_at("ln(e)", 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(eval_at("floor(2.75)", 0.0), 2.0);
        assert_eq!(eval_at("abs(-3)", 0.0), 3.0);
        assert_eq!(eval_at("sqrt(16)", 0.0), 4.0);
    }

    #[test]
    fn negative_base_integer_exponent() {
        assert_eq!(eval_at("(-1)^7", 0.0), -1.0);
        assert_eq!(eval_at("(-1)^n", 4.0), 1.0);
        assert_eq!(eval_at("2^(-k)", 3.0), 0.125);
    }

    #[test]
    fn out_of_domain_is_error_not_nan() {
        let c = ctx();
        let e = parse_expression("ln(n)").unwrap();
        assert!(matches!(e.eval(&Real::from_f64(0.0, &c), &c), Err(Error::NonFinite { .. })));
        let e = parse_expression("sqrt(n)").unwrap();
        assert!(matches!(e.eval(&Real::from_f64(-1.0, &c), &c), Err(Error::NonFinite { .. })));
        let e = parse_expression("1/n").unwrap();
        assert!(matches!(e.eval(&Real::from_f64(0.0, &c), &c), Err(Error::NonFinite { .. })));
        // negative base with non-integer exponent
        let e = parse_expression("n^0.5").unwrap();
        assert!(matches!(e.eval(&Real::from_f64(-2.0, &c), &c), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn printing_inserts_minimal_parens() {
        let cases = [
            ("1/(n + 2*cos(n))", "1/(n + 2*cos(n))"),
            ("((n))", "n"),
            ("-(n + 1)", "-(n + 1)"),
            ("-n^2", "-n^2"),
            ("(-n)^2", "(-n)^2"),
            ("2^(-k)", "2^(-k)"),
            ("n - (n + n)", "n - (n + n)"),
            ("2^3^2", "2^3^2"),
            ("(2^3)^2", "(2^3)^2"),
        ];
        for (input, printed) in cases {
            let ast = parse_expression(input).unwrap();
            assert_eq!(alloc::format!("{}", ast), printed, "input `{}`", input);
        }
    }
}
