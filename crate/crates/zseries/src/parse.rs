//! Recursive-descent parser for the expression language.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := unary (("*"|"/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" power)?          // right-assoc; exponent may not
//!                                      // start with a bare unary minus
//! atom   := number | ident | ident "(" expr ")" | "(" expr ")"
//! ident  := n | k | x | sin|cos|ln|exp|sqrt|abs|floor | pi|e
//! number := digits ("." digits)?
//! ```

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;

use crate::error::Error;
use crate::expr::{BinaryOp, Decimal, Expression, Function, MathConst, VarName};

/// Parses an expression; errors carry the byte offset of the failure.
pub fn parse_expression(text: &str) -> Result<Expression, Error> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    let e = p.parse_expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: String::from(message) }
    }

    fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_expr(&mut self) -> Result<Expression, Error> {
        let mut lhs = self.parse_term()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'+') => BinaryOp::Add,
                Some(b'-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_term()?;
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn parse_term(&mut self) -> Result<Expression, Error> {
        let mut lhs = self.parse_unary()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'*') => BinaryOp::Mul,
                Some(b'/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_unary()?;
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn parse_unary(&mut self) -> Result<Expression, Error> {
        self.skip_ws();
        if self.eat(b'-') {
            let inner = self.parse_unary()?;
            Ok(Expression::Neg(Box::new(inner)))
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<Expression, Error> {
        let base = self.parse_atom()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            if self.peek() == Some(b'-') {
                return Err(self.syntax(
                    "unary minus as exponent requires parentheses, e.g. 2^(-k)",
                ));
            }
            let exp = self.parse_power()?;
            Ok(Expression::Binary(BinaryOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<Expression, Error> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() => self.parse_number(),
            Some(b) if b.is_ascii_alphabetic() => self.parse_ident(),
            Some(_) => Err(self.syntax("expected a number, identifier or `(`")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn parse_number(&mut self) -> Result<Expression, Error> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.eat(b'.') {
            if !self.peek().is_some_and(|b| b.is_ascii_digit()) {
                return Err(self.syntax("expected digits after decimal point"));
            }
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let text = core::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are valid UTF-8");
        let d = Decimal::new(text).expect("scanned token is a valid decimal");
        Ok(Expression::Number(d))
    }

    fn parse_ident(&mut self) -> Result<Expression, Error> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.bytes[start..self.pos])
            .expect("letters are valid UTF-8");
        match name {
            "n" => return Ok(Expression::Var(VarName::N)),
            "k" => return Ok(Expression::Var(VarName::K)),
            "x" => return Ok(Expression::Var(VarName::X)),
            "pi" => return Ok(Expression::Constant(MathConst::Pi)),
            "e" => return Ok(Expression::Constant(MathConst::E)),
            _ => {}
        }
        if let Some(f) = Function::from_name(name) {
            self.skip_ws();
            if !self.eat(b'(') {
                return Err(Error::ArityMismatch { offset: start, name: String::from(name) });
            }
            let arg = self.parse_expr()?;
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    Ok(Expression::Call(f, Box::new(arg)))
                }
                Some(b',') => Err(Error::ArityMismatch { offset: self.pos, name: String::from(name) }),
                _ => Err(self.syntax(&format!("expected `)` closing `{}(`", name))),
            }
        } else {
            Err(Error::UnknownIdentifier { offset: start, name: String::from(name) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn cos_shift_magnitude_ast() {
        // Div(1, Add(n, Mul(2, Cos(n))))
        let e = parse_expression("1/(n + 2*cos(n))").unwrap();
        let expected = Expression::Binary(
            BinaryOp::Div,
            Box::new(Expression::Number(Decimal::new("1").unwrap())),
            Box::new(Expression::Binary(
                BinaryOp::Add,
                Box::new(Expression::Var(VarName::N)),
                Box::new(Expression::Binary(
                    BinaryOp::Mul,
                    Box::new(Expression::Number(Decimal::new("2").unwrap())),
                    Box::new(Expression::Call(
                        Function::Cos,
                        Box::new(Expression::Var(VarName::N)),
                    )),
                )),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn bare_variable() {
        assert_eq!(parse_expression("n").unwrap(), Expression::Var(VarName::N));
    }

    #[test]
    fn bare_minus_exponent_rejected() {
        let err = parse_expression("2^-k").unwrap_err();
        match err {
            Error::Syntax { offset, message } => {
                assert_eq!(offset, 2);
                assert!(message.contains("parentheses"));
            }
            other => panic!("expected syntax error, got {:?}", other),
        }
        assert!(parse_expression("2^(-k)").is_ok());
    }

    #[test]
    fn error_offsets_and_kinds() {
        assert!(matches!(
            parse_expression("1 + foo(2)").unwrap_err(),
            Error::UnknownIdentifier { offset: 4, .. }
        ));
        assert!(matches!(
            parse_expression("sin"),
            Err(Error::ArityMismatch { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expression("sin(n, k)"),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(parse_expression("1 +"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression("(1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression("1)"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_expression("1."), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression(""), Err(Error::Syntax { .. })));
    }

    #[test]
    fn roundtrip_fixed_cases() {
        for text in [
            "1/(n + 2*cos(n))",
            "1/k + 1/2^k",
            "ln(n) + n*sin(n)^2",
            "-n^2 + (-n)^2",
            "floor((n + 1)/2)",
            "2^(n/2 + 1)",
            "1.25*10^(-k)",
            "pi*e",
        ] {
            let once = parse_expression(text).unwrap();
            let printed = once.to_string();
            let twice = parse_expression(&printed).unwrap();
            assert_eq!(once, twice, "roundtrip failed for `{}` -> `{}`", text, printed);
        }
    }
}
