//! Text form of rational functions.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' exponent)?
//! exponent := ['-'] integer | '(' ['-' | '+'] integer ')'
//! atom   := integer | 'x' | 'y' | '(' expr ')'
//! ```
//!
//! Rationals are written `p/q`. The printer emits exactly this grammar, so
//! `parse(print(f)) == f` for every reduced `f`.

use thiserror::Error;

use super::ratfn::RatFn;
use super::scalar::Scalar;
use super::AlgebraError;

const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at offset {pos}")]
    Unexpected { pos: usize, found: char },
    #[error("unexpected end of input")]
    Eof,
    #[error("exponent at offset {pos} is not an integer in range")]
    BadExponent { pos: usize },
    #[error("trailing input at offset {pos}")]
    Trailing { pos: usize },
    #[error("arithmetic error: {0}")]
    Arithmetic(#[from] AlgebraError),
}

/// Appends `c*mono` with a sign-aware separator.
pub(crate) fn push_term<C: Scalar>(out: &mut String, c: &C, mono: &str) {
    let neg = c.is_negative();
    let a = c.abs();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if mono.is_empty() {
        out.push_str(&a.to_string());
    } else if a.is_one() {
        out.push_str(mono);
    } else {
        out.push_str(&format!("{a}*{mono}"));
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn unexpected(&mut self) -> ParseError {
        match self.peek() {
            Some(c) => ParseError::Unexpected { pos: self.pos, found: c as char },
            None => ParseError::Eof,
        }
    }

    fn expr<C: Scalar>(&mut self) -> Result<RatFn<C>, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<C: Scalar>(&mut self) -> Result<RatFn<C>, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.bump();
                    acc = acc.checked_div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<C: Scalar>(&mut self) -> Result<RatFn<C>, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power<C: Scalar>(&mut self) -> Result<RatFn<C>, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.exponent()?;
            return Ok(base.pow(e)?);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let start = self.pos;
        let paren = self.peek() == Some(b'(');
        if paren {
            self.bump();
        }
        let mut neg = false;
        match self.peek() {
            Some(b'-') => {
                neg = true;
                self.bump();
            }
            Some(b'+') if paren => self.bump(),
            _ => {}
        }
        let digits = self.digits().ok_or(ParseError::BadExponent { pos: start })?;
        let v: u32 = digits
            .parse()
            .ok()
            .filter(|v| *v <= MAX_EXPONENT)
            .ok_or(ParseError::BadExponent { pos: start })?;
        if paren {
            if self.peek() != Some(b')') {
                return Err(self.unexpected());
            }
            self.bump();
        }
        Ok(if neg { -(v as i32) } else { v as i32 })
    }

    fn digits(&mut self) -> Option<String> {
        self.peek()?;
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start)
            .then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom<C: Scalar>(&mut self) -> Result<RatFn<C>, ParseError> {
        match self.peek() {
            Some(b'x') => {
                self.bump();
                Ok(RatFn::x())
            }
            Some(b'y') => {
                self.bump();
                Ok(RatFn::y())
            }
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.unexpected());
                }
                self.bump();
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().expect("at least one digit");
                Ok(RatFn::constant(integer_scalar::<C>(&d)))
            }
            _ => Err(self.unexpected()),
        }
    }
}

fn integer_scalar<C: Scalar>(digits: &str) -> C {
    let ten = C::int(10);
    digits
        .bytes()
        .fold(C::zero(), |acc, b| acc * ten.clone() + C::int((b - b'0') as i64))
}

/// Parses an expression in `x, y` to a reduced rational function.
pub fn parse_rf<C: Scalar>(s: &str) -> Result<RatFn<C>, ParseError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(ParseError::Trailing { pos: p.pos });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rf;

    fn rf(s: &str) -> Rf {
        parse_rf(s).unwrap()
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(rf("-x^2"), -&rf("x*x"));
        assert_eq!(rf("1/2*x"), rf("x/2"));
        assert_eq!(rf("x^-2*(x-y)*y^2"), rf("(x - y)*y^2/x^2"));
        assert_eq!(rf("x^(-1)"), rf("1/x"));
    }

    #[test]
    fn print_then_parse_is_identity() {
        for s in ["2*x^2 - 3*x*y", "(3*x - y)*y^3/(x - y)^3", "-1/3*y^2 + 7", "0", "x/(1 - x)"] {
            let f = rf(s);
            assert_eq!(rf(&f.to_string()), f, "{s} -> {f}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_rf::<crate::Q>("x +"), Err(ParseError::Eof)));
        assert!(matches!(parse_rf::<crate::Q>("x z"), Err(ParseError::Trailing { .. })));
        assert!(matches!(parse_rf::<crate::Q>("x^y"), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse_rf::<crate::Q>("1/(x-x)"), Err(ParseError::Arithmetic(_))));
    }
}
