//! Text syntax for scalar expressions.
//!
//! Grammar (whitespace-insensitive, `#` starts nothing here — comments are
//! handled by file-level parsers):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('-' | '+')* atom ('^' ('-')? integer)?
//! atom   := integer | 'i' | identifier | '(' expr ')'
//! ```
//!
//! `i` is the imaginary unit. Division is only defined by expressions that
//! evaluate to a nonzero constant, which keeps every parsed value a
//! polynomial. Exponents must be integers; a negative exponent is only
//! meaningful on `eps` (or on a constant), and that restriction is enforced
//! by [`super::normalize`] rather than the grammar, so serialised Laurent
//! monomials such as `eps^-1` round-trip.

use num::bigint::BigInt;

use super::gaussian::GaussianRational;
use super::expr::ScalarExpr;
use super::ScalarError;

/// A parse failure with a zero-based column offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {col}: {msg}")]
pub struct ParseError {
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn new(col: usize, msg: impl Into<String>) -> Self {
        Self {
            col,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    ImaginaryUnit,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        match c {
            ' ' | '\t' => pos += 1,
            '+' => {
                out.push((pos, Tok::Plus));
                pos += 1;
            }
            '-' => {
                out.push((pos, Tok::Minus));
                pos += 1;
            }
            '*' => {
                out.push((pos, Tok::Star));
                pos += 1;
            }
            '/' => {
                out.push((pos, Tok::Slash));
                pos += 1;
            }
            '^' => {
                out.push((pos, Tok::Caret));
                pos += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                pos += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                pos += 1;
            }
            '0'..='9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let text = &src[start..pos];
                let n: BigInt = text.parse().expect("digits parse as BigInt");
                out.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = pos;
                while pos < bytes.len()
                    && ((bytes[pos] as char).is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                let name = &src[start..pos];
                if name == "i" {
                    out.push((start, Tok::ImaginaryUnit));
                } else {
                    out.push((start, Tok::Ident(name.to_string())));
                }
            }
            other => {
                return Err(ParseError::new(pos, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.at).map(|(c, _)| *c).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            Err(ParseError::new(self.col(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.at += 1;
                    let col = self.col();
                    let divisor = self.factor()?;
                    let c = divisor.constant_value().ok_or_else(|| {
                        ParseError::new(col, ScalarError::NonConstantDivisor.to_string())
                    })?;
                    acc = acc.div_gauss(&c).map_err(|e| ParseError::new(col, e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut negate = false;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    negate = !negate;
                    self.at += 1;
                }
                Some(Tok::Plus) => {
                    self.at += 1;
                }
                _ => break,
            }
        }
        let mut value = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let col = self.col();
            let exp = self.integer_exponent()?;
            value = raise(value, exp).map_err(|msg| ParseError::new(col, msg))?;
        }
        Ok(if negate { -&value } else { value })
    }

    fn integer_exponent(&mut self) -> Result<i64, ParseError> {
        let col = self.col();
        let mut negative = false;
        if self.peek() == Some(&Tok::Minus) {
            negative = true;
            self.at += 1;
        }
        match self.bump() {
            Some(Tok::Int(n)) => {
                let v: i64 = i64::try_from(&n)
                    .map_err(|_| ParseError::new(col, "exponent out of range"))?;
                Ok(if negative { -v } else { v })
            }
            _ => Err(ParseError::new(col, "expected an integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<ScalarExpr, ParseError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(ScalarExpr::gauss(GaussianRational::new(
                num::rational::BigRational::from_integer(n),
                num::rational::BigRational::from_integer(BigInt::from(0)),
            ))),
            Some(Tok::ImaginaryUnit) => Ok(ScalarExpr::gauss(GaussianRational::i())),
            Some(Tok::Ident(name)) => Ok(ScalarExpr::var(&name)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(other) => Err(ParseError::new(col, format!("unexpected token `{other:?}`"))),
            None => Err(ParseError::new(col, "unexpected end of expression")),
        }
    }
}

/// Raise a parsed value to an integer power. Negative powers are permitted
/// for nonzero constants and for single monomials (so `eps^-1` parses);
/// anything else has no polynomial inverse.
fn raise(base: ScalarExpr, exp: i64) -> Result<ScalarExpr, String> {
    if exp >= 0 {
        let mut acc = ScalarExpr::one();
        for _ in 0..exp {
            acc = &acc * &base;
        }
        return Ok(acc);
    }
    if let Some(c) = base.constant_value() {
        let inv = c.inv().ok_or("negative power of zero")?;
        return raise(ScalarExpr::gauss(inv), -exp);
    }
    if base.num_terms() == 1 {
        let (m, c) = base.terms().next().expect("one term");
        let inv = c.inv().ok_or("negative power of zero")?;
        return Ok(ScalarExpr::term(m.pow(exp), inv.powi(-exp).expect("nonzero")));
    }
    Err("negative exponent on a non-monomial expression".to_string())
}

/// Parse a scalar expression over arbitrary identifiers. Validation against
/// a parameter registry is a separate step ([`super::normalize`]).
pub fn parse_expr(src: &str) -> Result<ScalarExpr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(ParseError::new(p.col(), "trailing input after expression"));
    }
    Ok(e)
}

/// Parse a constant in Q(i); identifiers are rejected.
pub fn parse_gaussian(src: &str) -> Result<GaussianRational, ParseError> {
    let e = parse_expr(src)?;
    e.constant_value()
        .ok_or_else(|| ParseError::new(0, "expected a constant expression"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_grouping() {
        assert_eq!(parse_expr("1 + 2*3").unwrap(), ScalarExpr::int(7));
        assert_eq!(parse_expr("(1 + 2)*3").unwrap(), ScalarExpr::int(9));
        assert_eq!(parse_expr("2^3").unwrap(), ScalarExpr::int(8));
        assert_eq!(parse_expr("-2^2").unwrap(), ScalarExpr::int(-4));
        assert_eq!(parse_expr("6/4").unwrap(), ScalarExpr::gauss(GaussianRational::from_ratio(3, 2)));
    }

    #[test]
    fn imaginary_unit() {
        assert_eq!(parse_expr("i^2").unwrap(), ScalarExpr::int(-1));
        assert_eq!(parse_gaussian("(1+i)/(1-i)").unwrap(), GaussianRational::i());
    }

    #[test]
    fn identifiers_and_eps() {
        assert_eq!(parse_expr("eps^-1").unwrap(), ScalarExpr::eps_pow(-1));
        let p = parse_expr("2*alpha2*eps^2 - x_1").unwrap();
        assert_eq!(p.degree_in("alpha2"), Some(1));
        assert_eq!(p.degree_in("eps"), Some(2));
    }

    #[test]
    fn division_only_by_constants() {
        let err = parse_expr("x / y").unwrap_err();
        assert!(err.msg.contains("non-constant"), "{err}");
        let err = parse_expr("x / 0").unwrap_err();
        assert!(err.msg.contains("zero"), "{err}");
        assert!(parse_expr("x / (1 - 1)").is_err());
    }

    #[test]
    fn negative_powers_of_sums_are_rejected() {
        assert!(parse_expr("(x + 1)^-1").is_err());
        // ... but constants and single monomials invert fine.
        assert_eq!(parse_expr("(2)^-1").unwrap(), ScalarExpr::gauss(GaussianRational::from_ratio(1, 2)));
        assert_eq!(
            parse_expr("(2*eps)^-2").unwrap(),
            ScalarExpr::eps_pow(-2).div_gauss(&GaussianRational::from_int(4)).unwrap()
        );
    }

    #[test]
    fn error_columns_point_at_the_problem() {
        let err = parse_expr("1 + $").unwrap_err();
        assert_eq!(err.col, 4);
        let err = parse_expr("(1 + 2").unwrap_err();
        assert_eq!(err.col, 6);
        let err = parse_expr("1 2").unwrap_err();
        assert_eq!(err.col, 2);
    }
}
