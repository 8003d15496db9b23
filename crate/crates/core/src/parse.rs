//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' factor) | ('/' integer))*
//! factor := base ('^' integer)?
//! base   := integer | variable | '(' expr ')'
//! ```
//!
//! Division is only by integer literals, which must be p-units when a prime
//! is supplied.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::IntPolynomial;

const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("coefficient denominator {denominator} at position {position} is divisible by p")]
    NonIntegralCoefficient { position: usize, denominator: BigInt },
    #[error("unknown variable '{name}' at position {position}")]
    UnknownVariable { position: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError::SyntaxError {
                position: i,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
    p: Option<u64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::SyntaxError { position: self.offset(), message: message.into() })
    }

    fn integer(&mut self) -> Result<(usize, BigInt), ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok((at, n))
            }
            _ => self.syntax("expected an integer"),
        }
    }

    fn expr(&mut self) -> Result<IntPolynomial, ParseError> {
        let negate = self.eat('-');
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<IntPolynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.factor()?;
            } else if self.eat('/') {
                let (at, d) = self.integer()?;
                if d.is_zero() {
                    return Err(ParseError::SyntaxError {
                        position: at,
                        message: "division by zero".into(),
                    });
                }
                if let Some(p) = self.p {
                    if (&d % BigInt::from(p)).is_zero() {
                        return Err(ParseError::NonIntegralCoefficient {
                            position: at,
                            denominator: d,
                        });
                    }
                }
                acc = acc.scale(&BigRational::new(BigInt::one(), d));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<IntPolynomial, ParseError> {
        let base = self.base()?;
        if self.eat('^') {
            let (at, e) = self.integer()?;
            let e: u32 = e
                .try_into()
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or(ParseError::SyntaxError {
                    position: at,
                    message: format!("exponent exceeds {MAX_EXPONENT}"),
                })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<IntPolynomial, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(IntPolynomial::constant(self.vars, BigRational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(IntPolynomial::var(self.vars, i)),
                    None => Err(ParseError::UnknownVariable { position: at, name }),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected ')'");
                }
                Ok(inner)
            }
            Some(t) => self.syntax(format!("unexpected token {t:?}")),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parse `text` as a polynomial in `vars`. When `p` is given, every divisor
/// must be prime to `p`.
pub fn parse_polynomial(
    text: &str,
    vars: &[impl AsRef<str>],
    p: Option<u64>,
) -> Result<IntPolynomial, ParseError> {
    let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError::SyntaxError { position: 0, message: "empty expression".into() });
    }
    let mut parser = Parser { toks, pos: 0, end: text.chars().count(), vars: &vars, p };
    let out = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.syntax("trailing input");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quadratic() {
        let f = parse_polynomial("x^2 - 4*x + 3", &["x"], Some(3)).unwrap();
        assert_eq!(f.coefficient(&[2]), BigRational::from_integer(1.into()));
        assert_eq!(f.coefficient(&[1]), BigRational::from_integer((-4).into()));
        assert_eq!(f.coefficient(&[0]), BigRational::from_integer(3.into()));
        assert_eq!(f.num_terms(), 3);
    }

    #[test]
    fn rational_literal_with_unit_denominator() {
        let f = parse_polynomial("x^2 - 29/16", &["x"], Some(3)).unwrap();
        assert_eq!(f.coefficient(&[0]), BigRational::new((-29).into(), 16.into()));
    }

    #[test]
    fn rejects_p_in_denominator() {
        assert!(matches!(
            parse_polynomial("x/3", &["x"], Some(3)),
            Err(ParseError::NonIntegralCoefficient { position: 2, .. })
        ));
        assert!(parse_polynomial("x/3", &["x"], Some(5)).is_ok());
    }

    #[test]
    fn error_positions() {
        assert_eq!(
            parse_polynomial("x + y", &["x"], None),
            Err(ParseError::UnknownVariable { position: 4, name: "y".into() })
        );
        assert!(matches!(
            parse_polynomial("x + * 2", &["x"], None),
            Err(ParseError::SyntaxError { position: 4, .. })
        ));
        assert!(matches!(
            parse_polynomial("(x + 1", &["x"], None),
            Err(ParseError::SyntaxError { position: 6, .. })
        ));
        assert!(matches!(parse_polynomial("   ", &["x"], None), Err(ParseError::SyntaxError { .. })));
    }

    #[test]
    fn unary_minus_after_paren_and_nesting() {
        let f = parse_polynomial("-(-x + 1)^2*3", &["x"], None).unwrap();
        let g = parse_polynomial("-3*x^2 + 6*x - 3", &["x"], None).unwrap();
        assert_eq!(f, g);
        assert!(parse_polynomial("x*-1", &["x"], None).is_err());
    }

    #[test]
    fn multivariate() {
        let f = parse_polynomial("x*y - 3", &["x", "y"], Some(3)).unwrap();
        assert_eq!(f.coefficient(&[1, 1]), BigRational::from_integer(1.into()));
    }
}
