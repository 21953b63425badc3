//! Text grammar for series literals.
//!
//! ```text
//! series  := sign? term (sign term)*
//! term    := factor ('*' factor)*
//! factor  := number 'i'? | '(' complex ')' | var ('^' integer)?
//! complex := sign? number 'i'? (sign number 'i'?)?
//! var     := ('q' | 'p' | 'l' | 't') index      index in 1..=n
//! ```
//!
//! Whitespace between tokens is ignored. Printing emits terms in
//! graded-lexicographic order and always re-parses to the same series.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::{Monomial, SeriesSpace, TruncatedSeries, Var};

/// Syntax error with the 1-based character column of the offending token.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} at column {column}: `{token}`")]
pub struct ParseError {
    pub message: String,
    pub token: String,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Star,
    Caret,
    Plus,
    Minus,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    text: String,
    column: usize,
}

fn err(message: impl Into<String>, token: &str, column: usize) -> ParseError {
    ParseError {
        message: message.into(),
        token: token.to_string(),
        column,
    }
}

fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let column = i + 1;
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match ch {
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                text: ch.to_string(),
                column,
            });
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| err("malformed number", &text, column))?;
            let imaginary = i < chars.len()
                && chars[i] == 'i'
                && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric());
            if imaginary {
                i += 1;
                out.push(Spanned {
                    tok: Tok::Imag(value),
                    text: format!("{text}i"),
                    column,
                });
            } else {
                out.push(Spanned {
                    tok: Tok::Num(value),
                    text,
                    column,
                });
            }
            continue;
        }
        if ch.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Spanned {
                tok: Tok::Ident(text.clone()),
                text,
                column,
            });
            continue;
        }
        return Err(err("unexpected character", &ch.to_string(), column));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    space: SeriesSpace,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn unexpected_end(&self, what: &str) -> ParseError {
        err(format!("expected {what}"), "<end>", self.end_column)
    }

    fn series(&mut self) -> Result<TruncatedSeries, ParseError> {
        let mut out = self.space.zero();
        let mut sign = 1.0;
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Minus) => {
                sign = -1.0;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            None => return Err(self.unexpected_end("a term")),
            _ => {}
        }
        loop {
            let (m, c) = self.term()?;
            if self.space.truncation.admits(&m) {
                out.add_term(m, c * sign);
            }
            match self
                .next()
                .map(|t| (t.tok.clone(), t.text.clone(), t.column))
            {
                None => break,
                Some((Tok::Plus, ..)) => sign = 1.0,
                Some((Tok::Minus, ..)) => sign = -1.0,
                Some((_, text, column)) => {
                    return Err(err("expected `+` or `-` between terms", &text, column))
                }
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, Complex64), ParseError> {
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut mono = Monomial::one();
        loop {
            self.factor(&mut coeff, &mut mono)?;
            if matches!(self.peek().map(|t| &t.tok), Some(Tok::Star)) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((mono, coeff))
    }

    fn factor(&mut self, coeff: &mut Complex64, mono: &mut Monomial) -> Result<(), ParseError> {
        let Some(tok) = self.next().cloned() else {
            return Err(self.unexpected_end("a factor"));
        };
        match tok.tok {
            Tok::Num(v) => *coeff *= v,
            Tok::Imag(v) => *coeff *= Complex64::new(0.0, v),
            Tok::LParen => {
                *coeff *= self.complex()?;
                match self.next().cloned() {
                    Some(Spanned {
                        tok: Tok::RParen, ..
                    }) => {}
                    Some(t) => return Err(err("expected `)`", &t.text, t.column)),
                    None => return Err(self.unexpected_end("`)`")),
                }
            }
            Tok::Ident(name) => {
                let var = self.variable(&name, tok.column)?;
                let mut e: u32 = 1;
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Caret)) {
                    self.pos += 1;
                    e = self.exponent()?;
                }
                let current = mono.exp(var) as u32;
                let total = current + e;
                let total = u8::try_from(total)
                    .map_err(|_| err("exponent overflow", &tok.text, tok.column))?;
                *mono = mono.with_exp(var, total);
            }
            _ => {
                return Err(err(
                    "expected a coefficient or variable",
                    &tok.text,
                    tok.column,
                ))
            }
        }
        Ok(())
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        match self.next().cloned() {
            Some(Spanned {
                tok: Tok::Num(v),
                text,
                column,
            }) => {
                if v.fract() != 0.0 || text.contains(['.', 'e', 'E']) {
                    return Err(err("exponent must be a nonnegative integer", &text, column));
                }
                if v > u8::MAX as f64 {
                    return Err(err("exponent overflow", &text, column));
                }
                Ok(v as u32)
            }
            Some(t) => Err(err("expected an integer exponent", &t.text, t.column)),
            None => Err(self.unexpected_end("an exponent")),
        }
    }

    fn complex(&mut self) -> Result<Complex64, ParseError> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut parts = 0;
        loop {
            let mut sign = 1.0;
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => self.pos += 1,
                Some(Tok::Minus) => {
                    sign = -1.0;
                    self.pos += 1;
                }
                _ if parts > 0 => break,
                _ => {}
            }
            match self.next().cloned() {
                Some(Spanned {
                    tok: Tok::Num(v), ..
                }) => total += Complex64::new(sign * v, 0.0),
                Some(Spanned {
                    tok: Tok::Imag(v), ..
                }) => total += Complex64::new(0.0, sign * v),
                Some(t) => return Err(err("expected a number", &t.text, t.column)),
                None => return Err(self.unexpected_end("a number")),
            }
            parts += 1;
            if parts == 2 {
                break;
            }
        }
        Ok(total)
    }

    fn variable(&self, name: &str, column: usize) -> Result<Var, ParseError> {
        let mut chars = name.chars();
        let family = chars.next();
        let index: Option<usize> = chars.as_str().parse().ok();
        let make: Option<fn(usize) -> Var> = match family {
            Some('q') => Some(Var::Q),
            Some('p') => Some(Var::P),
            Some('l') => Some(Var::Lambda),
            Some('t') => Some(Var::T),
            _ => None,
        };
        match (make, index) {
            (Some(make), Some(k)) if (1..=self.space.dim).contains(&k) => Ok(make(k - 1)),
            _ => Err(err("unknown variable", name, column)),
        }
    }
}

/// Parses a series literal into the given space. Terms beyond the
/// truncation are dropped.
pub fn parse_series(text: &str, space: &SeriesSpace) -> Result<TruncatedSeries, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        space: *space,
        end_column: text.chars().count() + 1,
    };
    parser.series()
}

fn fmt_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Shortest round-trip rendering of a coefficient: `2`, `-0.5`, `3i`,
/// `(2+1i)`.
pub fn format_coefficient(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_real(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt_real(c.im))
    } else if c.im < 0.0 {
        format!("({}-{}i)", fmt_real(c.re), fmt_real(-c.im))
    } else {
        format!("({}+{}i)", fmt_real(c.re), fmt_real(c.im))
    }
}

fn is_negative_simple(c: Complex64) -> bool {
    (c.im == 0.0 && c.re < 0.0) || (c.re == 0.0 && c.im < 0.0)
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.iter().enumerate() {
            let neg = is_negative_simple(*c);
            let shown = if neg { -*c } else { *c };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            f.write_str(&format_coefficient(shown))?;
            if *m != Monomial::one() {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Truncation;

    fn space(dim: usize) -> SeriesSpace {
        SeriesSpace::new(dim, Truncation::graded(10).unwrap()).unwrap()
    }

    #[test]
    fn two_term_series() {
        let s = parse_series("1.0*q1*p1 + 0.5*q1^3", &space(1)).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            s.coefficient(&Monomial::qp(&[3], &[0])),
            Complex64::new(0.5, 0.0)
        );
        assert_eq!(s.to_string(), "1*q1*p1 + 0.5*q1^3");
    }

    #[test]
    fn unknown_variable_reports_column() {
        let e = parse_series("q1*z3", &space(3)).unwrap_err();
        assert_eq!(e.token, "z3");
        assert_eq!(e.column, 4);
        let e = parse_series("q4", &space(3)).unwrap_err();
        assert_eq!(e.token, "q4");
    }

    #[test]
    fn complex_coefficient_roundtrip() {
        let sp = space(2);
        let s = parse_series("(2+1i)*q1^2*p2", &sp).unwrap();
        let m = Monomial::qp(&[2, 0], &[0, 1]);
        assert_eq!(s.coefficient(&m), Complex64::new(2.0, 1.0));
        let printed = s.to_string();
        assert_eq!(printed, "(2+1i)*q1^2*p2");
        assert_eq!(parse_series(&printed, &sp).unwrap(), s);
    }

    #[test]
    fn whitespace_and_signs() {
        let sp = space(2);
        let a = parse_series(" - 2 * q1 ^ 2 -0.25*p2 + 3i*l1*t2 ", &sp).unwrap();
        let b = parse_series("-2*q1^2-0.25*p2+3i*l1*t2", &sp).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "-0.25*p2 - 2*q1^2 + 3i*l1*t2");
    }

    #[test]
    fn exponent_overflow_is_rejected() {
        let e = parse_series("q1^300", &space(1)).unwrap_err();
        assert_eq!(e.message, "exponent overflow");
    }

    #[test]
    fn extreme_magnitudes_roundtrip() {
        let sp = space(1);
        let s = parse_series("1e-20*q1 + 123456789012345678*p1", &sp).unwrap();
        let printed = s.to_string();
        assert_eq!(parse_series(&printed, &sp).unwrap(), s);
    }

    #[test]
    fn terms_beyond_truncation_are_dropped() {
        let s = parse_series("q1^11 + p1", &space(1)).unwrap();
        assert_eq!(s.to_string(), "1*p1");
    }
}
