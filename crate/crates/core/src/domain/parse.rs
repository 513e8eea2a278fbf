//! Recursive-descent parser for ring expressions:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | identifier | '(' expr ')'
//! ```

use std::sync::Arc;

use num_bigint::BigInt;

use super::element::Element;
use super::DomainPresentation;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    pres: &'a Arc<DomainPresentation>,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        position,
        message: message.into(),
    })
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> Result<Element> {
        let mut acc = self.term()?;
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

    fn term(&mut self) -> Result<Element> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Element> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Element> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = {
            self.skip_ws();
            self.pos
        };
        if self.peek() == Some('-') {
            return err(at, "negative exponent");
        }
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return err(at, "expected a non-negative integer exponent");
        }
        let e: u64 = digits.parse().or_else(|_| err(at, "exponent too large"))?;
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Element> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    self.skip_ws();
                    return err(self.pos, "expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.take_while(|c| c.is_ascii_digit());
                let n: BigInt = digits.parse().expect("digits");
                Ok(Element::from_bigint(self.pres, n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                match self.pres.var_index(name) {
                    Some(_) => Element::var(self.pres, name),
                    None => err(at, format!("unknown identifier {name:?}")),
                }
            }
            Some(c) => err(at, format!("unexpected character {c:?}")),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// Parses `text` into a normal-form element of the presentation.
pub fn parse_element(text: &str, presentation: &Arc<DomainPresentation>) -> Result<Element> {
    let mut p = Parser {
        src: text,
        pos: 0,
        pres: presentation,
    };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return err(p.pos, format!("unexpected character {c:?}"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::IntPoly;

    fn pres() -> Arc<DomainPresentation> {
        Arc::new(
            DomainPresentation::new(
                vec!["t".into()],
                vec![
                    ("r2".into(), IntPoly::from_i64s(&[-2, 0, 1]), None),
                    ("i".into(), IntPoly::from_i64s(&[1, 0, 1]), None),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn spec_examples() {
        let p = pres();
        assert_eq!(parse_element("r2 + 1", &p).unwrap().to_string(), "r2 + 1");
        assert_eq!(parse_element("i^2", &p).unwrap().to_string(), "-1");
        assert_eq!(parse_element("(3 - r2)*(3 + r2)", &p).unwrap().to_string(), "7");
        assert_eq!(parse_element("-t^2", &p).unwrap().to_string(), "-t^2");
        assert_eq!(parse_element(" 2 * ( t - - 1 ) ", &p).unwrap().to_string(), "2*t + 2");
    }

    #[test]
    fn errors_carry_positions() {
        let p = pres();
        let pos = |s: &str| match parse_element(s, &p) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("expected parse error for {s:?}, got {other:?}"),
        };
        assert_eq!(pos("t + y"), 4);
        assert_eq!(pos("t^-1"), 2);
        assert_eq!(pos("(t + 1"), 6);
        assert_eq!(pos("t 1"), 2);
        assert_eq!(pos(""), 0);
        assert_eq!(pos("t / 2"), 2);
    }

    #[test]
    fn display_roundtrip() {
        let p = pres();
        for s in ["(t + r2)^3 - 4*i*t", "t^5*r2*i - 7", "0", "-(i + r2)^4"] {
            let e = parse_element(s, &p).unwrap();
            assert_eq!(parse_element(&e.to_string(), &p).unwrap(), e, "{s}");
        }
    }
}
