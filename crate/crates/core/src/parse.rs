//! Text grammars for eta quotients (`eta(1)^-8*eta(4)^8`) and Eisenstein
//! elements (`8*E2(1)-32*E2(4)`).

use crate::arith::{parse_rational, Rational};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().map_or(0, char::len_utf8);
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// The offending token for error messages.
    fn token(&mut self) -> String {
        self.skip_ws();
        let rest = self.rest();
        let end = rest
            .char_indices()
            .skip(1)
            .find(|(_, c)| matches!(c, '*' | '+' | '-' | '(' | ')' | '^' | ' '))
            .map_or(rest.len(), |(i, _)| i);
        if rest.is_empty() {
            "<end of input>".to_string()
        } else {
            rest[..end].to_string()
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(Error::parse(self.token(), format!("expected `{s}`")))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let rest = self.rest();
        let sign_len = usize::from(rest.starts_with('-') || rest.starts_with('+'));
        let digits = rest[sign_len..].chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return Err(Error::parse(self.token(), "expected an integer"));
        }
        let text = &rest[..sign_len + digits];
        let value = text
            .parse::<i64>()
            .map_err(|_| Error::parse(text, "integer out of range"))?;
        self.pos += sign_len + digits;
        Ok(value)
    }

    fn positive(&mut self) -> Result<u64> {
        let start = self.token();
        let v = self.integer()?;
        if v <= 0 {
            return Err(Error::parse(start, "expected a positive integer"));
        }
        Ok(v as u64)
    }

    /// `p` or `p/q`, unsigned.
    fn rational(&mut self) -> Result<Rational> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .chars()
            .take_while(|c| c.is_ascii_digit() || *c == '/')
            .count();
        let text = &rest[..len];
        let r = parse_rational(text).ok_or_else(|| Error::parse(self.token(), "expected a rational p or p/q"))?;
        self.pos += len;
        Ok(r)
    }
}

/// Parses `eta(t)^r * ...`; a bare `eta(t)` has exponent 1 and `1` is the
/// empty product.
pub(crate) fn eta_terms(src: &str) -> Result<Vec<(u64, i64)>> {
    let mut cur = Cursor::new(src);
    if cur.eat("1") && cur.at_end() {
        return Ok(vec![]);
    }
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    loop {
        if !cur.eat("eta") {
            return Err(Error::parse(cur.token(), "expected `eta(t)`"));
        }
        cur.expect("(")?;
        let t = cur.positive()?;
        cur.expect(")")?;
        let r = if cur.eat("^") {
            if cur.eat("(") {
                let r = cur.integer()?;
                cur.expect(")")?;
                r
            } else {
                cur.integer()?
            }
        } else {
            1
        };
        out.push((t, r));
        if cur.at_end() {
            return Ok(out);
        }
        if !cur.eat("*") {
            return Err(Error::parse(cur.token(), "expected `*` between eta factors"));
        }
    }
}

/// Parses `c*Ek(t) +- ...`; returns the common weight and `(t, c)` terms.
pub(crate) fn eisenstein_terms(src: &str) -> Result<(u32, Vec<(u64, Rational)>)> {
    let mut cur = Cursor::new(src);
    let mut weight: Option<u32> = None;
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let negative = if cur.eat("-") {
            true
        } else if cur.eat("+") || first {
            false
        } else {
            return Err(Error::parse(cur.token(), "expected `+` or `-`"));
        };
        first = false;
        let coeff = if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            let c = cur.rational()?;
            cur.expect("*")?;
            c
        } else {
            Rational::from_integer(1.into())
        };
        if !cur.eat("E") {
            return Err(Error::parse(cur.token(), "expected `Ek(t)`"));
        }
        let k_token = cur.token();
        let k = cur.positive()? as u32;
        match weight {
            Some(w) if w != k => {
                return Err(Error::parse(k_token, format!("weight {k} differs from weight {w}")));
            }
            _ => weight = Some(k),
        }
        cur.expect("(")?;
        let t = cur.positive()?;
        cur.expect(")")?;
        out.push((t, if negative { -coeff } else { coeff }));
        if cur.at_end() {
            break;
        }
    }
    Ok((weight.expect("at least one term"), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn eta_grammar() {
        assert_eq!(eta_terms("eta(1)^-8*eta(4)^8").unwrap(), vec![(1, -8), (4, 8)]);
        assert_eq!(eta_terms("eta(2)^(20) * eta(1)^(-8)").unwrap(), vec![(2, 20), (1, -8)]);
        assert_eq!(eta_terms("eta(3)").unwrap(), vec![(3, 1)]);
        assert_eq!(eta_terms("1").unwrap(), vec![]);
    }

    #[test]
    fn eta_errors_name_the_token() {
        let err = eta_terms("eta(1)^x").unwrap_err();
        assert_eq!(err, Error::parse("x", "expected an integer"));
        let err = eta_terms("eta(0)^2").unwrap_err();
        assert!(matches!(err, Error::Parse { token, .. } if token == "0"));
        let err = eta_terms("eta(1)^2 eta(2)").unwrap_err();
        assert!(matches!(err, Error::Parse { token, .. } if token == "eta"));
    }

    #[test]
    fn eisenstein_grammar() {
        let (k, terms) = eisenstein_terms("8*E2(1)-32*E2(4)").unwrap();
        assert_eq!(k, 2);
        assert_eq!(terms, vec![(1, rat(8, 1)), (4, rat(-32, 1))]);
        let (k, terms) = eisenstein_terms("-E4(1) + 1/3*E4(2)").unwrap();
        assert_eq!(k, 4);
        assert_eq!(terms, vec![(1, rat(-1, 1)), (2, rat(1, 3))]);
        assert!(eisenstein_terms("E2(1) - E4(2)").is_err());
        let err = eisenstein_terms("8*F2(1)").unwrap_err();
        assert!(matches!(err, Error::Parse { token, .. } if token == "F2"));
    }
}
