//! Tokenizer shared by operator strings (`e1^2 (e1 e3)^2`) and divided-power
//! monomials (`t2^p t4^2p`).

use crate::error::{Error, Result};

/// A flat factor sequence `[(index, exponent)]`, read left to right.
pub type Factors = Vec<(u8, u32)>;

/// Parses factors with the given letter prefix. Exponents may be integers or,
/// when `p` is supplied, `p`/`kp` multiples of it. Parenthesized groups accept
/// an exponent and are expanded by repetition. A trailing `1` or `·1` is
/// ignored.
pub fn parse_factors(src: &str, prefix: char, p: Option<u32>) -> Result<Factors> {
    let mut parser = Parser { chars: src.chars().collect(), pos: 0, prefix, p };
    let out = parser.sequence(0)?;
    parser.skip_ws();
    if parser.pos != parser.chars.len() {
        return Err(Error::Parse(format!("unexpected `{}` in `{src}`", parser.chars[parser.pos])));
    }
    Ok(out)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    prefix: char,
    p: Option<u32>,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && matches!(self.chars[self.pos], ' ' | '\t' | '·' | '*') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self, depth: usize) -> Result<Factors> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Ok(out),
                Some(')') if depth > 0 => return Ok(out),
                Some('(') => {
                    self.pos += 1;
                    let inner = self.sequence(depth + 1)?;
                    if self.peek() != Some(')') {
                        return Err(Error::Parse("unbalanced parenthesis".into()));
                    }
                    self.pos += 1;
                    let k = self.exponent()?;
                    for _ in 0..k {
                        out.extend_from_slice(&inner);
                    }
                }
                Some('1') if depth == 0 && self.rest_is_blank(1) => {
                    self.pos += 1;
                }
                Some(c) if c == self.prefix || c == self.alt_prefix() => {
                    self.pos += 1;
                    let idx = self.number()?;
                    if idx == 0 || idx > u8::MAX as u32 {
                        return Err(Error::Parse(format!("bad index {idx}")));
                    }
                    let k = self.exponent()?;
                    out.push((idx as u8, k));
                }
                Some(c) => return Err(Error::Parse(format!("unexpected `{c}`"))),
            }
        }
    }

    fn alt_prefix(&self) -> char {
        match self.prefix {
            'e' => 'ẽ',
            't' => 'θ',
            c => c,
        }
    }

    fn rest_is_blank(&self, from: usize) -> bool {
        self.chars[self.pos + from..].iter().all(|c| c.is_whitespace())
    }

    fn number(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse("expected a number".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse(format!("number `{s}` too large")))
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let braced = self.peek() == Some('{');
        if braced {
            self.pos += 1;
        }
        let coeff = if self.peek().is_some_and(|c| c.is_ascii_digit()) { Some(self.number()?) } else { None };
        let value = if self.peek() == Some('p') {
            self.pos += 1;
            let p = self.p.ok_or_else(|| Error::Parse("exponent uses `p` but no p was given".into()))?;
            coeff.unwrap_or(1) * p
        } else {
            coeff.ok_or_else(|| Error::Parse("expected an exponent".into()))?
        };
        if braced {
            if self.peek() != Some('}') {
                return Err(Error::Parse("unbalanced brace".into()));
            }
            self.pos += 1;
        }
        Ok(value)
    }
}

/// Renders factors as `x1^2 x3` with the given prefix.
pub fn render_factors(f: &[(u8, u32)], prefix: char) -> String {
    f.iter()
        .map(|&(i, k)| if k == 1 { format!("{prefix}{i}") } else { format!("{prefix}{i}^{k}") })
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_grouped() {
        assert_eq!(parse_factors("e1^2 e3 e2^4", 'e', None).unwrap(), vec![(1, 2), (3, 1), (2, 4)]);
        assert_eq!(
            parse_factors("(e1 e3) e2^2 (e1 e3)", 'e', None).unwrap(),
            vec![(1, 1), (3, 1), (2, 2), (1, 1), (3, 1)]
        );
        assert_eq!(parse_factors("(e2 e4)^2", 'e', None).unwrap(), vec![(2, 1), (4, 1), (2, 1), (4, 1)]);
        assert_eq!(parse_factors("e2 e1 ·1", 'e', None).unwrap(), vec![(2, 1), (1, 1)]);
    }

    #[test]
    fn symbolic_exponents() {
        let f = parse_factors("t2^p t3^2p t1^{3p}", 't', Some(2)).unwrap();
        assert_eq!(f, vec![(2, 2), (3, 4), (1, 6)]);
        assert!(parse_factors("t2^p", 't', None).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_factors("e0", 'e', None).is_err());
        assert!(parse_factors("(e1", 'e', None).is_err());
        assert!(parse_factors("f1", 'e', None).is_err());
        assert!(parse_factors("e1^", 'e', None).is_err());
    }
}
