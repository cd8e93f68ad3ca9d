//! Text grammar for group-ring elements and matrices.
//!
//! ```text
//! matrix  := '[' row (';' row)* ']' | expr
//! row     := expr (',' expr)*
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := coeff ['*'] [word] | word
//! coeff   := int ['/' int] | '(' ['-'] int ['/' int] ')'    (denominator a power of two)
//! word    := factor ((' ' | '.')* factor)*                  (product in the written order)
//! factor  := 'e' | 't' ['_' k] ['^' ['-'] j] | 'u' ['_' k] ['[' sites ']']
//!          | 'v' '[' bits ']' | 'phi' n
//! ```
//!
//! `t_k` is the shift along coordinate `k` (plain `t` means `t_0`), `u_k[j1,j2]` the product of
//! the track-`k` lamps at the listed sites (plain `u` means `u_0[0]`), `v[b1,b2]` the element of
//! the finite part with the listed bits set and `phiN` the `N`-th automorphism.

use std::sync::Arc;

use super::element::GroupElement;
use super::ring::{GroupRingElement, GroupRingMatrix};
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use crate::linalg::Dyadic;

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    group: &'a GroupSpec,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, group: &'a GroupSpec) -> Self {
        Parser { src, chars: src.chars().collect(), pos: 0, group }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {} in {:?}", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn uint(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("number out of range"))
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let n = self.uint()? as i64;
        Ok(if neg { -n } else { n })
    }

    fn int_list(&mut self) -> Result<Vec<i64>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(self.int()?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn coeff(&mut self) -> Result<Dyadic> {
        self.skip_ws();
        let paren = self.eat('(');
        let start = self.pos;
        self.int()?;
        if self.eat('/') {
            self.skip_ws();
            self.uint()?;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if paren {
            self.expect(')')?;
        }
        text.replace(' ', "").parse::<Dyadic>()
    }

    fn track(&mut self) -> Result<usize> {
        if self.peek() == Some('_') {
            self.pos += 1;
            let k = self.uint()? as usize;
            if k >= self.group.shift_rank() {
                return Err(self.err(&format!("track {k} but the group has {} shift(s)", self.group.shift_rank())));
            }
            Ok(k)
        } else if self.group.shift_rank() == 0 {
            Err(self.err("group has no shift coordinates"))
        } else {
            Ok(0)
        }
    }

    fn starts_factor(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), Some('e' | 't' | 'u' | 'v' | 'p'))
    }

    fn factor(&mut self) -> Result<GroupElement> {
        self.skip_ws();
        let g = self.group;
        match self.peek() {
            Some('e') => {
                self.pos += 1;
                Ok(g.identity())
            }
            Some('t') => {
                self.pos += 1;
                let k = self.track()?;
                let j = if self.peek() == Some('^') {
                    self.pos += 1;
                    self.int()?
                } else {
                    1
                };
                Ok(GroupElement::shift(g, k, j))
            }
            Some('u') => {
                self.pos += 1;
                let k = self.track()?;
                self.skip_ws();
                let sites = if self.peek() == Some('[') { self.int_list()? } else { vec![0] };
                let mut x = g.identity();
                for s in sites {
                    x = g.mul(&x, &GroupElement::lamp(g, k, s));
                }
                Ok(x)
            }
            Some('v') => {
                self.pos += 1;
                let mut bits = 0u64;
                for b in self.int_list()? {
                    if b < 0 || b as usize >= g.finite_bits() {
                        return Err(self.err(&format!("finite bit {b} out of range")));
                    }
                    bits ^= 1 << b;
                }
                Ok(GroupElement::finite(g, bits))
            }
            Some('p') => {
                for c in "phi".chars() {
                    if self.peek() != Some(c) {
                        return Err(self.err("expected 'phi'"));
                    }
                    self.pos += 1;
                }
                let n = self.uint()? as usize;
                if n >= g.aut().order() {
                    return Err(self.err(&format!("automorphism index {n} out of range")));
                }
                Ok(GroupElement::aut(g, n))
            }
            _ => Err(self.err("expected a group word")),
        }
    }

    fn word(&mut self) -> Result<GroupElement> {
        let mut x = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('.') {
                self.pos += 1;
            }
            if !self.starts_factor() {
                return Ok(x);
            }
            x = self.group.mul(&x, &self.factor()?);
        }
    }

    fn term(&mut self) -> Result<(Dyadic, GroupElement)> {
        self.skip_ws();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '(' || c == '-') {
            let c = self.coeff()?;
            let star = self.eat('*');
            if star || self.starts_factor() {
                return Ok((c, self.word()?));
            }
            return Ok((c, self.group.identity()));
        }
        Ok((Dyadic::from_int(1), self.word()?))
    }

    fn expr(&mut self, group: &Arc<GroupSpec>) -> Result<GroupRingElement> {
        let mut out = GroupRingElement::zero(group);
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let (c, g) = self.term()?;
            let c = if sign < 0 { -c } else { c };
            out.add_term(g, c);
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(out);
            }
        }
    }
}

pub fn parse_word(group: &GroupSpec, s: &str) -> Result<GroupElement> {
    let mut p = Parser::new(s, group);
    let w = p.word()?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(w)
}

pub fn parse_element(group: &Arc<GroupSpec>, s: &str) -> Result<GroupRingElement> {
    let mut p = Parser::new(s, group);
    let x = p.expr(group)?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(x)
}

/// Parses `[a, b; c, d]`, or a bare expression as a 1x1 matrix.
pub fn parse_matrix(group: &Arc<GroupSpec>, s: &str) -> Result<GroupRingMatrix> {
    let mut p = Parser::new(s, group);
    if !p.eat('[') {
        let x = p.expr(group)?;
        if !p.at_end() {
            return Err(p.err("trailing input"));
        }
        return Ok(GroupRingMatrix::scalar(x));
    }
    let mut rows = vec![Vec::new()];
    loop {
        rows.last_mut().expect("nonempty").push(p.expr(group)?);
        if p.eat(',') {
            continue;
        }
        if p.eat(';') {
            rows.push(Vec::new());
            continue;
        }
        p.expect(']')?;
        break;
    }
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    GroupRingMatrix::from_rows(group, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lamp() -> Arc<GroupSpec> {
        Arc::new(GroupSpec::lamplighter())
    }

    #[test]
    fn lamplighter_operator() {
        let g = lamp();
        let x = parse_element(&g, "t + t^-1 + t u + u t^-1").unwrap();
        assert_eq!(x.len(), 4);
        let t = GroupElement::shift(&g, 0, 1);
        let u = GroupElement::lamp(&g, 0, 0);
        assert!(x.coefficient(&g.mul(&t, &u)).is_some());
        assert!(x.coefficient(&g.mul(&u, &g.inv(&t))).is_some());
    }

    #[test]
    fn coefficients() {
        let g = lamp();
        let x = parse_element(&g, "1/2 + (-1/2) * u").unwrap();
        assert_eq!(x.coefficient(&g.identity()), Some(&Dyadic::half()));
        assert_eq!(x.coefficient(&GroupElement::lamp(&g, 0, 0)), Some(&-Dyadic::half()));
        assert!(parse_element(&g, "1/3 * t").is_err());
        assert!(parse_element(&g, "t +").is_err());
    }

    #[test]
    fn display_roundtrip() {
        let g = lamp();
        for s in ["3/4 * u[1,-2] t^3 - 2 * e", "t u t^-1", "-u[5]"] {
            let x = parse_element(&g, s).unwrap();
            assert_eq!(parse_element(&g, &x.to_string()).unwrap(), x, "{s}");
        }
    }

    #[test]
    fn matrices() {
        let g = lamp();
        let m = parse_matrix(&g, "[t, u[0,1]; 0, e]").unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert!(m.get(1, 0).is_zero());
        assert!(parse_matrix(&g, "[t, e; e]").is_err());
    }

    #[test]
    fn multi_track_and_finite() {
        let g = Arc::new(GroupSpec::with_full_aut(2, 3).unwrap());
        let x = parse_word(&g, "u_1[2] v[0,2] t_0^-1 t_1 phi5").unwrap();
        assert_eq!(x.finite_bits(), 0b101);
        assert_eq!(x.shift_vector(), &[-1, 1]);
        assert_eq!(x.aut_index(), 5);
        assert_eq!(parse_word(&g, &x.to_string()).unwrap(), x);
        assert!(parse_word(&g, "u_2").is_err());
        assert!(parse_word(&g, "v[3]").is_err());
    }
}
