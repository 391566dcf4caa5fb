//! Element literals such as `1 - 2*r*s + T*(r - 1)`, optionally followed by
//! a precision annotation `@p^n`.
//!
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' '-'? int)?
//! atom   := int | ring generator (T, z, w) | group generator | '(' expr ')'
//!
//! Positions in errors are 1-based character offsets.

use crate::coeffring::Ring;
use crate::error::{Error, Result};
use crate::groupring::GroupRingElem;
use crate::pgroup::Group;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u128),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            let mut v: u128 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(chars[i].to_digit(10).unwrap() as u128))
                    .ok_or(Error::Parse { pos: start + 1, msg: "integer too large".into() })?;
                i += 1;
            }
            out.push((Tok::Int(v), start + 1));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start + 1));
        } else if "+-*^()@".contains(c) {
            out.push((Tok::Sym(c), i + 1));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i + 1, msg: format!("unexpected character '{c}'") });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    ring: &'a Ring,
    group: &'a Group,
    n: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }
    fn pos(&self) -> usize {
        self.toks[self.i].1
    }
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<GroupRingElem> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GroupRingElem> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Sym('*') {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<GroupRingElem> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        let Tok::Int(e) = self.bump() else {
            return Err(Error::Parse { pos, msg: "expected an integer exponent".into() });
        };
        let e = u64::try_from(e).map_err(|_| Error::Parse { pos, msg: "exponent too large".into() })?;
        let b = if neg { base.invert().map_err(|_| Error::Parse { pos, msg: "negative power of a non-unit".into() })? } else { base };
        Ok(b.pow(e))
    }

    fn atom(&mut self) -> Result<GroupRingElem> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => {
                let m = self.ring.modulus(self.n) as u128;
                Ok(GroupRingElem::scalar(&self.ring.from_int((v % m) as i64, self.n), self.group))
            }
            Tok::Ident(name) => {
                if let Some(gi) = self.group.generator_names().iter().position(|s| *s == name) {
                    let g = self.group.generators()[gi];
                    return Ok(GroupRingElem::group_elem(self.ring, self.group, g, self.n));
                }
                let mut ch = name.chars();
                if let (Some(c), None) = (ch.next(), ch.next()) {
                    if let Some(r) = self.ring.generator(c, self.n) {
                        return Ok(GroupRingElem::scalar(&r, self.group));
                    }
                }
                Err(Error::Parse { pos, msg: format!("unknown name '{name}'") })
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                if *self.peek() != Tok::Sym(')') {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(Error::Parse { pos, msg: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(Error::Parse { pos, msg: format!("unexpected '{c}'") }),
        }
    }
}

/// Parse an element of R[G] at precision n.  A trailing `@p^k` overrides
/// the precision (p must match the ring).
pub fn parse_element(src: &str, ring: &Ring, group: &Group, n: u32) -> Result<GroupRingElem> {
    let toks = tokenize(src)?;
    let mut prec = n;
    let mut body = toks.clone();
    if let Some(at) = toks.iter().position(|t| t.0 == Tok::Sym('@')) {
        let tail: Vec<Tok> = toks[at + 1..].iter().map(|t| t.0.clone()).collect();
        let bad = || Error::Parse { pos: toks[at].1, msg: "precision annotation must read @p^n".into() };
        match tail.as_slice() {
            [Tok::Int(p), Tok::Sym('^'), Tok::Int(k), Tok::End] if *p == ring.p() as u128 => {
                prec = u32::try_from(*k).map_err(|_| bad())?;
                if prec == 0 || prec > ring.cap() {
                    return Err(bad());
                }
            }
            _ => return Err(bad()),
        }
        body.truncate(at);
        body.push((Tok::End, toks[at].1));
    }
    let mut ps = Parser { toks: body, i: 0, ring, group, n: prec };
    let e = ps.expr()?;
    if *ps.peek() != Tok::End {
        return ps.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{RingKind, RingSpec};
    use crate::pgroup::build_group;

    fn setup(p: u64, g: &str, r: &str, n: u32) -> (Ring, Group) {
        (Ring::new(&RingSpec::new(p, RingKind::parse(r).unwrap(), n)).unwrap(), build_group(g, p).unwrap())
    }

    #[test]
    fn parses_and_prints() {
        let (r, d8) = setup(2, "D8", "powser:4", 4);
        let x = parse_element("1 - 2*r*s + T*(r - 1)", &r, &d8, 4).unwrap();
        let again = parse_element(&x.to_string(), &r, &d8, 4).unwrap();
        assert_eq!(x, again);
        let y = parse_element("r*s - s*r", &r, &d8, 4).unwrap();
        assert_eq!(y.augment(), r.zero(4));
        assert!(!y.is_zero());
        let z = parse_element("r^-1 - r^3", &r, &d8, 4).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn precision_annotation() {
        let (r, c2) = setup(2, "C2", "Zp", 4);
        let x = parse_element("1 - 2*c @2^6", &r, &c2, 4).unwrap();
        assert_eq!(x.prec(), 6);
        assert_eq!(x.to_string(), "1 + 62*c");
        assert!(parse_element("1 @3^6", &r, &c2, 4).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let (r, c2) = setup(2, "C2", "Zp", 4);
        assert_eq!(parse_element("1 +", &r, &c2, 4).unwrap_err(), Error::Parse { pos: 4, msg: "unexpected end of input".into() });
        assert!(matches!(parse_element("1 + q", &r, &c2, 4), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_element("(1 + c", &r, &c2, 4), Err(Error::Parse { pos: 7, .. })));
        assert!(matches!(parse_element("1 # 2", &r, &c2, 4), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_element("T", &r, &c2, 4), Err(Error::Parse { pos: 1, .. })));
    }
}
