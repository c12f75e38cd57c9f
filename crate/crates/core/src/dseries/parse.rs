//! Series mini-language.
//!
//! ```text
//! series  := "zeta"
//!          | "L(" constraint ("," constraint)* ")"
//!          | "conj(" series ")" | "inv(" series ")"
//!          | "conv(" series "," series ")"
//!          | "lin(" term (term)* ")"
//!          | "explicit(" complex ("," complex)* ")"
//! term    := ["+"|"-"] [complex "*"] series
//! complex := real | real "i" | "i" | real ("+"|"-") real "i" | "(" complex ")"
//! constraint := "mod=" int | "index=" int | "primitive" | "order=" int
//!             | "parity=" ("even"|"odd") | "value(" int ")=" value
//! value   := "0" | "1" | "-1" | "i" | "-i" | "e(" int "/" int ")"
//! ```
//!
//! A sign in front of a literal coefficient is part of the literal, so
//! `lin(zeta - 1+2i*zeta)` has second coefficient `-1+2i`.

use num_complex::Complex64;

use super::spec::SeriesSpec;
use crate::characters::{resolve_character, CharConstraint, ExactValue};
use crate::error::{Error, Result};

pub fn parse_series(src: &str) -> Result<SeriesSpec> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let spec = p.series()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(spec)
}

/// Parse a complex literal such as `-0.5+1.25i`, `2i` or `3`.
pub fn parse_complex(src: &str) -> Result<Complex64> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let z = p.complex()?.ok_or_else(|| p.err("expected a complex number"))?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(z)
}

/// Split a comma separated list at commas outside parentheses.
pub fn split_top_level(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in src.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn series(&mut self) -> Result<SeriesSpec> {
        let start = self.pos;
        let name = self.ident();
        let spec = match name.as_str() {
            "zeta" => SeriesSpec::Zeta,
            "L" => {
                self.expect(b'(')?;
                self.character()?
            }
            "conj" => {
                self.expect(b'(')?;
                let s = self.series()?;
                self.expect(b')')?;
                s.conj()
            }
            "inv" => {
                self.expect(b'(')?;
                let s = self.series()?;
                self.expect(b')')?;
                SeriesSpec::inverse(s)
            }
            "conv" => {
                self.expect(b'(')?;
                let a = self.series()?;
                self.expect(b',')?;
                let b = self.series()?;
                self.expect(b')')?;
                SeriesSpec::convolution(a, b)
            }
            "lin" => {
                self.expect(b'(')?;
                let mut terms = vec![self.term()?];
                // A sign between terms belongs to the next coefficient.
                while matches!(self.peek(), Some(b'+') | Some(b'-')) {
                    terms.push(self.term()?);
                }
                self.expect(b')')?;
                SeriesSpec::linear(terms)
            }
            "explicit" => {
                self.expect(b'(')?;
                let mut v = Vec::new();
                loop {
                    v.push(self.complex()?.ok_or_else(|| self.err("expected a coefficient"))?);
                    if !self.eat(b',') {
                        break;
                    }
                }
                self.expect(b')')?;
                SeriesSpec::Explicit(v)
            }
            "" => return Err(self.err("expected a series")),
            other => {
                self.pos = start;
                return Err(self.err(&format!("unknown series '{other}'")));
            }
        };
        Ok(spec)
    }

    fn term(&mut self) -> Result<(Complex64, SeriesSpec)> {
        let save = self.pos;
        if let Some(c) = self.complex()? {
            if self.eat(b'*') {
                return Ok((c, self.series()?));
            }
        }
        self.pos = save;
        let sign = if self.eat(b'-') {
            -1.0
        } else {
            self.eat(b'+');
            1.0
        };
        let save = self.pos;
        if let Some(c) = self.complex()? {
            if self.eat(b'*') {
                return Ok((c * sign, self.series()?));
            }
        }
        self.pos = save;
        Ok((Complex64::new(sign, 0.0), self.series()?))
    }

    fn number(&mut self) -> Option<f64> {
        self.ws();
        let start = self.pos;
        let s = self.s;
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let st = *i;
            while *i < s.len() && s[*i].is_ascii_digit() {
                *i += 1;
            }
            *i > st
        };
        let mut any = digits(&mut i);
        if i < s.len() && s[i] == b'.' {
            i += 1;
            any |= digits(&mut i);
        }
        if !any {
            return None;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) {
                i = j;
            }
        }
        let v = std::str::from_utf8(&s[start..i]).ok()?.parse().ok()?;
        self.pos = i;
        Some(v)
    }

    /// Real or imaginary part: `[sign] (number ["i"] | "i")`. Returns the
    /// value and whether it was imaginary.
    fn part(&mut self) -> Option<(f64, bool)> {
        let save = self.pos;
        let sign = if self.eat(b'-') {
            -1.0
        } else {
            self.eat(b'+');
            1.0
        };
        let v = self.number();
        self.ws();
        let imag = self.pos < self.s.len() && self.s[self.pos] == b'i' && !self.ident_follows(self.pos + 1);
        match (v, imag) {
            (Some(v), true) => {
                self.pos += 1;
                Some((sign * v, true))
            }
            (Some(v), false) => Some((sign * v, false)),
            (None, true) => {
                self.pos += 1;
                Some((sign, true))
            }
            (None, false) => {
                self.pos = save;
                None
            }
        }
    }

    fn ident_follows(&self, i: usize) -> bool {
        i < self.s.len() && (self.s[i].is_ascii_alphanumeric() || self.s[i] == b'_')
    }

    fn complex(&mut self) -> Result<Option<Complex64>> {
        let save = self.pos;
        if self.eat(b'(') {
            if let Some(z) = self.complex()? {
                if self.eat(b')') {
                    return Ok(Some(z));
                }
            }
            self.pos = save;
            return Ok(None);
        }
        let Some((a, a_imag)) = self.part() else {
            return Ok(None);
        };
        if a_imag {
            return Ok(Some(Complex64::new(0.0, a)));
        }
        let mid = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            if let Some((b, true)) = self.part() {
                return Ok(Some(Complex64::new(a, b)));
            }
        }
        self.pos = mid;
        Ok(Some(Complex64::new(a, 0.0)))
    }

    fn int(&mut self) -> Result<i64> {
        self.ws();
        let neg = self.eat(b'-');
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let v: i64 = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("integer overflow"))?;
        Ok(if neg { -v } else { v })
    }

    fn exact_value(&mut self) -> Result<ExactValue> {
        let save = self.pos;
        if self.ident() == "e" {
            self.expect(b'(')?;
            let num = self.int()?;
            self.expect(b'/')?;
            let den = self.int()?;
            self.expect(b')')?;
            if den <= 0 {
                return Err(self.err("denominator must be positive"));
            }
            return Ok(ExactValue::Root { num, den: den as u64 });
        }
        self.pos = save;
        let z = self.complex()?.ok_or_else(|| self.err("expected a character value"))?;
        let r = |num, den| Ok(ExactValue::Root { num, den });
        match (z.re, z.im) {
            (x, y) if x == 0.0 && y == 0.0 => Ok(ExactValue::Zero),
            (x, y) if x == 1.0 && y == 0.0 => r(0, 1),
            (x, y) if x == -1.0 && y == 0.0 => r(1, 2),
            (x, y) if x == 0.0 && y == 1.0 => r(1, 4),
            (x, y) if x == 0.0 && y == -1.0 => r(3, 4),
            _ => Err(self.err("character values must be 0, 1, -1, i, -i or e(k/m)")),
        }
    }

    fn character(&mut self) -> Result<SeriesSpec> {
        let mut modulus = None;
        let mut cons = Vec::new();
        loop {
            let key = self.ident();
            match key.as_str() {
                "mod" => {
                    self.expect(b'=')?;
                    let q = self.int()?;
                    if q <= 0 {
                        return Err(self.err("modulus must be positive"));
                    }
                    modulus = Some(q as u64);
                }
                "index" => {
                    self.expect(b'=')?;
                    cons.push(CharConstraint::Index(self.int()?.max(0) as usize));
                }
                "order" => {
                    self.expect(b'=')?;
                    cons.push(CharConstraint::Order(self.int()?.max(0) as u64));
                }
                "primitive" => cons.push(CharConstraint::Primitive),
                "parity" => {
                    self.expect(b'=')?;
                    let p = match self.ident().as_str() {
                        "even" => 1,
                        "odd" => -1,
                        "" => match self.int()? {
                            1 => 1,
                            -1 => -1,
                            _ => return Err(self.err("parity must be even, odd, 1 or -1")),
                        },
                        _ => return Err(self.err("parity must be even, odd, 1 or -1")),
                    };
                    cons.push(CharConstraint::Parity(p));
                }
                "value" => {
                    self.expect(b'(')?;
                    let n = self.int()?;
                    self.expect(b')')?;
                    self.expect(b'=')?;
                    cons.push(CharConstraint::Value { n, value: self.exact_value()? });
                }
                _ => return Err(self.err(&format!("unknown character constraint '{key}'"))),
            }
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b')')?;
        let q = modulus.ok_or_else(|| self.err("character needs mod=Q"))?;
        Ok(SeriesSpec::character(resolve_character(q, &cons)?))
    }
}

// Series travel through JSON in their canonical text form.
impl serde::Serialize for SeriesSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SeriesSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(d)?;
        parse_series(&text).map_err(serde::de::Error::custom)
    }
}
