//! Parser for the expression mini-language.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' (int | '(' '-'? int ')'))?
//! atom    := number | 'x' | func '(' expr ')' | '(' expr ')' | '(' real ',' real ')'
//! func    := exp | sin | cos | sinh | cosh
//! ```
//!
//! `(a,b)` is the complex constant `a + ib`. The printer in [`crate::expr`]
//! emits exactly this grammar.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{Func, ScalarFn};

/// Parses a complete expression in the variable `x`.
pub fn parse_expr(input: &str) -> Result<ScalarFn> {
    let mut p = Parser { src: input.as_bytes(), pos: 0, depth: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

// Nesting limit; keeps hostile input from overflowing the stack.
const MAX_DEPTH: usize = 256;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
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
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<ScalarFn> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<ScalarFn> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                acc = acc / self.unary()?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ScalarFn> {
        if self.eat(b'-') {
            self.enter()?;
            let f = -self.unary()?;
            self.depth -= 1;
            Ok(f)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<ScalarFn> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let k = if self.eat(b'(') {
            let negative = self.eat(b'-');
            let k = self.integer()?;
            self.expect(b')')?;
            if negative {
                -k
            } else {
                k
            }
        } else {
            self.integer()?
        };
        Ok(base.powi(k))
    }

    fn integer(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| Error::Parse { offset: start, message: "exponent out of range".into() })
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.src.get(p.pos).is_some_and(u8::is_ascii_digit) {
                p.pos += 1;
            }
            p.pos > s
        };
        let mut any = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            any |= digits(self);
        }
        if !any {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if !digits(self) {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Parse { offset: start, message: format!("bad number '{text}'") }),
        }
    }

    fn signed_number(&mut self) -> Result<f64> {
        let negative = self.eat(b'-');
        let v = self.number()?;
        Ok(if negative { -v } else { v })
    }

    // After an opening parenthesis: a complex literal if the contents are
    // `real , real`, otherwise a grouped expression.
    fn paren(&mut self) -> Result<ScalarFn> {
        let mark = self.pos;
        if let Ok(re) = self.signed_number() {
            if self.eat(b',') {
                let im = self.signed_number()?;
                self.expect(b')')?;
                return Ok(ScalarFn::constant(Complex64::new(re, im)));
            }
        }
        self.pos = mark;
        let f = self.expr()?;
        self.expect(b')')?;
        Ok(f)
    }

    fn atom(&mut self) -> Result<ScalarFn> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.paren()
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(ScalarFn::real(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                if name == "x" {
                    return Ok(ScalarFn::x());
                }
                let func = Func::from_name(name)
                    .ok_or_else(|| Error::Parse { offset: start, message: format!("unknown name '{name}'") })?;
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(ScalarFn::call(func, &arg))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
