//! Pratt parser for the expression grammar.
//!
//! ```text
//! expr    := expr ('+' | '-' | '*' | '/') expr | '-' expr | '+' expr
//!          | primary ('^' exponent)?
//! primary := number | ident primes? | func '(' expr ')' | 'pi' | '(' expr ')'
//!          | 'integrate' '(' expr ',' dummy ',' expr ',' expr ')'
//! exponent:= ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! ```

use num::{BigInt, Num};

use super::canon::try_canonicalize;
use super::expr::{Expr, Func, Node, Rational, VarId};
use crate::jet::JetSpace;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String, usize),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { column, message: message.into() }
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, col) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, col));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let col = self.pos + 1;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, col));
        };
        if c.is_ascii_digit() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if matches!(self.src.get(self.pos), Some(b'.') | Some(b'e') | Some(b'E')) {
                return Err(syntax(col, "floating-point literals are not supported; write a rational such as 3/4"));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return Ok((Tok::Int(BigInt::from_str_radix(digits, 10).unwrap()), col));
        }
        if c == b'.' {
            return Err(syntax(col, "floating-point literals are not supported; write a rational such as 3/4"));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            let mut primes = 0;
            while self.src.get(self.pos) == Some(&b'\'') {
                primes += 1;
                self.pos += 1;
            }
            return Ok((Tok::Ident(name, primes), col));
        }
        self.pos += 1;
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'\'' => return Err(syntax(col, "prime must follow an identifier")),
            _ => {
                let ch = std::str::from_utf8(&self.src[col - 1..]).ok().and_then(|s| s.chars().next()).unwrap_or('?');
                return Err(syntax(col, format!("unexpected character `{ch}`")));
            }
        };
        Ok((tok, col))
    }
}

const BP_SUM: u8 = 1;
const BP_PRODUCT: u8 = 2;
const BP_UNARY: u8 = 3;

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    space: &'s JetSpace,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn col(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.col(), format!("expected {what}")))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, bp) = match self.peek() {
                Tok::Op(c @ ('+' | '-')) => (*c, BP_SUM),
                Tok::Op(c @ ('*' | '/')) => (*c, BP_PRODUCT),
                Tok::Op('^') => {
                    return Err(syntax(self.col(), "chained exponent; use parentheses"));
                }
                _ => break,
            };
            if bp <= min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(bp)?;
            lhs = match op {
                '+' => lhs + rhs,
                '-' => lhs - rhs,
                '*' => lhs * rhs,
                _ => Expr::from_node(Node::Div(lhs, rhs)),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.expr(BP_UNARY)?)
            }
            Tok::Op('+') => {
                self.bump();
                self.expr(BP_UNARY)
            }
            _ => {
                let base = self.primary()?;
                if *self.peek() == Tok::Op('^') {
                    self.bump();
                    let q = self.exponent()?;
                    return Ok(base.pow(q));
                }
                Ok(base)
            }
        }
    }

    fn exponent(&mut self) -> Result<Rational> {
        let col = self.col();
        let bad = || syntax(col, "exponent must be an integer or rational literal");
        let signed_int = |p: &mut Self| -> Result<BigInt> {
            let neg = if *p.peek() == Tok::Op('-') {
                p.bump();
                true
            } else {
                false
            };
            match p.bump().0 {
                Tok::Int(n) => Ok(if neg { -n } else { n }),
                _ => Err(bad()),
            }
        };
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let n = signed_int(self)?;
                let d = if *self.peek() == Tok::Op('/') {
                    self.bump();
                    match self.bump().0 {
                        Tok::Int(d) if d != BigInt::from(0) => d,
                        Tok::Int(_) => return Err(Error::DivisionByZero),
                        _ => return Err(bad()),
                    }
                } else {
                    BigInt::from(1)
                };
                if *self.peek() != Tok::RParen {
                    return Err(bad());
                }
                self.bump();
                Ok(Rational::new(n, d))
            }
            _ => Ok(Rational::from_integer(signed_int(self)?)),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, col) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr::num(Rational::from_integer(n))),
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name, primes) => self.identifier(name, primes, col),
            Tok::End => Err(syntax(col, "unexpected end of input")),
            Tok::RParen => Err(syntax(col, "unexpected `)`")),
            Tok::Comma => Err(syntax(col, "unexpected `,`")),
            Tok::Op(c) => Err(syntax(col, format!("unexpected operator `{c}`"))),
        }
    }

    fn identifier(&mut self, name: String, primes: usize, col: usize) -> Result<Expr> {
        let no_primes = |what: &str| -> Result<()> {
            if primes > 0 {
                Err(syntax(col, format!("primes are only allowed on coordinates, not on {what}")))
            } else {
                Ok(())
            }
        };
        if let Some(f) = Func::from_name(&name) {
            no_primes("functions")?;
            self.expect(Tok::LParen, "`(` after function name")?;
            let arg = self.expr(0)?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::func(f, arg));
        }
        if name == "integrate" {
            no_primes("functions")?;
            return self.integral();
        }
        if name == "pi" {
            no_primes("constants")?;
            return Ok(Expr::pi());
        }
        if let Some(v) = dummy_of(&name) {
            no_primes("integration variables")?;
            return Ok(Expr::var(v));
        }
        let v = self
            .space
            .lookup(&name)
            .ok_or_else(|| Error::UnknownIdentifier { name: name.clone(), column: col })?;
        match v.jet_order() {
            Some(0) => {
                if primes > self.space.max_order() as usize {
                    return Err(Error::PrimeOrderExceeded {
                        name: format!("{name}{}", "'".repeat(primes)),
                        order: primes,
                        max: self.space.max_order(),
                    });
                }
                Ok(Expr::var(VarId::jet(primes as u8, v.index)))
            }
            _ => {
                no_primes(&format!("`{name}`"))?;
                Ok(Expr::var(v))
            }
        }
    }

    fn integral(&mut self) -> Result<Expr> {
        self.expect(Tok::LParen, "`(` after integrate")?;
        let body = self.expr(0)?;
        self.expect(Tok::Comma, "`,`")?;
        let col = self.col();
        let dummy = match self.bump().0 {
            Tok::Ident(n, 0) => dummy_of(&n),
            _ => None,
        }
        .ok_or_else(|| syntax(col, "integration variable must be of the form _sN"))?;
        self.expect(Tok::Comma, "`,`")?;
        let lower = self.expr(0)?;
        self.expect(Tok::Comma, "`,`")?;
        let upper = self.expr(0)?;
        self.expect(Tok::RParen, "`)`")?;
        if lower.depends_on(dummy) || upper.depends_on(dummy) {
            return Err(Error::DummyInBounds);
        }
        Ok(Expr::integral(body, dummy, lower, upper))
    }
}

fn dummy_of(name: &str) -> Option<VarId> {
    name.strip_prefix("_s")?.parse().ok().map(VarId::dummy)
}

/// Parse `text` over the variables of `space`.
///
/// The result is validated: any subexpression dividing by something that is
/// identically zero is rejected with [`Error::DivisionByZero`].
pub fn parse(text: &str, space: &JetSpace) -> Result<Expr> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0, space };
    let e = p.expr(0)?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.col(), "unexpected trailing input"));
    }
    try_canonicalize(&e)?;
    Ok(e)
}
