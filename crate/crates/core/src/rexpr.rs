//! Rational expressions in the formal arguments `x`, `y` and the parameters
//! `p`, `q`: the definition language for generic deformation functions.
//!
//! Grammar: `+ - * / ^` with integer exponents, parentheses, integer and
//! `num/den` literals. Division by zero at evaluation time is reported as a
//! pole.

use crate::error::{Error, Result};
use crate::scalar::{pow_i, Rat};
use num::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum RExpr {
    Num(Rat),
    Var(Var),
    Neg(Box<RExpr>),
    Add(Box<RExpr>, Box<RExpr>),
    Sub(Box<RExpr>, Box<RExpr>),
    Mul(Box<RExpr>, Box<RExpr>),
    Div(Box<RExpr>, Box<RExpr>),
    Pow(Box<RExpr>, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    P,
    Q,
}

impl fmt::Display for RExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RExpr::Num(r) => write!(f, "{r}"),
            RExpr::Var(Var::X) => write!(f, "x"),
            RExpr::Var(Var::Y) => write!(f, "y"),
            RExpr::Var(Var::P) => write!(f, "p"),
            RExpr::Var(Var::Q) => write!(f, "q"),
            RExpr::Neg(e) => write!(f, "-({e})"),
            RExpr::Add(a, b) => write!(f, "({a} + {b})"),
            RExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            RExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            RExpr::Div(a, b) => write!(f, "({a} / {b})"),
            RExpr::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}

pub struct Env<'a> {
    pub x: &'a Rat,
    pub y: &'a Rat,
    pub p: &'a Rat,
    pub q: &'a Rat,
}

impl RExpr {
    pub fn parse(src: &str) -> Result<RExpr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Config(format!(
                "trailing input in expression at token {}",
                p.pos
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &Env) -> Result<Rat> {
        match self {
            RExpr::Num(r) => Ok(r.clone()),
            RExpr::Var(Var::X) => Ok(env.x.clone()),
            RExpr::Var(Var::Y) => Ok(env.y.clone()),
            RExpr::Var(Var::P) => Ok(env.p.clone()),
            RExpr::Var(Var::Q) => Ok(env.q.clone()),
            RExpr::Neg(e) => Ok(-e.eval(env)?),
            RExpr::Add(a, b) => Ok(a.eval(env)? + b.eval(env)?),
            RExpr::Sub(a, b) => Ok(a.eval(env)? - b.eval(env)?),
            RExpr::Mul(a, b) => Ok(a.eval(env)? * b.eval(env)?),
            RExpr::Div(a, b) => {
                let d = b.eval(env)?;
                if d.is_zero() {
                    return Err(Error::Pole(format!("division by zero in {self}")));
                }
                Ok(a.eval(env)? / d)
            }
            RExpr::Pow(a, e) => pow_i(&a.eval(env)?, *e),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            'x' => {
                out.push(Tok::Ident(Var::X));
                i += 1;
            }
            'y' => {
                out.push(Tok::Ident(Var::Y));
                i += 1;
            }
            'p' => {
                out.push(Tok::Ident(Var::P));
                i += 1;
            }
            'q' => {
                out.push(Tok::Ident(Var::Q));
                i += 1;
            }
            d if d.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let lit: String = bytes[i..j].iter().collect();
                let n: i64 = lit
                    .parse()
                    .map_err(|_| Error::Config(format!("integer literal too large: {lit}")))?;
                out.push(Tok::Num(Rat::from_integer(n.into())));
                i = j;
            }
            other => return Err(Error::Config(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<RExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = RExpr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = RExpr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RExpr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = RExpr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = RExpr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<RExpr> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let neg = if let Some(Tok::Minus) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.peek().cloned() {
                Some(Tok::Num(r)) if r.denom() == &num::BigInt::from(1) => {
                    self.pos += 1;
                    let mut e: i64 = r.numer().try_into().map_err(|_| {
                        Error::Config("exponent too large".into())
                    })?;
                    if neg {
                        e = -e;
                    }
                    return Ok(RExpr::Pow(Box::new(base), e));
                }
                _ => return Err(Error::Config("expected integer exponent after '^'".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RExpr> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(RExpr::Num(r))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(RExpr::Var(v))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let inner = self.factor()?;
                Ok(RExpr::Neg(Box::new(inner)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(Error::Config("missing ')'".into())),
                }
            }
            other => Err(Error::Config(format!("unexpected token {other:?}"))),
        }
    }
}
