//! A small arithmetic expression language for defining scalar energies on
//! the command line.
//!
//! Grammar (whitespace-insensitive, byte positions in errors):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?          -- '^' is right-associative
//! unary  := '-' unary | atom
//! atom   := number | ident | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than the left operand of '^', so `-x^2` parses
//! as `(-x)^2`. Numbers are decimal with optional exponent (`1e-3` is
//! accepted). Identifiers resolve against the declared variable set and the
//! fixed function table; there are no user constants, the caller substitutes
//! parameters textually before parsing.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::repr::{Domain, ScalarFn, SymmetricFn2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Abs,
    Min,
    Max,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Pow => "pow",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Func::Min | Func::Max | Func::Pow => 2,
            _ => 1,
        }
    }
}

/// Expression AST. Structural equality is derived, which the print/reparse
/// round trip relies on.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl fmt::Display for Expr {
    /// Fully parenthesized form; reparsing yields a structurally identical
    /// tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token with its starting byte position, or None at end of input.
    fn next(&mut self) -> Result<Option<(Tok, usize)>> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
                {
                    end += 1;
                }
                // optional exponent
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut e = end + 1;
                    if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                        e += 1;
                    }
                    if e < self.src.len() && self.src[e].is_ascii_digit() {
                        while e < self.src.len() && self.src[e].is_ascii_digit() {
                            e += 1;
                        }
                        end = e;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap();
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    expected: format!("a number, found \"{text}\""),
                })?;
                self.pos = end;
                return Ok(Some((Tok::Num(v), start)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[start..end])
                    .unwrap()
                    .to_string();
                self.pos = end;
                return Ok(Some((Tok::Ident(name), start)));
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    expected: format!("a token, found byte '{}'", other as char),
                })
            }
        };
        self.pos += 1;
        Ok(Some((tok, start)))
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.idx += 1;
                Ok(())
            }
            _ => Err(Error::Syntax {
                pos: self.pos(),
                expected: what.into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.idx += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.idx += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.idx += 1;
            let exp = self.factor()?; // right-associative
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.idx += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some((Tok::Num(v), _)) => Ok(Expr::Num(v)),
            Some((Tok::Ident(name), pos)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    let func = Func::lookup(&name).ok_or_else(|| Error::UnknownIdentifier {
                        name: name.clone(),
                        pos,
                    })?;
                    self.idx += 1; // '('
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(Tok::Comma)) {
                        self.idx += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "')'")?;
                    if args.len() != func.arity() {
                        return Err(Error::Arity {
                            func: func.name().into(),
                            expected: func.arity(),
                            got: args.len(),
                            pos,
                        });
                    }
                    Ok(Expr::Call(func, args))
                } else if self.vars.contains(&name.as_str()) {
                    Ok(Expr::Var(name))
                } else {
                    Err(Error::UnknownIdentifier { name, pos })
                }
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some((_, pos)) => Err(Error::Syntax {
                pos,
                expected: "a number, variable, function call, or '('".into(),
            }),
            None => Err(Error::Syntax {
                pos: self.end,
                expected: "a number, variable, function call, or '('".into(),
            }),
        }
    }
}

/// Parse `src` against the declared variable set.
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
    if src.trim().is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            expected: "a non-empty expression".into(),
        });
    }
    let mut lexer = Lexer::new(src);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: src.len(),
        vars,
    };
    let e = p.expr()?;
    if p.idx < p.toks.len() {
        return Err(Error::Syntax {
            pos: p.pos(),
            expected: "end of input".into(),
        });
    }
    Ok(e)
}

fn apply(func: Func, args: &[f64]) -> Result<f64> {
    let guard = |v: f64, arg: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain {
                of: func.name().into(),
                argument: arg,
            })
        }
    };
    match func {
        Func::Exp => guard(args[0].exp(), args[0]),
        Func::Log => {
            if args[0] <= 0.0 {
                Err(Error::Domain {
                    of: "log".into(),
                    argument: args[0],
                })
            } else {
                guard(args[0].ln(), args[0])
            }
        }
        Func::Sqrt => {
            if args[0] < 0.0 {
                Err(Error::Domain {
                    of: "sqrt".into(),
                    argument: args[0],
                })
            } else {
                guard(args[0].sqrt(), args[0])
            }
        }
        Func::Sin => guard(args[0].sin(), args[0]),
        Func::Cos => guard(args[0].cos(), args[0]),
        Func::Sinh => guard(args[0].sinh(), args[0]),
        Func::Cosh => guard(args[0].cosh(), args[0]),
        Func::Abs => guard(args[0].abs(), args[0]),
        Func::Min => guard(args[0].min(args[1]), args[0]),
        Func::Max => guard(args[0].max(args[1]), args[0]),
        Func::Pow => guard(args[0].powf(args[1]), args[0]),
    }
}

/// Evaluate with every variable bound. Non-finite intermediates become
/// `Error::Domain`, never NaN.
pub fn eval(e: &Expr, bindings: &BTreeMap<String, f64>) -> Result<f64> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Var(name) => *bindings
            .get(name)
            .ok_or_else(|| Error::UnboundVariable { name: name.clone() })?,
        Expr::Neg(inner) => -eval(inner, bindings)?,
        Expr::Bin(op, a, b) => {
            let (x, y) = (eval(a, bindings)?, eval(b, bindings)?);
            let v = match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Pow => x.powf(y),
            };
            if !v.is_finite() {
                return Err(Error::Domain {
                    of: format!("{op:?}"),
                    argument: x,
                });
            }
            v
        }
        Expr::Call(func, args) => {
            let vals: Vec<f64> = args
                .iter()
                .map(|a| eval(a, bindings))
                .collect::<Result<_>>()?;
            apply(*func, &vals)?
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain {
            of: "expression".into(),
            argument: v,
        })
    }
}

/// The domain convention for each single-variable representation.
pub fn domain_for_var(var: &str) -> Domain {
    match var {
        "t" => Domain::open_from(0.0),
        "theta" | "eta" => Domain::closed_from(0.0),
        "r" => Domain::closed_from(1.0),
        "J" => Domain::open_from(0.0),
        _ => Domain::open_from(0.0),
    }
}

/// Wrap a one-variable expression as a `ScalarFn` over the variable's
/// conventional domain. Evaluation errors surface as NaN, which the
/// registration finiteness probe and the criteria guard against.
pub fn to_scalar_fn(e: &Expr, var: &str) -> Result<ScalarFn> {
    let e = e.clone();
    let name = var.to_string();
    ScalarFn::new(domain_for_var(var), move |x: f64| {
        let mut b = BTreeMap::new();
        b.insert(name.clone(), x);
        eval(&e, &b).unwrap_or(f64::NAN)
    })
}

/// Wrap a two-variable expression over (l1, l2) as a `SymmetricFn2`;
/// the symmetry registration check applies.
pub fn to_symmetric_fn(e: &Expr) -> Result<SymmetricFn2> {
    let e = e.clone();
    SymmetricFn2::new(move |l1: f64, l2: f64| {
        let mut b = BTreeMap::new();
        b.insert("l1".to_string(), l1);
        b.insert("l2".to_string(), l2);
        eval(&e, &b).unwrap_or(f64::NAN)
    })
}
