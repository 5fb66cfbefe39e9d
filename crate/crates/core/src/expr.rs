//! A small expression language for real functions of one variable `t`.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'pi' | 't' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | sqrt | exp | log | abs
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-4` and `2^3^2` is `512`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: expected {}", expected.join(" | "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sqrt of negative argument {0}")]
    SqrtNegative(f64),
    #[error("log of non-positive argument {0}")]
    LogNonPositive(f64),
    #[error("non-integer power {exponent} of negative base {base}")]
    NegativeBase { base: f64, exponent: f64 },
    #[error("non-finite result")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sqrt,
    Exp,
    Log,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sqrt,
        Func::Exp,
        Func::Log,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Expression tree in the variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    Parser::new(text).parse_all()
}

impl std::str::FromStr for Expr {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn eval(&self, t: f64) -> Result<f64, DomainError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var => t,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(t)?;
                let y = b.eval(t)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(DomainError::DivisionByZero);
                        }
                        x / y
                    }
                    BinOp::Pow => pow(x, y)?,
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(DomainError::SqrtNegative(x));
                        }
                        x.sqrt()
                    }
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(DomainError::LogNonPositive(x));
                        }
                        x.ln()
                    }
                    Func::Abs => x.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DomainError::NonFinite)
        }
    }

    /// Evaluates, mapping domain errors to NaN. Used in integrands, where the
    /// quadrature layer reports non-finite samples.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).unwrap_or(f64::NAN)
    }

    /// True when the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Exact symbolic derivative with respect to `t`. Only constant folding
    /// is applied to the result.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => Expr::Num(0.0),
            Expr::Var => Expr::Num(1.0),
            Expr::Neg(a) => neg(a.differentiate()),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.as_ref(), b.as_ref());
                match op {
                    BinOp::Add => add(a.differentiate(), b.differentiate()),
                    BinOp::Sub => sub(a.differentiate(), b.differentiate()),
                    BinOp::Mul => add(
                        mul(a.differentiate(), b.clone()),
                        mul(a.clone(), b.differentiate()),
                    ),
                    BinOp::Div => div(
                        sub(
                            mul(a.differentiate(), b.clone()),
                            mul(a.clone(), b.differentiate()),
                        ),
                        pow_expr(b.clone(), Expr::Num(2.0)),
                    ),
                    BinOp::Pow => {
                        if b.is_constant() {
                            // b * a^(b-1) * a'
                            mul(
                                mul(b.clone(), pow_expr(a.clone(), sub(b.clone(), Expr::Num(1.0)))),
                                a.differentiate(),
                            )
                        } else {
                            // a^b * (b' ln a + b a'/a)
                            mul(
                                self.clone(),
                                add(
                                    mul(b.differentiate(), call(Func::Log, a.clone())),
                                    div(mul(b.clone(), a.differentiate()), a.clone()),
                                ),
                            )
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let inner = a.differentiate();
                let a = a.as_ref().clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => neg(call(Func::Sin, a)),
                    Func::Tan => div(
                        Expr::Num(1.0),
                        pow_expr(call(Func::Cos, a), Expr::Num(2.0)),
                    ),
                    Func::Sqrt => div(Expr::Num(1.0), mul(Expr::Num(2.0), call(Func::Sqrt, a))),
                    Func::Exp => call(Func::Exp, a),
                    Func::Log => div(Expr::Num(1.0), a),
                    // sign(a), defined away from 0
                    Func::Abs => div(a.clone(), call(Func::Abs, a)),
                };
                mul(outer, inner)
            }
        }
    }

    /// Replaces every occurrence of `t` by `with`.
    pub fn substitute(&self, with: &Expr) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => self.clone(),
            Expr::Var => with.clone(),
            Expr::Neg(a) => neg(a.substitute(with)),
            Expr::Bin(op, a, b) => bin(*op, a.substitute(with), b.substitute(with)),
            Expr::Call(f, a) => call(*f, a.substitute(with)),
        }
    }

    /// `e(t + dt)`.
    pub fn shifted(&self, dt: f64) -> Expr {
        if dt == 0.0 {
            return self.clone();
        }
        self.substitute(&add(Expr::Var, Expr::Num(dt)))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            // A negative literal prints with a leading minus, like a negation.
            Expr::Num(v) if v.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn pow(x: f64, y: f64) -> Result<f64, DomainError> {
    if y.fract() == 0.0 && y.abs() < (i32::MAX as f64) {
        if x == 0.0 && y < 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        Ok(x.powi(y as i32))
    } else {
        if x < 0.0 {
            return Err(DomainError::NegativeBase { base: x, exponent: y });
        }
        if x == 0.0 && y < 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        Ok(x.powf(y))
    }
}

// Smart constructors with constant folding.

fn fold(e: Expr) -> Expr {
    if let Expr::Bin(..) | Expr::Neg(_) | Expr::Call(..) = e {
        if e.is_constant() {
            if let Ok(v) = e.eval(0.0) {
                if !contains_pi(&e) {
                    return Expr::Num(v);
                }
            }
        }
    }
    e
}

fn contains_pi(e: &Expr) -> bool {
    match e {
        Expr::Pi => true,
        Expr::Num(_) | Expr::Var => false,
        Expr::Neg(a) | Expr::Call(_, a) => contains_pi(a),
        Expr::Bin(_, a, b) => contains_pi(a) || contains_pi(b),
    }
}

fn as_num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        _ => None,
    }
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) if v == 0.0 => Expr::Num(0.0),
        Expr::Neg(inner) => *inner,
        a => fold(Expr::Neg(Box::new(a))),
    }
}

pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    match op {
        BinOp::Add => add(a, b),
        BinOp::Sub => sub(a, b),
        BinOp::Mul => mul(a, b),
        BinOp::Div => div(a, b),
        BinOp::Pow => pow_expr(a, b),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => fold(Expr::Bin(BinOp::Add, Box::new(a), Box::new(b))),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (_, Some(y)) if y == 0.0 => a,
        (Some(x), _) if x == 0.0 => neg(b),
        _ => fold(Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b))),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => fold(Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b))),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), Some(y)) if x == 0.0 && y != 0.0 => Expr::Num(0.0),
        _ => fold(Expr::Bin(BinOp::Div, Box::new(a), Box::new(b))),
    }
}

pub fn pow_expr(a: Expr, b: Expr) -> Expr {
    match as_num(&b) {
        Some(y) if y == 1.0 => a,
        Some(y) if y == 0.0 => Expr::Num(1.0),
        _ => fold(Expr::Bin(BinOp::Pow, Box::new(a), Box::new(b))),
    }
}

pub fn call(f: Func, a: Expr) -> Expr {
    fold(Expr::Call(f, Box::new(a)))
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var => f.write_str("t"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, a.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                if *op == BinOp::Pow {
                    write_child(f, a, a.precedence() <= 4)?;
                    f.write_str(sym)?;
                    write_child(f, b, b.precedence() < 3)
                } else {
                    write_child(f, a, a.precedence() < p)?;
                    f.write_str(sym)?;
                    write_child(f, b, b.precedence() <= p)
                }
            }
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
        }
    }

    fn err(&self, expected: &[&str]) -> SyntaxError {
        SyntaxError {
            offset: self.tok_start,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn advance(&mut self) -> Result<(), SyntaxError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let c = bytes[self.pos];
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                self.pos += 1;
            }
            if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                let save = self.pos;
                self.pos += 1;
                if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                    self.pos += 1;
                }
                if self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                } else {
                    self.pos = save;
                }
            }
            let text = &self.src[start..self.pos];
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => self.tok = Tok::Num(v),
                _ => return Err(self.err(&["number"])),
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
        } else {
            self.pos += 1;
            self.tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    return Err(self.err(&["number", "identifier", "operator", "'('", "')'"]));
                }
            };
        }
        Ok(())
    }

    fn parse_all(mut self) -> Result<Expr, SyntaxError> {
        self.advance()?;
        let e = self.expr()?;
        if self.tok != Tok::End {
            return Err(self.err(&["operator", "end of input"]));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.tok == Tok::Op('^') {
            self.advance()?;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        const ATOM: &[&str] = &["number", "'pi'", "'t'", "function", "'('", "'-'"];
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "pi" {
                    self.advance()?;
                    Ok(Expr::Pi)
                } else if name == "t" {
                    self.advance()?;
                    Ok(Expr::Var)
                } else if let Some(func) = Func::from_name(&name) {
                    self.advance()?;
                    if self.tok != Tok::LParen {
                        return Err(self.err(&["'('"]));
                    }
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    Err(self.err(ATOM))
                }
            }
            _ => Err(self.err(ATOM)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), SyntaxError> {
        if self.tok != Tok::RParen {
            return Err(self.err(&["')'", "operator"]));
        }
        self.advance()
    }
}
