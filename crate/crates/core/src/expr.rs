//! A small closed-form expression language over the index variables `n`
//! and `k`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?            // right associative
//! atom  := number | 'n' | 'k' | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `log`, `exp`, `sqrt`, `abs` (one argument), `min`, `max` (two).
//! `-2^2` parses as `-(2^2)` and `2^n^2` as `2^(n^2)`.

use std::fmt;

use thiserror::Error;

use crate::scalar::{Mode, Real, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    N,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "log" => Func::Log,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }
}

/// Non-negative decimal literal `mantissa / 10^scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub mantissa: u64,
    pub scale: u32,
}

impl Literal {
    pub fn int(v: u64) -> Self {
        Literal { mantissa: v, scale: 0 }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.mantissa);
        }
        let digits = format!("{:0>width$}", self.mantissa, width = self.scale as usize + 1);
        let (int_part, frac_part) = digits.split_at(digits.len() - self.scale as usize);
        write!(f, "{int_part}.{frac_part}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(Var),
    Lit(Literal),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty input")]
    EmptyInput,
    #[error("unbalanced parenthesis")]
    UnbalancedParen,
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("invalid number literal")]
    InvalidNumber,
    #[error("`{func}` takes {expected} argument(s), got {found}")]
    ArityMismatch {
        func: &'static str,
        expected: usize,
        found: usize,
    },
}

/// Parse failure with the byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error in {op}: {detail}")]
    DomainError { op: &'static str, detail: String },
    #[error("not supported in rational mode: {what}")]
    RationalUnsupported { what: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(&'static str),
    #[error("non-finite result in {op}")]
    NonFinite { op: &'static str },
    #[error("exact result too large in {op}")]
    Overflow { op: &'static str },
}

/// Integer values for the free variables of an expression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bindings {
    pub n: Option<i64>,
    pub k: Option<i64>,
}

impl Bindings {
    pub fn n(n: i64) -> Self {
        Bindings { n: Some(n), k: None }
    }

    pub fn nk(n: i64, k: i64) -> Self {
        Bindings { n: Some(n), k: Some(k) }
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse_expr(text)
    }

    pub fn lit(v: u64) -> Expr {
        Expr::Lit(Literal::int(v))
    }

    /// True when the tree uses no transcendental function, so rational
    /// evaluation can succeed (exponents must still turn out integral).
    pub fn is_rational_closed(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Lit(_) => true,
            Expr::Neg(a) => a.is_rational_closed(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_rational_closed() && b.is_rational_closed()
            }
            Expr::Call(f, args) => {
                !matches!(f, Func::Log | Func::Exp | Func::Sqrt)
                    && args.iter().all(Expr::is_rational_closed)
            }
        }
    }

    pub fn uses_var(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Lit(_) => false,
            Expr::Neg(a) => a.uses_var(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.uses_var(var) || b.uses_var(var)
            }
            Expr::Call(_, args) => args.iter().any(|a| a.uses_var(var)),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.uses_var(Var::N) && !self.uses_var(Var::K)
    }

    pub fn eval<T: Real>(&self, env: &Bindings) -> Result<T, EvalError> {
        match self {
            Expr::Var(Var::N) => env.n.map(T::from_i64).ok_or(EvalError::UnboundVariable("n")),
            Expr::Var(Var::K) => env.k.map(T::from_i64).ok_or(EvalError::UnboundVariable("k")),
            Expr::Lit(l) => Ok(T::from_decimal(l.mantissa, l.scale)),
            Expr::Neg(a) => Ok(-a.eval::<T>(env)?),
            Expr::Add(a, b) => checked(a.eval::<T>(env)? + b.eval::<T>(env)?, "+"),
            Expr::Sub(a, b) => checked(a.eval::<T>(env)? - b.eval::<T>(env)?, "-"),
            Expr::Mul(a, b) => checked(a.eval::<T>(env)? * b.eval::<T>(env)?, "*"),
            Expr::Div(a, b) => {
                let num = a.eval::<T>(env)?;
                let den = b.eval::<T>(env)?;
                if den.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                checked(num / den, "/")
            }
            Expr::Pow(a, b) => {
                let base = a.eval::<T>(env)?;
                let exp = b.eval::<T>(env)?;
                base.pow_real(&exp)
            }
            Expr::Call(f @ (Func::Min | Func::Max), args) => {
                let x = args[0].eval::<T>(env)?;
                let y = args[1].eval::<T>(env)?;
                let take_x = if *f == Func::Min { x <= y } else { x >= y };
                Ok(if take_x { x } else { y })
            }
            Expr::Call(f, args) => {
                let x = args[0].eval::<T>(env)?;
                T::apply(*f, &x)
            }
        }
    }
}

fn checked<T: Real>(v: T, op: &'static str) -> Result<T, EvalError> {
    if v.is_finite_value() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { op })
    }
}

/// Evaluates `e` in the requested mode.
pub fn eval_expr(e: &Expr, env: &Bindings, mode: Mode) -> Result<Scalar, EvalError> {
    match mode {
        Mode::Float => e.eval::<f64>(env).map(Scalar::Float),
        Mode::Rational => e.eval::<num_rational::BigRational>(env).map(Scalar::Rational),
    }
}

// ---------------------------------------------------------------------------
// printing

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(_) => PREC_NEG,
        Expr::Pow(..) => PREC_POW,
        Expr::Var(_) | Expr::Lit(_) | Expr::Call(..) => PREC_ATOM,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(Var::N) => f.write_str("n"),
            Expr::Var(Var::K) => f.write_str("k"),
            Expr::Lit(l) => write!(f, "{l}"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, precedence(a) < PREC_NEG)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (prec, op) = match self {
                    Expr::Add(..) => (PREC_ADD, " + "),
                    Expr::Sub(..) => (PREC_ADD, " - "),
                    Expr::Mul(..) => (PREC_MUL, " * "),
                    _ => (PREC_MUL, " / "),
                };
                write_child(f, a, precedence(a) < prec)?;
                f.write_str(op)?;
                write_child(f, b, precedence(b) <= prec)
            }
            Expr::Pow(a, b) => {
                write_child(f, a, precedence(a) <= PREC_POW)?;
                f.write_str("^")?;
                write_child(f, b, precedence(b) < PREC_NEG)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Num(Literal),
    Ident(&'a str),
    Op(u8),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Num(l) => format!("number `{l}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("operator `{}`", *c as char),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok<'_>, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_part = &text[start..i];
                let mut frac_part = "";
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac_part = &text[frac_start..i];
                    if frac_part.is_empty() {
                        return Err(ParseError { kind: ParseErrorKind::InvalidNumber, offset: start });
                    }
                }
                let lit = literal(int_part, frac_part)
                    .ok_or(ParseError { kind: ParseErrorKind::InvalidNumber, offset: start })?;
                out.push((Tok::Num(lit), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(&text[start..i]), start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), offset: i });
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn literal(int_part: &str, frac_part: &str) -> Option<Literal> {
    let scale = u32::try_from(frac_part.len()).ok().filter(|s| *s <= 18)?;
    let mut mantissa: u64 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        mantissa = mantissa.checked_mul(10)?.checked_add(u64::from(b - b'0'))?;
    }
    Some(Literal { mantissa, scale })
}

struct Parser<'a> {
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    /// Offsets of currently open parentheses.
    open: Vec<usize>,
}

/// Parses `text` into an expression tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    if toks.len() == 1 {
        return Err(ParseError { kind: ParseErrorKind::EmptyInput, offset: 0 });
    }
    let mut p = Parser { toks, pos: 0, open: Vec::new() };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::RParen => Err(p.error(ParseErrorKind::UnbalancedParen)),
        other => {
            let kind = ParseErrorKind::UnexpectedToken(other.describe());
            Err(p.error(kind))
        }
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok<'a> {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok<'a> {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, offset: self.offset() }
    }

    fn unexpected(&self) -> ParseError {
        if *self.peek() == Tok::End {
            if let Some(&open) = self.open.last() {
                return ParseError { kind: ParseErrorKind::UnbalancedParen, offset: open };
            }
        }
        if *self.peek() == Tok::RParen && self.open.is_empty() {
            return self.error(ParseErrorKind::UnbalancedParen);
        }
        self.error(ParseErrorKind::UnexpectedToken(self.peek().describe()))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op(b'+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op(b'-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op(b'*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op(b'/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op(b'-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op(b'^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(l) => {
                self.bump();
                Ok(Expr::Lit(l))
            }
            Tok::Ident(name) => {
                self.bump();
                match name {
                    "n" => Ok(Expr::Var(Var::N)),
                    "k" => Ok(Expr::Var(Var::K)),
                    _ => {
                        let func = Func::from_name(name).ok_or(ParseError {
                            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                            offset,
                        })?;
                        self.call(func, offset)
                    }
                }
            }
            Tok::LParen => {
                self.bump();
                self.open.push(offset);
                let e = self.expr()?;
                self.close()?;
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call(&mut self, func: Func, offset: usize) -> Result<Expr, ParseError> {
        if *self.peek() != Tok::LParen {
            return Err(self.error(ParseErrorKind::UnexpectedToken(format!(
                "{} after function name `{}`",
                self.peek().describe(),
                func.name()
            ))));
        }
        let open = self.offset();
        self.bump();
        self.open.push(open);
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.close()?;
        if args.len() != func.arity() {
            return Err(ParseError {
                kind: ParseErrorKind::ArityMismatch {
                    func: func.name(),
                    expected: func.arity(),
                    found: args.len(),
                },
                offset,
            });
        }
        Ok(Expr::Call(func, args))
    }

    fn close(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            self.open.pop();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }
}
