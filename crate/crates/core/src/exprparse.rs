//! Coefficient expressions for configuration files.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | "pi" | variable | call | "(" expr ")" ;
//! call    = function "(" expr { "," expr } ")" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//!         | "." digits [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! variable = "x" | "y" | "t" | "nu1" | "nu2" ;
//! function = "sin" | "cos" | "exp" | "ln" | "abs" | "sqrt" | "gamma"
//!          | "omega" | "ml1" | "ml2" ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-2^2 = -4`, and is right
//! associative. Multiplication must be written out: `(t+1)(x+1)` is an error.

use std::fmt;

use thiserror::Error;

use crate::special::{gamma, mittag_leffler, omega, MLParams};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    T,
    Nu1,
    Nu2,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::X, Var::Y, Var::T, Var::Nu1, Var::Nu2];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
            Var::Nu1 => "nu1",
            Var::Nu2 => "nu2",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
    Sqrt,
    Gamma,
    /// `omega(θ, t) = t^{θ-1}/Γ(θ)`
    Omega,
    /// `ml1(α, z) = E_{α,1}(z)`
    Ml1,
    /// `ml2(α, β, z) = E_{α,β}(z)`
    Ml2,
}

impl Func {
    const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Ln,
        Func::Abs,
        Func::Sqrt,
        Func::Gamma,
        Func::Omega,
        Func::Ml1,
        Func::Ml2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Gamma => "gamma",
            Func::Omega => "omega",
            Func::Ml1 => "ml1",
            Func::Ml2 => "ml2",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Omega | Func::Ml1 => 2,
            Func::Ml2 => 3,
            _ => 1,
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Parsed expression tree. `Display` prints a fully parenthesized form that
/// parses back to the same tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("at byte {offset}: unknown identifier `{name}`")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("at byte {offset}: `{func}` takes {expected} argument(s), got {got}")]
    Arity {
        offset: usize,
        func: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("at byte {offset}: malformed number `{text}`")]
    Number { offset: usize, text: String },
    #[error("at byte {offset}: nesting deeper than {MAX_DEPTH}")]
    TooDeep { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::Number { offset, .. }
            | ParseError::TooDeep { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{}` is not bound", .0.name())]
    Unbound(Var),
    #[error("{func}: {detail}")]
    Domain { func: &'static str, detail: String },
    #[error(transparent)]
    Special(#[from] crate::Error),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == b'.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i < b.len() && b[i] == b'.' {
                i += 1;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut k = i + 1;
                if k < b.len() && (b[k] == b'+' || b[k] == b'-') {
                    k += 1;
                }
                if k < b.len() && b[k].is_ascii_digit() {
                    while k < b.len() && b[k].is_ascii_digit() {
                        k += 1;
                    }
                    i = k;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Number {
                offset: start,
                text: text.to_string(),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if b"+-*/^(),".contains(&c) {
            out.push((i, Tok::Op(c as char)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                offset: i,
                expected: vec!["an expression token"],
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            expected,
            found: self.peek().describe(),
        })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep { offset: self.offset() });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                break;
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                break;
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let e = if self.eat('-') {
            Expr::Neg(Box::new(self.unary()?))
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                if let Some(v) = Var::from_name(&name) {
                    return Ok(Expr::Var(v));
                }
                let Some(f) = Func::from_name(&name) else {
                    return Err(ParseError::UnknownIdentifier { offset, name });
                };
                if !self.eat('(') {
                    return self.fail(vec!["`(`"]);
                }
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if !self.eat(')') {
                    return self.fail(vec!["`,`", "`)`"]);
                }
                if args.len() != f.arity() {
                    return Err(ParseError::Arity {
                        offset,
                        func: f.name(),
                        expected: f.arity(),
                        got: args.len(),
                    });
                }
                Ok(Expr::Call(f, args))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail(vec!["`)`"]);
                }
                Ok(e)
            }
            _ => self.fail(vec!["number", "identifier", "`(`", "`-`"]),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(vec!["operator", "end of input"]);
    }
    Ok(e)
}

/// Values for the free variables; unset ones fail evaluation when used.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub t: Option<f64>,
    pub nu1: Option<f64>,
    pub nu2: Option<f64>,
}

impl Bindings {
    pub fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::T => self.t,
            Var::Nu1 => self.nu1,
            Var::Nu2 => self.nu2,
        }
    }

    pub fn set(&mut self, v: Var, value: f64) {
        let slot = match v {
            Var::X => &mut self.x,
            Var::Y => &mut self.y,
            Var::T => &mut self.t,
            Var::Nu1 => &mut self.nu1,
            Var::Nu2 => &mut self.nu2,
        };
        *slot = Some(value);
    }
}

fn apply(f: Func, a: &[f64]) -> Result<f64, EvalError> {
    Ok(match f {
        Func::Sin => a[0].sin(),
        Func::Cos => a[0].cos(),
        Func::Exp => a[0].exp(),
        Func::Ln => {
            if a[0] < 0.0 {
                return Err(EvalError::Domain {
                    func: "ln",
                    detail: format!("negative argument {}", a[0]),
                });
            }
            a[0].ln()
        }
        Func::Abs => a[0].abs(),
        Func::Sqrt => {
            if a[0] < 0.0 {
                return Err(EvalError::Domain {
                    func: "sqrt",
                    detail: format!("negative argument {}", a[0]),
                });
            }
            a[0].sqrt()
        }
        Func::Gamma => gamma(a[0])?,
        Func::Omega => omega(a[0], a[1])?,
        Func::Ml1 => mittag_leffler(MLParams::one(a[0])?, a[1])?,
        Func::Ml2 => mittag_leffler(MLParams::new(a[0], a[1])?, a[2])?,
    })
}

impl Expr {
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(v) => b.get(*v).ok_or(EvalError::Unbound(*v))?,
            Expr::Neg(e) => -e.eval(b)?,
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(b)?, r.eval(b)?);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => l.powf(r),
                }
            }
            Expr::Call(f, args) => {
                let vals = args.iter().map(|a| a.eval(b)).collect::<Result<Vec<_>, _>>()?;
                apply(*f, &vals)?
            }
        })
    }

    pub fn uses(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(e) => e.uses(v),
            Expr::Bin(_, l, r) => l.uses(v) || r.uses(v),
            Expr::Call(_, args) => args.iter().any(|a| a.uses(v)),
        }
    }

    /// Substitutes `value` for every occurrence of `v`.
    pub fn bind(&self, v: Var, value: f64) -> Expr {
        match self {
            Expr::Var(w) if *w == v => Expr::Num(value),
            Expr::Num(_) | Expr::Pi | Expr::Var(_) => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.bind(v, value))),
            Expr::Bin(op, l, r) => Expr::Bin(*op, Box::new(l.bind(v, value)), Box::new(r.bind(v, value))),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| a.bind(v, value)).collect()),
        }
    }

    pub fn variables(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|&v| self.uses(v)).collect()
    }

    /// Replaces variable-free subtrees by their value. Subtrees whose
    /// evaluation fails or is not finite are kept so errors surface at
    /// evaluation time.
    pub fn fold_constants(&self) -> Expr {
        let folded = match self {
            Expr::Num(_) | Expr::Pi | Expr::Var(_) => return self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.fold_constants())),
            Expr::Bin(op, l, r) => Expr::Bin(*op, Box::new(l.fold_constants()), Box::new(r.fold_constants())),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(Expr::fold_constants).collect()),
        };
        if folded.variables().is_empty() {
            if let Ok(v) = folded.eval(&Bindings::default()) {
                if v.is_finite() {
                    return Expr::Num(v);
                }
            }
        }
        folded
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
