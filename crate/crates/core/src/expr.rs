//! A small expression language for analytic test fields `f(q, p)`.
//!
//! Supports numbers, the variables `q` and `p`, the constants `pi` and `e`,
//! the operators `+ - * / ^` with the usual precedence (`^` is right
//! associative and binds tighter than unary minus), and a fixed set of
//! functions:
//!
//! | name | meaning |
//! |------|---------|
//! | `sin cos tan exp log sqrt abs tanh` | the usual one-argument functions |
//! | `min(a,b)`, `max(a,b)` | |
//! | `bump(x,c,w)` | smooth bump, `1` at `x = c`, zero for `|x-c| >= w` |
//! | `step(x,a,w)` | smooth step, `0` for `x <= a`, `1` for `x >= a+w` |
//! | `plateau(x,a,b,w)` | `1` on `[a,b]`, smooth taper of width `w`, `0` outside `(a-w,b+w)` |
//! | `dq(q,c)` | signed periodic difference `q - c` wrapped into `[-1/2, 1/2]` |

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{func}: argument out of domain")]
    Domain { func: &'static str },
    #[error("non-finite result")]
    NonFinite,
}

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
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Tanh,
    Min,
    Max,
    Bump,
    Step,
    Plateau,
    Dq,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "tanh" => Func::Tanh,
            "min" => Func::Min,
            "max" => Func::Max,
            "bump" => Func::Bump,
            "step" => Func::Step,
            "plateau" => Func::Plateau,
            "dq" => Func::Dq,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max | Func::Dq => 2,
            Func::Bump | Func::Step => 3,
            Func::Plateau => 4,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
            Func::Min => "min",
            Func::Max => "max",
            Func::Bump => "bump",
            Func::Step => "step",
            Func::Plateau => "plateau",
            Func::Dq => "dq",
        }
    }
}

/// Parsed expression tree over the variables `q` and `p`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Const(f64),
    Q,
    P,
    Neg(Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
    Call(Func, Vec<Expression>),
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Const(c) => write!(f, "{c}"),
            Expression::Q => f.write_str("q"),
            Expression::P => f.write_str("p"),
            Expression::Neg(e) => write!(f, "(-{e})"),
            Expression::Binary(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            Expression::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Smooth bump `exp(1 - 1/(1-u^2))` with `u = (x-c)/w`.
pub fn bump(x: f64, center: f64, width: f64) -> f64 {
    let u = (x - center) / width;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// C-infinity step on `[0,1]`.
pub fn smooth_step01(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

pub fn plateau(x: f64, a: f64, b: f64, w: f64) -> f64 {
    smooth_step01((x - (a - w)) / w) * smooth_step01(((b + w) - x) / w)
}

/// Periodic difference `q - c` reduced to `[-1/2, 1/2]`.
pub fn periodic_diff(q: f64, c: f64) -> f64 {
    let d = q - c;
    d - d.round()
}

impl Expression {
    pub fn eval(&self, q: f64, p: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expression::Const(c) => *c,
            Expression::Q => q,
            Expression::P => p,
            Expression::Neg(e) => -e.eval(q, p)?,
            Expression::Binary(op, a, b) => {
                let x = a.eval(q, p)?;
                let y = b.eval(q, p)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        x / y
                    }
                    BinOp::Pow => x.powf(y),
                }
            }
            Expression::Call(func, args) => {
                let mut vals = [0.0; 4];
                for (slot, a) in vals.iter_mut().zip(args) {
                    *slot = a.eval(q, p)?;
                }
                let [a, b, c, d] = vals;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain { func: "log" });
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain { func: "sqrt" });
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Tanh => a.tanh(),
                    Func::Min => a.min(b),
                    Func::Max => a.max(b),
                    Func::Bump => {
                        if c <= 0.0 {
                            return Err(EvalError::Domain { func: "bump" });
                        }
                        bump(a, b, c)
                    }
                    Func::Step => {
                        if c <= 0.0 {
                            return Err(EvalError::Domain { func: "step" });
                        }
                        smooth_step01((a - b) / c)
                    }
                    Func::Plateau => {
                        if d <= 0.0 || c < b {
                            return Err(EvalError::Domain { func: "plateau" });
                        }
                        plateau(a, b, c, d)
                    }
                    Func::Dq => periodic_diff(a, b),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            i += 1;
            out.push((tok, start));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        };
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("expected {what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expression::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expression::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expression::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::lookup(&name).ok_or(ParseError::UnknownIdentifier {
                        offset,
                        name: name.clone(),
                    })?;
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    if *self.peek() != Tok::RParen {
                        return Err(self.unexpected("`,` or `)`"));
                    }
                    self.bump();
                    if args.len() != func.arity() {
                        return Err(ParseError::Syntax {
                            offset,
                            message: format!(
                                "{} takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        });
                    }
                    return Ok(Expression::Call(func, args));
                }
                match name.as_str() {
                    "q" => Ok(Expression::Q),
                    "p" => Ok(Expression::P),
                    "pi" => Ok(Expression::Const(std::f64::consts::PI)),
                    "e" => Ok(Expression::Const(std::f64::consts::E)),
                    _ => Err(ParseError::UnknownIdentifier { offset, name }),
                }
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }
}

/// Parse an expression in `q` and `p`.
pub fn parse_expression(text: &str) -> Result<Expression, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected("end of input"));
    }
    Ok(e)
}
