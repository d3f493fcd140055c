//! Differentiable expression language for scalar field input.
//!
//! Grammar, with the variable set supplied by the caller (`y0..y3` for
//! fields, `s` for paths):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ['^' ['-'] number]
//! atom   := number | variable | function '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `exp`, `sin`, `cos` with one argument, and
//! `gaussian(center, width)`, the radial bump
//! `exp(-sum_i (x_i - center)^2 / width^2)` taken over every coordinate in
//! scope. The `gaussian` arguments must fold to constants and the width must
//! be nonzero. Exponents are numeric literals, so every expression stays
//! closed under exact differentiation.

use crate::scalar::{real, Real};
use num_complex::Complex;

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Expression tree over scalar type `T`.
///
/// `Var(i)` indexes the caller's variable table. `Pow` keeps its exponent as
/// a literal so differentiation never leaves the language.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Const(T),
    Var(usize),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Neg(Box<Expr<T>>),
    Pow(Box<Expr<T>>, T),
    Exp(Box<Expr<T>>),
    Sin(Box<Expr<T>>),
    Cos(Box<Expr<T>>),
    Gaussian { center: T, width: T },
}

impl<T: Real> Expr<T> {
    /// Evaluates at the given variable values. The slice length is the
    /// number of variables in scope; `Gaussian` sums over all of them.
    pub fn eval(&self, vals: &[T]) -> T {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => vals[*i],
            Expr::Add(a, b) => a.eval(vals) + b.eval(vals),
            Expr::Sub(a, b) => a.eval(vals) - b.eval(vals),
            Expr::Mul(a, b) => a.eval(vals) * b.eval(vals),
            Expr::Div(a, b) => a.eval(vals) / b.eval(vals),
            Expr::Neg(a) => -a.eval(vals),
            Expr::Pow(a, p) => a.eval(vals).powf(*p),
            Expr::Exp(a) => a.eval(vals).exp(),
            Expr::Sin(a) => a.eval(vals).sin(),
            Expr::Cos(a) => a.eval(vals).cos(),
            Expr::Gaussian { center, width } => {
                let mut s = T::zero();
                for v in vals {
                    let d = *v - *center;
                    s = s + d * d;
                }
                (-s / (*width * *width)).exp()
            }
        }
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Expr<T> {
        if !self.depends_on(var) {
            return Expr::Const(T::zero());
        }
        match self {
            Expr::Const(_) => Expr::Const(T::zero()),
            Expr::Var(i) => Expr::Const(if *i == var { T::one() } else { T::zero() }),
            Expr::Add(a, b) => Expr::Add(Box::new(a.diff(var)), Box::new(b.diff(var))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.diff(var)), Box::new(b.diff(var))),
            Expr::Mul(a, b) => Expr::Add(
                Box::new(Expr::Mul(Box::new(a.diff(var)), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(b.diff(var)))),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(Expr::Sub(
                    Box::new(Expr::Mul(Box::new(a.diff(var)), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(b.diff(var)))),
                )),
                Box::new(Expr::Pow(b.clone(), real(2.0))),
            ),
            Expr::Neg(a) => Expr::Neg(Box::new(a.diff(var))),
            Expr::Pow(a, p) => Expr::Mul(
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(*p)),
                    Box::new(Expr::Pow(a.clone(), *p - T::one())),
                )),
                Box::new(a.diff(var)),
            ),
            Expr::Exp(a) => Expr::Mul(Box::new(Expr::Exp(a.clone())), Box::new(a.diff(var))),
            Expr::Sin(a) => Expr::Mul(Box::new(Expr::Cos(a.clone())), Box::new(a.diff(var))),
            Expr::Cos(a) => Expr::Neg(Box::new(Expr::Mul(
                Box::new(Expr::Sin(a.clone())),
                Box::new(a.diff(var)),
            ))),
            Expr::Gaussian { center, width } => {
                // d/dx_v exp(-sum (x_i - c)^2 / w^2) = -2 (x_v - c) / w^2 * G
                let coeff = real::<T>(-2.0) / (*width * *width);
                Expr::Mul(
                    Box::new(self.clone()),
                    Box::new(Expr::Mul(
                        Box::new(Expr::Const(coeff)),
                        Box::new(Expr::Sub(
                            Box::new(Expr::Var(var)),
                            Box::new(Expr::Const(*center)),
                        )),
                    )),
                )
            }
        }
    }

    /// True when the tree references variable `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(i) => *i == var,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
            Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => a.depends_on(var),
            Expr::Pow(a, _) => a.depends_on(var),
            Expr::Gaussian { .. } => true,
        }
    }

    /// Constant folding plus the cheap identities (`x + 0`, `x * 1`,
    /// `x * 0`, `x^1`, double negation). Division folds only when the
    /// denominator is a nonzero constant so it cannot hide a pole.
    pub fn simplified(self) -> Expr<T> {
        let e = match self {
            Expr::Add(a, b) => Expr::Add(Box::new(a.simplified()), Box::new(b.simplified())),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.simplified()), Box::new(b.simplified())),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.simplified()), Box::new(b.simplified())),
            Expr::Div(a, b) => Expr::Div(Box::new(a.simplified()), Box::new(b.simplified())),
            Expr::Neg(a) => Expr::Neg(Box::new(a.simplified())),
            Expr::Pow(a, p) => Expr::Pow(Box::new(a.simplified()), p),
            Expr::Exp(a) => Expr::Exp(Box::new(a.simplified())),
            Expr::Sin(a) => Expr::Sin(Box::new(a.simplified())),
            Expr::Cos(a) => Expr::Cos(Box::new(a.simplified())),
            leaf => leaf,
        };
        match e {
            Expr::Add(a, b) => match (constant(&a), constant(&b)) {
                (Some(x), Some(y)) => Expr::Const(x + y),
                (Some(x), None) if x.is_zero() => *b,
                (None, Some(y)) if y.is_zero() => *a,
                _ => Expr::Add(a, b),
            },
            Expr::Sub(a, b) => match (constant(&a), constant(&b)) {
                (Some(x), Some(y)) => Expr::Const(x - y),
                (None, Some(y)) if y.is_zero() => *a,
                (Some(x), None) if x.is_zero() => Expr::Neg(b),
                _ => Expr::Sub(a, b),
            },
            Expr::Mul(a, b) => match (constant(&a), constant(&b)) {
                (Some(x), Some(y)) => Expr::Const(x * y),
                (Some(x), None) => {
                    if x.is_zero() {
                        Expr::Const(T::zero())
                    } else if x == T::one() {
                        *b
                    } else {
                        Expr::Mul(a, b)
                    }
                }
                (None, Some(y)) => {
                    if y.is_zero() {
                        Expr::Const(T::zero())
                    } else if y == T::one() {
                        *a
                    } else {
                        Expr::Mul(a, b)
                    }
                }
                _ => Expr::Mul(a, b),
            },
            Expr::Div(a, b) => match (constant(&a), constant(&b)) {
                (Some(x), Some(y)) if !y.is_zero() => Expr::Const(x / y),
                (Some(x), Some(_)) if x.is_zero() => Expr::Div(a, b),
                (None, Some(y)) if y == T::one() => *a,
                (Some(x), None) if x.is_zero() => Expr::Div(a, b),
                _ => Expr::Div(a, b),
            },
            Expr::Neg(a) => match *a {
                Expr::Const(c) => Expr::Const(-c),
                Expr::Neg(inner) => *inner,
                other => Expr::Neg(Box::new(other)),
            },
            Expr::Pow(a, p) => {
                if p == T::one() {
                    *a
                } else if p.is_zero() {
                    Expr::Const(T::one())
                } else if let Some(x) = constant(&a) {
                    Expr::Const(x.powf(p))
                } else {
                    Expr::Pow(a, p)
                }
            }
            Expr::Exp(a) => match constant(&a) {
                Some(x) => Expr::Const(x.exp()),
                None => Expr::Exp(a),
            },
            Expr::Sin(a) => match constant(&a) {
                Some(x) => Expr::Const(x.sin()),
                None => Expr::Sin(a),
            },
            Expr::Cos(a) => match constant(&a) {
                Some(x) => Expr::Const(x.cos()),
                None => Expr::Cos(a),
            },
            other => other,
        }
    }

    /// Value of a constant tree, if the tree is a literal constant.
    pub fn const_value(&self) -> Option<T> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Renders the tree back to grammar text. `parse(to_text(e))` evaluates
    /// equal to `e`; parentheses are inserted only where precedence needs
    /// them.
    pub fn to_text(&self, vars: &[&str]) -> String {
        // Precedence: additive 1, multiplicative 2, unary minus 3, power 4.
        // A negative constant renders with a leading minus, so it binds like
        // a unary minus, not like an atom.
        fn prec<T: Real>(e: &Expr<T>) -> u8 {
            match e {
                Expr::Add(..) | Expr::Sub(..) => 1,
                Expr::Mul(..) | Expr::Div(..) => 2,
                Expr::Neg(..) => 3,
                Expr::Const(c) if c.is_sign_negative() => 3,
                Expr::Pow(..) => 4,
                _ => 5,
            }
        }
        fn wrap<T: Real>(e: &Expr<T>, vars: &[&str], min: u8) -> String {
            let s = e.to_text(vars);
            if prec(e) < min {
                format!("({s})")
            } else {
                s
            }
        }
        match self {
            Expr::Const(c) => format!("{c}"),
            Expr::Var(i) => vars[*i].to_string(),
            Expr::Add(a, b) => format!("{} + {}", wrap(a, vars, 1), wrap(b, vars, 2)),
            Expr::Sub(a, b) => format!("{} - {}", wrap(a, vars, 1), wrap(b, vars, 2)),
            Expr::Mul(a, b) => format!("{} * {}", wrap(a, vars, 2), wrap(b, vars, 3)),
            Expr::Div(a, b) => format!("{} / {}", wrap(a, vars, 2), wrap(b, vars, 5)),
            Expr::Neg(a) => format!("-{}", wrap(a, vars, 5)),
            Expr::Pow(a, p) => {
                let base = match **a {
                    Expr::Var(_) | Expr::Exp(_) | Expr::Sin(_) | Expr::Cos(_)
                    | Expr::Gaussian { .. } => wrap(a, vars, 5),
                    Expr::Const(c) if !format!("{c}").starts_with('-') => wrap(a, vars, 5),
                    _ => format!("({})", a.to_text(vars)),
                };
                format!("{base}^{p}")
            }
            Expr::Exp(a) => format!("exp({})", a.to_text(vars)),
            Expr::Sin(a) => format!("sin({})", a.to_text(vars)),
            Expr::Cos(a) => format!("cos({})", a.to_text(vars)),
            Expr::Gaussian { center, width } => format!("gaussian({center}, {width})"),
        }
    }
}

fn constant<T: Real>(e: &Expr<T>) -> Option<T> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
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
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<f64>()
                .map_err(|_| ParseError::new(tl, tc, format!("invalid number `{text}`")))?;
            col += i - start;
            toks.push(Token {
                kind: TokKind::Num(value),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push(Token {
                kind: TokKind::Ident(text),
                line: tl,
                col: tc,
            });
            continue;
        }
        let kind = match c {
            '+' => TokKind::Plus,
            '-' => TokKind::Minus,
            '*' => TokKind::Star,
            '/' => TokKind::Slash,
            '^' => TokKind::Caret,
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            ',' => TokKind::Comma,
            other => {
                return Err(ParseError::new(
                    tl,
                    tc,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        toks.push(Token {
            kind,
            line: tl,
            col: tc,
        });
        col += 1;
        i += 1;
    }
    toks.push(Token {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.kind, TokKind::Eof) {
            self.pos += 1;
        }
        t
    }

    fn err(&self, tok: &Token, message: impl Into<String>) -> ParseError {
        ParseError::new(tok.line, tok.col, message)
    }

    fn expr<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().kind {
                TokKind::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                TokKind::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().kind {
                TokKind::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                TokKind::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        if matches!(self.peek().kind, TokKind::Minus) {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let base = self.atom()?;
        if !matches!(self.peek().kind, TokKind::Caret) {
            return Ok(base);
        }
        self.bump();
        let negate = if matches!(self.peek().kind, TokKind::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let tok = self.bump();
        let raw = match tok.kind {
            TokKind::Num(v) => v,
            _ => return Err(self.err(&tok, "exponent must be a numeric literal")),
        };
        let p = if negate { -raw } else { raw };
        Ok(Expr::Pow(Box::new(base), real(p)))
    }

    fn atom<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let tok = self.bump();
        match &tok.kind {
            TokKind::Num(v) => Ok(Expr::Const(real(*v))),
            TokKind::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if !matches!(close.kind, TokKind::RParen) {
                    return Err(self.err(&close, "unbalanced parenthesis: expected `)`"));
                }
                Ok(inner)
            }
            TokKind::Ident(name) => {
                if let Some(idx) = self.vars.iter().position(|v| *v == name.as_str()) {
                    return Ok(Expr::Var(idx));
                }
                match name.as_str() {
                    "exp" | "sin" | "cos" => {
                        let args = self.args(&tok, name)?;
                        if args.len() != 1 {
                            return Err(self.err(
                                &tok,
                                format!(
                                    "function `{name}` expects 1 argument, found {}",
                                    args.len()
                                ),
                            ));
                        }
                        let a = Box::new(args.into_iter().next().unwrap());
                        Ok(match name.as_str() {
                            "exp" => Expr::Exp(a),
                            "sin" => Expr::Sin(a),
                            _ => Expr::Cos(a),
                        })
                    }
                    "gaussian" => {
                        let args = self.args(&tok, name)?;
                        if args.len() != 2 {
                            return Err(self.err(
                                &tok,
                                format!(
                                    "function `gaussian` expects 2 arguments, found {}",
                                    args.len()
                                ),
                            ));
                        }
                        let mut folded = args
                            .into_iter()
                            .map(|a: Expr<T>| a.simplified().const_value());
                        let center = folded.next().unwrap().ok_or_else(|| {
                            self.err(&tok, "gaussian center must be a constant expression")
                        })?;
                        let width = folded.next().unwrap().ok_or_else(|| {
                            self.err(&tok, "gaussian width must be a constant expression")
                        })?;
                        if width.is_zero() {
                            return Err(self.err(&tok, "gaussian width must be nonzero"));
                        }
                        Ok(Expr::Gaussian { center, width })
                    }
                    _ => Err(self.err(
                        &tok,
                        format!("unknown identifier `{name}` (variables here: {})", {
                            self.vars.join(", ")
                        }),
                    )),
                }
            }
            TokKind::Eof => Err(self.err(&tok, "unexpected end of input")),
            other => Err(self.err(&tok, format!("unexpected token `{}`", describe(other)))),
        }
    }

    fn args<T: Real>(&mut self, at: &Token, name: &str) -> Result<Vec<Expr<T>>, ParseError> {
        let open = self.bump();
        if !matches!(open.kind, TokKind::LParen) {
            return Err(self.err(at, format!("function `{name}` requires parentheses")));
        }
        let mut args = Vec::new();
        loop {
            args.push(self.expr()?);
            let next = self.bump();
            match next.kind {
                TokKind::Comma => continue,
                TokKind::RParen => return Ok(args),
                _ => {
                    return Err(self.err(&next, "unbalanced parenthesis: expected `,` or `)`"));
                }
            }
        }
    }
}

fn describe(kind: &TokKind) -> String {
    match kind {
        TokKind::Num(v) => format!("{v}"),
        TokKind::Ident(s) => s.clone(),
        TokKind::Plus => "+".into(),
        TokKind::Minus => "-".into(),
        TokKind::Star => "*".into(),
        TokKind::Slash => "/".into(),
        TokKind::Caret => "^".into(),
        TokKind::LParen => "(".into(),
        TokKind::RParen => ")".into(),
        TokKind::Comma => ",".into(),
        TokKind::Eof => "end of input".into(),
    }
}

/// Parses grammar text against the given variable table.
pub fn parse_expr<T: Real>(src: &str, vars: &[&str]) -> Result<Expr<T>, ParseError> {
    let toks = lex(src)?;
    if matches!(toks[0].kind, TokKind::Eof) {
        return Err(ParseError::new(1, 1, "empty expression"));
    }
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        vars,
    };
    let tree = parser.expr()?;
    let rest = parser.peek();
    if !matches!(rest.kind, TokKind::Eof) {
        return Err(ParseError::new(
            rest.line,
            rest.col,
            format!("unexpected trailing input `{}`", describe(&rest.kind)),
        ));
    }
    Ok(tree)
}

// ---------------------------------------------------------------------------
// Complex-valued sections
// ---------------------------------------------------------------------------

/// Complex-valued expression with precomputed exact partials.
///
/// `nvars` is fixed at construction; the per-variable derivative trees are
/// differentiated once and reused for every evaluation.
#[derive(Debug, Clone)]
pub struct ComplexExpr<T: Real> {
    re: Expr<T>,
    im: Expr<T>,
    d_re: Vec<Expr<T>>,
    d_im: Vec<Expr<T>>,
}

impl<T: Real> ComplexExpr<T> {
    pub fn new(re: Expr<T>, im: Expr<T>, nvars: usize) -> Self {
        let re = re.simplified();
        let im = im.simplified();
        let d_re = (0..nvars).map(|v| re.diff(v).simplified()).collect();
        let d_im = (0..nvars).map(|v| im.diff(v).simplified()).collect();
        ComplexExpr { re, im, d_re, d_im }
    }

    pub fn parse(re_src: &str, im_src: &str, vars: &[&str]) -> Result<Self, ParseError> {
        let re = parse_expr(re_src, vars)?;
        let im = parse_expr(im_src, vars)?;
        Ok(Self::new(re, im, vars.len()))
    }

    /// Purely real section with imaginary part zero.
    pub fn from_real_expr(re: Expr<T>, nvars: usize) -> Self {
        Self::new(re, Expr::Const(T::zero()), nvars)
    }

    pub fn nvars(&self) -> usize {
        self.d_re.len()
    }

    pub fn re(&self) -> &Expr<T> {
        &self.re
    }

    pub fn im(&self) -> &Expr<T> {
        &self.im
    }

    pub fn value(&self, vals: &[T]) -> Complex<T> {
        Complex::new(self.re.eval(vals), self.im.eval(vals))
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize, vals: &[T]) -> Complex<T> {
        Complex::new(self.d_re[var].eval(vals), self.d_im[var].eval(vals))
    }

    /// Complex product of two sections as expression trees.
    pub fn product(&self, other: &Self) -> Self {
        let re = Expr::Sub(
            Box::new(Expr::Mul(
                Box::new(self.re.clone()),
                Box::new(other.re.clone()),
            )),
            Box::new(Expr::Mul(
                Box::new(self.im.clone()),
                Box::new(other.im.clone()),
            )),
        );
        let im = Expr::Add(
            Box::new(Expr::Mul(
                Box::new(self.re.clone()),
                Box::new(other.im.clone()),
            )),
            Box::new(Expr::Mul(
                Box::new(self.im.clone()),
                Box::new(other.re.clone()),
            )),
        );
        Self::new(re, im, self.nvars())
    }

    /// Multiplies by the unit phase `exp(i * theta)` symbolically.
    pub fn phase_rotated(&self, theta: &Expr<T>) -> Self {
        let phase = ComplexExpr::new(
            Expr::Cos(Box::new(theta.clone())),
            Expr::Sin(Box::new(theta.clone())),
            self.nvars(),
        );
        self.product(&phase)
    }
}
