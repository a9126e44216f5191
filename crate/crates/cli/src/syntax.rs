//! Lexer, syntax tree, parser and canonical printer for model documents.
//!
//! A document is a sequence of lines; `#` starts a comment. Each non-blank
//! line is one declaration:
//!
//! ```text
//! var x0, x1, x2          # or: var x0..x3
//! symplectic std          # binds `omega`; also: symplectic w = std
//! symplectic w = explicit([0, 1], [[0, 1], [-1, 0]])
//! fn f = x0*x1 + 1/2*x2^2
//! form a = x0 * dx[1] ^^ dx[2]
//! vector v = x1*e[0] - e[2]
//! multivector p = e[0] ^^ e[1]
//! section s = (e[0], x1*dx[0])
//! ```
//!
//! Operator precedence, loosest first: `+ -`, then `* /`, then the wedge
//! `^^`, then unary minus, then the integer power `^`. All binary operators
//! associate to the left. `d[...]` is the exterior derivative.

use std::fmt;

use num_bigint::BigInt;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Unbound,
    Grade,
    Duplicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslError {
    pub kind: ErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl DslError {
    pub fn new(kind: ErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        DslError {
            kind,
            pos,
            message: message.into(),
        }
    }

    fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Syntax, pos, message)
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Unbound => "unbound name",
            ErrorKind::Grade => "grade mismatch",
            ErrorKind::Duplicate => "duplicate name",
        };
        write!(f, "{}: {kind}: {}", self.pos, self.message)
    }
}

impl std::error::Error for DslError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Wedge,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    DotDot,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Caret => "`^`",
            Tok::Wedge => "`^^`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Equals => "`=`",
            Tok::DotDot => "`..`",
            Tok::End => "end of line",
        };
        f.write_str(s)
    }
}

fn lex_line(text: &str, line: usize) -> Result<Vec<(Tok, Pos)>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: i + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = |next: char| chars.get(i + 1) == Some(&next);
        let (tok, len) = match c {
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            '^' if two('^') => (Tok::Wedge, 2),
            '^' => (Tok::Caret, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            '=' => (Tok::Equals, 1),
            '.' if two('.') => (Tok::DotDot, 2),
            c if c.is_ascii_digit() => {
                let end = (i..chars.len()).find(|&j| !chars[j].is_ascii_digit()).unwrap_or(chars.len());
                let s: String = chars[i..end].iter().collect();
                (Tok::Int(s.parse().expect("digits")), end - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let end = (i..chars.len())
                    .find(|&j| !(chars[j].is_ascii_alphanumeric() || chars[j] == '_'))
                    .unwrap_or(chars.len());
                (Tok::Ident(chars[i..end].iter().collect()), end - i)
            }
            other => return Err(DslError::syntax(pos, format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
        i += len;
    }
    out.push((Tok::End, Pos { line, column: chars.len() + 1 }));
    Ok(out)
}

/// An expression node. Equality ignores source positions.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    /// The coordinate function `x<i>`.
    Coord(u32),
    /// The coordinate 1-form `dx[i]`.
    Dx(u32),
    /// The coordinate vector field `e[i]`.
    E(u32),
    Name(String),
    D(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Wedge(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Pair(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BindingKind {
    Fn,
    Form,
    Vector,
    Multivector,
    Section,
}

impl BindingKind {
    pub fn keyword(self) -> &'static str {
        match self {
            BindingKind::Fn => "fn",
            BindingKind::Form => "form",
            BindingKind::Vector => "vector",
            BindingKind::Multivector => "multivector",
            BindingKind::Section => "section",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "fn" => BindingKind::Fn,
            "form" => BindingKind::Form,
            "vector" => BindingKind::Vector,
            "multivector" => BindingKind::Multivector,
            "section" => BindingKind::Section,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymplecticExpr {
    Standard,
    /// Indices and the antisymmetric matrix `w(d_i, d_j)`.
    Explicit(Vec<u32>, Vec<Vec<Expr>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Var(Vec<u32>),
    Symplectic { name: String, value: SymplecticExpr },
    Binding { kind: BindingKind, name: String, value: Expr },
}

/// A declaration with the position of its first token. Equality ignores the
/// position.
#[derive(Clone, Debug)]
pub struct Located {
    pub decl: Decl,
    pub pos: Pos,
}

impl PartialEq for Located {
    fn eq(&self, other: &Self) -> bool {
        self.decl == other.decl
    }
}

impl Eq for Located {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub decls: Vec<Located>,
}

pub const DEFAULT_SYMPLECTIC: &str = "omega";

const RESERVED: [&str; 12] = [
    "var", "symplectic", "fn", "form", "vector", "multivector", "section", "d", "dx", "e", "std", "explicit",
];

/// `x12` style coordinate names.
fn coordinate(s: &str) -> Option<u32> {
    let digits = s.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<Pos, DslError> {
        let pos = self.pos();
        if self.eat(&t) {
            Ok(pos)
        } else {
            Err(DslError::syntax(pos, format!("expected {t}, found {}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), DslError> {
        match self.bump() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (t, pos) => Err(DslError::syntax(pos, format!("expected a name, found {t}"))),
        }
    }

    fn name(&mut self) -> Result<String, DslError> {
        let (s, pos) = self.ident()?;
        if RESERVED.contains(&s.as_str()) || coordinate(&s).is_some() {
            return Err(DslError::syntax(pos, format!("`{s}` is reserved and cannot be bound")));
        }
        Ok(s)
    }

    fn small_int(&mut self) -> Result<u32, DslError> {
        match self.bump() {
            (Tok::Int(n), pos) => u32::try_from(&n).map_err(|_| DslError::syntax(pos, format!("integer `{n}` out of range"))),
            (t, pos) => Err(DslError::syntax(pos, format!("expected an integer, found {t}"))),
        }
    }

    fn end(&mut self) -> Result<(), DslError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(DslError::syntax(self.pos(), format!("unexpected {t} after declaration"))),
        }
    }

    fn decl(&mut self) -> Result<Located, DslError> {
        let (kw, pos) = self.ident()?;
        let decl = match kw.as_str() {
            "var" => self.var_list()?,
            "symplectic" => {
                if matches!(self.peek(), Tok::Ident(s) if s == "std") && self.toks[self.at + 1].0 == Tok::End {
                    self.bump();
                    Decl::Symplectic {
                        name: DEFAULT_SYMPLECTIC.into(),
                        value: SymplecticExpr::Standard,
                    }
                } else {
                    let name = self.name()?;
                    self.expect(Tok::Equals)?;
                    let value = self.symplectic_value()?;
                    Decl::Symplectic { name, value }
                }
            }
            other => match BindingKind::from_keyword(other) {
                Some(kind) => {
                    let name = self.name()?;
                    self.expect(Tok::Equals)?;
                    let value = self.expr()?;
                    Decl::Binding { kind, name, value }
                }
                None => return Err(DslError::syntax(pos, format!("unknown declaration `{other}`"))),
            },
        };
        self.end()?;
        Ok(Located { decl, pos })
    }

    fn var_list(&mut self) -> Result<Decl, DslError> {
        let mut out = Vec::new();
        loop {
            let (s, pos) = self.ident()?;
            let first = coordinate(&s).ok_or_else(|| DslError::syntax(pos, format!("expected a coordinate like x0, found `{s}`")))?;
            if self.eat(&Tok::DotDot) {
                let (s, pos) = self.ident()?;
                let last = coordinate(&s).ok_or_else(|| DslError::syntax(pos, format!("expected a coordinate like x3, found `{s}`")))?;
                if last < first {
                    return Err(DslError::syntax(pos, "empty coordinate range"));
                }
                out.extend(first..=last);
            } else {
                out.push(first);
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(Decl::Var(out))
    }

    fn symplectic_value(&mut self) -> Result<SymplecticExpr, DslError> {
        let (s, pos) = self.ident()?;
        match s.as_str() {
            "std" => Ok(SymplecticExpr::Standard),
            "explicit" => {
                self.expect(Tok::LParen)?;
                self.expect(Tok::LBracket)?;
                let mut indices = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        indices.push(self.small_int()?);
                        if self.eat(&Tok::RBracket) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                self.expect(Tok::Comma)?;
                self.expect(Tok::LBracket)?;
                let mut rows = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        self.expect(Tok::LBracket)?;
                        let mut row = Vec::new();
                        if !self.eat(&Tok::RBracket) {
                            loop {
                                row.push(self.expr()?);
                                if self.eat(&Tok::RBracket) {
                                    break;
                                }
                                self.expect(Tok::Comma)?;
                            }
                        }
                        rows.push(row);
                        if self.eat(&Tok::RBracket) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(SymplecticExpr::Explicit(indices, rows))
            }
            _ => Err(DslError::syntax(pos, format!("expected `std` or `explicit(...)`, found `{s}`"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let kind = if self.eat(&Tok::Plus) {
                ExprKind::Add(Box::new(lhs), Box::new(self.term()?))
            } else if self.eat(&Tok::Minus) {
                ExprKind::Sub(Box::new(lhs), Box::new(self.term()?))
            } else {
                return Ok(lhs);
            };
            lhs = Expr { kind, pos };
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.wedge()?;
        loop {
            let pos = self.pos();
            let kind = if self.eat(&Tok::Star) {
                ExprKind::Mul(Box::new(lhs), Box::new(self.wedge()?))
            } else if self.eat(&Tok::Slash) {
                ExprKind::Div(Box::new(lhs), Box::new(self.wedge()?))
            } else {
                return Ok(lhs);
            };
            lhs = Expr { kind, pos };
        }
    }

    fn wedge(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            if !self.eat(&Tok::Wedge) {
                return Ok(lhs);
            }
            let rhs = self.unary()?;
            lhs = Expr {
                kind: ExprKind::Wedge(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        let pos = self.pos();
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                pos,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let mut base = self.atom()?;
        loop {
            let pos = self.pos();
            if !self.eat(&Tok::Caret) {
                return Ok(base);
            }
            let e = self.small_int()?;
            base = Expr {
                kind: ExprKind::Pow(Box::new(base), e),
                pos,
            };
        }
    }

    fn indexed(&mut self) -> Result<u32, DslError> {
        self.expect(Tok::LBracket)?;
        let i = self.small_int()?;
        self.expect(Tok::RBracket)?;
        Ok(i)
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        let (tok, pos) = self.bump();
        let kind = match tok {
            Tok::Int(n) => ExprKind::Int(n),
            Tok::LParen => {
                let first = self.expr()?;
                if self.eat(&Tok::Comma) {
                    let second = self.expr()?;
                    self.expect(Tok::RParen)?;
                    ExprKind::Pair(Box::new(first), Box::new(second))
                } else {
                    self.expect(Tok::RParen)?;
                    return Ok(first);
                }
            }
            Tok::Ident(s) => match s.as_str() {
                "dx" => ExprKind::Dx(self.indexed()?),
                "e" => ExprKind::E(self.indexed()?),
                "d" => {
                    self.expect(Tok::LBracket)?;
                    let inner = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    ExprKind::D(Box::new(inner))
                }
                _ => match coordinate(&s) {
                    Some(i) => ExprKind::Coord(i),
                    None if RESERVED.contains(&s.as_str()) => {
                        return Err(DslError::syntax(pos, format!("unexpected keyword `{s}` in expression")))
                    }
                    None => ExprKind::Name(s),
                },
            },
            t => return Err(DslError::syntax(pos, format!("expected an expression, found {t}"))),
        };
        Ok(Expr { kind, pos })
    }
}

/// Parses a whole document. Name resolution and typing happen later.
pub fn parse(text: &str) -> Result<Document, DslError> {
    let mut decls = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let toks = lex_line(line, n + 1)?;
        if toks.len() == 1 {
            continue;
        }
        let mut p = Parser { toks, at: 0 };
        decls.push(p.decl()?);
    }
    Ok(Document { decls })
}

/// Parses a single expression, e.g. a command-line argument.
pub fn parse_expr(text: &str) -> Result<Expr, DslError> {
    let mut p = Parser {
        toks: lex_line(text, 1)?,
        at: 0,
    };
    let e = p.expr()?;
    p.end()?;
    Ok(e)
}

fn precedence(kind: &ExprKind) -> u8 {
    match kind {
        ExprKind::Add(..) | ExprKind::Sub(..) => 1,
        ExprKind::Mul(..) | ExprKind::Div(..) => 2,
        ExprKind::Wedge(..) => 3,
        ExprKind::Neg(..) => 4,
        ExprKind::Pow(..) => 5,
        _ => 6,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| -> fmt::Result {
            if precedence(&e.kind) < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let me = precedence(&self.kind);
        match &self.kind {
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::Coord(i) => write!(f, "x{i}"),
            ExprKind::Dx(i) => write!(f, "dx[{i}]"),
            ExprKind::E(i) => write!(f, "e[{i}]"),
            ExprKind::Name(s) => f.write_str(s),
            ExprKind::D(e) => write!(f, "d[{e}]"),
            ExprKind::Neg(e) => {
                f.write_str("-")?;
                child(f, e, me)
            }
            ExprKind::Pow(e, n) => {
                child(f, e, 6)?;
                write!(f, "^{n}")
            }
            ExprKind::Pair(a, b) => write!(f, "({a}, {b})"),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) | ExprKind::Div(a, b) | ExprKind::Wedge(a, b) => {
                let op = match &self.kind {
                    ExprKind::Add(..) => " + ",
                    ExprKind::Sub(..) => " - ",
                    ExprKind::Mul(..) => "*",
                    ExprKind::Div(..) => "/",
                    _ => " ^^ ",
                };
                child(f, a, me)?;
                f.write_str(op)?;
                child(f, b, me + 1)
            }
        }
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Var(v) => {
                let names: Vec<String> = v.iter().map(|i| format!("x{i}")).collect();
                write!(f, "var {}", names.join(", "))
            }
            Decl::Symplectic { name, value } => {
                write!(f, "symplectic {name} = ")?;
                match value {
                    SymplecticExpr::Standard => f.write_str("std"),
                    SymplecticExpr::Explicit(idx, rows) => {
                        let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                        let rows: Vec<String> = rows
                            .iter()
                            .map(|r| {
                                let r: Vec<String> = r.iter().map(|e| e.to_string()).collect();
                                format!("[{}]", r.join(", "))
                            })
                            .collect();
                        write!(f, "explicit([{}], [{}])", idx.join(", "), rows.join(", "))
                    }
                }
            }
            Decl::Binding { kind, name, value } => write!(f, "{} {name} = {value}", kind.keyword()),
        }
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{}", d.decl)?;
        }
        Ok(())
    }
}
