//! The definition language: lexer, parser and name resolution.
//!
//! ```text
//! ring R = GF(2)[x]/(x^2);
//! module M over R = ideal(x);
//! classify M;
//! ```

use std::collections::HashMap;
use std::fmt;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub pos: Pos,
}

pub type Name = Spanned<String>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: &[&str] = &["(+)", ";", "=", "/", "(", ")", "[", "]", ",", "*", "+", "-", "^", "<", ">"];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, CliError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse()
                .map_err(|_| CliError::syntax(pos, format!("integer `{text}` is too large")))?;
            out.push((Tok::Int(n), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '@' || chars[i] == '\'') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| CliError::syntax(pos, format!("unexpected character `{c}`")))?;
            advance(&mut i, &mut line, &mut col, sym.chars().count());
            out.push((Tok::Sym(sym), pos));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Ring element or polynomial expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64, Pos),
    Var(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `<a, b>` in a product ring.
    Tuple(Vec<Expr>, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Int(_, p) | Expr::Var(_, p) | Expr::Tuple(_, p) => *p,
            Expr::Neg(e) | Expr::Pow(e, _) => e.pos(),
            Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) => a.pos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingExpr {
    Modulus(u64),
    Galois { prime: u64, vars: Vec<Name>, relations: Vec<Expr> },
    Product(Name, Name),
    Named(Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModExpr {
    Coker(Vec<Vec<Expr>>),
    Free(usize),
    Dual(Name),
    Sum(Name, Name),
    Ideal(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Classify(Name),
    Resolve { module: Name, depth: Option<usize> },
    Ext { left: Name, right: Name, degree: usize },
    Tor { left: Name, right: Name, degree: usize },
    Witness { module: Name, property: Spanned<Property> },
    Qf(RingExpr),
    Decompose(RingExpr),
    Fuzz(Vec<(Name, u64)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Projective,
    Injective,
    Flat,
    Free,
    SgProjective,
    SgInjective,
    SgFlat,
    GProjective,
}

impl Property {
    pub const ALL: [(&'static str, Property); 8] = [
        ("projective", Property::Projective),
        ("injective", Property::Injective),
        ("flat", Property::Flat),
        ("free", Property::Free),
        ("sg_projective", Property::SgProjective),
        ("sg_injective", Property::SgInjective),
        ("sg_flat", Property::SgFlat),
        ("g_projective_certified", Property::GProjective),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, p)| *p == self).expect("listed").0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Ring { name: Name, expr: RingExpr },
    Module { name: Name, ring: Name, expr: ModExpr },
    Command { command: Command, pos: Pos, text: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub decls: Vec<Decl>,
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, CliError> {
        Err(CliError::syntax(self.pos(), format!("expected {wanted}, found {}", self.peek())))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == w)
    }

    fn sym(&mut self, s: &'static str) -> Result<Pos, CliError> {
        if self.is_sym(s) {
            Ok(self.bump().1)
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn word(&mut self, w: &str) -> Result<Pos, CliError> {
        if self.is_word(w) {
            Ok(self.bump().1)
        } else {
            self.unexpected(&format!("`{w}`"))
        }
    }

    fn name(&mut self) -> Result<Name, CliError> {
        match self.bump() {
            (Tok::Ident(s), pos) => Ok(Spanned { value: s, pos }),
            (t, pos) => Err(CliError::syntax(pos, format!("expected a name, found {t}"))),
        }
    }

    fn int(&mut self) -> Result<u64, CliError> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(n),
            (t, pos) => Err(CliError::syntax(pos, format!("expected an integer, found {t}"))),
        }
    }

    fn small(&mut self) -> Result<usize, CliError> {
        let pos = self.pos();
        let n = self.int()?;
        usize::try_from(n).ok().filter(|&n| n <= 1 << 16).ok_or_else(|| CliError::syntax(pos, format!("{n} is too large")))
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.term()?;
        loop {
            if self.is_sym("+") {
                self.bump();
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.is_sym("-") {
                self.bump();
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.factor()?;
        while self.is_sym("*") {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, CliError> {
        if self.is_sym("-") {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.is_sym("^") {
            self.bump();
            let pos = self.pos();
            let e = self.int()?;
            let e = u32::try_from(e).map_err(|_| CliError::syntax(pos, "exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, CliError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n, pos))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Var(s, pos))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            Tok::Sym("<") => {
                self.bump();
                let parts = self.list(">", Self::expr)?;
                Ok(Expr::Tuple(parts, pos))
            }
            _ => self.unexpected("an expression"),
        }
    }

    /// Comma-separated items up to and including `close`.
    fn list<T>(&mut self, close: &'static str, mut item: impl FnMut(&mut Self) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
        let mut out = Vec::new();
        if self.is_sym(close) {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.is_sym(",") {
                self.bump();
            } else {
                self.sym(close)?;
                return Ok(out);
            }
        }
    }

    fn ring_expr(&mut self) -> Result<RingExpr, CliError> {
        if self.is_word("Z") {
            self.bump();
            self.sym("/")?;
            return Ok(RingExpr::Modulus(self.int()?));
        }
        if self.is_word("GF") {
            self.bump();
            self.sym("(")?;
            let prime = self.int()?;
            self.sym(")")?;
            if !self.is_sym("[") {
                return Ok(RingExpr::Galois { prime, vars: Vec::new(), relations: Vec::new() });
            }
            self.bump();
            let vars = self.list("]", Self::name)?;
            let relations = if self.is_sym("/") {
                self.bump();
                self.sym("(")?;
                self.list(")", Self::expr)?
            } else {
                Vec::new()
            };
            return Ok(RingExpr::Galois { prime, vars, relations });
        }
        let a = self.name()?;
        if self.is_sym("*") {
            self.bump();
            let b = self.name()?;
            return Ok(RingExpr::Product(a, b));
        }
        Ok(RingExpr::Named(a))
    }

    fn mod_expr(&mut self) -> Result<ModExpr, CliError> {
        if self.is_word("coker") {
            self.bump();
            self.sym("[")?;
            let rows = self.list("]", |p| {
                p.sym("[")?;
                p.list("]", Self::expr)
            })?;
            return Ok(ModExpr::Coker(rows));
        }
        if self.is_word("free") {
            self.bump();
            // `free R 2` names the ring again; `free 2` does not
            if let Tok::Ident(_) = self.peek() {
                self.bump();
            }
            return Ok(ModExpr::Free(self.small()?));
        }
        if self.is_word("dual") {
            self.bump();
            return Ok(ModExpr::Dual(self.name()?));
        }
        if self.is_word("ideal") {
            self.bump();
            self.sym("(")?;
            return Ok(ModExpr::Ideal(self.list(")", Self::expr)?));
        }
        let a = self.name()?;
        self.sym("(+)")?;
        Ok(ModExpr::Sum(a, self.name()?))
    }

    fn command(&mut self, word: Name) -> Result<Command, CliError> {
        Ok(match word.value.as_str() {
            "classify" => Command::Classify(self.name()?),
            "resolve" => {
                let module = self.name()?;
                let depth = if matches!(self.peek(), Tok::Int(_)) { Some(self.small()?) } else { None };
                Command::Resolve { module, depth }
            }
            "ext" | "tor" => {
                let left = self.name()?;
                let right = self.name()?;
                let degree = self.small()?;
                if word.value == "ext" {
                    Command::Ext { left, right, degree }
                } else {
                    Command::Tor { left, right, degree }
                }
            }
            "witness" => {
                let module = self.name()?;
                let p = self.name()?;
                let property = Property::ALL
                    .iter()
                    .find(|(n, _)| *n == p.value)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| {
                        let names: Vec<&str> = Property::ALL.iter().map(|(n, _)| *n).collect();
                        CliError::syntax(p.pos, format!("unknown property `{}`; expected one of {}", p.value, names.join(", ")))
                    })?;
                Command::Witness { module, property: Spanned { value: property, pos: p.pos } }
            }
            "qf" => Command::Qf(self.ring_expr()?),
            "decompose" => Command::Decompose(self.ring_expr()?),
            "fuzz" => {
                let mut opts = Vec::new();
                while let Tok::Ident(_) = self.peek() {
                    let key = self.name()?;
                    if !["seed", "count", "gens", "rels"].contains(&key.value.as_str()) {
                        return Err(CliError::syntax(key.pos, format!("unknown fuzz option `{}`", key.value)));
                    }
                    if self.is_sym("=") {
                        self.bump();
                    }
                    opts.push((key, self.int()?));
                }
                Command::Fuzz(opts)
            }
            other => {
                return Err(CliError::syntax(word.pos, format!("unknown command `{other}`")));
            }
        })
    }

    fn decl(&mut self) -> Result<Decl, CliError> {
        let start = self.pos();
        let first = self.name()?;
        let decl = match first.value.as_str() {
            "ring" => {
                let name = self.name()?;
                self.sym("=")?;
                Decl::Ring { name, expr: self.ring_expr()? }
            }
            "module" => {
                let name = self.name()?;
                self.word("over")?;
                let ring = self.name()?;
                self.sym("=")?;
                Decl::Module { name, ring, expr: self.mod_expr()? }
            }
            _ => {
                let command = self.command(first)?;
                let end = self.pos();
                Decl::Command { command, pos: start, text: self.slice(start, end) }
            }
        };
        self.sym(";")?;
        Ok(decl)
    }

    fn slice(&self, from: Pos, to: Pos) -> String {
        let offset = |p: Pos| {
            self.src
                .split_inclusive('\n')
                .take(p.line - 1)
                .map(str::len)
                .sum::<usize>()
                + self.src.split_inclusive('\n').nth(p.line - 1).map_or(0, |l| {
                    l.char_indices().nth(p.col - 1).map_or(l.len(), |(b, _)| b)
                })
        };
        let (a, b) = (offset(from), offset(to).min(self.src.len()));
        self.src[a..b].split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

/// Parses a script and checks that every name is declared once, before use.
pub fn parse_script(src: &str) -> Result<Script, CliError> {
    let mut p = Parser { toks: lex(src)?, at: 0, src };
    let mut decls = Vec::new();
    while *p.peek() != Tok::Eof {
        decls.push(p.decl()?);
    }
    let script = Script { decls };
    check_names(&script)?;
    Ok(script)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Ring,
    Module,
}

fn check_names(script: &Script) -> Result<(), CliError> {
    let mut scope: HashMap<&str, (Kind, Pos)> = HashMap::new();
    let lookup = |scope: &HashMap<&str, (Kind, Pos)>, n: &Name, want: &[Kind]| -> Result<(), CliError> {
        match scope.get(n.value.as_str()) {
            Some((k, _)) if want.contains(k) => Ok(()),
            Some((Kind::Ring, _)) => Err(CliError::semantic(n.pos, format!("`{}` is a ring, not a module", n.value))),
            Some((Kind::Module, _)) => Err(CliError::semantic(n.pos, format!("`{}` is a module, not a ring", n.value))),
            None => Err(CliError::Undefined { name: n.value.clone(), pos: n.pos }),
        }
    };
    let ring_refs = |e: &RingExpr| -> Vec<Name> {
        match e {
            RingExpr::Product(a, b) => vec![a.clone(), b.clone()],
            RingExpr::Named(a) => vec![a.clone()],
            _ => Vec::new(),
        }
    };
    for decl in &script.decls {
        let (bind, kind) = match decl {
            Decl::Ring { name, expr } => {
                for r in ring_refs(expr) {
                    lookup(&scope, &r, &[Kind::Ring])?;
                }
                (Some(name), Kind::Ring)
            }
            Decl::Module { name, ring, expr } => {
                lookup(&scope, ring, &[Kind::Ring])?;
                match expr {
                    ModExpr::Dual(a) => lookup(&scope, a, &[Kind::Module, Kind::Ring])?,
                    ModExpr::Sum(a, b) => {
                        lookup(&scope, a, &[Kind::Module, Kind::Ring])?;
                        lookup(&scope, b, &[Kind::Module, Kind::Ring])?;
                    }
                    _ => {}
                }
                (Some(name), Kind::Module)
            }
            Decl::Command { command, .. } => {
                let either = [Kind::Module, Kind::Ring];
                match command {
                    Command::Classify(m) | Command::Resolve { module: m, .. } | Command::Witness { module: m, .. } => {
                        lookup(&scope, m, &either)?
                    }
                    Command::Ext { left, right, .. } | Command::Tor { left, right, .. } => {
                        lookup(&scope, left, &either)?;
                        lookup(&scope, right, &either)?;
                    }
                    Command::Qf(e) | Command::Decompose(e) => {
                        for r in ring_refs(e) {
                            lookup(&scope, &r, &[Kind::Ring])?;
                        }
                    }
                    Command::Fuzz(_) => {}
                }
                (None, Kind::Module)
            }
        };
        if let Some(name) = bind {
            if let Some((_, first)) = scope.get(name.value.as_str()) {
                return Err(CliError::Redefined { name: name.value.clone(), pos: name.pos, first: *first });
            }
            scope.insert(&name.value, (kind, name.pos));
        }
    }
    Ok(())
}
