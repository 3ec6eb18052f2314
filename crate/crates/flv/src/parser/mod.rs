//! Surface syntax for `.flv` modules.
//!
//! The grammar mirrors the illustrative listings: recursive definitions
//! `Name(x) := body`, methods `Name(params) returns (outs)` with
//! `@pre:`/`@post:` contracts and a parenthesized `if`/`then`/`else` body,
//! `lemma name: formula`, `@same-support R1 R2` directives, `logic slfl;`
//! mode selection and optional `field f : Sort;` declarations (undeclared
//! fields are inferred from use). `#` starts a line comment.

pub mod pretty;

use crate::ast::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

type PResult<T> = Result<T, ParseError>;

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    At(String), // @pre, @post, @same-support
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Assign, // :=
    Eq,     // =
    Ne,     // !=
    Lt,
    Le,
    Gt,
    Ge,
    Implies,  // =>
    Plus,
    Minus,
    Star,
    AmpAmp, // && weak conjunction
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> PResult<Vec<Lexed>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0usize;
    macro_rules! push {
        ($t:expr, $l:expr, $c:expr) => {
            out.push(Lexed {
                tok: $t,
                line: $l,
                col: $c,
            })
        };
    }
    while i < bytes.len() {
        let c = bytes[i];
        let (l0, c0) = (line, col);
        let bump = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if bytes[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => bump(&mut i, &mut line, &mut col),
            '#' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    bump(&mut i, &mut line, &mut col);
                }
            }
            '(' => {
                push!(Tok::LParen, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            ')' => {
                push!(Tok::RParen, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            '[' => {
                push!(Tok::LBracket, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            ']' => {
                push!(Tok::RBracket, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            ',' => {
                push!(Tok::Comma, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            ';' => {
                push!(Tok::Semi, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            '.' => {
                push!(Tok::Dot, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            '+' => {
                push!(Tok::Plus, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            '-' => {
                push!(Tok::Minus, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            '*' => {
                push!(Tok::Star, l0, c0);
                bump(&mut i, &mut line, &mut col);
            }
            '&' => {
                bump(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == '&' {
                    bump(&mut i, &mut line, &mut col);
                    push!(Tok::AmpAmp, l0, c0);
                } else {
                    return Err(ParseError {
                        line: l0,
                        col: c0,
                        message: "expected `&&`".into(),
                    });
                }
            }
            ':' => {
                bump(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == '=' {
                    bump(&mut i, &mut line, &mut col);
                    push!(Tok::Assign, l0, c0);
                } else {
                    push!(Tok::Colon, l0, c0);
                }
            }
            '=' => {
                bump(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == '>' {
                    bump(&mut i, &mut line, &mut col);
                    push!(Tok::Implies, l0, c0);
                } else {
                    push!(Tok::Eq, l0, c0);
                }
            }
            '!' => {
                bump(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == '=' {
                    bump(&mut i, &mut line, &mut col);
                    push!(Tok::Ne, l0, c0);
                } else {
                    return Err(ParseError {
                        line: l0,
                        col: c0,
                        message: "expected `!=`".into(),
                    });
                }
            }
            '<' => {
                bump(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == '=' {
                    bump(&mut i, &mut line, &mut col);
                    push!(Tok::Le, l0, c0);
                } else {
                    push!(Tok::Lt, l0, c0);
                }
            }
            '>' => {
                bump(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == '=' {
                    bump(&mut i, &mut line, &mut col);
                    push!(Tok::Ge, l0, c0);
                } else {
                    push!(Tok::Gt, l0, c0);
                }
            }
            '@' => {
                bump(&mut i, &mut line, &mut col);
                let mut name = String::new();
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '-') {
                    name.push(bytes[i]);
                    bump(&mut i, &mut line, &mut col);
                }
                if name.is_empty() {
                    return Err(ParseError {
                        line: l0,
                        col: c0,
                        message: "expected directive name after `@`".into(),
                    });
                }
                push!(Tok::At(name), l0, c0);
            }
            c if c.is_ascii_digit() => {
                let mut n = 0i64;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    n = n * 10 + (bytes[i] as i64 - '0' as i64);
                    bump(&mut i, &mut line, &mut col);
                }
                push!(Tok::Int(n), l0, c0);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    name.push(bytes[i]);
                    bump(&mut i, &mut line, &mut col);
                }
                // leading underscores are reserved for generated names
                if name.starts_with('_') {
                    return Err(ParseError {
                        line: l0,
                        col: c0,
                        message: format!("identifier `{name}` is reserved (leading underscore)"),
                    });
                }
                push!(Tok::Ident(name), l0, c0);
            }
            other => {
                return Err(ParseError {
                    line: l0,
                    col: c0,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    mode: LogicMode,
    rec_names: std::collections::BTreeSet<String>,
}

const RESERVED: &[&str] = &[
    "ite", "True", "False", "nil", "and", "or", "Not", "Exists", "Forall", "Sp", "Old",
    "IsMember", "IsSubset", "IsEmpty", "SetAdd", "SetUnion", "SetIntersect", "SetMinus",
    "Singleton", "EmptySetInt", "EmptySetLoc", "PInf", "NInf", "returns", "lemma", "logic",
    "field", "assume", "alloc", "free", "return", "if", "then", "else", "iff", "PointsTo",
];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|l| &l.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|l| (l.line, l.col))
            .unwrap_or_else(|| {
                self.toks
                    .last()
                    .map(|l| (l.line, l.col + 1))
                    .unwrap_or((1, 1))
            })
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|l| l.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn kw(&mut self, word: &str) -> bool {
        if let Some(Tok::Ident(n)) = self.peek() {
            if n == word {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn peek_kw(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(n)) if n == word)
    }

    // -- expressions ---------------------------------------------------------

    /// An expression is a formula or a term; sort out later. Precedence
    /// (loose to tight): iff, =>, or, and, *, &&, comparisons, +/-, atoms.
    fn expr(&mut self) -> PResult<Expr> {
        self.expr_iff()
    }

    fn expr_iff(&mut self) -> PResult<Expr> {
        let lhs = self.expr_implies()?;
        if self.kw("iff") {
            let rhs = self.expr_implies()?;
            return Ok(Expr::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn expr_implies(&mut self) -> PResult<Expr> {
        let lhs = self.expr_or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.expr_implies()?; // right associative
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn expr_or(&mut self) -> PResult<Expr> {
        let mut parts = vec![self.expr_and()?];
        while self.kw("or") {
            parts.push(self.expr_and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Or(parts)
        })
    }

    fn expr_and(&mut self) -> PResult<Expr> {
        let mut parts = vec![self.expr_star()?];
        while self.kw("and") {
            parts.push(self.expr_star()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::And(parts)
        })
    }

    fn expr_star(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_weakand()?;
        while self.eat(&Tok::Star) {
            let rhs = self.expr_weakand()?;
            lhs = Expr::Star(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn expr_weakand(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_cmp()?;
        while self.eat(&Tok::AmpAmp) {
            let rhs = self.expr_cmp()?;
            lhs = Expr::WeakAnd(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn expr_cmp(&mut self) -> PResult<Expr> {
        let lhs = self.expr_sum()?;
        let op = match self.peek() {
            Some(Tok::Eq) => CmpOp::Eq,
            Some(Tok::Ne) => CmpOp::Ne,
            Some(Tok::Lt) => CmpOp::Lt,
            Some(Tok::Le) => CmpOp::Le,
            Some(Tok::Gt) => CmpOp::Gt,
            Some(Tok::Ge) => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.expr_sum()?;
        Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn expr_sum(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_atom()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.expr_atom()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.expr_atom()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(&Tok::Comma, "`,` or `)`")?;
        }
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RBracket, "`]`")?;
                Ok(Expr::Cloud(Box::new(e)))
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Int(n)) => Ok(Expr::Int(-n)),
                    _ => self.err("expected integer after `-`"),
                }
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "True" => Ok(Expr::True),
                    "False" => Ok(Expr::False),
                    "nil" => Ok(Expr::Nil),
                    "PInf" => Ok(Expr::PInf),
                    "NInf" => Ok(Expr::NInf),
                    "EmptySetInt" => Ok(Expr::Empty(Sort::SetInt)),
                    "EmptySetLoc" => Ok(Expr::Empty(Sort::SetLoc)),
                    "Not" => {
                        let mut a = self.args()?;
                        if a.len() != 1 {
                            return self.err("Not takes one argument");
                        }
                        Ok(Expr::Not(Box::new(a.pop().unwrap())))
                    }
                    "ite" => {
                        let mut a = self.args()?;
                        if a.len() != 3 {
                            return self.err("ite takes three arguments");
                        }
                        let c = a.remove(0);
                        let t = a.remove(0);
                        let e = a.remove(0);
                        Ok(Expr::Ite(Box::new(c), Box::new(t), Box::new(e)))
                    }
                    "Sp" => {
                        let mut a = self.args()?;
                        if a.len() != 1 {
                            return self.err("Sp takes one argument");
                        }
                        Ok(Expr::Sp(Box::new(a.pop().unwrap())))
                    }
                    "Old" => {
                        let mut a = self.args()?;
                        if a.len() != 1 {
                            return self.err("Old takes one argument");
                        }
                        Ok(Expr::OldE(Box::new(a.pop().unwrap())))
                    }
                    "IsMember" => {
                        let mut a = self.args()?;
                        if a.len() != 2 {
                            return self.err("IsMember takes two arguments");
                        }
                        let s = a.pop().unwrap();
                        let e = a.pop().unwrap();
                        Ok(Expr::Member(Box::new(e), Box::new(s)))
                    }
                    "IsSubset" => {
                        let mut a = self.args()?;
                        if a.len() != 2 {
                            return self.err("IsSubset takes two arguments");
                        }
                        let t = a.pop().unwrap();
                        let s = a.pop().unwrap();
                        Ok(Expr::SubsetE(Box::new(s), Box::new(t)))
                    }
                    "IsEmpty" => {
                        let mut a = self.args()?;
                        if a.len() != 1 {
                            return self.err("IsEmpty takes one argument");
                        }
                        Ok(Expr::IsEmptyE(Box::new(a.pop().unwrap())))
                    }
                    "SetAdd" => {
                        let mut a = self.args()?;
                        if a.len() != 2 {
                            return self.err("SetAdd takes two arguments");
                        }
                        let e = a.pop().unwrap();
                        let s = a.pop().unwrap();
                        Ok(Expr::Union(
                            Box::new(s),
                            Box::new(Expr::SingletonE(Box::new(e))),
                        ))
                    }
                    "Singleton" => {
                        let mut a = self.args()?;
                        if a.len() != 1 {
                            return self.err("Singleton takes one argument");
                        }
                        Ok(Expr::SingletonE(Box::new(a.pop().unwrap())))
                    }
                    "SetUnion" | "SetIntersect" | "SetMinus" => {
                        let mut a = self.args()?;
                        if a.len() != 2 {
                            return self.err(format!("{name} takes two arguments"));
                        }
                        let rhs = a.pop().unwrap();
                        let lhs = a.pop().unwrap();
                        Ok(match name.as_str() {
                            "SetUnion" => Expr::Union(Box::new(lhs), Box::new(rhs)),
                            "SetIntersect" => Expr::Inter(Box::new(lhs), Box::new(rhs)),
                            _ => Expr::Diff(Box::new(lhs), Box::new(rhs)),
                        })
                    }
                    "PointsTo" => {
                        let (line, col) = self.here();
                        let mut a = self.args()?;
                        if a.len() != 3 {
                            return Err(ParseError {
                                line,
                                col,
                                message: "PointsTo takes (src, field, dst)".into(),
                            });
                        }
                        let dst = a.pop().unwrap();
                        let field = a.pop().unwrap();
                        let src = a.pop().unwrap();
                        let src = match src {
                            Expr::Apply(_, _) | Expr::Int(_) => {
                                return Err(ParseError {
                                    line,
                                    col,
                                    message: "PointsTo source must be a variable".into(),
                                })
                            }
                            Expr::Var(v) => v,
                            _ => {
                                return Err(ParseError {
                                    line,
                                    col,
                                    message: "PointsTo source must be a variable".into(),
                                })
                            }
                        };
                        let field = match field {
                            Expr::Var(v) => v,
                            _ => {
                                return Err(ParseError {
                                    line,
                                    col,
                                    message: "PointsTo field must be a name".into(),
                                })
                            }
                        };
                        Ok(Expr::PointsTo(src, field, Box::new(dst)))
                    }
                    "Exists" => {
                        // Exists y: f(x). body
                        let var = self.expect_ident("bound variable")?;
                        self.expect(&Tok::Colon, "`:`")?;
                        let field = self.expect_ident("field name")?;
                        let arg = self.args()?;
                        if arg.len() != 1 {
                            return self.err("guard takes one argument");
                        }
                        self.expect(&Tok::Dot, "`.`")?;
                        let body = self.expr()?;
                        Ok(Expr::Exists {
                            var,
                            field,
                            arg: Box::new(arg.into_iter().next().unwrap()),
                            body: Box::new(body),
                        })
                    }
                    "Forall" => {
                        let mut vars = vec![self.expect_ident("bound variable")?];
                        while self.eat(&Tok::Comma) {
                            vars.push(self.expect_ident("bound variable")?);
                        }
                        self.expect(&Tok::Dot, "`.`")?;
                        let body = self.expr()?;
                        Ok(Expr::Forall {
                            vars,
                            body: Box::new(body),
                        })
                    }
                    _ => {
                        if self.peek() == Some(&Tok::LParen) {
                            let a = self.args()?;
                            Ok(Expr::Apply(name, a))
                        } else {
                            Ok(Expr::Var(name))
                        }
                    }
                }
            }
            _ => self.err("expected expression"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// Untyped surface expression; lowered to formulas/terms per logic mode.
#[derive(Debug, Clone)]
enum Expr {
    True,
    False,
    Nil,
    PInf,
    NInf,
    Int(i64),
    Var(String),
    Apply(String, Vec<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Star(Box<Expr>, Box<Expr>),
    WeakAnd(Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Exists {
        var: String,
        field: String,
        arg: Box<Expr>,
        body: Box<Expr>,
    },
    Forall {
        vars: Vec<String>,
        body: Box<Expr>,
    },
    Sp(Box<Expr>),
    Cloud(Box<Expr>),
    OldE(Box<Expr>),
    Member(Box<Expr>, Box<Expr>),
    SubsetE(Box<Expr>, Box<Expr>),
    IsEmptyE(Box<Expr>),
    Empty(Sort),
    SingletonE(Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    Inter(Box<Expr>, Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    PointsTo(String, String, Box<Expr>),
}

// -- lowering to FL ----------------------------------------------------------

struct Lower<'a> {
    rec_names: &'a std::collections::BTreeSet<String>,
}

impl<'a> Lower<'a> {
    fn fl_formula(&self, e: &Expr) -> PResult<Formula> {
        Ok(match e {
            Expr::True => Formula::True,
            Expr::False => Formula::False,
            Expr::Cmp(op, a, b) => {
                let ta = self.fl_term(a)?;
                let tb = self.fl_term(b)?;
                match op {
                    CmpOp::Eq => Formula::Eq(ta, tb),
                    CmpOp::Ne => Formula::Not(Box::new(Formula::Eq(ta, tb))),
                    CmpOp::Lt => Formula::Lt(ta, tb),
                    CmpOp::Le => Formula::Le(ta, tb),
                    CmpOp::Gt => Formula::Lt(tb, ta),
                    CmpOp::Ge => Formula::Le(tb, ta),
                }
            }
            Expr::Not(a) => Formula::Not(Box::new(self.fl_formula(a)?)),
            Expr::And(parts) => Formula::And(
                parts
                    .iter()
                    .map(|p| self.fl_formula(p))
                    .collect::<PResult<_>>()?,
            ),
            Expr::Or(parts) => Formula::Or(
                parts
                    .iter()
                    .map(|p| self.fl_formula(p))
                    .collect::<PResult<_>>()?,
            ),
            Expr::Iff(a, b) => Formula::Iff(
                Box::new(self.fl_formula(a)?),
                Box::new(self.fl_formula(b)?),
            ),
            Expr::Implies(a, b) => Formula::Or(vec![
                Formula::Not(Box::new(self.fl_formula(a)?)),
                self.fl_formula(b)?,
            ]),
            Expr::Ite(g, a, b) => Formula::Ite(
                Box::new(self.fl_formula(g)?),
                Box::new(self.fl_formula(a)?),
                Box::new(self.fl_formula(b)?),
            ),
            Expr::Exists {
                var,
                field,
                arg,
                body,
            } => Formula::Exists {
                var: var.clone(),
                field: field.clone(),
                arg: Box::new(self.fl_term(arg)?),
                body: Box::new(self.fl_formula(body)?),
            },
            Expr::Forall { vars, body } => Formula::ForallLoc {
                vars: vars.clone(),
                body: Box::new(self.fl_formula(body)?),
            },
            Expr::Cloud(a) => Formula::Cloud(Box::new(self.fl_formula(a)?)),
            Expr::Member(e2, s) => Formula::Member(self.fl_term(e2)?, self.fl_term(s)?),
            Expr::SubsetE(a, b) => Formula::Subset(self.fl_term(a)?, self.fl_term(b)?),
            Expr::IsEmptyE(a) => Formula::IsEmpty(self.fl_term(a)?),
            // any application in formula position is a (recursive)
            // predicate; well-formedness checks resolution
            Expr::Apply(name, args) => Formula::RecPred(
                name.clone(),
                args.iter().map(|a| self.fl_term(a)).collect::<PResult<_>>()?,
            ),
            _ => {
                return Err(ParseError {
                    line: 0,
                    col: 0,
                    message: format!("expected a formula, found a term ({e:?})"),
                })
            }
        })
    }

    fn fl_term(&self, e: &Expr) -> PResult<Term> {
        Ok(match e {
            Expr::Nil => Term::Nil,
            Expr::PInf => Term::Const("PInf".into()),
            Expr::NInf => Term::Const("NInf".into()),
            Expr::Int(n) => Term::IntLit(*n),
            Expr::Var(v) => Term::Var(v.clone()),
            Expr::Apply(name, args) => {
                let ts: Vec<Term> = args
                    .iter()
                    .map(|a| self.fl_term(a))
                    .collect::<PResult<_>>()?;
                if self.rec_names.contains(name) {
                    Term::RecFn(name.clone(), ts)
                } else if ts.len() == 1 {
                    // unary application of a non-recursive symbol: a field
                    Term::Field(name.clone(), Box::new(ts.into_iter().next().unwrap()))
                } else {
                    Term::App(name.clone(), ts)
                }
            }
            Expr::Ite(g, a, b) => Term::Ite(
                Box::new(self.fl_formula(g)?),
                Box::new(self.fl_term(a)?),
                Box::new(self.fl_term(b)?),
            ),
            Expr::Sp(a) => {
                // formula argument preferred; fall back to term
                match self.fl_formula(a) {
                    Ok(f) => Term::Sp(Box::new(SpArg::Formula(f))),
                    Err(_) => Term::Sp(Box::new(SpArg::Term(self.fl_term(a)?))),
                }
            }
            Expr::Cloud(a) => Term::Cloud(Box::new(self.fl_term(a)?)),
            Expr::OldE(a) => Term::Old(Box::new(self.fl_term(a)?)),
            Expr::Empty(s) => Term::Empty(*s),
            Expr::SingletonE(a) => Term::Singleton(Box::new(self.fl_term(a)?)),
            Expr::Union(a, b) => Term::Union(Box::new(self.fl_term(a)?), Box::new(self.fl_term(b)?)),
            Expr::Inter(a, b) => Term::Inter(Box::new(self.fl_term(a)?), Box::new(self.fl_term(b)?)),
            Expr::Diff(a, b) => Term::Diff(Box::new(self.fl_term(a)?), Box::new(self.fl_term(b)?)),
            Expr::Add(a, b) => Term::Add(Box::new(self.fl_term(a)?), Box::new(self.fl_term(b)?)),
            Expr::Sub(a, b) => Term::Sub(Box::new(self.fl_term(a)?), Box::new(self.fl_term(b)?)),
            _ => {
                return Err(ParseError {
                    line: 0,
                    col: 0,
                    message: format!("expected a term, found a formula ({e:?})"),
                })
            }
        })
    }

    // -- lowering to SL-FL --------------------------------------------------

    fn sl_formula(&self, e: &Expr) -> PResult<SlFormula> {
        Ok(match e {
            Expr::True => SlFormula::True,
            Expr::False => SlFormula::False,
            Expr::Cmp(op, a, b) => {
                let ta = self.sl_term(a)?;
                let tb = self.sl_term(b)?;
                match op {
                    CmpOp::Eq => SlFormula::Eq(ta, tb),
                    CmpOp::Ne => SlFormula::Ne(ta, tb),
                    CmpOp::Lt => SlFormula::Lt(ta, tb),
                    CmpOp::Le => SlFormula::Le(ta, tb),
                    CmpOp::Gt => SlFormula::Lt(tb, ta),
                    CmpOp::Ge => SlFormula::Le(tb, ta),
                }
            }
            Expr::And(parts) => self.fold_sl(parts, |a, b| {
                SlFormula::And(Box::new(a), Box::new(b))
            })?,
            Expr::Or(parts) => {
                self.fold_sl(parts, |a, b| SlFormula::Or(Box::new(a), Box::new(b)))?
            }
            Expr::Star(a, b) => {
                SlFormula::Star(Box::new(self.sl_formula(a)?), Box::new(self.sl_formula(b)?))
            }
            Expr::WeakAnd(a, b) => SlFormula::WeakAnd(
                Box::new(self.sl_formula(a)?),
                Box::new(self.sl_formula(b)?),
            ),
            Expr::Ite(g, a, b) => SlFormula::Ite(
                Box::new(self.sl_formula(g)?),
                Box::new(self.sl_formula(a)?),
                Box::new(self.sl_formula(b)?),
            ),
            Expr::Exists {
                var,
                field,
                arg,
                body,
            } => {
                let src = match self.sl_term(arg)? {
                    SlTerm::Var(v) => v,
                    _ => {
                        return Err(ParseError {
                            line: 0,
                            col: 0,
                            message: "guarded existential source must be a variable".into(),
                        })
                    }
                };
                SlFormula::Exists {
                    var: var.clone(),
                    src,
                    field: field.clone(),
                    body: Box::new(self.sl_formula(body)?),
                }
            }
            Expr::PointsTo(src, field, dst) => SlFormula::PointsTo {
                src: src.clone(),
                field: field.clone(),
                dst: self.sl_term(dst)?,
            },
            Expr::Member(e2, s) => SlFormula::Member(self.sl_term(e2)?, self.sl_term(s)?),
            Expr::IsEmptyE(a) => SlFormula::IsEmpty(self.sl_term(a)?),
            Expr::Apply(name, args) => SlFormula::RecPred(
                name.clone(),
                args.iter().map(|a| self.sl_term(a)).collect::<PResult<_>>()?,
            ),
            _ => {
                return Err(ParseError {
                    line: 0,
                    col: 0,
                    message: format!("expected an SL-FL formula ({e:?})"),
                })
            }
        })
    }

    fn fold_sl(
        &self,
        parts: &[Expr],
        f: impl Fn(SlFormula, SlFormula) -> SlFormula,
    ) -> PResult<SlFormula> {
        let mut it = parts.iter();
        let mut acc = self.sl_formula(it.next().unwrap())?;
        for p in it {
            acc = f(acc, self.sl_formula(p)?);
        }
        Ok(acc)
    }

    fn sl_term(&self, e: &Expr) -> PResult<SlTerm> {
        Ok(match e {
            Expr::Nil => SlTerm::Nil,
            Expr::PInf => SlTerm::Const("PInf".into()),
            Expr::NInf => SlTerm::Const("NInf".into()),
            Expr::Int(n) => SlTerm::IntLit(*n),
            Expr::Var(v) => SlTerm::Var(v.clone()),
            Expr::Apply(name, args) => {
                let ts: Vec<SlTerm> = args
                    .iter()
                    .map(|a| self.sl_term(a))
                    .collect::<PResult<_>>()?;
                if self.rec_names.contains(name) {
                    SlTerm::RecFn(name.clone(), ts)
                } else if ts.len() == 1 {
                    // f(t) in SL-FL source denotes the dereference t.f
                    SlTerm::Deref(Box::new(ts.into_iter().next().unwrap()), name.clone())
                } else {
                    return Err(ParseError {
                        line: 0,
                        col: 0,
                        message: format!("unknown function `{name}` in SL-FL term"),
                    });
                }
            }
            Expr::Ite(g, a, b) => SlTerm::Ite(
                Box::new(self.sl_formula(g)?),
                Box::new(self.sl_term(a)?),
                Box::new(self.sl_term(b)?),
            ),
            Expr::OldE(a) => SlTerm::Old(Box::new(self.sl_term(a)?)),
            Expr::Empty(s) => SlTerm::Empty(*s),
            Expr::SingletonE(a) => SlTerm::Singleton(Box::new(self.sl_term(a)?)),
            Expr::Union(a, b) => {
                SlTerm::Union(Box::new(self.sl_term(a)?), Box::new(self.sl_term(b)?))
            }
            Expr::Inter(a, b) => {
                SlTerm::Inter(Box::new(self.sl_term(a)?), Box::new(self.sl_term(b)?))
            }
            Expr::Diff(a, b) => {
                SlTerm::Diff(Box::new(self.sl_term(a)?), Box::new(self.sl_term(b)?))
            }
            Expr::Add(a, b) => SlTerm::Add(Box::new(self.sl_term(a)?), Box::new(self.sl_term(b)?)),
            Expr::Sub(a, b) => SlTerm::Sub(Box::new(self.sl_term(a)?), Box::new(self.sl_term(b)?)),
            _ => {
                return Err(ParseError {
                    line: 0,
                    col: 0,
                    message: format!("expected an SL-FL term ({e:?})"),
                })
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Items and module assembly
// ---------------------------------------------------------------------------

impl Parser {
    fn sort(&mut self) -> PResult<Sort> {
        let name = self.expect_ident("sort name")?;
        match name.as_str() {
            "Loc" => Ok(Sort::Loc),
            "Int" => Ok(Sort::Int),
            "Bool" => Ok(Sort::Bool),
            "SetInt" => Ok(Sort::SetInt),
            "SetLoc" => Ok(Sort::SetLoc),
            other => self.err(format!("unknown sort `{other}`")),
        }
    }

    fn param_list(&mut self) -> PResult<Vec<(String, Sort)>> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            let name = self.expect_ident("parameter name")?;
            let sort = if self.eat(&Tok::Colon) {
                self.sort()?
            } else {
                Sort::Loc
            };
            out.push((name, sort));
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(&Tok::Comma, "`,` or `)`")?;
        }
    }

    fn stmt_simple(&mut self) -> PResult<Stmt> {
        // alloc / free / assume / return handled by caller; here assignments.
        let first = self.expect_ident("statement")?;
        if self.eat(&Tok::Dot) {
            // mutation: first.field := rhs
            let field = self.expect_ident("field name")?;
            self.expect(&Tok::Assign, "`:=`")?;
            let rhs = self.expr()?;
            self.expect(&Tok::Semi, "`;`")?;
            let lower = Lower {
                rec_names: &self.rec_names,
            };
            let src = lower.fl_term(&rhs).map_err(|e| self.locate(e))?;
            return Ok(Stmt::Store {
                obj: first,
                field,
                src,
            });
        }
        // possibly multi-output call: a, b := g(...)
        let mut outs = vec![first];
        while self.eat(&Tok::Comma) {
            outs.push(self.expect_ident("output variable")?);
        }
        self.expect(&Tok::Assign, "`:=`")?;
        // rhs alternatives: deref `y.f`, call `g(args)`, or plain expr
        if let (Some(Tok::Ident(obj)), Some(Tok::Dot)) = (self.peek().cloned(), {
            self.peek2().cloned()
        }) {
            // y.f deref
            self.pos += 2;
            let field = self.expect_ident("field name")?;
            self.expect(&Tok::Semi, "`;`")?;
            if outs.len() != 1 {
                return self.err("dereference assigns a single variable");
            }
            return Ok(Stmt::Load {
                dst: outs.pop().unwrap(),
                obj,
                field,
            });
        }
        if let (Some(Tok::Ident(name)), Some(Tok::LParen)) =
            (self.peek().cloned(), self.peek2().cloned())
        {
            if !RESERVED.contains(&name.as_str()) && !self.rec_names.contains(&name) {
                // call
                self.pos += 1;
                let args = self.args()?;
                self.expect(&Tok::Semi, "`;`")?;
                let lower = Lower {
                    rec_names: &self.rec_names,
                };
                let targs = args
                    .iter()
                    .map(|a| lower.fl_term(a))
                    .collect::<PResult<Vec<_>>>()
                    .map_err(|e| self.locate(e))?;
                return Ok(Stmt::Call {
                    outs,
                    method: name,
                    args: targs,
                });
            }
        }
        let rhs = self.expr()?;
        self.expect(&Tok::Semi, "`;`")?;
        if outs.len() != 1 {
            return self.err("assignment has a single destination");
        }
        let lower = Lower {
            rec_names: &self.rec_names,
        };
        let src = lower.fl_term(&rhs).map_err(|e| self.locate(e))?;
        Ok(Stmt::Assign {
            dst: outs.pop().unwrap(),
            src,
        })
    }

    fn locate(&self, mut e: ParseError) -> ParseError {
        if e.line == 0 {
            let (line, col) = self.here();
            e.line = line;
            e.col = col;
        }
        e
    }

    /// Statements until one of the given stop keywords (not consumed).
    fn stmts_until(&mut self, stops: &[&str]) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => return Ok(out),
                Some(Tok::RParen) => return Ok(out),
                Some(Tok::Ident(n)) if stops.contains(&n.as_str()) => return Ok(out),
                Some(Tok::LParen) => {
                    // ( if (cond) then ... else ... )
                    self.pos += 1;
                    if !self.kw("if") {
                        return self.err("expected `if` after `(`");
                    }
                    self.expect(&Tok::LParen, "`(`")?;
                    let cond = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    if !self.kw("then") {
                        return self.err("expected `then`");
                    }
                    let then_branch = self.stmts_until(&["else"])?;
                    if !self.kw("else") {
                        return self.err("expected `else`");
                    }
                    let else_branch = self.stmts_until(&[])?;
                    self.expect(&Tok::RParen, "`)` closing if")?;
                    self.eat(&Tok::Semi);
                    let lower = Lower {
                        rec_names: &self.rec_names,
                    };
                    let cond = lower.fl_formula(&cond).map_err(|e| self.locate(e))?;
                    out.push(Stmt::If {
                        cond,
                        then_branch,
                        else_branch,
                    });
                }
                Some(Tok::Ident(n)) if n == "assume" => {
                    self.pos += 1;
                    self.expect(&Tok::LParen, "`(`")?;
                    let cond = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    self.expect(&Tok::Semi, "`;`")?;
                    let lower = Lower {
                        rec_names: &self.rec_names,
                    };
                    out.push(Stmt::Assume(
                        lower.fl_formula(&cond).map_err(|e| self.locate(e))?,
                    ));
                }
                Some(Tok::Ident(n)) if n == "alloc" || n == "free" => {
                    let is_alloc = n == "alloc";
                    self.pos += 1;
                    self.expect(&Tok::LParen, "`(`")?;
                    let v = self.expect_ident("variable")?;
                    self.expect(&Tok::RParen, "`)`")?;
                    self.expect(&Tok::Semi, "`;`")?;
                    out.push(if is_alloc {
                        Stmt::Alloc(v)
                    } else {
                        Stmt::Free(v)
                    });
                }
                Some(Tok::Ident(n)) if n == "return" => {
                    self.pos += 1;
                    self.expect(&Tok::Semi, "`;` after return")?;
                    out.push(Stmt::Return);
                    // a top-level return ends the method body
                    if stops.contains(&"@method-end") {
                        return Ok(out);
                    }
                }
                _ => out.push(self.stmt_simple()?),
            }
        }
    }
}

fn prescan_rec_names(toks: &[Lexed]) -> std::collections::BTreeSet<String> {
    let mut names = std::collections::BTreeSet::new();
    let mut i = 0usize;
    while i < toks.len() {
        if let Tok::Ident(name) = &toks[i].tok {
            if !RESERVED.contains(&name.as_str()) && toks.get(i + 1).map(|l| &l.tok) == Some(&Tok::LParen) {
                // find matching paren
                let mut depth = 0i32;
                let mut j = i + 1;
                while j < toks.len() {
                    match toks[j].tok {
                        Tok::LParen => depth += 1,
                        Tok::RParen => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    j += 1;
                }
                if j < toks.len() && toks.get(j + 1).map(|l| &l.tok) == Some(&Tok::Assign) {
                    names.insert(name.clone());
                }
                i = j;
            }
        }
        i += 1;
    }
    names
}

/// Parse a `.flv` module. `mode_override` forces the logic mode (the
/// `--slfl` CLI flag); otherwise a `logic fl;`/`logic slfl;` directive or
/// the default FL mode applies.
pub fn parse_module(text: &str, mode_override: Option<LogicMode>) -> PResult<SourceModule> {
    let toks = lex(text)?;
    let rec_names = prescan_rec_names(&toks);
    let mut p = Parser {
        toks,
        pos: 0,
        mode: mode_override.unwrap_or(LogicMode::Fl),
        rec_names,
    };
    let mut module = SourceModule::empty(p.mode);
    let mut declared_fields: BTreeMap<String, Sort> = BTreeMap::new();

    // directive scan happens inline
    while p.peek().is_some() {
        // logic directive
        if p.peek_kw("logic") {
            p.pos += 1;
            let m = p.expect_ident("logic mode")?;
            let parsed = match m.as_str() {
                "fl" => LogicMode::Fl,
                "slfl" => LogicMode::Slfl,
                other => return p.err(format!("unknown logic mode `{other}`")),
            };
            if mode_override.is_none() {
                p.mode = parsed;
                module.mode = parsed;
            }
            p.expect(&Tok::Semi, "`;`")?;
            continue;
        }
        if p.peek_kw("field") {
            p.pos += 1;
            let name = p.expect_ident("field name")?;
            p.expect(&Tok::Colon, "`:`")?;
            let sort = p.sort()?;
            p.expect(&Tok::Semi, "`;`")?;
            if declared_fields.insert(name.clone(), sort).is_some() {
                return p.err(format!("duplicate field `{name}`"));
            }
            continue;
        }
        if p.peek_kw("lemma") {
            p.pos += 1;
            let name = p.expect_ident("lemma name")?;
            p.expect(&Tok::Colon, "`:`")?;
            let body = p.expr()?;
            p.eat(&Tok::Semi);
            let lower = Lower {
                rec_names: &p.rec_names,
            };
            let body = lower.fl_formula(&body).map_err(|e| p.locate(e))?;
            if module.lemmas.iter().any(|l| l.name == name) {
                return p.err(format!("duplicate lemma `{name}`"));
            }
            module.lemmas.push(Lemma { name, body });
            continue;
        }
        if let Some(Tok::At(d)) = p.peek() {
            if d == "same-support" {
                p.pos += 1;
                let a = p.expect_ident("recursive symbol")?;
                let b = p.expect_ident("recursive symbol")?;
                p.eat(&Tok::Semi);
                module.same_support.push((a, b));
                continue;
            }
            return p.err(format!("unexpected directive `@{d}`"));
        }
        // recursive definition or method, both start with IDENT(
        let name = p.expect_ident("definition or method name")?;
        if RESERVED.contains(&name.as_str()) {
            return p.err(format!("unexpected keyword `{name}`"));
        }
        let params = p.param_list()?;
        if p.eat(&Tok::Assign) {
            // recursive definition
            let body = p.expr()?;
            p.eat(&Tok::Semi);
            let lower = Lower {
                rec_names: &p.rec_names,
            };
            let pnames: Vec<String> = params.iter().map(|(n, _)| n.clone()).collect();
            let psorts: Vec<Sort> = params.iter().map(|(_, s)| *s).collect();
            let dup = match p.mode {
                LogicMode::Fl => module.fl_defs.iter().any(|d| d.name == name),
                LogicMode::Slfl => module.sl_defs.iter().any(|d| d.name == name),
            };
            if dup {
                return p.err(format!("duplicate definition for `{name}`"));
            }
            let result;
            match p.mode {
                LogicMode::Fl => {
                    let body = match lower.fl_formula(&body) {
                        Ok(f) => {
                            result = Sort::Bool;
                            RecBody::Formula(f)
                        }
                        Err(_) => {
                            let t = lower.fl_term(&body).map_err(|e| p.locate(e))?;
                            result = infer_result_sort_fl(&t);
                            RecBody::Term(t)
                        }
                    };
                    module.fl_defs.push(RecDef {
                        name: name.clone(),
                        params: pnames,
                        body,
                        kind: DefKind::Lfp,
                    });
                }
                LogicMode::Slfl => {
                    let body = match lower.sl_formula(&body) {
                        Ok(f) => {
                            result = Sort::Bool;
                            SlRecBody::Formula(f)
                        }
                        Err(_) => {
                            let t = lower.sl_term(&body).map_err(|e| p.locate(e))?;
                            result = infer_result_sort_sl(&t);
                            SlRecBody::Term(t)
                        }
                    };
                    module.sl_defs.push(SlRecDef {
                        name: name.clone(),
                        params: pnames,
                        body,
                        kind: DefKind::Lfp,
                    });
                }
            }
            module
                .signature
                .rec_sigs
                .insert(name, RecSig { params: psorts, result });
            continue;
        }
        // method
        if !p.kw("returns") {
            return p.err("expected `:=` (definition) or `returns` (method)");
        }
        let returns = p.param_list()?;
        let pre = match p.peek() {
            Some(Tok::At(d)) if d == "pre" => {
                p.pos += 1;
                p.expect(&Tok::Colon, "`:`")?;
                p.expr()?
            }
            _ => return p.err(format!("method `{name}` is missing its @pre contract")),
        };
        let post = match p.peek() {
            Some(Tok::At(d)) if d == "post" => {
                p.pos += 1;
                p.expect(&Tok::Colon, "`:`")?;
                p.expr()?
            }
            _ => return p.err(format!("method `{name}` is missing its @post contract")),
        };
        let body = p.stmts_until(&["lemma", "field", "logic", "@method-end"])?;
        let lower = Lower {
            rec_names: &p.rec_names,
        };
        let (pre, post) = match p.mode {
            LogicMode::Fl => (
                Spec::Fl(lower.fl_formula(&pre).map_err(|e| p.locate(e))?),
                Spec::Fl(lower.fl_formula(&post).map_err(|e| p.locate(e))?),
            ),
            LogicMode::Slfl => (
                Spec::Sl(lower.sl_formula(&pre).map_err(|e| p.locate(e))?),
                Spec::Sl(lower.sl_formula(&post).map_err(|e| p.locate(e))?),
            ),
        };
        if module.methods.iter().any(|m| m.name == name) {
            return p.err(format!("duplicate method `{name}`"));
        }
        module.methods.push(Method {
            name,
            params,
            returns,
            pre,
            post,
            body,
        });
    }

    module.signature.fields = declared_fields;
    infer_fields(&mut module);
    resolve_methods(&module).map_err(|m| ParseError {
        line: 0,
        col: 0,
        message: m,
    })?;
    Ok(module)
}

fn infer_result_sort_fl(t: &Term) -> Sort {
    match t {
        Term::Empty(s) => *s,
        Term::Singleton(_) => Sort::SetInt,
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) => {
            let sa = infer_result_sort_fl(a);
            if sa != Sort::Int {
                sa
            } else {
                infer_result_sort_fl(b)
            }
        }
        Term::Ite(_, a, b) => {
            let sa = infer_result_sort_fl(a);
            if sa != Sort::Int {
                sa
            } else {
                infer_result_sort_fl(b)
            }
        }
        _ => Sort::Int,
    }
}

fn infer_result_sort_sl(t: &SlTerm) -> Sort {
    match t {
        SlTerm::Empty(s) => *s,
        SlTerm::Singleton(_) => Sort::SetInt,
        SlTerm::Union(a, b) | SlTerm::Inter(a, b) | SlTerm::Diff(a, b) => {
            let sa = infer_result_sort_sl(a);
            if sa != Sort::Int {
                sa
            } else {
                infer_result_sort_sl(b)
            }
        }
        SlTerm::Ite(_, a, b) => {
            let sa = infer_result_sort_sl(a);
            if sa != Sort::Int {
                sa
            } else {
                infer_result_sort_sl(b)
            }
        }
        _ => Sort::Int,
    }
}

/// Collect every field used in formulas and programs, inferring ranges:
/// a field is `Int`-ranged if it appears in an arithmetic/comparison/
/// `SetInt` context, `Loc` otherwise. Explicit declarations win.
fn infer_fields(module: &mut SourceModule) {
    let mut fields: BTreeMap<String, Sort> = module.signature.fields.clone();
    let mut int_fields: std::collections::BTreeSet<String> = Default::default();
    let mut seen: std::collections::BTreeSet<String> = Default::default();

    {
        let mut visit_fl = |f: &Formula| {
            visit_formula(f, &mut |node| match node {
                FormulaOrTerm::Term(Term::Field(name, _)) => {
                    seen.insert(name.clone());
                }
                FormulaOrTerm::Formula(Formula::Lt(a, b)) | FormulaOrTerm::Formula(Formula::Le(a, b)) => {
                    for t in [a, b] {
                        if let Term::Field(name, _) = t {
                            int_fields.insert(name.clone());
                        }
                    }
                }
                FormulaOrTerm::Term(Term::Singleton(inner)) => {
                    if let Term::Field(name, _) = inner.as_ref() {
                        int_fields.insert(name.clone());
                    }
                }
                FormulaOrTerm::Term(Term::Add(a, b)) | FormulaOrTerm::Term(Term::Sub(a, b)) => {
                    for t in [a, b] {
                        if let Term::Field(name, _) = t.as_ref() {
                            int_fields.insert(name.clone());
                        }
                    }
                }
                _ => {}
            });
        };
        for def in &module.fl_defs {
            match &def.body {
                RecBody::Formula(f) => visit_fl(f),
                RecBody::Term(t) => {
                    let wrapper = Formula::IsEmpty(Term::Singleton(Box::new(t.clone())));
                    visit_fl(&wrapper);
                }
            }
        }
        for l in &module.lemmas {
            visit_fl(&l.body);
        }
        for m in &module.methods {
            if let Spec::Fl(f) = &m.pre {
                visit_fl(f);
            }
            if let Spec::Fl(f) = &m.post {
                visit_fl(f);
            }
        }
    }

    // SL defs/specs: walk for Deref nodes
    fn visit_sl_term(
        t: &SlTerm,
        seen: &mut std::collections::BTreeSet<String>,
        int_fields: &mut std::collections::BTreeSet<String>,
        int_ctx: bool,
    ) {
        match t {
            SlTerm::Deref(inner, f) => {
                seen.insert(f.clone());
                if int_ctx {
                    int_fields.insert(f.clone());
                }
                visit_sl_term(inner, seen, int_fields, false);
            }
            SlTerm::RecFn(_, args) => {
                for a in args {
                    visit_sl_term(a, seen, int_fields, false);
                }
            }
            SlTerm::Ite(g, a, b) => {
                visit_sl_formula(g, seen, int_fields);
                visit_sl_term(a, seen, int_fields, int_ctx);
                visit_sl_term(b, seen, int_fields, int_ctx);
            }
            SlTerm::Old(a) | SlTerm::Singleton(a) => {
                visit_sl_term(a, seen, int_fields, matches!(t, SlTerm::Singleton(_)))
            }
            SlTerm::Union(a, b) | SlTerm::Inter(a, b) | SlTerm::Diff(a, b) => {
                visit_sl_term(a, seen, int_fields, false);
                visit_sl_term(b, seen, int_fields, false);
            }
            SlTerm::Add(a, b) | SlTerm::Sub(a, b) => {
                visit_sl_term(a, seen, int_fields, true);
                visit_sl_term(b, seen, int_fields, true);
            }
            _ => {}
        }
    }
    fn visit_sl_formula(
        f: &SlFormula,
        seen: &mut std::collections::BTreeSet<String>,
        int_fields: &mut std::collections::BTreeSet<String>,
    ) {
        match f {
            SlFormula::Eq(a, b) | SlFormula::Ne(a, b) | SlFormula::Member(a, b) => {
                visit_sl_term(a, seen, int_fields, false);
                visit_sl_term(b, seen, int_fields, false);
            }
            SlFormula::Lt(a, b) | SlFormula::Le(a, b) => {
                visit_sl_term(a, seen, int_fields, true);
                visit_sl_term(b, seen, int_fields, true);
            }
            SlFormula::IsEmpty(a) => visit_sl_term(a, seen, int_fields, false),
            SlFormula::PointsTo { field, dst, .. } => {
                seen.insert(field.clone());
                visit_sl_term(dst, seen, int_fields, false);
            }
            SlFormula::Star(a, b)
            | SlFormula::And(a, b)
            | SlFormula::WeakAnd(a, b)
            | SlFormula::Or(a, b) => {
                visit_sl_formula(a, seen, int_fields);
                visit_sl_formula(b, seen, int_fields);
            }
            SlFormula::Ite(g, a, b) => {
                visit_sl_formula(g, seen, int_fields);
                visit_sl_formula(a, seen, int_fields);
                visit_sl_formula(b, seen, int_fields);
            }
            SlFormula::Exists { field, body, .. } => {
                seen.insert(field.clone());
                visit_sl_formula(body, seen, int_fields);
            }
            SlFormula::RecPred(_, args) => {
                for a in args {
                    visit_sl_term(a, seen, int_fields, false);
                }
            }
            _ => {}
        }
    }
    for def in &module.sl_defs {
        match &def.body {
            SlRecBody::Formula(f) => visit_sl_formula(f, &mut seen, &mut int_fields),
            SlRecBody::Term(t) => visit_sl_term(t, &mut seen, &mut int_fields, false),
        }
    }
    for m in &module.methods {
        if let Spec::Sl(f) = &m.pre {
            visit_sl_formula(f, &mut seen, &mut int_fields);
        }
        if let Spec::Sl(f) = &m.post {
            visit_sl_formula(f, &mut seen, &mut int_fields);
        }
    }

    // programs: y.f positions; Int-ness from var sorts is resolved later,
    // here we use store/load against declared Int params heuristically.
    let mut int_vars: std::collections::BTreeSet<String> = Default::default();
    for m in &module.methods {
        for (n, s) in m.params.iter().chain(m.returns.iter()) {
            if *s == Sort::Int {
                int_vars.insert(n.clone());
            }
        }
    }
    fn visit_stmts(
        stmts: &[Stmt],
        seen: &mut std::collections::BTreeSet<String>,
        int_fields: &mut std::collections::BTreeSet<String>,
        int_vars: &std::collections::BTreeSet<String>,
    ) {
        for s in stmts {
            match s {
                Stmt::Load { dst, field, .. } => {
                    seen.insert(field.clone());
                    if int_vars.contains(dst) {
                        int_fields.insert(field.clone());
                    }
                }
                Stmt::Store { field, src, .. } => {
                    seen.insert(field.clone());
                    match src {
                        Term::IntLit(_) | Term::Add(_, _) | Term::Sub(_, _) => {
                            int_fields.insert(field.clone());
                        }
                        Term::Var(v) if int_vars.contains(v) => {
                            int_fields.insert(field.clone());
                        }
                        _ => {}
                    }
                }
                Stmt::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    visit_stmts(then_branch, seen, int_fields, int_vars);
                    visit_stmts(else_branch, seen, int_fields, int_vars);
                }
                _ => {}
            }
        }
    }
    for m in &module.methods {
        visit_stmts(&m.body, &mut seen, &mut int_fields, &int_vars);
    }

    for f in seen {
        let sort = if int_fields.contains(&f) {
            Sort::Int
        } else {
            Sort::Loc
        };
        fields.entry(f).or_insert(sort);
    }
    for f in int_fields {
        fields.entry(f).or_insert(Sort::Int);
    }
    module.signature.fields = fields;
}

fn resolve_methods(module: &SourceModule) -> Result<(), String> {
    fn walk(stmts: &[Stmt], module: &SourceModule) -> Result<(), String> {
        for s in stmts {
            match s {
                Stmt::Call { method, .. } => {
                    if module.method(method).is_none() {
                        return Err(format!("call to undefined method `{method}`"));
                    }
                }
                Stmt::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    walk(then_branch, module)?;
                    walk(else_branch, module)?;
                }
                _ => {}
            }
        }
        Ok(())
    }
    for m in &module.methods {
        walk(&m.body, module).map_err(|e| format!("in method `{}`: {e}", m.name))?;
    }
    Ok(())
}

/// Sorts of all variables in a method body (params, returns, locals).
pub fn method_var_sorts(method: &Method, module: &SourceModule) -> BTreeMap<String, Sort> {
    let mut sorts: BTreeMap<String, Sort> = method
        .params
        .iter()
        .chain(method.returns.iter())
        .cloned()
        .collect();
    // two passes to propagate through assignments
    for _ in 0..2 {
        fn walk(
            stmts: &[Stmt],
            sorts: &mut BTreeMap<String, Sort>,
            module: &SourceModule,
        ) {
            for s in stmts {
                match s {
                    Stmt::Load { dst, field, .. } => {
                        if let Some(r) = module.signature.fields.get(field) {
                            sorts.entry(dst.clone()).or_insert(*r);
                        }
                    }
                    Stmt::Assign { dst, src } => {
                        let s = wf::infer_term_sort(src, &module.signature, sorts)
                            .unwrap_or(Sort::Loc);
                        sorts.entry(dst.clone()).or_insert(s);
                    }
                    Stmt::Call { outs, method, .. } => {
                        if let Some(m) = module.method(method) {
                            for (o, (_, s)) in outs.iter().zip(m.returns.iter()) {
                                sorts.entry(o.clone()).or_insert(*s);
                            }
                        }
                    }
                    Stmt::Alloc(v) | Stmt::Free(v) => {
                        sorts.entry(v.clone()).or_insert(Sort::Loc);
                    }
                    Stmt::If {
                        then_branch,
                        else_branch,
                        ..
                    } => {
                        walk(then_branch, sorts, module);
                        walk(else_branch, sorts, module);
                    }
                    _ => {}
                }
            }
        }
        walk(&method.body, &mut sorts, module);
    }
    sorts
}
