//! The `.thy` theory format.
//!
//! ```text
//! # comment
//! theory groups            (or: classical theory NAME)
//! sort G
//! func e : -> G
//! func mul : G G -> G
//! rel R : G G              (a bare `rel p` is a proposition)
//! axiom [x:G] true |- mul(e, x) = x /\ mul(x, e) = x
//! ```
//!
//! A declaration occupies one line; indented lines continue the previous
//! one. Formulas use `true top false bot = /\ \/ not` and
//! `exists x:S, y:T. body`. When the context of an axiom is omitted, its free
//! variables are collected in order of first occurrence and their sorts are
//! inferred from argument positions (or the only sort, if there is one).

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::logic::{
    well_formed, Binder, ClassicalFormula, Context, Formula, Node, Sequent, Signature, SortId,
    Term, Theory,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
struct Pos {
    line: usize,
    col: usize,
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Arrow,
    Comma,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Equals,
    And,
    Or,
    Turnstile,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Colon => "`:`",
            Tok::Arrow => "`->`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Equals => "`=`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Turnstile => "`|-`",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '~' || c == '\''
}

fn lex(text: &str, line_offset: usize, col_offset: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let pos = |i: usize| Pos {
            line: li + 1 + line_offset,
            col: i + 1 + if li == 0 { col_offset } else { 0 },
        };
        while i < chars.len() {
            let c = chars[i];
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let p = pos(i);
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let tok = match two.as_str() {
                "->" => Some(Tok::Arrow),
                "/\\" => Some(Tok::And),
                "\\/" => Some(Tok::Or),
                "|-" => Some(Tok::Turnstile),
                _ => None,
            };
            if let Some(t) = tok {
                out.push((t, p));
                i += 2;
                continue;
            }
            let single = match c {
                ':' => Some(Tok::Colon),
                ',' => Some(Tok::Comma),
                '.' => Some(Tok::Dot),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBrack),
                ']' => Some(Tok::RBrack),
                '=' => Some(Tok::Equals),
                _ => None,
            };
            if let Some(t) = single {
                out.push((t, p));
                i += 1;
                continue;
            }
            if is_ident_char(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), p));
                continue;
            }
            return err(p, format!("unexpected character `{c}`"));
        }
    }
    let end = Pos {
        line: text.lines().count().max(1) + line_offset,
        col: text.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    out.push((Tok::End, end));
    Ok(out)
}

#[derive(Clone, Debug)]
enum RawTerm {
    Name(String, Pos),
    App(String, Vec<RawTerm>, Pos),
}

#[derive(Clone, Debug)]
enum Raw {
    True,
    False,
    Eq(RawTerm, RawTerm, Pos),
    Pred(String, Vec<RawTerm>, Pos),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Exists(Vec<(String, Option<String>, Pos)>, Box<Raw>),
    Not(Box<Raw>, Pos),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

const KEYWORDS: &[&str] = &["exists", "not", "true", "false", "top", "bot"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        let (t, p) = self.bump();
        if t == want {
            Ok(p)
        } else {
            err(p, format!("expected {want}, found {t}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => err(p, format!("expected {what}, found {t}")),
        }
    }

    fn context(&mut self) -> Result<Vec<(String, String, Pos)>, ParseError> {
        self.expect(Tok::LBrack)?;
        let mut vars = Vec::new();
        if *self.peek() != Tok::RBrack {
            loop {
                let (name, p) = self.ident("a variable")?;
                self.expect(Tok::Colon)?;
                let (sort, _) = self.ident("a sort")?;
                vars.push((name, sort, p));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrack)?;
        Ok(vars)
    }

    fn formula(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let right = self.conj()?;
            left = Raw::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let right = self.unary()?;
            left = Raw::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Raw, ParseError> {
        let p = self.pos();
        match self.peek().clone() {
            Tok::Ident(w) if w == "not" => {
                self.bump();
                Ok(Raw::Not(Box::new(self.unary()?), p))
            }
            Tok::Ident(w) if w == "exists" => {
                self.bump();
                let mut binders = Vec::new();
                loop {
                    let (name, bp) = self.ident("a bound variable")?;
                    let sort = if *self.peek() == Tok::Colon {
                        self.bump();
                        Some(self.ident("a sort")?.0)
                    } else {
                        None
                    };
                    binders.push((name, sort, bp));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(Raw::Exists(binders, Box::new(body)))
            }
            Tok::Ident(w) if w == "true" || w == "top" => {
                self.bump();
                Ok(Raw::True)
            }
            Tok::Ident(w) if w == "false" || w == "bot" => {
                self.bump();
                Ok(Raw::False)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => {
                let t = self.term()?;
                if *self.peek() == Tok::Equals {
                    let ep = self.bump().1;
                    let rhs = self.term()?;
                    return Ok(Raw::Eq(t, rhs, ep));
                }
                match t {
                    RawTerm::Name(n, p) => Ok(Raw::Pred(n, Vec::new(), p)),
                    RawTerm::App(n, args, p) => Ok(Raw::Pred(n, args, p)),
                }
            }
            t => err(p, format!("expected a formula, found {t}")),
        }
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let (name, p) = self.ident("a term")?;
        if KEYWORDS.contains(&name.as_str()) {
            return err(p, format!("keyword `{name}` cannot be used as a term"));
        }
        if *self.peek() != Tok::LParen {
            return Ok(RawTerm::Name(name, p));
        }
        self.bump();
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(RawTerm::App(name, args, p))
    }

    fn end(&mut self) -> Result<(), ParseError> {
        match self.bump() {
            (Tok::End, _) => Ok(()),
            (t, p) => err(p, format!("unexpected {t}")),
        }
    }
}

struct Elab<'a> {
    sig: &'a Signature,
    classical: bool,
}

impl Elab<'_> {
    fn sort(&self, name: &str, p: Pos) -> Result<SortId, ParseError> {
        self.sig
            .sort_id(name)
            .map_or_else(|| err(p, format!("unknown sort `{name}`")), Ok)
    }

    fn binder_sort(&self, sort: &Option<String>, p: Pos) -> Result<SortId, ParseError> {
        match sort {
            Some(s) => self.sort(s, p),
            None if self.sig.sorts.len() == 1 => Ok(SortId(0)),
            None => err(p, "bound variable needs a sort"),
        }
    }

    fn term(&self, t: &RawTerm, scope: &[(String, SortId)]) -> Result<(Term, SortId), ParseError> {
        match t {
            RawTerm::Name(n, p) => {
                if let Some(i) = scope.iter().rposition(|(v, _)| v == n) {
                    return Ok((Term::Var(i), scope[i].1));
                }
                match self.sig.func_id(n) {
                    Some(f) if self.sig.func(f).args.is_empty() => {
                        Ok((Term::constant(f), self.sig.func(f).result))
                    }
                    Some(f) => err(
                        *p,
                        format!(
                            "arity mismatch: `{n}` expects {} arguments, got 0",
                            self.sig.func(f).args.len()
                        ),
                    ),
                    None => err(*p, format!("unknown identifier `{n}`")),
                }
            }
            RawTerm::App(n, args, p) => {
                let Some(f) = self.sig.func_id(n) else {
                    return err(*p, format!("unknown function symbol `{n}`"));
                };
                let sym = self.sig.func(f);
                if sym.args.len() != args.len() {
                    return err(
                        *p,
                        format!(
                            "arity mismatch: `{n}` expects {} arguments, got {}",
                            sym.args.len(),
                            args.len()
                        ),
                    );
                }
                let mut out = Vec::new();
                for (a, want) in args.iter().zip(&sym.args) {
                    let (t, s) = self.term(a, scope)?;
                    if s != *want {
                        return err(
                            raw_pos(a),
                            format!(
                                "sort mismatch: argument of `{n}` has sort `{}`, expected `{}`",
                                self.sig.sort_name(s),
                                self.sig.sort_name(*want)
                            ),
                        );
                    }
                    out.push(t);
                }
                Ok((Term::App(f, out), sym.result))
            }
        }
    }

    fn node(&self, r: &Raw, scope: &mut Vec<(String, SortId)>) -> Result<Node, ParseError> {
        Ok(match r {
            Raw::True => Node::True,
            Raw::False => Node::False,
            Raw::Eq(a, b, p) => {
                let (ta, sa) = self.term(a, scope)?;
                let (tb, sb) = self.term(b, scope)?;
                if sa != sb {
                    return err(
                        *p,
                        format!(
                            "sort mismatch: equation between `{}` and `{}`",
                            self.sig.sort_name(sa),
                            self.sig.sort_name(sb)
                        ),
                    );
                }
                Node::Eq(ta, tb)
            }
            Raw::Pred(n, args, p) => {
                let Some(rid) = self.sig.rel_id(n) else {
                    return err(*p, format!("unknown relation symbol `{n}`"));
                };
                let sym = self.sig.rel(rid);
                if sym.args.len() != args.len() {
                    return err(
                        *p,
                        format!(
                            "arity mismatch: `{n}` expects {} arguments, got {}",
                            sym.args.len(),
                            args.len()
                        ),
                    );
                }
                let mut out = Vec::new();
                for (a, want) in args.iter().zip(&sym.args) {
                    let (t, s) = self.term(a, scope)?;
                    if s != *want {
                        return err(
                            raw_pos(a),
                            format!(
                                "sort mismatch: argument of `{n}` has sort `{}`, expected `{}`",
                                self.sig.sort_name(s),
                                self.sig.sort_name(*want)
                            ),
                        );
                    }
                    out.push(t);
                }
                Node::Rel(rid, out)
            }
            Raw::And(a, b) => Node::and(self.node(a, scope)?, self.node(b, scope)?),
            Raw::Or(a, b) => Node::or(self.node(a, scope)?, self.node(b, scope)?),
            Raw::Exists(binders, body) => {
                let mut bs = Vec::new();
                for (name, sort, p) in binders {
                    let s = self.binder_sort(sort, *p)?;
                    scope.push((name.clone(), s));
                    bs.push(Binder::new(name.clone(), s));
                }
                let inner = self.node(body, scope);
                scope.truncate(scope.len() - bs.len());
                Node::exists_many(bs, inner?)
            }
            Raw::Not(a, p) => {
                if !self.classical {
                    return err(*p, "classical connective in coherent theory");
                }
                Node::not(self.node(a, scope)?)
            }
        })
    }

    /// Free variables of the raw formulas with inferred sorts, in order of
    /// first occurrence.
    fn infer_context(&self, parts: &[&Raw]) -> Result<Context, ParseError> {
        let mut order: Vec<(String, Pos)> = Vec::new();
        let mut sorts: BTreeMap<String, SortId> = BTreeMap::new();
        // repeat until no new sort is learned; equations between two
        // unknowns need a second pass
        loop {
            let before = sorts.len();
            for r in parts {
                self.collect(r, &mut Vec::new(), &mut order, &mut sorts)?;
            }
            if sorts.len() == before {
                break;
            }
        }
        let mut vars = Vec::new();
        for (name, p) in order {
            let s = match sorts.get(&name) {
                Some(s) => *s,
                None if self.sig.sorts.len() == 1 => SortId(0),
                None => return err(p, format!("cannot infer the sort of `{name}`")),
            };
            vars.push((name, s));
        }
        Ok(Context::new(vars).expect("names are distinct"))
    }

    fn collect(
        &self,
        r: &Raw,
        bound: &mut Vec<(String, Option<SortId>)>,
        order: &mut Vec<(String, Pos)>,
        sorts: &mut BTreeMap<String, SortId>,
    ) -> Result<(), ParseError> {
        match r {
            Raw::True | Raw::False => {}
            Raw::Eq(a, b, _) => {
                let sa = self.collect_term(a, None, bound, order, sorts)?;
                let sb = self.collect_term(b, sa, bound, order, sorts)?;
                if sa.is_none() {
                    self.collect_term(a, sb, bound, order, sorts)?;
                }
            }
            Raw::Pred(n, args, _) => {
                let want: Vec<Option<SortId>> = match self.sig.rel_id(n) {
                    Some(rid) if self.sig.rel(rid).args.len() == args.len() => {
                        self.sig.rel(rid).args.iter().map(|s| Some(*s)).collect()
                    }
                    _ => vec![None; args.len()],
                };
                for (a, w) in args.iter().zip(want) {
                    self.collect_term(a, w, bound, order, sorts)?;
                }
            }
            Raw::And(a, b) | Raw::Or(a, b) => {
                self.collect(a, bound, order, sorts)?;
                self.collect(b, bound, order, sorts)?;
            }
            Raw::Exists(binders, body) => {
                for (name, sort, p) in binders {
                    let s = match sort {
                        Some(s) => Some(self.sort(s, *p)?),
                        None => None,
                    };
                    bound.push((name.clone(), s));
                }
                self.collect(body, bound, order, sorts)?;
                bound.truncate(bound.len() - binders.len());
            }
            Raw::Not(a, _) => self.collect(a, bound, order, sorts)?,
        }
        Ok(())
    }

    fn collect_term(
        &self,
        t: &RawTerm,
        expected: Option<SortId>,
        bound: &mut Vec<(String, Option<SortId>)>,
        order: &mut Vec<(String, Pos)>,
        sorts: &mut BTreeMap<String, SortId>,
    ) -> Result<Option<SortId>, ParseError> {
        match t {
            RawTerm::Name(n, p) => {
                if let Some((_, s)) = bound.iter().rev().find(|(v, _)| v == n) {
                    return Ok(s.or(expected));
                }
                let is_free = order.iter().any(|(v, _)| v == n);
                if !is_free {
                    if let Some(f) = self.sig.func_id(n) {
                        return Ok(Some(self.sig.func(f).result));
                    }
                    if KEYWORDS.contains(&n.as_str()) {
                        return err(*p, format!("keyword `{n}` cannot be used as a term"));
                    }
                    order.push((n.clone(), *p));
                }
                if let Some(s) = expected {
                    match sorts.get(n) {
                        Some(old) if *old != s => {
                            return err(
                                *p,
                                format!(
                                    "sort mismatch: `{n}` used at sorts `{}` and `{}`",
                                    self.sig.sort_name(*old),
                                    self.sig.sort_name(s)
                                ),
                            )
                        }
                        _ => {
                            sorts.insert(n.clone(), s);
                        }
                    }
                }
                Ok(sorts.get(n).copied())
            }
            RawTerm::App(n, args, _) => match self.sig.func_id(n) {
                Some(f) if self.sig.func(f).args.len() == args.len() => {
                    let sym = self.sig.func(f);
                    for (a, w) in args.iter().zip(&sym.args) {
                        self.collect_term(a, Some(*w), bound, order, sorts)?;
                    }
                    Ok(Some(sym.result))
                }
                _ => {
                    for a in args {
                        self.collect_term(a, None, bound, order, sorts)?;
                    }
                    Ok(None)
                }
            },
        }
    }
}

fn raw_pos(t: &RawTerm) -> Pos {
    match t {
        RawTerm::Name(_, p) | RawTerm::App(_, _, p) => *p,
    }
}

fn build_context(
    elab: &Elab,
    vars: Vec<(String, String, Pos)>,
) -> Result<Context, ParseError> {
    let mut out = Vec::new();
    for (name, sort, p) in vars {
        if out.iter().any(|(n, _): &(String, SortId)| *n == name) {
            return err(p, format!("variable clash: `{name}` bound twice in context"));
        }
        out.push((name, elab.sort(&sort, p)?));
    }
    Ok(Context::new(out).expect("checked distinct"))
}

/// Parses `[ctx] lhs |- rhs`; the context may be omitted.
fn sequent_from(
    elab: &Elab,
    p: &mut Parser,
) -> Result<Sequent, ParseError> {
    let explicit = if *p.peek() == Tok::LBrack {
        Some(p.context()?)
    } else {
        None
    };
    let lhs = p.formula()?;
    p.expect(Tok::Turnstile)?;
    let rhs = p.formula()?;
    let ctx = match explicit {
        Some(vars) => build_context(elab, vars)?,
        None => elab.infer_context(&[&lhs, &rhs])?,
    };
    let mut scope: Vec<(String, SortId)> = ctx.vars().to_vec();
    let l = elab.node(&lhs, &mut scope)?;
    let r = elab.node(&rhs, &mut scope)?;
    Ok(Sequent::new(ctx, l, r))
}

fn formula_from(elab: &Elab, p: &mut Parser) -> Result<(Context, Node), ParseError> {
    let explicit = if *p.peek() == Tok::LBrack {
        Some(p.context()?)
    } else {
        None
    };
    let body = p.formula()?;
    let ctx = match explicit {
        Some(vars) => build_context(elab, vars)?,
        None => elab.infer_context(&[&body])?,
    };
    let mut scope: Vec<(String, SortId)> = ctx.vars().to_vec();
    let node = elab.node(&body, &mut scope)?;
    Ok((ctx, node))
}

/// Parses a whole theory file.
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    // group physical lines into declarations: indented lines continue
    let mut decls: Vec<(usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let indented = body.starts_with(' ') || body.starts_with('\t');
        match decls.last_mut() {
            Some((_, d)) if indented => {
                // keep the raw line so column numbers stay meaningful for
                // the first line; continuation columns are best effort
                d.push('\n');
                d.push_str(body);
            }
            _ => decls.push((i, body.to_string())),
        }
    }
    let mut sig = Signature::new();
    let mut name: Option<String> = None;
    let mut classical = false;
    let mut axioms = Vec::new();
    let mut axiom_lines = Vec::new();
    for (line, decl) in decls {
        // theory names are labels and may hold any non-blank characters
        let header = decl.trim_start();
        let rest = header
            .strip_prefix("classical theory ")
            .map(|r| (true, r))
            .or_else(|| header.strip_prefix("theory ").map(|r| (false, r)));
        if let Some((is_classical, rest)) = rest {
            let col = decl.len() - rest.len();
            let label = rest.trim();
            if name.is_some() {
                return err(Pos { line: line + 1, col: decl.len() - header.len() + 1 }, "duplicate theory header");
            }
            if label.is_empty() || label.contains(char::is_whitespace) {
                return err(Pos { line: line + 1, col: col + 1 }, "expected a theory name");
            }
            classical = is_classical;
            name = Some(label.to_string());
            continue;
        }
        let mut p = Parser {
            toks: lex(&decl, line, 0)?,
            i: 0,
        };
        let (kw, kp) = p.ident("a declaration")?;
        if name.is_none() && kw != "theory" && kw != "classical" {
            return err(kp, "file must start with `theory NAME` or `classical theory NAME`");
        }
        match kw.as_str() {
            "classical" | "theory" => {
                if name.is_some() {
                    return err(kp, "duplicate theory header");
                }
                if kw == "classical" {
                    classical = true;
                    let (t, tp) = p.ident("`theory`")?;
                    if t != "theory" {
                        return err(tp, "expected `theory`");
                    }
                }
                name = Some(p.ident("a theory name")?.0);
                p.end()?;
            }
            "sort" => {
                let (s, sp) = p.ident("a sort name")?;
                p.end()?;
                if sig.add_sort(&s).is_err() {
                    return err(sp, format!("duplicate sort `{s}`"));
                }
            }
            "func" => {
                let (f, fp) = p.ident("a function name")?;
                p.expect(Tok::Colon)?;
                let mut args = Vec::new();
                while let Tok::Ident(_) = p.peek() {
                    let (s, sp) = p.ident("a sort")?;
                    args.push(sig.sort_id(&s).map_or_else(|| err(sp, format!("unknown sort `{s}`")), Ok)?);
                }
                p.expect(Tok::Arrow)?;
                let (r, rp) = p.ident("a result sort")?;
                let result = sig
                    .sort_id(&r)
                    .map_or_else(|| err(rp, format!("unknown sort `{r}`")), Ok)?;
                p.end()?;
                if sig.add_func(&f, &args, result).is_err() {
                    return err(fp, format!("duplicate symbol `{f}`"));
                }
            }
            "rel" => {
                let (r, rp) = p.ident("a relation name")?;
                let mut args = Vec::new();
                if *p.peek() == Tok::Colon {
                    p.bump();
                    while let Tok::Ident(_) = p.peek() {
                        let (s, sp) = p.ident("a sort")?;
                        args.push(
                            sig.sort_id(&s)
                                .map_or_else(|| err(sp, format!("unknown sort `{s}`")), Ok)?,
                        );
                    }
                }
                p.end()?;
                if sig.add_rel(&r, &args).is_err() {
                    return err(rp, format!("duplicate symbol `{r}`"));
                }
            }
            "axiom" => {
                let elab = Elab {
                    sig: &sig,
                    classical,
                };
                let s = sequent_from(&elab, &mut p)?;
                p.end()?;
                axioms.push(s);
                axiom_lines.push(kp);
            }
            other => return err(kp, format!("unknown declaration `{other}`")),
        }
    }
    let Some(name) = name else {
        return err(Pos { line: 1, col: 1 }, "missing `theory NAME` header");
    };
    let theory = Theory::new(name, sig)
        .with_axioms(axioms)
        .classical(classical);
    if let Some(d) = well_formed(&theory).into_iter().next() {
        let idx = d
            .location
            .strip_prefix("axiom ")
            .and_then(|r| r.split(',').next())
            .and_then(|n| n.trim().parse::<usize>().ok());
        let p = idx
            .and_then(|i| axiom_lines.get(i - 1).copied())
            .unwrap_or(Pos { line: 1, col: 1 });
        return err(p, d.message);
    }
    Ok(theory)
}

/// Parses a sequent over a theory's signature; the `[ctx]` prefix is
/// optional.
pub fn parse_sequent(theory: &Theory, text: &str) -> Result<Sequent, ParseError> {
    let elab = Elab {
        sig: &theory.sig,
        classical: theory.classical,
    };
    let mut p = Parser {
        toks: lex(text, 0, 0)?,
        i: 0,
    };
    let s = sequent_from(&elab, &mut p)?;
    p.end()?;
    Ok(s)
}

/// Parses a coherent formula `[ctx] body`; the context may be omitted.
pub fn parse_formula(sig: &Signature, text: &str) -> Result<Formula, ParseError> {
    let elab = Elab {
        sig,
        classical: false,
    };
    let mut p = Parser {
        toks: lex(text, 0, 0)?,
        i: 0,
    };
    let (ctx, body) = formula_from(&elab, &mut p)?;
    p.end()?;
    Ok(Formula::new(sig, ctx, body).expect("elaborated formulas are well-formed"))
}

/// Parses a formula in a given context.
pub fn parse_formula_in(sig: &Signature, ctx: &Context, text: &str) -> Result<Formula, ParseError> {
    let elab = Elab {
        sig,
        classical: false,
    };
    let mut p = Parser {
        toks: lex(text, 0, 0)?,
        i: 0,
    };
    let raw = p.formula()?;
    p.end()?;
    let mut scope = ctx.vars().to_vec();
    let body = elab.node(&raw, &mut scope)?;
    Ok(Formula::new(sig, ctx.clone(), body).expect("elaborated formulas are well-formed"))
}

/// Parses a classical formula `[ctx] body`.
pub fn parse_classical_formula(sig: &Signature, text: &str) -> Result<ClassicalFormula, ParseError> {
    let elab = Elab {
        sig,
        classical: true,
    };
    let mut p = Parser {
        toks: lex(text, 0, 0)?,
        i: 0,
    };
    let (ctx, body) = formula_from(&elab, &mut p)?;
    p.end()?;
    Ok(ClassicalFormula::new(sig, ctx, body).expect("elaborated formulas are well-formed"))
}
