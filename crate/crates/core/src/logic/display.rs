//! Printing in the theory-file syntax. Output re-parses to the same value.

use std::fmt::Write;

use super::signature::Signature;
use super::syntax::{Context, Node, Sequent, Term};
use super::Theory;

struct Printer<'a> {
    sig: &'a Signature,
    names: Vec<String>,
}

impl<'a> Printer<'a> {
    fn new(sig: &'a Signature, ctx: &Context) -> Self {
        Printer {
            sig,
            names: ctx.vars().iter().map(|(n, _)| n.clone()).collect(),
        }
    }

    fn fresh(&self, base: &str) -> String {
        if !self.names.iter().any(|n| n == base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|c| !self.names.iter().any(|n| n == c))
            .unwrap()
    }

    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => match self.names.get(*v) {
                Some(n) => out.push_str(n),
                None => {
                    let _ = write!(out, "?{v}");
                }
            },
            Term::App(f, args) => {
                let name = &self.sig.funcs[f.0].name;
                out.push_str(name);
                if args.is_empty() {
                    if self.names.iter().any(|n| n == name) {
                        out.push_str("()");
                    }
                    return;
                }
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    self.term(a, out);
                }
                out.push(')');
            }
        }
    }

    // level 0: anything; 1: operand of \/ ; 2: operand of /\ ; 3: operand of not
    fn node(&mut self, n: &Node, level: u8, out: &mut String) {
        let needs_parens = match n {
            Node::Or(..) => level >= 2,
            Node::And(..) => level >= 3,
            Node::Exists(..) => level >= 1,
            _ => false,
        };
        if needs_parens {
            out.push('(');
        }
        match n {
            Node::True => out.push_str("true"),
            Node::False => out.push_str("false"),
            Node::Eq(a, b) => {
                self.term(a, out);
                out.push_str(" = ");
                self.term(b, out);
            }
            Node::Rel(r, args) => {
                out.push_str(&self.sig.rels[r.0].name);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        self.term(a, out);
                    }
                    out.push(')');
                }
            }
            Node::Or(a, b) => {
                self.node(a, 1, out);
                out.push_str(" \\/ ");
                // right operand of the same connective needs parens to keep the tree shape
                self.node(b, 2, out);
            }
            Node::And(a, b) => {
                self.node(a, 2, out);
                out.push_str(" /\\ ");
                self.node(b, 3, out);
            }
            Node::Exists(bd, body) => {
                let name = self.fresh(&bd.name);
                let _ = write!(out, "exists {}:{}. ", name, self.sig.sorts[bd.sort.0]);
                self.names.push(name);
                self.node(body, 0, out);
                self.names.pop();
            }
            Node::Not(a) => {
                out.push_str("not ");
                self.node(a, 3, out);
            }
        }
        if needs_parens {
            out.push(')');
        }
    }
}

pub fn print_term(sig: &Signature, ctx: &Context, t: &Term) -> String {
    let mut s = String::new();
    Printer::new(sig, ctx).term(t, &mut s);
    s
}

/// Prints a formula body without its context.
pub fn print_node(sig: &Signature, ctx: &Context, n: &Node) -> String {
    let mut s = String::new();
    Printer::new(sig, ctx).node(n, 0, &mut s);
    s
}

fn print_context(sig: &Signature, ctx: &Context) -> String {
    let vars: Vec<String> = ctx
        .vars()
        .iter()
        .map(|(n, s)| format!("{}:{}", n, sig.sorts[s.0]))
        .collect();
    format!("[{}]", vars.join(", "))
}

/// `[x:A, ...] body`
pub fn print_formula(sig: &Signature, ctx: &Context, n: &Node) -> String {
    format!("{} {}", print_context(sig, ctx), print_node(sig, ctx, n))
}

/// `[x:A, ...] lhs |- rhs`
pub fn print_sequent(sig: &Signature, s: &Sequent) -> String {
    format!(
        "{} {} |- {}",
        print_context(sig, &s.ctx),
        print_node(sig, &s.ctx, &s.lhs),
        print_node(sig, &s.ctx, &s.rhs)
    )
}

pub fn print_theory(t: &Theory) -> String {
    let sig = &t.sig;
    let mut out = String::new();
    if t.classical {
        out.push_str("classical ");
    }
    let _ = writeln!(out, "theory {}", t.name);
    for s in &sig.sorts {
        let _ = writeln!(out, "sort {s}");
    }
    for f in &sig.funcs {
        let args: Vec<&str> = f.args.iter().map(|a| sig.sorts[a.0].as_str()).collect();
        let sep = if args.is_empty() { "" } else { " " };
        let _ = writeln!(
            out,
            "func {} : {}{}-> {}",
            f.name,
            args.join(" "),
            sep,
            sig.sorts[f.result.0]
        );
    }
    for r in &sig.rels {
        let args: Vec<&str> = r.args.iter().map(|a| sig.sorts[a.0].as_str()).collect();
        if args.is_empty() {
            let _ = writeln!(out, "rel {}", r.name);
        } else {
            let _ = writeln!(out, "rel {} : {}", r.name, args.join(" "));
        }
    }
    for a in &t.axioms {
        let _ = writeln!(out, "axiom {}", print_sequent(sig, a));
    }
    out
}
