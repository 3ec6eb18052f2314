//! Pretty-printer for the surface syntax. `parse(print(x))` is structurally
//! equal to `x` for every construct the parser produces.

use crate::ast::*;
use std::fmt::Write;

// precedence levels, loose to tight
const P_QUANT: u8 = 0;
const P_IFF: u8 = 1;
const P_IMPLIES: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_STAR: u8 = 5;
const P_WEAKAND: u8 = 6;
const P_CMP: u8 = 7;
const P_SUM: u8 = 8;
const P_ATOM: u8 = 10;

fn paren(s: String, inner: u8, required: u8) -> String {
    if inner < required {
        format!("({s})")
    } else {
        s
    }
}

pub fn print_formula(f: &Formula) -> String {
    fmt_formula(f).0
}

pub fn print_term(t: &Term) -> String {
    fmt_term(t).0
}

fn fmt_formula(f: &Formula) -> (String, u8) {
    match f {
        Formula::True => ("True".into(), P_ATOM),
        Formula::False => ("False".into(), P_ATOM),
        Formula::Eq(a, b) => {
            let (sa, pa) = fmt_term(a);
            let (sb, pb) = fmt_term(b);
            (
                format!("{} = {}", paren(sa, pa, P_SUM), paren(sb, pb, P_SUM)),
                P_CMP,
            )
        }
        Formula::Lt(a, b) => {
            let (sa, pa) = fmt_term(a);
            let (sb, pb) = fmt_term(b);
            (
                format!("{} < {}", paren(sa, pa, P_SUM), paren(sb, pb, P_SUM)),
                P_CMP,
            )
        }
        Formula::Le(a, b) => {
            let (sa, pa) = fmt_term(a);
            let (sb, pb) = fmt_term(b);
            (
                format!("{} <= {}", paren(sa, pa, P_SUM), paren(sb, pb, P_SUM)),
                P_CMP,
            )
        }
        Formula::Member(e, s) => (
            format!("IsMember({}, {})", print_term(e), print_term(s)),
            P_ATOM,
        ),
        Formula::Subset(a, b) => (
            format!("IsSubset({}, {})", print_term(a), print_term(b)),
            P_ATOM,
        ),
        Formula::IsEmpty(a) => (format!("IsEmpty({})", print_term(a)), P_ATOM),
        Formula::RecPred(p, args) => (fmt_app(p, args), P_ATOM),
        Formula::Rel(p, args) => (fmt_app(p, args), P_ATOM),
        Formula::Not(a) => {
            if let Formula::Eq(x, y) = a.as_ref() {
                let (sx, px) = fmt_term(x);
                let (sy, py) = fmt_term(y);
                (
                    format!("{} != {}", paren(sx, px, P_SUM), paren(sy, py, P_SUM)),
                    P_CMP,
                )
            } else {
                (format!("Not({})", print_formula(a)), P_ATOM)
            }
        }
        Formula::And(fs) => {
            let parts: Vec<String> = fs
                .iter()
                .map(|g| {
                    let (s, p) = fmt_formula(g);
                    paren(s, p, P_AND + 1)
                })
                .collect();
            (parts.join(" and "), P_AND)
        }
        Formula::Or(fs) => {
            // `Not(a) or b` with exactly two disjuncts reads back as `a => b`
            if fs.len() == 2 {
                if let Formula::Not(h) = &fs[0] {
                    let (sh, ph) = fmt_formula(h);
                    let (sg, pg) = fmt_formula(&fs[1]);
                    return (
                        format!(
                            "{} => {}",
                            paren(sh, ph, P_IMPLIES + 1),
                            paren(sg, pg, P_IMPLIES)
                        ),
                        P_IMPLIES,
                    );
                }
            }
            let parts: Vec<String> = fs
                .iter()
                .map(|g| {
                    let (s, p) = fmt_formula(g);
                    paren(s, p, P_OR + 1)
                })
                .collect();
            (parts.join(" or "), P_OR)
        }
        Formula::Iff(a, b) => {
            let (sa, pa) = fmt_formula(a);
            let (sb, pb) = fmt_formula(b);
            (
                format!(
                    "{} iff {}",
                    paren(sa, pa, P_IFF + 1),
                    paren(sb, pb, P_IFF + 1)
                ),
                P_IFF,
            )
        }
        Formula::Ite(g, a, b) => (
            format!(
                "ite({}, {}, {})",
                print_formula(g),
                print_formula(a),
                print_formula(b)
            ),
            P_ATOM,
        ),
        Formula::Exists {
            var,
            field,
            arg,
            body,
        } => (
            format!(
                "Exists {var}: {field}({}). {}",
                print_term(arg),
                print_formula(body)
            ),
            P_QUANT,
        ),
        Formula::Cloud(a) => (format!("[{}]", print_formula(a)), P_ATOM),
        Formula::ForallLoc { vars, body } => (
            format!("Forall {}. {}", vars.join(", "), print_formula(body)),
            P_QUANT,
        ),
    }
}

fn fmt_app(name: &str, args: &[Term]) -> String {
    let parts: Vec<String> = args.iter().map(print_term).collect();
    format!("{name}({})", parts.join(", "))
}

fn fmt_term(t: &Term) -> (String, u8) {
    match t {
        Term::Var(v) => (v.clone(), P_ATOM),
        Term::Nil => ("nil".into(), P_ATOM),
        Term::Const(c) => (c.clone(), P_ATOM),
        Term::IntLit(n) => {
            if *n < 0 {
                (format!("({n})"), P_ATOM)
            } else {
                (n.to_string(), P_ATOM)
            }
        }
        Term::Field(f, a) => (format!("{f}({})", print_term(a)), P_ATOM),
        Term::App(f, args) | Term::RecFn(f, args) => (fmt_app(f, args), P_ATOM),
        Term::Ite(g, a, b) => (
            format!(
                "ite({}, {}, {})",
                print_formula(g),
                print_term(a),
                print_term(b)
            ),
            P_ATOM,
        ),
        Term::Sp(arg) => {
            let inner = match arg.as_ref() {
                SpArg::Formula(f) => print_formula(f),
                SpArg::Term(t2) => print_term(t2),
            };
            (format!("Sp({inner})"), P_ATOM)
        }
        Term::Cloud(a) => (format!("[{}]", print_term(a)), P_ATOM),
        Term::Old(a) => (format!("Old({})", print_term(a)), P_ATOM),
        Term::Empty(Sort::SetInt) => ("EmptySetInt".into(), P_ATOM),
        Term::Empty(Sort::SetLoc) => ("EmptySetLoc".into(), P_ATOM),
        Term::Empty(_) => ("EmptySetInt".into(), P_ATOM),
        Term::Singleton(a) => (format!("Singleton({})", print_term(a)), P_ATOM),
        Term::Union(a, b) => {
            if let Term::Singleton(e) = b.as_ref() {
                (
                    format!("SetAdd({}, {})", print_term(a), print_term(e)),
                    P_ATOM,
                )
            } else {
                (
                    format!("SetUnion({}, {})", print_term(a), print_term(b)),
                    P_ATOM,
                )
            }
        }
        Term::Inter(a, b) => (
            format!("SetIntersect({}, {})", print_term(a), print_term(b)),
            P_ATOM,
        ),
        Term::Diff(a, b) => (
            format!("SetMinus({}, {})", print_term(a), print_term(b)),
            P_ATOM,
        ),
        Term::Add(a, b) => {
            let (sa, pa) = fmt_term(a);
            let (sb, pb) = fmt_term(b);
            (
                format!("{} + {}", paren(sa, pa, P_SUM), paren(sb, pb, P_SUM + 1)),
                P_SUM,
            )
        }
        Term::Sub(a, b) => {
            let (sa, pa) = fmt_term(a);
            let (sb, pb) = fmt_term(b);
            (
                format!("{} - {}", paren(sa, pa, P_SUM), paren(sb, pb, P_SUM + 1)),
                P_SUM,
            )
        }
    }
}

// -- SL-FL -------------------------------------------------------------------

pub fn print_sl_formula(f: &SlFormula) -> String {
    fmt_sl_formula(f).0
}

pub fn print_sl_term(t: &SlTerm) -> String {
    fmt_sl_term(t).0
}

fn fmt_sl_formula(f: &SlFormula) -> (String, u8) {
    match f {
        SlFormula::True => ("True".into(), P_ATOM),
        SlFormula::False => ("False".into(), P_ATOM),
        SlFormula::Eq(a, b) => (cmp_sl("=", a, b), P_CMP),
        SlFormula::Ne(a, b) => (cmp_sl("!=", a, b), P_CMP),
        SlFormula::Lt(a, b) => (cmp_sl("<", a, b), P_CMP),
        SlFormula::Le(a, b) => (cmp_sl("<=", a, b), P_CMP),
        SlFormula::Member(e, s) => (
            format!("IsMember({}, {})", print_sl_term(e), print_sl_term(s)),
            P_ATOM,
        ),
        SlFormula::IsEmpty(a) => (format!("IsEmpty({})", print_sl_term(a)), P_ATOM),
        SlFormula::PointsTo { src, field, dst } => (
            format!("PointsTo({src}, {field}, {})", print_sl_term(dst)),
            P_ATOM,
        ),
        SlFormula::Star(a, b) => {
            let (sa, pa) = fmt_sl_formula(a);
            let (sb, pb) = fmt_sl_formula(b);
            (
                format!(
                    "{} * {}",
                    paren(sa, pa, P_STAR),
                    paren(sb, pb, P_STAR + 1)
                ),
                P_STAR,
            )
        }
        SlFormula::And(a, b) => {
            let (sa, pa) = fmt_sl_formula(a);
            let (sb, pb) = fmt_sl_formula(b);
            (
                format!("{} and {}", paren(sa, pa, P_AND), paren(sb, pb, P_AND + 1)),
                P_AND,
            )
        }
        SlFormula::WeakAnd(a, b) => {
            let (sa, pa) = fmt_sl_formula(a);
            let (sb, pb) = fmt_sl_formula(b);
            (
                format!(
                    "{} && {}",
                    paren(sa, pa, P_WEAKAND),
                    paren(sb, pb, P_WEAKAND + 1)
                ),
                P_WEAKAND,
            )
        }
        SlFormula::Or(a, b) => {
            let (sa, pa) = fmt_sl_formula(a);
            let (sb, pb) = fmt_sl_formula(b);
            (
                format!("{} or {}", paren(sa, pa, P_OR), paren(sb, pb, P_OR + 1)),
                P_OR,
            )
        }
        SlFormula::Ite(g, a, b) => (
            format!(
                "ite({}, {}, {})",
                print_sl_formula(g),
                print_sl_formula(a),
                print_sl_formula(b)
            ),
            P_ATOM,
        ),
        SlFormula::Exists {
            var,
            src,
            field,
            body,
        } => (
            format!("Exists {var}: {field}({src}). {}", print_sl_formula(body)),
            P_QUANT,
        ),
        SlFormula::RecPred(p, args) => {
            let parts: Vec<String> = args.iter().map(print_sl_term).collect();
            (format!("{p}({})", parts.join(", ")), P_ATOM)
        }
    }
}

fn cmp_sl(op: &str, a: &SlTerm, b: &SlTerm) -> String {
    format!("{} {op} {}", print_sl_term(a), print_sl_term(b))
}

fn fmt_sl_term(t: &SlTerm) -> (String, u8) {
    match t {
        SlTerm::Var(v) => (v.clone(), P_ATOM),
        SlTerm::Nil => ("nil".into(), P_ATOM),
        SlTerm::Const(c) => (c.clone(), P_ATOM),
        SlTerm::IntLit(n) => {
            if *n < 0 {
                (format!("({n})"), P_ATOM)
            } else {
                (n.to_string(), P_ATOM)
            }
        }
        SlTerm::Deref(a, f) => (format!("{f}({})", print_sl_term(a)), P_ATOM),
        SlTerm::RecFn(p, args) => {
            let parts: Vec<String> = args.iter().map(print_sl_term).collect();
            (format!("{p}({})", parts.join(", ")), P_ATOM)
        }
        SlTerm::Ite(g, a, b) => (
            format!(
                "ite({}, {}, {})",
                print_sl_formula(g),
                print_sl_term(a),
                print_sl_term(b)
            ),
            P_ATOM,
        ),
        SlTerm::Old(a) => (format!("Old({})", print_sl_term(a)), P_ATOM),
        SlTerm::Empty(Sort::SetLoc) => ("EmptySetLoc".into(), P_ATOM),
        SlTerm::Empty(_) => ("EmptySetInt".into(), P_ATOM),
        SlTerm::Singleton(a) => (format!("Singleton({})", print_sl_term(a)), P_ATOM),
        SlTerm::Union(a, b) => {
            if let SlTerm::Singleton(e) = b.as_ref() {
                (
                    format!("SetAdd({}, {})", print_sl_term(a), print_sl_term(e)),
                    P_ATOM,
                )
            } else {
                (
                    format!("SetUnion({}, {})", print_sl_term(a), print_sl_term(b)),
                    P_ATOM,
                )
            }
        }
        SlTerm::Inter(a, b) => (
            format!("SetIntersect({}, {})", print_sl_term(a), print_sl_term(b)),
            P_ATOM,
        ),
        SlTerm::Diff(a, b) => (
            format!("SetMinus({}, {})", print_sl_term(a), print_sl_term(b)),
            P_ATOM,
        ),
        SlTerm::Add(a, b) => (
            format!("{} + {}", print_sl_term(a), print_sl_term(b)),
            P_SUM,
        ),
        SlTerm::Sub(a, b) => (
            format!("{} - {}", print_sl_term(a), print_sl_term(b)),
            P_SUM,
        ),
    }
}

// -- statements, methods, modules ---------------------------------------------

pub fn print_stmt(s: &Stmt, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match s {
        Stmt::Assign { dst, src } => format!("{pad}{dst} := {};", print_term(src)),
        Stmt::Load { dst, obj, field } => format!("{pad}{dst} := {obj}.{field};"),
        Stmt::Store { obj, field, src } => {
            format!("{pad}{obj}.{field} := {};", print_term(src))
        }
        Stmt::Alloc(v) => format!("{pad}alloc({v});"),
        Stmt::Free(v) => format!("{pad}free({v});"),
        Stmt::Call {
            outs,
            method,
            args,
        } => {
            let a: Vec<String> = args.iter().map(print_term).collect();
            format!("{pad}{} := {method}({});", outs.join(", "), a.join(", "))
        }
        Stmt::Assume(f) => format!("{pad}assume({});", print_formula(f)),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let mut out = String::new();
            let _ = writeln!(out, "{pad}(if ({})", print_formula(cond));
            let _ = writeln!(out, "{pad} then");
            for st in then_branch {
                let _ = writeln!(out, "{}", print_stmt(st, indent + 1));
            }
            let _ = writeln!(out, "{pad} else");
            for st in else_branch {
                let _ = writeln!(out, "{}", print_stmt(st, indent + 1));
            }
            let _ = write!(out, "{pad})");
            out
        }
        Stmt::Return => format!("{pad}return;"),
    }
}

fn print_params(params: &[(String, Sort)]) -> String {
    let parts: Vec<String> = params
        .iter()
        .map(|(n, s)| {
            if *s == Sort::Loc {
                n.clone()
            } else {
                format!("{n}: {s}")
            }
        })
        .collect();
    format!("({})", parts.join(", "))
}

pub fn print_method(m: &Method) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}{} returns {}",
        m.name,
        print_params(&m.params),
        print_params(&m.returns)
    );
    match (&m.pre, &m.post) {
        (Spec::Fl(pre), Spec::Fl(post)) => {
            let _ = writeln!(out, "@pre: {}", print_formula(pre));
            let _ = writeln!(out, "@post: {}", print_formula(post));
        }
        (Spec::Sl(pre), Spec::Sl(post)) => {
            let _ = writeln!(out, "@pre: {}", print_sl_formula(pre));
            let _ = writeln!(out, "@post: {}", print_sl_formula(post));
        }
        _ => unreachable!("mixed-logic contract"),
    }
    for s in &m.body {
        let _ = writeln!(out, "{}", print_stmt(s, 0));
    }
    out
}

pub fn print_recdef(d: &RecDef) -> String {
    let body = match &d.body {
        RecBody::Formula(f) => print_formula(f),
        RecBody::Term(t) => print_term(t),
    };
    format!("{}({}) := {body};", d.name, d.params.join(", "))
}

pub fn print_sl_recdef(d: &SlRecDef) -> String {
    let body = match &d.body {
        SlRecBody::Formula(f) => print_sl_formula(f),
        SlRecBody::Term(t) => print_sl_term(t),
    };
    format!("{}({}) := {body};", d.name, d.params.join(", "))
}

pub fn print_module(m: &SourceModule) -> String {
    let mut out = String::new();
    if m.mode == LogicMode::Slfl {
        let _ = writeln!(out, "logic slfl;");
    }
    for (f, s) in &m.signature.fields {
        let _ = writeln!(out, "field {f} : {s};");
    }
    let _ = writeln!(out);
    for d in &m.fl_defs {
        let _ = writeln!(out, "{}", print_recdef(d));
    }
    for d in &m.sl_defs {
        let _ = writeln!(out, "{}", print_sl_recdef(d));
    }
    for (a, b) in &m.same_support {
        let _ = writeln!(out, "@same-support {a} {b};");
    }
    for l in &m.lemmas {
        let _ = writeln!(out, "lemma {}: {};", l.name, print_formula(&l.body));
    }
    for meth in &m.methods {
        let _ = writeln!(out);
        let _ = write!(out, "{}", print_method(meth));
    }
    out
}
