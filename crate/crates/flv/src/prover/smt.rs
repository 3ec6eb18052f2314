//! SMT-LIB2 emission. Scripts are deterministic: identical inputs and
//! policy produce byte-identical text. `Loc` is an uninterpreted sort,
//! sets are arrays to Bool, integers use the native theory, `ite` maps to
//! the solver's conditional.

use crate::ast::{wf::infer_term_sort, Formula, Signature, Sort, Term};
use std::collections::BTreeMap;
use std::fmt::Write;

pub const PINF_SMT: i64 = 1_000_000_000;
pub const NINF_SMT: i64 = -1_000_000_000;

#[derive(Debug, Clone)]
pub struct SmtError(pub String);

impl std::fmt::Display for SmtError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unencodable construct: {}", self.0)
    }
}

pub struct Encoder<'a> {
    pub sig: &'a Signature,
    pub var_sorts: &'a BTreeMap<String, Sort>,
}

impl<'a> Encoder<'a> {
    fn sort_name(s: Sort) -> &'static str {
        match s {
            Sort::Loc => "Loc",
            Sort::Bool => "Bool",
            Sort::Int => "Int",
            Sort::SetLoc => "SetLoc",
            Sort::SetInt => "SetInt",
        }
    }

    fn term_sort(&self, t: &Term) -> Sort {
        infer_term_sort(t, self.sig, self.var_sorts).unwrap_or(Sort::Loc)
    }

    fn empty(&self, s: Sort) -> &'static str {
        match s {
            Sort::SetInt => "emptyInt",
            _ => "emptyLoc",
        }
    }

    pub fn term(&self, t: &Term) -> Result<String, SmtError> {
        Ok(match t {
            Term::Var(v) => v.clone(),
            Term::Nil => "nil".to_string(),
            Term::Const(c) => c.clone(),
            Term::IntLit(n) => {
                if *n < 0 {
                    format!("(- {})", -n)
                } else {
                    n.to_string()
                }
            }
            Term::Field(f, a) => format!("({f} {})", self.term(a)?),
            Term::App(f, args) | Term::RecFn(f, args) => {
                if args.is_empty() {
                    f.clone()
                } else {
                    let parts: Vec<String> =
                        args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                    format!("({f} {})", parts.join(" "))
                }
            }
            Term::Ite(g, a, b) => format!(
                "(ite {} {} {})",
                self.formula(g)?,
                self.term(a)?,
                self.term(b)?
            ),
            Term::Sp(_) => return Err(SmtError("support operator (translate first)".into())),
            Term::Cloud(_) => return Err(SmtError("cloud operator (translate first)".into())),
            Term::Old(_) => return Err(SmtError("Old snapshot (resolve first)".into())),
            Term::Empty(s) => self.empty(*s).to_string(),
            Term::Singleton(a) => {
                let s = Sort::set_of(self.term_sort(a)).unwrap_or(Sort::SetLoc);
                format!("(store {} {} true)", self.empty(s), self.term(a)?)
            }
            Term::Union(a, b) => format!(
                "((_ map or) {} {})",
                self.term(a)?,
                self.term(b)?
            ),
            Term::Inter(a, b) => format!(
                "((_ map and) {} {})",
                self.term(a)?,
                self.term(b)?
            ),
            Term::Diff(a, b) => format!(
                "((_ map and) {} ((_ map not) {}))",
                self.term(a)?,
                self.term(b)?
            ),
            Term::Add(a, b) => format!("(+ {} {})", self.term(a)?, self.term(b)?),
            Term::Sub(a, b) => format!("(- {} {})", self.term(a)?, self.term(b)?),
        })
    }

    pub fn formula(&self, f: &Formula) -> Result<String, SmtError> {
        Ok(match f {
            Formula::True => "true".to_string(),
            Formula::False => "false".to_string(),
            Formula::Eq(a, b) => format!("(= {} {})", self.term(a)?, self.term(b)?),
            Formula::Lt(a, b) => format!("(< {} {})", self.term(a)?, self.term(b)?),
            Formula::Le(a, b) => format!("(<= {} {})", self.term(a)?, self.term(b)?),
            Formula::Member(e, s) => format!("(select {} {})", self.term(s)?, self.term(e)?),
            Formula::Subset(a, b) => {
                let sa = self.term(a)?;
                format!("(= ((_ map and) {sa} {}) {sa})", self.term(b)?)
            }
            Formula::IsEmpty(a) => {
                let s = self.term_sort(a);
                format!("(= {} {})", self.term(a)?, self.empty(s))
            }
            Formula::RecPred(p, args) | Formula::Rel(p, args) => {
                if args.is_empty() {
                    p.clone()
                } else {
                    let parts: Vec<String> =
                        args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                    format!("({p} {})", parts.join(" "))
                }
            }
            Formula::Not(a) => format!("(not {})", self.formula(a)?),
            Formula::And(fs) => {
                if fs.is_empty() {
                    "true".to_string()
                } else {
                    let parts: Vec<String> =
                        fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?;
                    format!("(and {})", parts.join(" "))
                }
            }
            Formula::Or(fs) => {
                if fs.is_empty() {
                    "false".to_string()
                } else {
                    let parts: Vec<String> =
                        fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?;
                    format!("(or {})", parts.join(" "))
                }
            }
            Formula::Iff(a, b) => format!("(= {} {})", self.formula(a)?, self.formula(b)?),
            Formula::Ite(g, a, b) => format!(
                "(ite {} {} {})",
                self.formula(g)?,
                self.formula(a)?,
                self.formula(b)?
            ),
            Formula::Exists { .. } => {
                return Err(SmtError("guarded existential (cloudify first)".into()))
            }
            Formula::Cloud(_) => return Err(SmtError("cloud operator (translate first)".into())),
            Formula::ForallLoc { .. } => {
                return Err(SmtError(
                    "universal quantifier (instantiate before emission)".into(),
                ))
            }
        })
    }
}

/// A complete script: declarations, hypotheses, the negated goal,
/// `(check-sat)` and `(get-model)`.
pub struct ScriptInput<'a> {
    pub sig: &'a Signature,
    pub var_sorts: &'a BTreeMap<String, Sort>,
    /// (label, formula) hypothesis pairs; labels appear as comments
    pub hypotheses: &'a [(String, Formula)],
    pub goal: &'a Formula,
    /// provenance comment lines (the FORD goal in lisp form is appended)
    pub header: &'a [String],
}

pub fn emit_script(input: &ScriptInput) -> Result<String, SmtError> {
    let enc = Encoder {
        sig: input.sig,
        var_sorts: input.var_sorts,
    };
    let mut out = String::new();
    for line in input.header {
        let _ = writeln!(out, "; {line}");
    }
    let goal_sexp = enc.formula(input.goal)?;
    let _ = writeln!(out, "; FORD goal: {goal_sexp}");
    let _ = writeln!(out, "(set-logic ALL)");
    let _ = writeln!(out, "(declare-sort Loc 0)");
    let _ = writeln!(out, "(define-sort SetLoc () (Array Loc Bool))");
    let _ = writeln!(out, "(define-sort SetInt () (Array Int Bool))");
    let _ = writeln!(
        out,
        "(define-fun emptyLoc () SetLoc ((as const SetLoc) false))"
    );
    let _ = writeln!(
        out,
        "(define-fun emptyInt () SetInt ((as const SetInt) false))"
    );
    let _ = writeln!(out, "(declare-fun nil () Loc)");
    let _ = writeln!(out, "(define-fun PInf () Int {PINF_SMT})");
    let _ = writeln!(out, "(define-fun NInf () Int (- {}))", -NINF_SMT);
    for (c, s) in &input.sig.consts {
        if c == "nil" || c == "PInf" || c == "NInf" {
            continue;
        }
        let _ = writeln!(out, "(declare-fun {c} () {})", Encoder::sort_name(*s));
    }
    for (f, rng) in &input.sig.fields {
        let _ = writeln!(out, "(declare-fun {f} (Loc) {})", Encoder::sort_name(*rng));
    }
    for (f, (dom, rng)) in &input.sig.other_fns {
        let doms: Vec<&str> = dom.iter().map(|s| Encoder::sort_name(*s)).collect();
        let _ = writeln!(
            out,
            "(declare-fun {f} ({}) {})",
            doms.join(" "),
            Encoder::sort_name(*rng)
        );
    }
    for (r, rs) in &input.sig.rec_sigs {
        let doms: Vec<&str> = rs.params.iter().map(|s| Encoder::sort_name(*s)).collect();
        let _ = writeln!(
            out,
            "(declare-fun {r} ({}) {})",
            doms.join(" "),
            Encoder::sort_name(rs.result)
        );
    }
    for (v, s) in input.var_sorts {
        let _ = writeln!(out, "(declare-fun {v} () {})", Encoder::sort_name(*s));
    }
    let _ = writeln!(out);
    for (label, h) in input.hypotheses {
        let _ = writeln!(out, "; {label}");
        let _ = writeln!(out, "(assert {})", enc.formula(h)?);
    }
    let _ = writeln!(out, "; negated goal");
    let _ = writeln!(out, "(assert (not {goal_sexp}))");
    let _ = writeln!(out, "(check-sat)");
    let _ = writeln!(out, "(get-model)");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_encoding() {
        let sig = Signature::new();
        let vars: BTreeMap<String, Sort> =
            [("S".to_string(), Sort::SetLoc), ("x".to_string(), Sort::Loc)]
                .into_iter()
                .collect();
        let enc = Encoder {
            sig: &sig,
            var_sorts: &vars,
        };
        assert_eq!(
            enc.term(&Term::Empty(Sort::SetLoc)).unwrap(),
            "emptyLoc"
        );
        let inter = Term::Inter(
            Box::new(Term::Var("S".into())),
            Box::new(Term::Singleton(Box::new(Term::Var("x".into())))),
        );
        assert_eq!(
            enc.term(&inter).unwrap(),
            "((_ map and) S (store emptyLoc x true))"
        );
        assert_eq!(
            enc.formula(&Formula::IsEmpty(inter)).unwrap(),
            "(= ((_ map and) S (store emptyLoc x true)) emptyLoc)"
        );
        assert_eq!(
            enc.formula(&Formula::Subset(
                Term::Var("S".into()),
                Term::Var("S".into())
            ))
            .unwrap(),
            "(= ((_ map and) S S) S)"
        );
    }

    #[test]
    fn script_is_deterministic() {
        let sig = Signature::new();
        let vars: BTreeMap<String, Sort> = [("x".to_string(), Sort::Loc)].into_iter().collect();
        let hyp = vec![(
            "hyp".to_string(),
            Formula::Eq(Term::Var("x".into()), Term::Nil),
        )];
        let goal = Formula::Eq(Term::Var("x".into()), Term::Nil);
        let input = ScriptInput {
            sig: &sig,
            var_sorts: &vars,
            hypotheses: &hyp,
            goal: &goal,
            header: &["test".to_string()],
        };
        let a = emit_script(&input).unwrap();
        let b = emit_script(&input).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("(assert (not (= x nil)))"));
        assert!(a.ends_with("(check-sat)\n(get-model)\n"));
    }
}
