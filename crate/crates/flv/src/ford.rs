//! Translation from FL (with support and cloud operators) to FORD:
//! support expressions are compiled away following the support equations,
//! introducing one recursive support definition `Sp_I` per recursive
//! symbol `I`; cloud brackets disappear. The output is quantifier-free
//! first-order logic with recursive definitions in the one-way fragment.

use crate::ast::{Formula, RecBody, RecDef, Signature, Sort, SpArg, Term};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FordError {
    #[error("residual guarded existential; run cloud elimination first")]
    ResidualQuantifier,
    #[error("Old(..) must be resolved before FORD translation")]
    ResidualOld,
}

/// A FORD formula: no `Sp`, no `Cloud`, no guarded existentials. The
/// constructor validates the invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FordFormula(Formula);

impl FordFormula {
    pub fn new(f: Formula) -> Result<FordFormula, String> {
        let mut bad: Option<&'static str> = None;
        check_ford_formula(&f, &mut bad);
        match bad {
            None => Ok(FordFormula(f)),
            Some(what) => Err(format!("not a FORD formula: contains {what}")),
        }
    }
    pub fn formula(&self) -> &Formula {
        &self.0
    }
    pub fn into_formula(self) -> Formula {
        self.0
    }
}

fn check_ford_formula(f: &Formula, bad: &mut Option<&'static str>) {
    crate::ast::visit_formula(f, &mut |node| match node {
        crate::ast::FormulaOrTerm::Formula(Formula::Exists { .. }) => {
            *bad = Some("a guarded existential")
        }
        crate::ast::FormulaOrTerm::Formula(Formula::Cloud(_)) => *bad = Some("a cloud operator"),
        crate::ast::FormulaOrTerm::Term(Term::Sp(_)) => *bad = Some("a support operator"),
        crate::ast::FormulaOrTerm::Term(Term::Cloud(_)) => *bad = Some("a cloud operator"),
        crate::ast::FormulaOrTerm::Term(Term::Old(_)) => *bad = Some("an Old snapshot"),
        _ => {}
    });
}

/// Name of the support symbol for a recursive symbol.
pub fn sp_name(rec: &str) -> String {
    format!("Sp{rec}")
}

/// Translate a quantifier-free FL formula to FORD.
pub fn nabla(f: &Formula) -> Result<Formula, FordError> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(nabla_term(a)?, nabla_term(b)?),
        Formula::Lt(a, b) => Formula::Lt(nabla_term(a)?, nabla_term(b)?),
        Formula::Le(a, b) => Formula::Le(nabla_term(a)?, nabla_term(b)?),
        Formula::Member(a, b) => Formula::Member(nabla_term(a)?, nabla_term(b)?),
        Formula::Subset(a, b) => Formula::Subset(nabla_term(a)?, nabla_term(b)?),
        Formula::IsEmpty(a) => Formula::IsEmpty(nabla_term(a)?),
        Formula::RecPred(p, args) => Formula::RecPred(
            p.clone(),
            args.iter().map(nabla_term).collect::<Result<_, _>>()?,
        ),
        Formula::Rel(p, args) => Formula::Rel(
            p.clone(),
            args.iter().map(nabla_term).collect::<Result<_, _>>()?,
        ),
        Formula::Not(a) => Formula::Not(Box::new(nabla(a)?)),
        Formula::And(fs) => Formula::And(fs.iter().map(nabla).collect::<Result<_, _>>()?),
        Formula::Or(fs) => Formula::Or(fs.iter().map(nabla).collect::<Result<_, _>>()?),
        Formula::Iff(a, b) => Formula::Iff(Box::new(nabla(a)?), Box::new(nabla(b)?)),
        Formula::Ite(g, a, b) => Formula::Ite(
            Box::new(nabla(g)?),
            Box::new(nabla(a)?),
            Box::new(nabla(b)?),
        ),
        Formula::Exists { .. } => return Err(FordError::ResidualQuantifier),
        Formula::Cloud(a) => nabla(a)?,
        Formula::ForallLoc { vars, body } => Formula::ForallLoc {
            vars: vars.clone(),
            body: Box::new(nabla(body)?),
        },
    })
}

pub fn nabla_term(t: &Term) -> Result<Term, FordError> {
    Ok(match t {
        Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => t.clone(),
        Term::Field(f, a) => Term::Field(f.clone(), Box::new(nabla_term(a)?)),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(nabla_term).collect::<Result<_, _>>()?,
        ),
        Term::RecFn(f, args) => Term::RecFn(
            f.clone(),
            args.iter().map(nabla_term).collect::<Result<_, _>>()?,
        ),
        Term::Ite(g, a, b) => Term::Ite(
            Box::new(nabla(g)?),
            Box::new(nabla_term(a)?),
            Box::new(nabla_term(b)?),
        ),
        Term::Sp(arg) => match arg.as_ref() {
            SpArg::Formula(f) => nabla_support(f)?,
            SpArg::Term(t2) => nabla_support_term(t2)?,
        },
        Term::Cloud(a) => nabla_term(a)?,
        Term::Old(_) => return Err(FordError::ResidualOld),
        Term::Singleton(a) => Term::Singleton(Box::new(nabla_term(a)?)),
        Term::Union(a, b) => Term::Union(Box::new(nabla_term(a)?), Box::new(nabla_term(b)?)),
        Term::Inter(a, b) => Term::Inter(Box::new(nabla_term(a)?), Box::new(nabla_term(b)?)),
        Term::Diff(a, b) => Term::Diff(Box::new(nabla_term(a)?), Box::new(nabla_term(b)?)),
        Term::Add(a, b) => Term::Add(Box::new(nabla_term(a)?), Box::new(nabla_term(b)?)),
        Term::Sub(a, b) => Term::Sub(Box::new(nabla_term(a)?), Box::new(nabla_term(b)?)),
    })
}

fn union_all(parts: Vec<Term>) -> Term {
    // flatten nested unions, drop empties and exact duplicates
    // (first-occurrence order)
    fn flatten(t: Term, out: &mut Vec<Term>) {
        match t {
            Term::Union(a, b) => {
                flatten(*a, out);
                flatten(*b, out);
            }
            Term::Empty(Sort::SetLoc) => {}
            other => {
                if !out.contains(&other) {
                    out.push(other);
                }
            }
        }
    }
    let mut flat = Vec::new();
    for p in parts {
        flatten(p, &mut flat);
    }
    let mut it = flat.into_iter();
    match it.next() {
        None => Term::Empty(Sort::SetLoc),
        Some(first) => it.fold(first, |acc, p| Term::Union(Box::new(acc), Box::new(p))),
    }
}

/// `∇(Sp(φ))`: the support of a formula as an explicit `Set(Loc)` term.
pub fn nabla_support(f: &Formula) -> Result<Term, FordError> {
    Ok(match f {
        Formula::True | Formula::False => Term::Empty(Sort::SetLoc),
        Formula::Eq(a, b)
        | Formula::Lt(a, b)
        | Formula::Le(a, b)
        | Formula::Member(a, b)
        | Formula::Subset(a, b) => union_all(vec![nabla_support_term(a)?, nabla_support_term(b)?]),
        Formula::IsEmpty(a) => nabla_support_term(a)?,
        Formula::RecPred(p, args) => {
            let mut parts = Vec::new();
            for a in args {
                parts.push(nabla_support_term(a)?);
            }
            parts.push(Term::RecFn(
                sp_name(p),
                args.iter().map(nabla_term).collect::<Result<_, _>>()?,
            ));
            union_all(parts)
        }
        Formula::Rel(_, args) => {
            let mut parts = Vec::new();
            for a in args {
                parts.push(nabla_support_term(a)?);
            }
            union_all(parts)
        }
        Formula::Not(a) => nabla_support(a)?,
        Formula::And(fs) | Formula::Or(fs) => {
            let mut parts = Vec::new();
            for g in fs {
                parts.push(nabla_support(g)?);
            }
            union_all(parts)
        }
        Formula::Iff(a, b) => union_all(vec![nabla_support(a)?, nabla_support(b)?]),
        Formula::Ite(g, a, b) => {
            let sg = nabla_support(g)?;
            let sa = union_all(vec![sg.clone(), nabla_support(a)?]);
            let sb = union_all(vec![sg, nabla_support(b)?]);
            if sa == sb {
                sa
            } else {
                Term::Ite(Box::new(nabla(g)?), Box::new(sa), Box::new(sb))
            }
        }
        Formula::Exists { .. } => return Err(FordError::ResidualQuantifier),
        Formula::Cloud(_) => Term::Empty(Sort::SetLoc),
        Formula::ForallLoc { .. } => return Err(FordError::ResidualQuantifier),
    })
}

/// `∇(Sp(t))` for terms.
pub fn nabla_support_term(t: &Term) -> Result<Term, FordError> {
    Ok(match t {
        Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => {
            Term::Empty(Sort::SetLoc)
        }
        Term::Field(_, a) => {
            // mutable function: {∇(a)} ∪ ∇(Sp(a))
            union_all(vec![
                Term::Singleton(Box::new(nabla_term(a)?)),
                nabla_support_term(a)?,
            ])
        }
        Term::App(_, args) => {
            let mut parts = Vec::new();
            for a in args {
                parts.push(nabla_support_term(a)?);
            }
            union_all(parts)
        }
        Term::RecFn(f, args) => {
            let mut parts = Vec::new();
            for a in args {
                parts.push(nabla_support_term(a)?);
            }
            parts.push(Term::RecFn(
                sp_name(f),
                args.iter().map(nabla_term).collect::<Result<_, _>>()?,
            ));
            union_all(parts)
        }
        Term::Ite(g, a, b) => {
            let sg = nabla_support(g)?;
            let sa = union_all(vec![sg.clone(), nabla_support_term(a)?]);
            let sb = union_all(vec![sg, nabla_support_term(b)?]);
            if sa == sb {
                sa
            } else {
                Term::Ite(Box::new(nabla(g)?), Box::new(sa), Box::new(sb))
            }
        }
        Term::Sp(arg) => match arg.as_ref() {
            // Sp(Sp(e)) = Sp(e)
            SpArg::Formula(f) => nabla_support(f)?,
            SpArg::Term(t2) => nabla_support_term(t2)?,
        },
        Term::Cloud(_) => Term::Empty(Sort::SetLoc),
        // snapshots are support-free values
        Term::Old(_) => Term::Empty(Sort::SetLoc),
        Term::Singleton(a) => nabla_support_term(a)?,
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) | Term::Add(a, b)
        | Term::Sub(a, b) => union_all(vec![nabla_support_term(a)?, nabla_support_term(b)?]),
    })
}

/// Translate recursive definitions: each `I` gets a FORD body and a
/// support definition `Sp_I(x̄) :=lfp ∇(Sp(ρ_I(x̄)))`. Also extends the
/// signature with the support symbols.
pub fn derive_support_defs(
    defs: &[RecDef],
    sig: &mut Signature,
) -> Result<Vec<RecDef>, FordError> {
    let mut out = Vec::new();
    for def in defs {
        let (body, sp_body) = match &def.body {
            RecBody::Formula(f) => (RecBody::Formula(nabla(f)?), nabla_support(f)?),
            RecBody::Term(t) => (RecBody::Term(nabla_term(t)?), nabla_support_term(t)?),
        };
        out.push(RecDef {
            name: def.name.clone(),
            params: def.params.clone(),
            body,
            kind: def.kind,
        });
        out.push(RecDef {
            name: sp_name(&def.name),
            params: def.params.clone(),
            body: RecBody::Term(sp_body),
            kind: def.kind,
        });
        sig.rec_sigs.insert(
            sp_name(&def.name),
            crate::ast::RecSig {
                params: vec![Sort::Loc; def.params.len()],
                result: Sort::SetLoc,
            },
        );
    }
    Ok(out)
}

/// Rewrite support symbols according to proved same-support equalities:
/// `rename` maps a support symbol to its class representative.
pub fn merge_support_symbols(f: &Formula, rename: &BTreeMap<String, String>) -> Formula {
    let heap = BTreeMap::new();
    crate::ast::rewrite_heap_formula(f, &heap, rename)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_module;
    use crate::parser::pretty::{print_recdef, print_term};

    fn defs() -> Vec<RecDef> {
        parse_module(
            r#"
List(x) := ite( x = nil, True, (next(x) = next(x)) and List([next(x)]) and Not(IsMember(x, Sp(List([next(x)])))))
Keys(x) := ite( x = nil, EmptySetInt, SetAdd(Keys(next(x)), key(x)))
"#,
            None,
        )
        .unwrap()
        .fl_defs
    }

    #[test]
    fn support_of_mutable_application() {
        // ∇(Sp(f(x) = y)) = {x}
        let f = Formula::Eq(
            Term::Field("f".into(), Box::new(Term::Var("x".into()))),
            Term::Var("y".into()),
        );
        let sp = nabla_support(&f).unwrap();
        assert_eq!(sp, Term::Singleton(Box::new(Term::Var("x".into()))));
    }

    #[test]
    fn support_of_cloud_is_empty() {
        let f = Formula::Cloud(Box::new(Formula::RecPred(
            "List".into(),
            vec![Term::Var("x".into())],
        )));
        assert_eq!(nabla_support(&f).unwrap(), Term::Empty(Sort::SetLoc));
    }

    #[test]
    fn support_of_conjunction_is_union() {
        let a = Formula::RecPred("List".into(), vec![Term::Var("x".into())]);
        let b = Formula::RecPred("List".into(), vec![Term::Var("y".into())]);
        let sp = nabla_support(&Formula::And(vec![a, b])).unwrap();
        assert_eq!(print_term(&sp), "SetUnion(SpList(x), SpList(y))");
    }

    #[test]
    fn list_support_definition_shape() {
        // SpList(x) :=lfp ite(x = nil, ∅, SpList(next(x)) ∪ {x})
        let mut sig = Signature::new();
        let translated = derive_support_defs(&defs(), &mut sig).unwrap();
        let sp_list = translated.iter().find(|d| d.name == "SpList").unwrap();
        assert_eq!(
            print_recdef(sp_list),
            "SpList(x) := ite(x = nil, EmptySetLoc, SetUnion(Singleton(x), SpList(next(x))));"
        );
        let printed = print_recdef(sp_list);
        // Keys' support is structurally identical to List's up to naming
        let sp_keys = translated.iter().find(|d| d.name == "SpKeys").unwrap();
        assert_eq!(
            print_recdef(sp_keys).replace("Keys", "List"),
            printed
        );
        assert!(sig.rec_sigs.contains_key("SpList"));
    }

    #[test]
    fn translated_bodies_are_ford() {
        let mut sig = Signature::new();
        let translated = derive_support_defs(&defs(), &mut sig).unwrap();
        for def in &translated {
            match &def.body {
                RecBody::Formula(f) => {
                    FordFormula::new(f.clone()).unwrap();
                }
                RecBody::Term(t) => {
                    let wrapped = Formula::IsEmpty(Term::Singleton(Box::new(t.clone())));
                    FordFormula::new(wrapped).unwrap();
                }
            }
        }
    }

    #[test]
    fn heap_free_definition_has_empty_support() {
        let defs = parse_module("Zero(x) := 0", None).unwrap().fl_defs;
        let mut sig = Signature::new();
        let translated = derive_support_defs(&defs, &mut sig).unwrap();
        let sp = translated.iter().find(|d| d.name == "SpZero").unwrap();
        assert_eq!(sp.body, RecBody::Term(Term::Empty(Sort::SetLoc)));
    }
}
