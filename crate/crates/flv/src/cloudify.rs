//! Quantifier elimination via the cloud operator: every guarded
//! existential `∃y: y = f(x). φ` becomes `(f(x) = f(x)) ∧ φ[[f(x)]/y]`,
//! preserving both truth and support. Elimination is innermost-first, so
//! nested guards produce a deterministic shape. Substitution happens only
//! in the cloud-wrapped form this rewrite licenses.

use crate::ast::{Formula, RecBody, RecDef, SpArg, Term};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CloudifyError {
    #[error("universal quantifier is outside the guarded fragment")]
    UnguardedQuantifier,
}

/// Eliminate every guarded existential in the formula.
pub fn eliminate(f: &Formula) -> Result<Formula, CloudifyError> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(elim_term(a)?, elim_term(b)?),
        Formula::Lt(a, b) => Formula::Lt(elim_term(a)?, elim_term(b)?),
        Formula::Le(a, b) => Formula::Le(elim_term(a)?, elim_term(b)?),
        Formula::Member(a, b) => Formula::Member(elim_term(a)?, elim_term(b)?),
        Formula::Subset(a, b) => Formula::Subset(elim_term(a)?, elim_term(b)?),
        Formula::IsEmpty(a) => Formula::IsEmpty(elim_term(a)?),
        Formula::RecPred(p, args) => Formula::RecPred(
            p.clone(),
            args.iter().map(elim_term).collect::<Result<_, _>>()?,
        ),
        Formula::Rel(p, args) => Formula::Rel(
            p.clone(),
            args.iter().map(elim_term).collect::<Result<_, _>>()?,
        ),
        Formula::Not(a) => Formula::Not(Box::new(eliminate(a)?)),
        Formula::And(fs) => {
            Formula::And(fs.iter().map(eliminate).collect::<Result<_, _>>()?)
        }
        Formula::Or(fs) => Formula::Or(fs.iter().map(eliminate).collect::<Result<_, _>>()?),
        Formula::Iff(a, b) => {
            Formula::Iff(Box::new(eliminate(a)?), Box::new(eliminate(b)?))
        }
        Formula::Ite(g, a, b) => Formula::Ite(
            Box::new(eliminate(g)?),
            Box::new(eliminate(a)?),
            Box::new(eliminate(b)?),
        ),
        Formula::Exists {
            var,
            field,
            arg,
            body,
        } => {
            // innermost-first: eliminate inside the body, then rewrite
            let body = eliminate(body)?;
            let arg = elim_term(arg)?;
            let guard_term = Term::Field(field.clone(), Box::new(arg));
            let mut map = BTreeMap::new();
            map.insert(var.clone(), Term::Cloud(Box::new(guard_term.clone())));
            let substituted = crate::ast::subst_formula(&body, &map);
            Formula::and(vec![
                Formula::Eq(guard_term.clone(), guard_term),
                substituted,
            ])
        }
        Formula::Cloud(a) => Formula::Cloud(Box::new(eliminate(a)?)),
        Formula::ForallLoc { .. } => return Err(CloudifyError::UnguardedQuantifier),
    })
}

fn elim_term(t: &Term) -> Result<Term, CloudifyError> {
    Ok(match t {
        Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => t.clone(),
        Term::Field(f, a) => Term::Field(f.clone(), Box::new(elim_term(a)?)),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(elim_term).collect::<Result<_, _>>()?,
        ),
        Term::RecFn(f, args) => Term::RecFn(
            f.clone(),
            args.iter().map(elim_term).collect::<Result<_, _>>()?,
        ),
        Term::Ite(g, a, b) => Term::Ite(
            Box::new(eliminate(g)?),
            Box::new(elim_term(a)?),
            Box::new(elim_term(b)?),
        ),
        Term::Sp(arg) => Term::Sp(Box::new(match arg.as_ref() {
            SpArg::Formula(f) => SpArg::Formula(eliminate(f)?),
            SpArg::Term(t2) => SpArg::Term(elim_term(t2)?),
        })),
        Term::Cloud(a) => Term::Cloud(Box::new(elim_term(a)?)),
        Term::Old(a) => Term::Old(Box::new(elim_term(a)?)),
        Term::Singleton(a) => Term::Singleton(Box::new(elim_term(a)?)),
        Term::Union(a, b) => Term::Union(Box::new(elim_term(a)?), Box::new(elim_term(b)?)),
        Term::Inter(a, b) => Term::Inter(Box::new(elim_term(a)?), Box::new(elim_term(b)?)),
        Term::Diff(a, b) => Term::Diff(Box::new(elim_term(a)?), Box::new(elim_term(b)?)),
        Term::Add(a, b) => Term::Add(Box::new(elim_term(a)?), Box::new(elim_term(b)?)),
        Term::Sub(a, b) => Term::Sub(Box::new(elim_term(a)?), Box::new(elim_term(b)?)),
    })
}

/// Eliminate guarded existentials in a definition body.
pub fn eliminate_def(def: &RecDef) -> Result<RecDef, CloudifyError> {
    Ok(RecDef {
        name: def.name.clone(),
        params: def.params.clone(),
        body: match &def.body {
            RecBody::Formula(f) => RecBody::Formula(eliminate(f)?),
            RecBody::Term(t) => RecBody::Term(elim_term(t)?),
        },
        kind: def.kind,
    })
}
