//! The Π translation from SL-FL to FL, with the formula-size optimizations:
//! every translated subformula carries a simple witness formula with the
//! same support, used in place of the full translation inside support
//! constraints, and support constraints that are syntactically trivial
//! (an empty side, or both sides equal modulo declared same-support
//! symbols) are dropped.

use crate::ast::{
    Formula, RecBody, RecDef, SlFormula, SlRecBody, SlRecDef, SlTerm, Sort, SpArg, Term,
};
use crate::ford;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PiError {
    #[error("Old(..) may only appear in postconditions")]
    StrayOld,
}

/// Result of translating an SL-FL formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiResult {
    /// the translated FL formula Π(α)
    pub formula: Formula,
    /// a simple FL formula α† with Sp(Π(α)) = Sp(α†) on satisfying models
    pub witness: Formula,
    /// the witness has syntactically empty support
    pub empty_support: bool,
    /// diagnostics: ite guards whose translation leaves the FL guard
    /// fragment (support constraints inside guards)
    pub guard_warnings: Vec<String>,
    source: SlFormula,
    same_support: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Opts {
    optimize: bool,
}

struct Translator<'a> {
    opts: Opts,
    /// canonical representative per same-support class
    canon: BTreeMap<String, String>,
    warnings: Vec<String>,
    same_support: &'a [(String, String)],
}

/// Literal Fig-5/App-E translation (no optimization).
pub fn pi(alpha: &SlFormula) -> Result<PiResult, PiError> {
    translate(alpha, &[], false)
}

/// Optimized translation: support constraints use witnesses and trivial
/// constraints are dropped. `same_support` lists declared equal-support
/// definition pairs (their equality lemma is proved downstream).
pub fn pi_opt(alpha: &SlFormula, same_support: &[(String, String)]) -> Result<PiResult, PiError> {
    translate(alpha, same_support, true)
}

/// The `simplify` pass: re-translate the recorded source with
/// optimizations on. Idempotent by construction.
pub fn simplify(p: &PiResult) -> Result<PiResult, PiError> {
    translate(&p.source, &p.same_support, true)
}

fn translate(
    alpha: &SlFormula,
    same_support: &[(String, String)],
    optimize: bool,
) -> Result<PiResult, PiError> {
    let mut canon: BTreeMap<String, String> = BTreeMap::new();
    for (a, b) in same_support {
        // map both Sp names to the first element's Sp name
        let rep = canon
            .get(&ford::sp_name(a))
            .cloned()
            .unwrap_or_else(|| ford::sp_name(a));
        canon.insert(ford::sp_name(a), rep.clone());
        canon.insert(ford::sp_name(b), rep);
    }
    let mut tr = Translator {
        opts: Opts { optimize },
        canon,
        warnings: Vec::new(),
        same_support: same_support,
    };
    let node = tr.formula(alpha)?;
    Ok(PiResult {
        formula: node.formula,
        witness: node.witness,
        empty_support: node.empty,
        guard_warnings: tr.warnings,
        source: alpha.clone(),
        same_support: same_support.to_vec(),
    })
}

struct Node {
    formula: Formula,
    witness: Formula,
    empty: bool,
}

impl<'a> Translator<'a> {
    /// Support-constraint argument for a translated subformula: the full
    /// translation, or its witness when optimizing.
    fn sp_of(&self, n: &Node) -> Term {
        let f = if self.opts.optimize {
            n.witness.clone()
        } else {
            n.formula.clone()
        };
        Term::Sp(Box::new(SpArg::Formula(f)))
    }

    /// Two witnesses denote the same support syntactically: their
    /// ∇-compiled support terms agree after normalization and
    /// same-support canonicalization.
    fn same_sketch(&self, a: &Node, b: &Node) -> bool {
        let (Ok(sa), Ok(sb)) = (
            ford::nabla_support(&a.witness),
            ford::nabla_support(&b.witness),
        ) else {
            return false;
        };
        normalize_sketch(&sa, &self.canon) == normalize_sketch(&sb, &self.canon)
    }

    fn formula(&mut self, alpha: &SlFormula) -> Result<Node, PiError> {
        Ok(match alpha {
            SlFormula::True => Node {
                formula: Formula::True,
                witness: Formula::True,
                empty: true,
            },
            SlFormula::False => Node {
                formula: Formula::False,
                witness: Formula::True,
                empty: true,
            },
            SlFormula::Eq(a, b) => self.atom(Formula::Eq(self.term(a)?, self.term(b)?)),
            SlFormula::Ne(a, b) => self.atom(Formula::Not(Box::new(Formula::Eq(
                self.term(a)?,
                self.term(b)?,
            )))),
            SlFormula::Lt(a, b) => self.atom(Formula::Lt(self.term(a)?, self.term(b)?)),
            SlFormula::Le(a, b) => self.atom(Formula::Le(self.term(a)?, self.term(b)?)),
            SlFormula::Member(a, b) => {
                self.atom(Formula::Member(self.term(a)?, self.term(b)?))
            }
            SlFormula::IsEmpty(a) => self.atom(Formula::IsEmpty(self.term(a)?)),
            SlFormula::PointsTo { src, field, dst } => {
                // Π(x ↪f y) = f(x) = y
                let f = Formula::Eq(
                    Term::Field(field.clone(), Box::new(Term::Var(src.clone()))),
                    self.term(dst)?,
                );
                Node {
                    formula: f.clone(),
                    witness: f,
                    empty: false,
                }
            }
            SlFormula::Star(a, b) => {
                let na = self.formula(a)?;
                let nb = self.formula(b)?;
                let mut conjuncts = vec![na.formula.clone(), nb.formula.clone()];
                // Π(α ⋆ β) adds Sp(Π(α)) ∩ Sp(Π(β)) = ∅, dropped when one
                // side's support is syntactically empty
                if !(self.opts.optimize && (na.empty || nb.empty)) {
                    conjuncts.push(Formula::IsEmpty(Term::Inter(
                        Box::new(self.sp_of(&na)),
                        Box::new(self.sp_of(&nb)),
                    )));
                }
                Node {
                    formula: Formula::and(conjuncts),
                    witness: Formula::and(vec![na.witness, nb.witness]),
                    empty: na.empty && nb.empty,
                }
            }
            SlFormula::And(a, b) => {
                let na = self.formula(a)?;
                let nb = self.formula(b)?;
                let mut conjuncts = vec![na.formula.clone(), nb.formula.clone()];
                // Π(α ∧ β) adds Sp(Π(α)) = Sp(Π(β)); dropped when trivial
                let drop = self.opts.optimize
                    && ((na.empty && nb.empty) || self.same_sketch(&na, &nb));
                if !drop {
                    if self.opts.optimize && na.empty {
                        conjuncts.push(Formula::IsEmpty(self.sp_of(&nb)));
                    } else if self.opts.optimize && nb.empty {
                        conjuncts.push(Formula::IsEmpty(self.sp_of(&na)));
                    } else {
                        conjuncts.push(Formula::Eq(self.sp_of(&na), self.sp_of(&nb)));
                    }
                }
                Node {
                    formula: Formula::and(conjuncts),
                    // both operands' supports agree; the left one stands in
                    witness: na.witness,
                    empty: na.empty,
                }
            }
            SlFormula::WeakAnd(a, b) => {
                let na = self.formula(a)?;
                let nb = self.formula(b)?;
                Node {
                    formula: Formula::and(vec![na.formula, nb.formula]),
                    witness: Formula::and(vec![na.witness, nb.witness]),
                    empty: na.empty && nb.empty,
                }
            }
            SlFormula::Or(a, b) => {
                let na = self.formula(a)?;
                let nb = self.formula(b)?;
                Node {
                    formula: Formula::Or(vec![na.formula, nb.formula]),
                    witness: Formula::and(vec![na.witness, nb.witness]),
                    empty: na.empty && nb.empty,
                }
            }
            SlFormula::Ite(g, a, b) => {
                let ng = self.formula(g)?;
                let na = self.formula(a)?;
                let nb = self.formula(b)?;
                if !fl_guard_ok(&ng.formula) {
                    self.warnings.push(format!(
                        "ite guard translation leaves the FL guard fragment: {}",
                        crate::parser::pretty::print_formula(&ng.formula)
                    ));
                }
                Node {
                    formula: Formula::Ite(
                        Box::new(ng.formula.clone()),
                        Box::new(na.formula),
                        Box::new(nb.formula),
                    ),
                    witness: Formula::Ite(
                        Box::new(ng.formula),
                        Box::new(na.witness),
                        Box::new(nb.witness),
                    ),
                    empty: ng.empty && na.empty && nb.empty,
                }
            }
            SlFormula::Exists {
                var,
                src,
                field,
                body,
            } => {
                let nb = self.formula(body)?;
                Node {
                    formula: Formula::Exists {
                        var: var.clone(),
                        field: field.clone(),
                        arg: Box::new(Term::Var(src.clone())),
                        body: Box::new(nb.formula),
                    },
                    witness: Formula::Exists {
                        var: var.clone(),
                        field: field.clone(),
                        arg: Box::new(Term::Var(src.clone())),
                        body: Box::new(nb.witness),
                    },
                    empty: false,
                }
            }
            SlFormula::RecPred(p, args) => {
                let f = Formula::RecPred(
                    p.clone(),
                    args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
                );
                Node {
                    formula: f.clone(),
                    witness: f,
                    empty: false,
                }
            }
        })
    }

    fn atom(&self, f: Formula) -> Node {
        let empty = syntactically_empty_support(&f);
        Node {
            witness: if empty { Formula::True } else { f.clone() },
            formula: f,
            empty,
        }
    }

    fn term(&self, t: &SlTerm) -> Result<Term, PiError> {
        Ok(match t {
            SlTerm::Var(v) => Term::Var(v.clone()),
            SlTerm::Nil => Term::Nil,
            SlTerm::Const(c) => Term::Const(c.clone()),
            SlTerm::IntLit(n) => Term::IntLit(*n),
            // Π(t.f) = f(Π(t))
            SlTerm::Deref(base, f) => Term::Field(f.clone(), Box::new(self.term(base)?)),
            SlTerm::RecFn(p, args) => Term::RecFn(
                p.clone(),
                args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
            ),
            SlTerm::Ite(g, a, b) => {
                let ng = {
                    let mut tr = Translator {
                        opts: self.opts,
                        canon: self.canon.clone(),
                        warnings: Vec::new(),
                        same_support: self.same_support,
                    };
                    tr.formula(g)?
                };
                Term::Ite(
                    Box::new(ng.formula),
                    Box::new(self.term(a)?),
                    Box::new(self.term(b)?),
                )
            }
            SlTerm::Old(a) => Term::Old(Box::new(self.term(a)?)),
            SlTerm::Empty(s) => Term::Empty(*s),
            SlTerm::Singleton(a) => Term::Singleton(Box::new(self.term(a)?)),
            SlTerm::Union(a, b) => {
                Term::Union(Box::new(self.term(a)?), Box::new(self.term(b)?))
            }
            SlTerm::Inter(a, b) => {
                Term::Inter(Box::new(self.term(a)?), Box::new(self.term(b)?))
            }
            SlTerm::Diff(a, b) => Term::Diff(Box::new(self.term(a)?), Box::new(self.term(b)?)),
            SlTerm::Add(a, b) => Term::Add(Box::new(self.term(a)?), Box::new(self.term(b)?)),
            SlTerm::Sub(a, b) => Term::Sub(Box::new(self.term(a)?), Box::new(self.term(b)?)),
        })
    }
}

/// Translate SL-FL recursive definitions to FL ones:
/// `Π(R(x̄) :=lfp ρ) = R(x̄) :=lfp Π(ρ)`.
pub fn pi_defs(
    defs: &[SlRecDef],
    same_support: &[(String, String)],
    optimize: bool,
) -> Result<(Vec<RecDef>, Vec<String>), PiError> {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for def in defs {
        let body = match &def.body {
            SlRecBody::Formula(f) => {
                let p = translate(f, same_support, optimize)?;
                warnings.extend(p.guard_warnings);
                RecBody::Formula(p.formula)
            }
            SlRecBody::Term(t) => {
                let tr = Translator {
                    opts: Opts { optimize },
                    canon: BTreeMap::new(),
                    warnings: Vec::new(),
                    same_support,
                };
                RecBody::Term(tr.term(t)?)
            }
        };
        out.push(RecDef {
            name: def.name.clone(),
            params: def.params.clone(),
            body,
            kind: def.kind,
        });
    }
    Ok((out, warnings))
}

/// A formula has syntactically empty support when it dereferences no
/// mutable function and applies no recursive symbol outside clouds.
pub fn syntactically_empty_support(f: &Formula) -> bool {
    fn term_empty(t: &Term) -> bool {
        match t {
            Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => true,
            Term::Field(_, _) => false,
            Term::RecFn(_, _) => false,
            Term::App(_, args) => args.iter().all(term_empty),
            Term::Ite(g, a, b) => {
                syntactically_empty_support(g) && term_empty(a) && term_empty(b)
            }
            Term::Sp(_) => false, // conservatively: Sp(e) has e's support
            Term::Cloud(_) | Term::Old(_) => true,
            Term::Singleton(a) => term_empty(a),
            Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) | Term::Add(a, b)
            | Term::Sub(a, b) => term_empty(a) && term_empty(b),
        }
    }
    match f {
        Formula::True | Formula::False => true,
        Formula::Eq(a, b)
        | Formula::Lt(a, b)
        | Formula::Le(a, b)
        | Formula::Member(a, b)
        | Formula::Subset(a, b) => term_empty(a) && term_empty(b),
        Formula::IsEmpty(a) => term_empty(a),
        Formula::RecPred(_, _) => false,
        Formula::Rel(_, args) => args.iter().all(term_empty),
        Formula::Not(a) | Formula::Cloud(a) => match f {
            Formula::Cloud(_) => true,
            _ => syntactically_empty_support(a),
        },
        Formula::And(fs) | Formula::Or(fs) => fs.iter().all(syntactically_empty_support),
        Formula::Iff(a, b) => {
            syntactically_empty_support(a) && syntactically_empty_support(b)
        }
        Formula::Ite(g, a, b) => {
            syntactically_empty_support(g)
                && syntactically_empty_support(a)
                && syntactically_empty_support(b)
        }
        Formula::Exists { .. } => false,
        Formula::ForallLoc { body, .. } => syntactically_empty_support(body),
    }
}

/// FL guard fragment: no recursive symbols, no Set(Loc)-typed terms, no
/// quantifiers.
fn fl_guard_ok(f: &Formula) -> bool {
    let mut ok = true;
    crate::ast::visit_formula(f, &mut |node| match node {
        crate::ast::FormulaOrTerm::Formula(Formula::RecPred(_, _))
        | crate::ast::FormulaOrTerm::Formula(Formula::Exists { .. })
        | crate::ast::FormulaOrTerm::Term(Term::RecFn(_, _))
        | crate::ast::FormulaOrTerm::Term(Term::Sp(_))
        | crate::ast::FormulaOrTerm::Term(Term::Empty(Sort::SetLoc)) => ok = false,
        _ => {}
    });
    ok
}

/// Normal form for syntactic support comparison: flatten unions into a
/// sorted set of atomic set terms with support symbols canonicalized.
fn normalize_sketch(t: &Term, canon: &BTreeMap<String, String>) -> Vec<Term> {
    let mut parts = Vec::new();
    flatten_union(t, canon, &mut parts);
    parts.sort();
    parts.dedup();
    parts
}

fn flatten_union(t: &Term, canon: &BTreeMap<String, String>, out: &mut Vec<Term>) {
    match t {
        Term::Union(a, b) => {
            flatten_union(a, canon, out);
            flatten_union(b, canon, out);
        }
        Term::Empty(_) => {}
        Term::RecFn(name, args) => {
            let name = canon.get(name).cloned().unwrap_or_else(|| name.clone());
            out.push(Term::RecFn(name, args.clone()));
        }
        other => out.push(other.clone()),
    }
}
