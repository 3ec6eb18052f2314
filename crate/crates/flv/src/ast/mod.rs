//! Core syntax trees for the three logics (FL with support/cloud operators,
//! SL-FL, and FORD after translation), plus programs, contracts and
//! recursive definitions.
//!
//! FL and FORD share one tree: FORD is the fragment without `Sp`, `Cloud`,
//! and guarded existentials (the `ford` module wraps it in a validated
//! newtype). All trees are immutable after construction.

pub mod wf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Sorts. `Loc` is the foreground sort; everything else is background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Loc,
    Bool,
    Int,
    SetLoc,
    SetInt,
}

impl Sort {
    pub fn is_set(self) -> bool {
        matches!(self, Sort::SetLoc | Sort::SetInt)
    }
    pub fn elem_sort(self) -> Option<Sort> {
        match self {
            Sort::SetLoc => Some(Sort::Loc),
            Sort::SetInt => Some(Sort::Int),
            _ => None,
        }
    }
    pub fn set_of(elem: Sort) -> Option<Sort> {
        match elem {
            Sort::Loc => Some(Sort::SetLoc),
            Sort::Int => Some(Sort::SetInt),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::Loc => "Loc",
            Sort::Bool => "Bool",
            Sort::Int => "Int",
            Sort::SetLoc => "SetLoc",
            Sort::SetInt => "SetInt",
        };
        f.write_str(s)
    }
}

/// Signature of a recursive symbol: parameter sorts (all `Loc` when
/// well-formed, but recorded so the one-way check can report violations)
/// and result sort (`Bool` for predicates, a background sort for functions,
/// `SetLoc` for the derived support symbols).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecSig {
    pub params: Vec<Sort>,
    pub result: Sort,
}

/// Signature: constants, mutable functions (pointer/data fields, domain
/// `Loc`), optional extra background functions, and recursive symbols.
/// `nil`, `PInf` and `NInf` are always present.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    pub consts: BTreeMap<String, Sort>,
    /// field name -> range sort; the domain is always a single `Loc`.
    pub fields: BTreeMap<String, Sort>,
    /// uninterpreted background functions: name -> (domain, range).
    pub other_fns: BTreeMap<String, (Vec<Sort>, Sort)>,
    pub rec_sigs: BTreeMap<String, RecSig>,
}

impl Signature {
    pub fn new() -> Self {
        let mut s = Signature::default();
        s.consts.insert("nil".to_string(), Sort::Loc);
        s.consts.insert("PInf".to_string(), Sort::Int);
        s.consts.insert("NInf".to_string(), Sort::Int);
        s
    }

    pub fn pointer_fields(&self) -> impl Iterator<Item = &String> {
        self.fields
            .iter()
            .filter(|(_, rng)| **rng == Sort::Loc)
            .map(|(n, _)| n)
    }

    pub fn data_fields(&self) -> impl Iterator<Item = &String> {
        self.fields
            .iter()
            .filter(|(_, rng)| **rng != Sort::Loc)
            .map(|(n, _)| n)
    }
}

/// Argument of the support operator: either a formula or a term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpArg {
    Formula(Formula),
    Term(Term),
}

/// FL / FORD terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Nil,
    /// Named constant other than nil (snapshot constants, PInf/NInf).
    Const(String),
    IntLit(i64),
    /// Mutable-function application `f(t)` for a pointer or data field.
    Field(String, Box<Term>),
    /// Uninterpreted background function application.
    App(String, Vec<Term>),
    /// Recursively defined function application (background-valued), and
    /// after FORD translation also the support symbols `Sp_I`.
    RecFn(String, Vec<Term>),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
    /// Support of a formula or term; sort `SetLoc`.
    Sp(Box<SpArg>),
    /// Cloud-wrapped term: same value, empty support.
    Cloud(Box<Term>),
    /// Snapshot of a term's value at method entry; posts only.
    Old(Box<Term>),
    Empty(Sort),
    Singleton(Box<Term>),
    Union(Box<Term>, Box<Term>),
    Inter(Box<Term>, Box<Term>),
    Diff(Box<Term>, Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
}

/// FL / FORD formulas. `Exists` is the guarded existential
/// `∃ var: var = field(arg). body`; `ForallLoc` appears only in generated
/// artifacts (frame rules, assembled VCs) and lemmas.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
    Member(Term, Term),
    Subset(Term, Term),
    IsEmpty(Term),
    /// Recursively defined predicate application.
    RecPred(String, Vec<Term>),
    /// Uninterpreted background relation application.
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Ite(Box<Formula>, Box<Formula>, Box<Formula>),
    Exists {
        var: String,
        field: String,
        arg: Box<Term>,
        body: Box<Formula>,
    },
    Cloud(Box<Formula>),
    ForallLoc {
        vars: Vec<String>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn and(conjuncts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for c in conjuncts {
            match c {
                Formula::True => {}
                Formula::And(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.into_iter().next().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn implies(hyp: Formula, goal: Formula) -> Formula {
        Formula::Or(vec![Formula::Not(Box::new(hyp)), goal])
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
}

/// SL-FL terms (Fig. "full Separation Logic" syntax): dereferences are
/// explicit `t.f` nodes rather than function applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlTerm {
    Var(String),
    Nil,
    Const(String),
    IntLit(i64),
    Deref(Box<SlTerm>, String),
    RecFn(String, Vec<SlTerm>),
    Ite(Box<SlFormula>, Box<SlTerm>, Box<SlTerm>),
    Old(Box<SlTerm>),
    Empty(Sort),
    Singleton(Box<SlTerm>),
    Union(Box<SlTerm>, Box<SlTerm>),
    Inter(Box<SlTerm>, Box<SlTerm>),
    Diff(Box<SlTerm>, Box<SlTerm>),
    Add(Box<SlTerm>, Box<SlTerm>),
    Sub(Box<SlTerm>, Box<SlTerm>),
}

/// SL-FL formulas. There is no negation node: the base logic's
/// heap-independent atoms carry their own negated forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlFormula {
    True,
    False,
    Eq(SlTerm, SlTerm),
    Ne(SlTerm, SlTerm),
    Lt(SlTerm, SlTerm),
    Le(SlTerm, SlTerm),
    Member(SlTerm, SlTerm),
    IsEmpty(SlTerm),
    /// `x ↪f y`: the heaplet is exactly `{s(x)}` and `h(f)(s(x)) = y`.
    PointsTo {
        src: String,
        field: String,
        dst: SlTerm,
    },
    Star(Box<SlFormula>, Box<SlFormula>),
    And(Box<SlFormula>, Box<SlFormula>),
    WeakAnd(Box<SlFormula>, Box<SlFormula>),
    Or(Box<SlFormula>, Box<SlFormula>),
    Ite(Box<SlFormula>, Box<SlFormula>, Box<SlFormula>),
    /// `∃ var. (src ↪field var : body)`.
    Exists {
        var: String,
        src: String,
        field: String,
        body: Box<SlFormula>,
    },
    RecPred(String, Vec<SlTerm>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DefKind {
    Lfp,
    FixpointAssumed,
}

/// FL recursive definition. Parameters are all of sort `Loc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: RecBody,
    pub kind: DefKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecBody {
    Formula(Formula),
    Term(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlRecDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: SlRecBody,
    pub kind: DefKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlRecBody {
    Formula(SlFormula),
    Term(SlTerm),
}

/// A contract formula in whichever logic the module is written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Spec {
    Fl(Formula),
    Sl(SlFormula),
}

impl Spec {
    pub fn as_fl(&self) -> Option<&Formula> {
        match self {
            Spec::Fl(f) => Some(f),
            Spec::Sl(_) => None,
        }
    }
}

/// Program statements (straight-line commands plus `if` and `return`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    /// `x := y`, `x := c`, `v := be` — dereference-free right-hand side.
    Assign { dst: String, src: Term },
    /// `x := y.f` (pointer or data field).
    Load {
        dst: String,
        obj: String,
        field: String,
    },
    /// `y.f := src` with dereference-free `src`.
    Store {
        obj: String,
        field: String,
        src: Term,
    },
    Alloc(String),
    Free(String),
    Call {
        outs: Vec<String>,
        method: String,
        args: Vec<Term>,
    },
    /// `assume(η)` with dereference-free boolean `η`.
    Assume(Formula),
    If {
        cond: Formula,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    Return,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Method {
    pub name: String,
    pub params: Vec<(String, Sort)>,
    pub returns: Vec<(String, Sort)>,
    pub pre: Spec,
    pub post: Spec,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma {
    pub name: String,
    pub body: Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicMode {
    Fl,
    Slfl,
}

/// A parsed source module: declarations, recursive definitions, lemmas,
/// same-support directives and annotated methods.
#[derive(Debug, Clone)]
pub struct SourceModule {
    pub mode: LogicMode,
    pub signature: Signature,
    pub fl_defs: Vec<RecDef>,
    pub sl_defs: Vec<SlRecDef>,
    pub lemmas: Vec<Lemma>,
    pub same_support: Vec<(String, String)>,
    pub methods: Vec<Method>,
}

impl SourceModule {
    pub fn empty(mode: LogicMode) -> Self {
        SourceModule {
            mode,
            signature: Signature::new(),
            fl_defs: Vec::new(),
            sl_defs: Vec::new(),
            lemmas: Vec::new(),
            same_support: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn method(&self, name: &str) -> Option<&Method> {
        self.methods.iter().find(|m| m.name == name)
    }
}

/// Deterministic fresh-name source. Base names that are already taken get
/// a monotone numeric suffix, so identical inputs produce identical names.
#[derive(Debug, Clone, Default)]
pub struct NameGen {
    taken: BTreeSet<String>,
}

impl NameGen {
    pub fn new() -> Self {
        NameGen::default()
    }

    pub fn with_taken<I: IntoIterator<Item = String>>(names: I) -> Self {
        NameGen {
            taken: names.into_iter().collect(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> String {
        if self.taken.insert(base.to_string()) {
            return base.to_string();
        }
        let mut k = 2u32;
        loop {
            let candidate = format!("{base}_{k}");
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Free variables and substitution
// ---------------------------------------------------------------------------

pub fn free_vars_term(t: &Term, out: &mut BTreeSet<String>, bound: &mut Vec<String>) {
    match t {
        Term::Var(v) => {
            if !bound.iter().any(|b| b == v) {
                out.insert(v.clone());
            }
        }
        Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => {}
        Term::Field(_, a) | Term::Cloud(a) | Term::Old(a) | Term::Singleton(a) => {
            free_vars_term(a, out, bound)
        }
        Term::App(_, args) | Term::RecFn(_, args) => {
            for a in args {
                free_vars_term(a, out, bound);
            }
        }
        Term::Ite(g, a, b) => {
            free_vars_formula(g, out, bound);
            free_vars_term(a, out, bound);
            free_vars_term(b, out, bound);
        }
        Term::Sp(arg) => match arg.as_ref() {
            SpArg::Formula(f) => free_vars_formula(f, out, bound),
            SpArg::Term(t) => free_vars_term(t, out, bound),
        },
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) | Term::Add(a, b)
        | Term::Sub(a, b) => {
            free_vars_term(a, out, bound);
            free_vars_term(b, out, bound);
        }
    }
}

pub fn free_vars_formula(f: &Formula, out: &mut BTreeSet<String>, bound: &mut Vec<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Eq(a, b)
        | Formula::Lt(a, b)
        | Formula::Le(a, b)
        | Formula::Member(a, b)
        | Formula::Subset(a, b) => {
            free_vars_term(a, out, bound);
            free_vars_term(b, out, bound);
        }
        Formula::IsEmpty(a) => free_vars_term(a, out, bound),
        Formula::RecPred(_, args) | Formula::Rel(_, args) => {
            for a in args {
                free_vars_term(a, out, bound);
            }
        }
        Formula::Not(a) | Formula::Cloud(a) => free_vars_formula(a, out, bound),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                free_vars_formula(g, out, bound);
            }
        }
        Formula::Iff(a, b) => {
            free_vars_formula(a, out, bound);
            free_vars_formula(b, out, bound);
        }
        Formula::Ite(g, a, b) => {
            free_vars_formula(g, out, bound);
            free_vars_formula(a, out, bound);
            free_vars_formula(b, out, bound);
        }
        Formula::Exists {
            var,
            arg,
            body,
            ..
        } => {
            free_vars_term(arg, out, bound);
            bound.push(var.clone());
            free_vars_formula(body, out, bound);
            bound.pop();
        }
        Formula::ForallLoc { vars, body } => {
            let n = vars.len();
            bound.extend(vars.iter().cloned());
            free_vars_formula(body, out, bound);
            bound.truncate(bound.len() - n);
        }
    }
}

/// Free variables of a formula (variables not bound by guarded existentials
/// or universal quantifiers).
pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    free_vars_formula(f, &mut out, &mut Vec::new());
    out
}

pub fn free_vars_of_term(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    free_vars_term(t, &mut out, &mut Vec::new());
    out
}

/// Simultaneous substitution of terms for variables. Callers only use this
/// on quantifier-free formulas (post-cloudify) or with replacement terms
/// that cannot be captured (the cloudify rewrite itself); binders shadow.
pub fn subst_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => t.clone(),
        Term::Field(f, a) => Term::Field(f.clone(), Box::new(subst_term(a, map))),
        Term::App(f, args) => {
            Term::App(f.clone(), args.iter().map(|a| subst_term(a, map)).collect())
        }
        Term::RecFn(f, args) => {
            Term::RecFn(f.clone(), args.iter().map(|a| subst_term(a, map)).collect())
        }
        Term::Ite(g, a, b) => Term::Ite(
            Box::new(subst_formula(g, map)),
            Box::new(subst_term(a, map)),
            Box::new(subst_term(b, map)),
        ),
        Term::Sp(arg) => Term::Sp(Box::new(match arg.as_ref() {
            SpArg::Formula(f) => SpArg::Formula(subst_formula(f, map)),
            SpArg::Term(t2) => SpArg::Term(subst_term(t2, map)),
        })),
        Term::Cloud(a) => Term::Cloud(Box::new(subst_term(a, map))),
        Term::Old(a) => Term::Old(Box::new(subst_term(a, map))),
        Term::Singleton(a) => Term::Singleton(Box::new(subst_term(a, map))),
        Term::Union(a, b) => Term::Union(
            Box::new(subst_term(a, map)),
            Box::new(subst_term(b, map)),
        ),
        Term::Inter(a, b) => Term::Inter(
            Box::new(subst_term(a, map)),
            Box::new(subst_term(b, map)),
        ),
        Term::Diff(a, b) => Term::Diff(
            Box::new(subst_term(a, map)),
            Box::new(subst_term(b, map)),
        ),
        Term::Add(a, b) => Term::Add(
            Box::new(subst_term(a, map)),
            Box::new(subst_term(b, map)),
        ),
        Term::Sub(a, b) => Term::Sub(
            Box::new(subst_term(a, map)),
            Box::new(subst_term(b, map)),
        ),
    }
}

pub fn subst_formula(f: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::Lt(a, b) => Formula::Lt(subst_term(a, map), subst_term(b, map)),
        Formula::Le(a, b) => Formula::Le(subst_term(a, map), subst_term(b, map)),
        Formula::Member(a, b) => Formula::Member(subst_term(a, map), subst_term(b, map)),
        Formula::Subset(a, b) => Formula::Subset(subst_term(a, map), subst_term(b, map)),
        Formula::IsEmpty(a) => Formula::IsEmpty(subst_term(a, map)),
        Formula::RecPred(p, args) => {
            Formula::RecPred(p.clone(), args.iter().map(|a| subst_term(a, map)).collect())
        }
        Formula::Rel(p, args) => {
            Formula::Rel(p.clone(), args.iter().map(|a| subst_term(a, map)).collect())
        }
        Formula::Not(a) => Formula::Not(Box::new(subst_formula(a, map))),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| subst_formula(g, map)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| subst_formula(g, map)).collect()),
        Formula::Iff(a, b) => Formula::Iff(
            Box::new(subst_formula(a, map)),
            Box::new(subst_formula(b, map)),
        ),
        Formula::Ite(g, a, b) => Formula::Ite(
            Box::new(subst_formula(g, map)),
            Box::new(subst_formula(a, map)),
            Box::new(subst_formula(b, map)),
        ),
        Formula::Exists {
            var,
            field,
            arg,
            body,
        } => {
            let arg2 = subst_term(arg, map);
            let body2 = if map.contains_key(var) {
                let mut inner = map.clone();
                inner.remove(var);
                subst_formula(body, &inner)
            } else {
                subst_formula(body, map)
            };
            Formula::Exists {
                var: var.clone(),
                field: field.clone(),
                arg: Box::new(arg2),
                body: Box::new(body2),
            }
        }
        Formula::ForallLoc { vars, body } => {
            let mut inner = map.clone();
            for v in vars {
                inner.remove(v);
            }
            Formula::ForallLoc {
                vars: vars.clone(),
                body: Box::new(subst_formula(body, &inner)),
            }
        }
        Formula::Cloud(a) => Formula::Cloud(Box::new(subst_formula(a, map))),
    }
}

/// Replace every mutable-function application `f(t)` by the corresponding
/// heap term `H(f)[param := t]`, and every recursive-symbol occurrence by
/// its renamed version, recursing through every node including `Sp`
/// arguments. This is the core of definition adaptation `I[H]` and of the
/// `α_H` instantiation in the Call rule.
pub fn rewrite_heap_term(
    t: &Term,
    heap: &BTreeMap<String, (String, Term)>,
    rec_rename: &BTreeMap<String, String>,
) -> Term {
    match t {
        Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => t.clone(),
        Term::Field(f, a) => {
            let a2 = rewrite_heap_term(a, heap, rec_rename);
            match heap.get(f) {
                Some((param, body)) => {
                    let mut m = BTreeMap::new();
                    m.insert(param.clone(), a2);
                    subst_term(body, &m)
                }
                None => Term::Field(f.clone(), Box::new(a2)),
            }
        }
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| rewrite_heap_term(a, heap, rec_rename))
                .collect(),
        ),
        Term::RecFn(f, args) => {
            let name = rec_rename.get(f).cloned().unwrap_or_else(|| f.clone());
            Term::RecFn(
                name,
                args.iter()
                    .map(|a| rewrite_heap_term(a, heap, rec_rename))
                    .collect(),
            )
        }
        Term::Ite(g, a, b) => Term::Ite(
            Box::new(rewrite_heap_formula(g, heap, rec_rename)),
            Box::new(rewrite_heap_term(a, heap, rec_rename)),
            Box::new(rewrite_heap_term(b, heap, rec_rename)),
        ),
        Term::Sp(arg) => Term::Sp(Box::new(match arg.as_ref() {
            SpArg::Formula(f) => SpArg::Formula(rewrite_heap_formula(f, heap, rec_rename)),
            SpArg::Term(t2) => SpArg::Term(rewrite_heap_term(t2, heap, rec_rename)),
        })),
        Term::Cloud(a) => Term::Cloud(Box::new(rewrite_heap_term(a, heap, rec_rename))),
        Term::Old(a) => Term::Old(Box::new(rewrite_heap_term(a, heap, rec_rename))),
        Term::Singleton(a) => Term::Singleton(Box::new(rewrite_heap_term(a, heap, rec_rename))),
        Term::Union(a, b) => Term::Union(
            Box::new(rewrite_heap_term(a, heap, rec_rename)),
            Box::new(rewrite_heap_term(b, heap, rec_rename)),
        ),
        Term::Inter(a, b) => Term::Inter(
            Box::new(rewrite_heap_term(a, heap, rec_rename)),
            Box::new(rewrite_heap_term(b, heap, rec_rename)),
        ),
        Term::Diff(a, b) => Term::Diff(
            Box::new(rewrite_heap_term(a, heap, rec_rename)),
            Box::new(rewrite_heap_term(b, heap, rec_rename)),
        ),
        Term::Add(a, b) => Term::Add(
            Box::new(rewrite_heap_term(a, heap, rec_rename)),
            Box::new(rewrite_heap_term(b, heap, rec_rename)),
        ),
        Term::Sub(a, b) => Term::Sub(
            Box::new(rewrite_heap_term(a, heap, rec_rename)),
            Box::new(rewrite_heap_term(b, heap, rec_rename)),
        ),
    }
}

pub fn rewrite_heap_formula(
    f: &Formula,
    heap: &BTreeMap<String, (String, Term)>,
    rec_rename: &BTreeMap<String, String>,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(
            rewrite_heap_term(a, heap, rec_rename),
            rewrite_heap_term(b, heap, rec_rename),
        ),
        Formula::Lt(a, b) => Formula::Lt(
            rewrite_heap_term(a, heap, rec_rename),
            rewrite_heap_term(b, heap, rec_rename),
        ),
        Formula::Le(a, b) => Formula::Le(
            rewrite_heap_term(a, heap, rec_rename),
            rewrite_heap_term(b, heap, rec_rename),
        ),
        Formula::Member(a, b) => Formula::Member(
            rewrite_heap_term(a, heap, rec_rename),
            rewrite_heap_term(b, heap, rec_rename),
        ),
        Formula::Subset(a, b) => Formula::Subset(
            rewrite_heap_term(a, heap, rec_rename),
            rewrite_heap_term(b, heap, rec_rename),
        ),
        Formula::IsEmpty(a) => Formula::IsEmpty(rewrite_heap_term(a, heap, rec_rename)),
        Formula::RecPred(p, args) => {
            let name = rec_rename.get(p).cloned().unwrap_or_else(|| p.clone());
            Formula::RecPred(
                name,
                args.iter()
                    .map(|a| rewrite_heap_term(a, heap, rec_rename))
                    .collect(),
            )
        }
        Formula::Rel(p, args) => Formula::Rel(
            p.clone(),
            args.iter()
                .map(|a| rewrite_heap_term(a, heap, rec_rename))
                .collect(),
        ),
        Formula::Not(a) => Formula::Not(Box::new(rewrite_heap_formula(a, heap, rec_rename))),
        Formula::And(fs) => Formula::And(
            fs.iter()
                .map(|g| rewrite_heap_formula(g, heap, rec_rename))
                .collect(),
        ),
        Formula::Or(fs) => Formula::Or(
            fs.iter()
                .map(|g| rewrite_heap_formula(g, heap, rec_rename))
                .collect(),
        ),
        Formula::Iff(a, b) => Formula::Iff(
            Box::new(rewrite_heap_formula(a, heap, rec_rename)),
            Box::new(rewrite_heap_formula(b, heap, rec_rename)),
        ),
        Formula::Ite(g, a, b) => Formula::Ite(
            Box::new(rewrite_heap_formula(g, heap, rec_rename)),
            Box::new(rewrite_heap_formula(a, heap, rec_rename)),
            Box::new(rewrite_heap_formula(b, heap, rec_rename)),
        ),
        Formula::Exists { .. } => {
            // Specs are cloud-eliminated before any heap rewriting happens.
            panic!("rewrite_heap_formula: residual guarded existential")
        }
        Formula::Cloud(a) => Formula::Cloud(Box::new(rewrite_heap_formula(a, heap, rec_rename))),
        Formula::ForallLoc { vars, body } => Formula::ForallLoc {
            vars: vars.clone(),
            body: Box::new(rewrite_heap_formula(body, heap, rec_rename)),
        },
    }
}

/// Replace every `Old(e)` snapshot by a fresh variable, returning the
/// rewritten formula and the snapshot bindings in first-occurrence order.
pub fn strip_old(f: &Formula, gen: &mut NameGen) -> (Formula, Vec<(String, Term)>) {
    let mut bindings: Vec<(String, Term)> = Vec::new();
    let out = strip_old_formula(f, gen, &mut bindings);
    (out, bindings)
}

fn strip_old_formula(
    f: &Formula,
    gen: &mut NameGen,
    bindings: &mut Vec<(String, Term)>,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(
            strip_old_term(a, gen, bindings),
            strip_old_term(b, gen, bindings),
        ),
        Formula::Lt(a, b) => Formula::Lt(
            strip_old_term(a, gen, bindings),
            strip_old_term(b, gen, bindings),
        ),
        Formula::Le(a, b) => Formula::Le(
            strip_old_term(a, gen, bindings),
            strip_old_term(b, gen, bindings),
        ),
        Formula::Member(a, b) => Formula::Member(
            strip_old_term(a, gen, bindings),
            strip_old_term(b, gen, bindings),
        ),
        Formula::Subset(a, b) => Formula::Subset(
            strip_old_term(a, gen, bindings),
            strip_old_term(b, gen, bindings),
        ),
        Formula::IsEmpty(a) => Formula::IsEmpty(strip_old_term(a, gen, bindings)),
        Formula::RecPred(p, args) => Formula::RecPred(
            p.clone(),
            args.iter().map(|a| strip_old_term(a, gen, bindings)).collect(),
        ),
        Formula::Rel(p, args) => Formula::Rel(
            p.clone(),
            args.iter().map(|a| strip_old_term(a, gen, bindings)).collect(),
        ),
        Formula::Not(a) => Formula::Not(Box::new(strip_old_formula(a, gen, bindings))),
        Formula::And(fs) => {
            Formula::And(fs.iter().map(|g| strip_old_formula(g, gen, bindings)).collect())
        }
        Formula::Or(fs) => {
            Formula::Or(fs.iter().map(|g| strip_old_formula(g, gen, bindings)).collect())
        }
        Formula::Iff(a, b) => Formula::Iff(
            Box::new(strip_old_formula(a, gen, bindings)),
            Box::new(strip_old_formula(b, gen, bindings)),
        ),
        Formula::Ite(g, a, b) => Formula::Ite(
            Box::new(strip_old_formula(g, gen, bindings)),
            Box::new(strip_old_formula(a, gen, bindings)),
            Box::new(strip_old_formula(b, gen, bindings)),
        ),
        Formula::Exists {
            var,
            field,
            arg,
            body,
        } => Formula::Exists {
            var: var.clone(),
            field: field.clone(),
            arg: Box::new(strip_old_term(arg, gen, bindings)),
            body: Box::new(strip_old_formula(body, gen, bindings)),
        },
        Formula::Cloud(a) => Formula::Cloud(Box::new(strip_old_formula(a, gen, bindings))),
        Formula::ForallLoc { vars, body } => Formula::ForallLoc {
            vars: vars.clone(),
            body: Box::new(strip_old_formula(body, gen, bindings)),
        },
    }
}

fn strip_old_term(t: &Term, gen: &mut NameGen, bindings: &mut Vec<(String, Term)>) -> Term {
    match t {
        Term::Old(inner) => {
            // identical snapshot expressions share one variable
            if let Some((name, _)) = bindings.iter().find(|(_, e)| e == inner.as_ref()) {
                return Term::Var(name.clone());
            }
            let name = gen.fresh("_old");
            bindings.push((name.clone(), inner.as_ref().clone()));
            Term::Var(name)
        }
        Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => t.clone(),
        Term::Field(f, a) => Term::Field(f.clone(), Box::new(strip_old_term(a, gen, bindings))),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| strip_old_term(a, gen, bindings)).collect(),
        ),
        Term::RecFn(f, args) => Term::RecFn(
            f.clone(),
            args.iter().map(|a| strip_old_term(a, gen, bindings)).collect(),
        ),
        Term::Ite(g, a, b) => Term::Ite(
            Box::new(strip_old_formula(g, gen, bindings)),
            Box::new(strip_old_term(a, gen, bindings)),
            Box::new(strip_old_term(b, gen, bindings)),
        ),
        Term::Sp(arg) => Term::Sp(Box::new(match arg.as_ref() {
            SpArg::Formula(f) => SpArg::Formula(strip_old_formula(f, gen, bindings)),
            SpArg::Term(t2) => SpArg::Term(strip_old_term(t2, gen, bindings)),
        })),
        Term::Cloud(a) => Term::Cloud(Box::new(strip_old_term(a, gen, bindings))),
        Term::Singleton(a) => Term::Singleton(Box::new(strip_old_term(a, gen, bindings))),
        Term::Union(a, b) => Term::Union(
            Box::new(strip_old_term(a, gen, bindings)),
            Box::new(strip_old_term(b, gen, bindings)),
        ),
        Term::Inter(a, b) => Term::Inter(
            Box::new(strip_old_term(a, gen, bindings)),
            Box::new(strip_old_term(b, gen, bindings)),
        ),
        Term::Diff(a, b) => Term::Diff(
            Box::new(strip_old_term(a, gen, bindings)),
            Box::new(strip_old_term(b, gen, bindings)),
        ),
        Term::Add(a, b) => Term::Add(
            Box::new(strip_old_term(a, gen, bindings)),
            Box::new(strip_old_term(b, gen, bindings)),
        ),
        Term::Sub(a, b) => Term::Sub(
            Box::new(strip_old_term(a, gen, bindings)),
            Box::new(strip_old_term(b, gen, bindings)),
        ),
    }
}

/// Collect the recursive symbols mentioned in a formula.
pub fn rec_symbols_in_formula(f: &Formula, out: &mut BTreeSet<String>) {
    visit_formula(f, &mut |node| {
        if let FormulaOrTerm::Formula(Formula::RecPred(p, _)) = node {
            out.insert(p.clone());
        }
        if let FormulaOrTerm::Term(Term::RecFn(p, _)) = node {
            out.insert(p.clone());
        }
    });
}

pub enum FormulaOrTerm<'a> {
    Formula(&'a Formula),
    Term(&'a Term),
}

/// Pre-order visit of every formula and term node.
pub fn visit_formula<'a, F: FnMut(FormulaOrTerm<'a>)>(f: &'a Formula, visit: &mut F) {
    visit(FormulaOrTerm::Formula(f));
    match f {
        Formula::True | Formula::False => {}
        Formula::Eq(a, b)
        | Formula::Lt(a, b)
        | Formula::Le(a, b)
        | Formula::Member(a, b)
        | Formula::Subset(a, b) => {
            visit_term(a, visit);
            visit_term(b, visit);
        }
        Formula::IsEmpty(a) => visit_term(a, visit),
        Formula::RecPred(_, args) | Formula::Rel(_, args) => {
            for a in args {
                visit_term(a, visit);
            }
        }
        Formula::Not(a) | Formula::Cloud(a) => visit_formula(a, visit),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                visit_formula(g, visit);
            }
        }
        Formula::Iff(a, b) => {
            visit_formula(a, visit);
            visit_formula(b, visit);
        }
        Formula::Ite(g, a, b) => {
            visit_formula(g, visit);
            visit_formula(a, visit);
            visit_formula(b, visit);
        }
        Formula::Exists { arg, body, .. } => {
            visit_term(arg, visit);
            visit_formula(body, visit);
        }
        Formula::ForallLoc { body, .. } => visit_formula(body, visit),
    }
}

pub fn visit_term<'a, F: FnMut(FormulaOrTerm<'a>)>(t: &'a Term, visit: &mut F) {
    visit(FormulaOrTerm::Term(t));
    match t {
        Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => {}
        Term::Field(_, a) | Term::Cloud(a) | Term::Old(a) | Term::Singleton(a) => {
            visit_term(a, visit)
        }
        Term::App(_, args) | Term::RecFn(_, args) => {
            for a in args {
                visit_term(a, visit);
            }
        }
        Term::Ite(g, a, b) => {
            visit_formula(g, visit);
            visit_term(a, visit);
            visit_term(b, visit);
        }
        Term::Sp(arg) => match arg.as_ref() {
            SpArg::Formula(f) => visit_formula(f, visit),
            SpArg::Term(t2) => visit_term(t2, visit),
        },
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) | Term::Add(a, b)
        | Term::Sub(a, b) => {
            visit_term(a, visit);
            visit_term(b, visit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: &str) -> Term {
        Term::Var(n.to_string())
    }

    #[test]
    fn free_vars_guarded_existential_binds() {
        // ∃y: y=next(x). List(y)  →  {x}
        let f = Formula::Exists {
            var: "y".into(),
            field: "next".into(),
            arg: Box::new(var("x")),
            body: Box::new(Formula::RecPred("List".into(), vec![var("y")])),
        };
        let fv = free_vars(&f);
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
    }

    #[test]
    fn free_vars_eq() {
        let f = Formula::Eq(var("x"), var("y"));
        let fv = free_vars(&f);
        assert_eq!(
            fv.into_iter().collect::<Vec<_>>(),
            vec!["x".to_string(), "y".to_string()]
        );
    }

    #[test]
    fn free_vars_support_term() {
        // Sp(List(z)) ⊆ A  →  {z, A}
        let f = Formula::Subset(
            Term::Sp(Box::new(SpArg::Formula(Formula::RecPred(
                "List".into(),
                vec![var("z")],
            )))),
            var("A"),
        );
        let fv = free_vars(&f);
        assert_eq!(
            fv.into_iter().collect::<Vec<_>>(),
            vec!["A".to_string(), "z".to_string()]
        );
    }

    #[test]
    fn fresh_names_deterministic() {
        let mut g = NameGen::new();
        g.reserve("List");
        assert_eq!(g.fresh("List"), "List_2");
        assert_eq!(g.fresh("List"), "List_3");
        assert_eq!(g.fresh("Keys"), "Keys");
    }

    #[test]
    fn subst_shadows_bound_var() {
        let f = Formula::Exists {
            var: "y".into(),
            field: "next".into(),
            arg: Box::new(var("x")),
            body: Box::new(Formula::Eq(var("y"), var("z"))),
        };
        let mut m = BTreeMap::new();
        m.insert("y".to_string(), var("w"));
        m.insert("z".to_string(), var("q"));
        let g = subst_formula(&f, &m);
        match g {
            Formula::Exists { body, .. } => {
                assert_eq!(*body, Formula::Eq(var("y"), var("q")));
            }
            _ => panic!(),
        }
    }
}
