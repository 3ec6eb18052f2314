//! Well-formedness: typing, guard restrictions, positivity of recursive
//! definitions, and the one-way signature check.

use super::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn diag(path: &[String], message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        path: path.join("."),
        message: message.into(),
    }
}

/// Options controlling which extensions are admissible. User-written
/// formulas use the defaults; generated artifacts (VCs, frame rules)
/// relax them.
#[derive(Debug, Clone, Copy)]
pub struct WfOpts {
    pub allow_old: bool,
    pub allow_forall: bool,
}

impl Default for WfOpts {
    fn default() -> Self {
        WfOpts {
            allow_old: false,
            allow_forall: false,
        }
    }
}

pub struct Checker<'a> {
    sig: &'a Signature,
    vars: BTreeMap<String, Sort>,
    opts: WfOpts,
    diags: Vec<Diagnostic>,
    path: Vec<String>,
}

impl<'a> Checker<'a> {
    pub fn new(sig: &'a Signature, vars: BTreeMap<String, Sort>, opts: WfOpts) -> Self {
        Checker {
            sig,
            vars,
            opts,
            diags: Vec::new(),
            path: vec!["root".to_string()],
        }
    }

    fn push(&mut self, seg: impl Into<String>) {
        self.path.push(seg.into());
    }

    fn pop(&mut self) {
        self.path.pop();
    }

    fn report(&mut self, message: impl Into<String>) {
        self.diags.push(diag(&self.path, message));
    }

    fn expect(&mut self, got: Option<Sort>, want: Sort, what: &str) {
        if let Some(g) = got {
            if g != want {
                self.report(format!("{what}: expected sort {want}, found {g}"));
            }
        }
    }

    /// Infer the sort of a term, reporting violations along the way.
    /// `in_guard` bans recursive symbols and `Set(Loc)`-typed subterms.
    pub fn check_term(&mut self, t: &Term, in_guard: bool) -> Option<Sort> {
        let sort = match t {
            Term::Var(v) => match self.vars.get(v) {
                Some(s) => Some(*s),
                None => {
                    self.report(format!("unresolved variable `{v}`"));
                    None
                }
            },
            Term::Nil => Some(Sort::Loc),
            Term::Const(c) => match self.sig.consts.get(c) {
                Some(s) => Some(*s),
                None => {
                    self.report(format!("unresolved constant `{c}`"));
                    None
                }
            },
            Term::IntLit(_) => Some(Sort::Int),
            Term::Field(f, a) => {
                self.push(format!("{f}(..)"));
                let at = self.check_term(a, in_guard);
                self.expect(at, Sort::Loc, "field argument");
                self.pop();
                match self.sig.fields.get(f) {
                    Some(rng) => Some(*rng),
                    None => {
                        self.report(format!("unresolved field `{f}`"));
                        None
                    }
                }
            }
            Term::App(f, args) => {
                let sig = self.sig.other_fns.get(f).cloned();
                match sig {
                    Some((dom, rng)) => {
                        if dom.len() != args.len() {
                            self.report(format!(
                                "`{f}` expects {} arguments, found {}",
                                dom.len(),
                                args.len()
                            ));
                        }
                        for (i, (a, want)) in args.iter().zip(dom.iter()).enumerate() {
                            self.push(format!("{f}[{i}]"));
                            let got = self.check_term(a, in_guard);
                            self.expect(got, *want, "argument");
                            self.pop();
                        }
                        Some(rng)
                    }
                    None => {
                        self.report(format!("unresolved function `{f}`"));
                        None
                    }
                }
            }
            Term::RecFn(f, args) => {
                // guards ban inductively defined predicates and Set(Loc)
                // terms; background-valued recursive functions (Min, Max,
                // Keys) are legal guard material
                if in_guard
                    && self
                        .sig
                        .rec_sigs
                        .get(f)
                        .is_some_and(|r| r.result == Sort::SetLoc)
                {
                    self.report(format!(
                        "recursively defined Set(Loc) term `{f}` may not occur in an ite guard"
                    ));
                }
                self.check_rec_app(f, args, in_guard)
            }
            Term::Ite(g, a, b) => {
                self.push("ite.guard".to_string());
                self.check_formula(g, true);
                self.pop();
                self.push("ite.then".to_string());
                let s1 = self.check_term(a, in_guard);
                self.pop();
                self.push("ite.else".to_string());
                let s2 = self.check_term(b, in_guard);
                self.pop();
                match (s1, s2) {
                    (Some(x), Some(y)) if x != y => {
                        self.report(format!("ite branches have different sorts {x} / {y}"));
                        None
                    }
                    (x, y) => x.or(y),
                }
            }
            Term::Sp(arg) => {
                if in_guard {
                    self.report("support expression may not occur in an ite guard");
                }
                self.push("Sp".to_string());
                match arg.as_ref() {
                    SpArg::Formula(f) => self.check_formula(f, false),
                    SpArg::Term(t2) => {
                        self.check_term(t2, false);
                    }
                }
                self.pop();
                Some(Sort::SetLoc)
            }
            Term::Cloud(a) => {
                self.push("cloud".to_string());
                let s = self.check_term(a, in_guard);
                self.pop();
                s
            }
            Term::Old(a) => {
                if !self.opts.allow_old {
                    self.report("Old(..) may only appear in postconditions");
                }
                self.push("Old".to_string());
                let s = self.check_term(a, false);
                self.pop();
                s
            }
            Term::Empty(s) => Some(*s),
            Term::Singleton(a) => {
                self.push("singleton".to_string());
                let s = self.check_term(a, in_guard);
                self.pop();
                match s {
                    Some(e) => match Sort::set_of(e) {
                        Some(st) => Some(st),
                        None => {
                            self.report(format!("no set sort over element sort {e}"));
                            None
                        }
                    },
                    None => None,
                }
            }
            Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) => {
                self.push("setop.lhs".to_string());
                let s1 = self.check_term(a, in_guard);
                self.pop();
                self.push("setop.rhs".to_string());
                let s2 = self.check_term(b, in_guard);
                self.pop();
                match (s1, s2) {
                    (Some(x), Some(y)) if x != y => {
                        self.report(format!("set operands have different sorts {x} / {y}"));
                        None
                    }
                    (x, y) => {
                        let s = x.or(y);
                        if let Some(s) = s {
                            if !s.is_set() {
                                self.report(format!("set operation on non-set sort {s}"));
                            }
                        }
                        s
                    }
                }
            }
            Term::Add(a, b) | Term::Sub(a, b) => {
                self.push("arith.lhs".to_string());
                let s1 = self.check_term(a, in_guard);
                self.pop();
                self.push("arith.rhs".to_string());
                let s2 = self.check_term(b, in_guard);
                self.pop();
                self.expect(s1, Sort::Int, "arithmetic operand");
                self.expect(s2, Sort::Int, "arithmetic operand");
                Some(Sort::Int)
            }
        };
        if in_guard && sort == Some(Sort::SetLoc) {
            self.report("term of sort Set(Loc) may not occur in an ite guard");
        }
        sort
    }

    fn check_rec_app(&mut self, f: &str, args: &[Term], in_guard: bool) -> Option<Sort> {
        let rs = self.sig.rec_sigs.get(f).cloned();
        match rs {
            Some(rs) => {
                if rs.params.len() != args.len() {
                    self.report(format!(
                        "`{f}` expects {} arguments, found {}",
                        rs.params.len(),
                        args.len()
                    ));
                }
                for (i, (a, want)) in args.iter().zip(rs.params.iter()).enumerate() {
                    self.push(format!("{f}[{i}]"));
                    let got = self.check_term(a, in_guard);
                    self.expect(got, *want, "argument");
                    self.pop();
                }
                Some(rs.result)
            }
            None => {
                self.report(format!("unresolved recursive symbol `{f}`"));
                None
            }
        }
    }

    pub fn check_formula(&mut self, f: &Formula, in_guard: bool) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                self.push("eq.lhs".to_string());
                let s1 = self.check_term(a, in_guard);
                self.pop();
                self.push("eq.rhs".to_string());
                let s2 = self.check_term(b, in_guard);
                self.pop();
                if let (Some(x), Some(y)) = (s1, s2) {
                    if x != y {
                        self.report(format!("equality between sorts {x} and {y}"));
                    }
                }
            }
            Formula::Lt(a, b) | Formula::Le(a, b) => {
                self.push("cmp.lhs".to_string());
                let s1 = self.check_term(a, in_guard);
                self.pop();
                self.push("cmp.rhs".to_string());
                let s2 = self.check_term(b, in_guard);
                self.pop();
                self.expect(s1, Sort::Int, "comparison operand");
                self.expect(s2, Sort::Int, "comparison operand");
            }
            Formula::Member(e, s) => {
                self.push("member.elem".to_string());
                let se = self.check_term(e, in_guard);
                self.pop();
                self.push("member.set".to_string());
                let ss = self.check_term(s, in_guard);
                self.pop();
                if let (Some(es), Some(st)) = (se, ss) {
                    if Sort::set_of(es) != Some(st) {
                        self.report(format!("membership of {es} element in {st}"));
                    }
                }
            }
            Formula::Subset(a, b) => {
                self.push("subset.lhs".to_string());
                let s1 = self.check_term(a, in_guard);
                self.pop();
                self.push("subset.rhs".to_string());
                let s2 = self.check_term(b, in_guard);
                self.pop();
                for s in [s1, s2].into_iter().flatten() {
                    if !s.is_set() {
                        self.report(format!("subset on non-set sort {s}"));
                    }
                }
                if let (Some(x), Some(y)) = (s1, s2) {
                    if x != y {
                        self.report(format!("subset between sorts {x} and {y}"));
                    }
                }
            }
            Formula::IsEmpty(a) => {
                self.push("isempty".to_string());
                let s = self.check_term(a, in_guard);
                self.pop();
                if let Some(s) = s {
                    if !s.is_set() {
                        self.report(format!("IsEmpty on non-set sort {s}"));
                    }
                }
            }
            Formula::RecPred(p, args) => {
                if in_guard {
                    self.report(format!(
                        "recursively defined symbol `{p}` may not occur in an ite guard"
                    ));
                }
                let s = self.check_rec_app(p, args, in_guard);
                self.expect(s, Sort::Bool, "recursive predicate");
            }
            Formula::Rel(p, args) => {
                let sig = self.sig.other_fns.get(p).cloned();
                match sig {
                    Some((dom, rng)) => {
                        if rng != Sort::Bool {
                            self.report(format!("`{p}` used as relation but returns {rng}"));
                        }
                        for (i, (a, want)) in args.iter().zip(dom.iter()).enumerate() {
                            self.push(format!("{p}[{i}]"));
                            let got = self.check_term(a, in_guard);
                            self.expect(got, *want, "argument");
                            self.pop();
                        }
                    }
                    None => self.report(format!("unresolved relation `{p}`")),
                }
            }
            Formula::Not(a) => {
                self.push("not".to_string());
                self.check_formula(a, in_guard);
                self.pop();
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let tag = if matches!(f, Formula::And(_)) { "and" } else { "or" };
                for (i, g) in fs.iter().enumerate() {
                    self.push(format!("{tag}[{i}]"));
                    self.check_formula(g, in_guard);
                    self.pop();
                }
            }
            Formula::Iff(a, b) => {
                self.push("iff.lhs".to_string());
                self.check_formula(a, in_guard);
                self.pop();
                self.push("iff.rhs".to_string());
                self.check_formula(b, in_guard);
                self.pop();
            }
            Formula::Ite(g, a, b) => {
                self.push("ite.guard".to_string());
                self.check_formula(g, true);
                self.pop();
                self.push("ite.then".to_string());
                self.check_formula(a, in_guard);
                self.pop();
                self.push("ite.else".to_string());
                self.check_formula(b, in_guard);
                self.pop();
            }
            Formula::Exists {
                var,
                field,
                arg,
                body,
            } => {
                if in_guard {
                    self.report("quantifier may not occur in an ite guard");
                }
                let rng = match self.sig.fields.get(field) {
                    Some(r) => Some(*r),
                    None => {
                        self.report(format!("unresolved field `{field}` in guard"));
                        None
                    }
                };
                if let Some(r) = rng {
                    if r != Sort::Loc {
                        self.report(format!(
                            "guarded existential over data field `{field}` (range {r})"
                        ));
                    }
                }
                self.push("exists.arg".to_string());
                let s = self.check_term(arg, in_guard);
                self.expect(s, Sort::Loc, "guard argument");
                self.pop();
                self.push("exists.body".to_string());
                let shadowed = self.vars.insert(var.clone(), Sort::Loc);
                self.check_formula(body, in_guard);
                match shadowed {
                    Some(s) => {
                        self.vars.insert(var.clone(), s);
                    }
                    None => {
                        self.vars.remove(var);
                    }
                }
                self.pop();
            }
            Formula::Cloud(a) => {
                self.push("cloud".to_string());
                self.check_formula(a, in_guard);
                self.pop();
            }
            Formula::ForallLoc { vars, body } => {
                if !self.opts.allow_forall {
                    self.report("universal quantification is not part of the user fragment");
                }
                self.push("forall.body".to_string());
                let saved: Vec<_> = vars
                    .iter()
                    .map(|v| (v.clone(), self.vars.insert(v.clone(), Sort::Loc)))
                    .collect();
                self.check_formula(body, in_guard);
                for (v, old) in saved {
                    match old {
                        Some(s) => {
                            self.vars.insert(v, s);
                        }
                        None => {
                            self.vars.remove(&v);
                        }
                    }
                }
                self.pop();
            }
        }
    }

    pub fn finish(self) -> Vec<Diagnostic> {
        self.diags
    }
}

/// Check a formula: typing, guard restrictions, resolution.
pub fn check_wellformed(
    f: &Formula,
    sig: &Signature,
    vars: &BTreeMap<String, Sort>,
    opts: WfOpts,
) -> Vec<Diagnostic> {
    let mut c = Checker::new(sig, vars.clone(), opts);
    c.check_formula(f, false);
    c.finish()
}

/// Check a recursive definition: body well-formed under its parameters,
/// plus positivity of Bool-valued recursive symbols (occurrences inside a
/// support expression are exempt).
pub fn check_recdef(def: &RecDef, sig: &Signature) -> Vec<Diagnostic> {
    let vars: BTreeMap<String, Sort> = def
        .params
        .iter()
        .map(|p| (p.clone(), Sort::Loc))
        .collect();
    let mut c = Checker::new(sig, vars, WfOpts::default());
    match &def.body {
        RecBody::Formula(f) => c.check_formula(f, false),
        RecBody::Term(t) => {
            c.check_term(t, false);
        }
    }
    let mut diags = c.finish();
    if let RecBody::Formula(f) = &def.body {
        let mut pos = PositivityChecker {
            sig,
            diags: Vec::new(),
        };
        pos.formula(f, true);
        diags.extend(pos.diags.into_iter().map(|name| Diagnostic {
            path: format!("def {}", def.name),
            message: format!("recursive symbol `{name}` occurs negatively"),
        }));
    }
    diags
}

struct PositivityChecker<'a> {
    sig: &'a Signature,
    diags: Vec<String>,
}

impl<'a> PositivityChecker<'a> {
    fn formula(&mut self, f: &Formula, positive: bool) {
        match f {
            Formula::RecPred(p, _) => {
                let is_bool = self
                    .sig
                    .rec_sigs
                    .get(p)
                    .map(|r| r.result == Sort::Bool)
                    .unwrap_or(true);
                if is_bool && !positive {
                    self.diags.push(p.clone());
                }
            }
            Formula::Not(a) => self.formula(a, !positive),
            Formula::And(fs) | Formula::Or(fs) => {
                for g in fs {
                    self.formula(g, positive);
                }
            }
            Formula::Iff(a, b) => {
                // both polarities
                self.formula(a, true);
                self.formula(a, false);
                self.formula(b, true);
                self.formula(b, false);
            }
            Formula::Ite(_, a, b) => {
                // guards cannot mention recursive symbols (checked elsewhere)
                self.formula(a, positive);
                self.formula(b, positive);
            }
            Formula::Exists { body, .. } => self.formula(body, positive),
            Formula::Cloud(a) => self.formula(a, positive),
            Formula::ForallLoc { body, .. } => self.formula(body, positive),
            // Occurrences inside Sp(..) terms are exempt; atoms over terms
            // only contain value-level recursion.
            _ => {}
        }
    }
}

/// One-way check over the signature: every function with range `Loc` has an
/// all-`Loc` domain, and every recursive symbol takes `Loc` parameters only.
pub fn check_oneway(sig: &Signature) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for (name, (dom, rng)) in &sig.other_fns {
        if *rng == Sort::Loc && dom.iter().any(|s| *s != Sort::Loc) {
            diags.push(Diagnostic {
                path: format!("fn {name}"),
                message: format!(
                    "function `{name}` ranges over Loc but takes non-Loc arguments"
                ),
            });
        }
    }
    for (name, rs) in &sig.rec_sigs {
        if rs.params.iter().any(|s| *s != Sort::Loc) {
            diags.push(Diagnostic {
                path: format!("rec {name}"),
                message: format!("recursive symbol `{name}` takes non-Loc parameters"),
            });
        }
    }
    diags
}

/// Infer sorts for the free variables of a formula by propagating from
/// syntactic positions (recursive/field applications force `Loc`,
/// comparisons force `Int`, set operands force set sorts). Unconstrained
/// variables default to `Loc`.
pub fn infer_var_sorts(
    f: &Formula,
    sig: &Signature,
    presets: &BTreeMap<String, Sort>,
) -> BTreeMap<String, Sort> {
    let mut sorts = presets.clone();
    // iterate to a fixpoint; each pass can resolve vars from Eq sides
    for _ in 0..4 {
        let mut changed = false;
        let assign = |sorts: &mut BTreeMap<String, Sort>, v: &Term, s: Sort| {
            if let Term::Var(name) = v {
                if !sorts.contains_key(name) {
                    sorts.insert(name.clone(), s);
                    return true;
                }
            }
            false
        };
        let term_sort = |sorts: &BTreeMap<String, Sort>, t: &Term| -> Option<Sort> {
            infer_term_sort(t, sig, sorts)
        };
        visit_formula(f, &mut |node| {
            match node {
                FormulaOrTerm::Formula(Formula::Lt(a, b))
                | FormulaOrTerm::Formula(Formula::Le(a, b)) => {
                    changed |= assign(&mut sorts, a, Sort::Int);
                    changed |= assign(&mut sorts, b, Sort::Int);
                }
                FormulaOrTerm::Formula(Formula::Eq(a, b)) => {
                    if let Some(s) = term_sort(&sorts, a) {
                        changed |= assign(&mut sorts, b, s);
                    }
                    if let Some(s) = term_sort(&sorts, b) {
                        changed |= assign(&mut sorts, a, s);
                    }
                }
                FormulaOrTerm::Formula(Formula::Member(e, s)) => {
                    if let Some(es) = term_sort(&sorts, e) {
                        if let Some(ss) = Sort::set_of(es) {
                            changed |= assign(&mut sorts, s, ss);
                        }
                    }
                    if let Some(ss) = term_sort(&sorts, s) {
                        if let Some(es) = ss.elem_sort() {
                            changed |= assign(&mut sorts, e, es);
                        }
                    }
                }
                FormulaOrTerm::Formula(Formula::RecPred(p, args)) => {
                    if let Some(rs) = sig.rec_sigs.get(p) {
                        for (a, s) in args.iter().zip(rs.params.iter()) {
                            changed |= assign(&mut sorts, a, *s);
                        }
                    }
                }
                FormulaOrTerm::Term(Term::RecFn(p, args)) => {
                    if let Some(rs) = sig.rec_sigs.get(p) {
                        for (a, s) in args.iter().zip(rs.params.iter()) {
                            changed |= assign(&mut sorts, a, *s);
                        }
                    }
                }
                FormulaOrTerm::Term(Term::Field(_, a)) => {
                    changed |= assign(&mut sorts, a, Sort::Loc);
                }
                FormulaOrTerm::Term(Term::Add(a, b)) | FormulaOrTerm::Term(Term::Sub(a, b)) => {
                    changed |= assign(&mut sorts, a, Sort::Int);
                    changed |= assign(&mut sorts, b, Sort::Int);
                }
                _ => {}
            }
        });
        if !changed {
            break;
        }
    }
    for v in free_vars(f) {
        sorts.entry(v).or_insert(Sort::Loc);
    }
    sorts
}

/// Best-effort sort of a term given the variable sorts known so far.
pub fn infer_term_sort(
    t: &Term,
    sig: &Signature,
    vars: &BTreeMap<String, Sort>,
) -> Option<Sort> {
    match t {
        Term::Var(v) => vars.get(v).copied(),
        Term::Nil => Some(Sort::Loc),
        Term::Const(c) => sig.consts.get(c).copied(),
        Term::IntLit(_) => Some(Sort::Int),
        Term::Field(f, _) => sig.fields.get(f).copied(),
        Term::App(f, _) => sig.other_fns.get(f).map(|(_, r)| *r),
        Term::RecFn(f, _) => sig.rec_sigs.get(f).map(|r| r.result),
        Term::Ite(_, a, b) => {
            infer_term_sort(a, sig, vars).or_else(|| infer_term_sort(b, sig, vars))
        }
        Term::Sp(_) => Some(Sort::SetLoc),
        Term::Cloud(a) | Term::Old(a) => infer_term_sort(a, sig, vars),
        Term::Empty(s) => Some(*s),
        Term::Singleton(a) => infer_term_sort(a, sig, vars).and_then(Sort::set_of),
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) => {
            infer_term_sort(a, sig, vars).or_else(|| infer_term_sort(b, sig, vars))
        }
        Term::Add(_, _) | Term::Sub(_, _) => Some(Sort::Int),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_sig() -> Signature {
        let mut sig = Signature::new();
        sig.fields.insert("next".into(), Sort::Loc);
        sig.fields.insert("key".into(), Sort::Int);
        sig.rec_sigs.insert(
            "List".into(),
            RecSig {
                params: vec![Sort::Loc],
                result: Sort::Bool,
            },
        );
        sig
    }

    fn list_def_body() -> Formula {
        // ite(x=nil, ⊤, (next(x)=next(x)) ∧ List([next(x)]) ∧ ¬(x ∈ Sp(List([next(x)]))))
        let next_x = || Term::Field("next".into(), Box::new(Term::Var("x".into())));
        let cloud = || Term::Cloud(Box::new(next_x()));
        Formula::Ite(
            Box::new(Formula::Eq(Term::Var("x".into()), Term::Nil)),
            Box::new(Formula::True),
            Box::new(Formula::And(vec![
                Formula::Eq(next_x(), next_x()),
                Formula::RecPred("List".into(), vec![cloud()]),
                Formula::Not(Box::new(Formula::Member(
                    Term::Var("x".into()),
                    Term::Sp(Box::new(SpArg::Formula(Formula::RecPred(
                        "List".into(),
                        vec![cloud()],
                    )))),
                ))),
            ])),
        )
    }

    #[test]
    fn list_definition_wellformed() {
        let sig = test_sig();
        let def = RecDef {
            name: "List".into(),
            params: vec!["x".into()],
            body: RecBody::Formula(list_def_body()),
            kind: DefKind::Lfp,
        };
        let diags = check_recdef(&def, &sig);
        assert!(diags.is_empty(), "{diags:?}");
    }

    #[test]
    fn setloc_term_in_guard_rejected() {
        let sig = test_sig();
        // ite(Sp(List(x)) = EmptySetLoc : ⊤, ⊥)
        let f = Formula::Ite(
            Box::new(Formula::Eq(
                Term::Sp(Box::new(SpArg::Formula(Formula::RecPred(
                    "List".into(),
                    vec![Term::Var("x".into())],
                )))),
                Term::Empty(Sort::SetLoc),
            )),
            Box::new(Formula::True),
            Box::new(Formula::False),
        );
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), Sort::Loc);
        let diags = check_wellformed(&f, &sig, &vars, WfOpts::default());
        assert!(
            diags.iter().any(|d| d.message.contains("guard")),
            "{diags:?}"
        );
        assert!(diags.iter().any(|d| d.path.contains("ite.guard")), "{diags:?}");
    }

    #[test]
    fn negative_occurrence_rejected() {
        let mut sig = test_sig();
        sig.rec_sigs.insert(
            "Bad".into(),
            RecSig {
                params: vec![Sort::Loc],
                result: Sort::Bool,
            },
        );
        let def = RecDef {
            name: "Bad".into(),
            params: vec!["x".into()],
            body: RecBody::Formula(Formula::Not(Box::new(Formula::RecPred(
                "Bad".into(),
                vec![Term::Field("next".into(), Box::new(Term::Var("x".into())))],
            )))),
            kind: DefKind::Lfp,
        };
        let diags = check_recdef(&def, &sig);
        assert!(
            diags.iter().any(|d| d.message.contains("negatively")),
            "{diags:?}"
        );
    }

    #[test]
    fn oneway_rejects_background_to_foreground() {
        let mut sig = test_sig();
        // next: Loc→Loc, key: Loc→Int are fine; sel: Int→Loc is not.
        assert!(check_oneway(&sig).is_empty());
        sig.other_fns
            .insert("sel".into(), (vec![Sort::Int], Sort::Loc));
        let diags = check_oneway(&sig);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("sel"));
    }

    #[test]
    fn oneway_rejects_background_rec_params() {
        let mut sig = test_sig();
        sig.rec_sigs.insert(
            "mem".into(),
            RecSig {
                params: vec![Sort::Loc, Sort::Int],
                result: Sort::Bool,
            },
        );
        let diags = check_oneway(&sig);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("mem"));
    }

    #[test]
    fn old_rejected_outside_post() {
        let sig = test_sig();
        let f = Formula::Eq(
            Term::Old(Box::new(Term::RecFn("List".into(), vec![Term::Var("x".into())]))),
            Term::Var("r".into()),
        );
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), Sort::Loc);
        vars.insert("r".to_string(), Sort::Bool);
        let diags = check_wellformed(&f, &sig, &vars, WfOpts::default());
        assert!(diags.iter().any(|d| d.message.contains("Old")), "{diags:?}");
    }
}
