//! Natural-proofs discharge of FORD verification conditions: round-based
//! quantifier instantiation of recursive definitions (read as fixpoint
//! equations, not least fixpoints), frame rules and proved lemmas, with
//! the quantifier-free residue checked by an external SMT solver. Proved
//! verdicts are only ever produced from an unsat answer on the negated
//! goal. Inductive lemmas are proved by pre-fixpoint induction: the lemma
//! acts as its own induction hypothesis at every instantiation tuple
//! except the goal tuple.

pub mod smt;
pub mod solve;

use crate::ast::{
    subst_formula, subst_term, wf::infer_var_sorts, Formula, RecBody, RecDef, Signature, Sort,
    Term,
};
use crate::vcgen::blocks::ObKind;
use smt::{emit_script, ScriptInput};
use solve::{model_summary, run_solver, SolverAnswer, SolverCmd};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct InstantiationPolicy {
    /// number of instantiation rounds (round 0 is the thrifty set)
    pub max_rounds: usize,
    /// application layers added per round
    pub depth_increment: usize,
    /// per-query timeout
    pub timeout: Duration,
    /// cap on the foreground term set
    pub max_terms: usize,
}

impl Default for InstantiationPolicy {
    fn default() -> Self {
        InstantiationPolicy {
            max_rounds: 3,
            depth_increment: 1,
            timeout: Duration::from_secs(30),
            max_terms: 72,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Proved { round: usize },
    Unknown { summary: String },
    Timeout,
    SolverError(String),
}

impl Verdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved { .. })
    }
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Proved { .. } => "proved",
            Verdict::Unknown { .. } => "unknown",
            Verdict::Timeout => "timeout",
            Verdict::SolverError(_) => "solver-error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProofResult {
    pub verdict: Verdict,
    pub rounds: usize,
    pub wall: Duration,
    pub scripts: Vec<PathBuf>,
}

/// A FORD verification condition ready for discharge.
#[derive(Debug, Clone)]
pub struct FordVc {
    pub id: String,
    pub method: String,
    pub block: usize,
    pub kind: ObKind,
    pub provenance: String,
    /// T conjuncts
    pub hypotheses: Vec<Formula>,
    /// frame rules (universally quantified over Loc)
    pub frames: Vec<Formula>,
    pub goal: Formula,
    /// recursive definitions in scope, including support definitions
    pub defs: Vec<RecDef>,
    pub sig: Signature,
    pub var_sorts: BTreeMap<String, Sort>,
    /// per-family recursive-symbol renamings (FORD level, including
    /// support symbols), used to lift base-level lemmas
    pub family_renames: Vec<BTreeMap<String, String>>,
    /// defined heap functions `(name, param, body)`; instantiated as
    /// ground equations `name(t) = body[param := t]`
    pub field_axioms: Vec<(String, String, Term)>,
}

/// A proved lemma, stored base-level and lifted to each heap family.
#[derive(Debug, Clone)]
pub struct StoredLemma {
    pub name: String,
    pub vars: Vec<(String, Sort)>,
    /// FORD body with `vars` free
    pub body: Formula,
}

pub struct ProverCtx {
    pub policy: InstantiationPolicy,
    pub solver: SolverCmd,
    pub emit_dir: Option<PathBuf>,
    pub lemmas: Vec<StoredLemma>,
}

impl ProverCtx {
    pub fn new(policy: InstantiationPolicy, solver: SolverCmd) -> Self {
        ProverCtx {
            policy,
            solver,
            emit_dir: None,
            lemmas: Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Term gathering
// ---------------------------------------------------------------------------

fn is_simple_loc_term(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Nil | Term::Const(_) => true,
        Term::Field(_, a) => is_simple_loc_term(a),
        _ => false,
    }
}

/// Foreground (and background-integer) instantiation terms for a round.
/// Round 0 is the thrifty set: ground subterms of the VC plus one level of
/// pointer dereferences on its variables; each further round closes under
/// one more application of every pointer field.
pub fn gather_terms(
    vc: &FordVc,
    round: usize,
    policy: &InstantiationPolicy,
) -> (Vec<Term>, Vec<Term>) {
    let mut locs: BTreeSet<Term> = BTreeSet::new();
    let mut ints: BTreeSet<Term> = BTreeSet::new();
    let sig = &vc.sig;
    let vars = &vc.var_sorts;

    let collect = |f: &Formula, locs: &mut BTreeSet<Term>, ints: &mut BTreeSet<Term>| {
        crate::ast::visit_formula(f, &mut |node| {
            if let crate::ast::FormulaOrTerm::Term(t) = node {
                match crate::ast::wf::infer_term_sort(t, sig, vars) {
                    Some(Sort::Loc) if is_simple_loc_term(t) => {
                        locs.insert(t.clone());
                    }
                    Some(Sort::Int) => match t {
                        Term::Var(_) | Term::IntLit(_) | Term::Const(_) => {
                            ints.insert(t.clone());
                        }
                        Term::Field(_, a) if is_simple_loc_term(a) => {
                            ints.insert(t.clone());
                        }
                        _ => {}
                    },
                    _ => {}
                }
            }
        });
    };
    for h in &vc.hypotheses {
        collect(h, &mut locs, &mut ints);
    }
    collect(&vc.goal, &mut locs, &mut ints);
    locs.insert(Term::Nil);

    let base_fields: Vec<String> = sig
        .fields
        .iter()
        .filter(|(f, s)| {
            **s == Sort::Loc && !f.chars().last().is_some_and(|c| c.is_ascii_digit())
        })
        .map(|(f, _)| f.clone())
        .collect();
    // one dereference level on the VC's variables (base fields only; fresh
    // call functions only matter through the heap terms)
    let var_terms: Vec<Term> = locs
        .iter()
        .filter(|t| matches!(t, Term::Var(_) | Term::Const(_)))
        .cloned()
        .collect();
    for v in &var_terms {
        for f in &base_fields {
            locs.insert(Term::Field(f.clone(), Box::new(v.clone())));
        }
    }
    // subsequent rounds: close under one more application layer per round
    for _ in 0..(round * policy.depth_increment) {
        let snapshot: Vec<Term> = locs.iter().cloned().collect();
        for t in snapshot {
            for f in &base_fields {
                if locs.len() >= policy.max_terms {
                    break;
                }
                locs.insert(Term::Field(f.clone(), Box::new(t.clone())));
            }
        }
    }
    let locs: Vec<Term> = locs.into_iter().take(policy.max_terms).collect();
    let ints: Vec<Term> = ints.into_iter().take(policy.max_terms).collect();
    (locs, ints)
}

fn tuples(terms: &[Term], arity: usize, cap: usize) -> Vec<Vec<Term>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &out {
            for term in terms {
                if next.len() >= cap {
                    break;
                }
                let mut t2 = t.clone();
                t2.push(term.clone());
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

fn sort_instances(
    vars: &[(String, Sort)],
    locs: &[Term],
    ints: &[Term],
) -> Vec<BTreeMap<String, Term>> {
    let mut insts: Vec<BTreeMap<String, Term>> = vec![BTreeMap::new()];
    for (v, sort) in vars {
        let domain: &[Term] = match sort {
            Sort::Loc => locs,
            Sort::Int => ints,
            _ => &[],
        };
        let mut next = Vec::new();
        for m in &insts {
            for t in domain {
                let mut m2 = m.clone();
                m2.insert(v.clone(), t.clone());
                next.push(m2);
            }
        }
        insts = next;
    }
    insts
}

// ---------------------------------------------------------------------------
// Unfolding
// ---------------------------------------------------------------------------

fn def_equation(def: &RecDef, args: &[Term]) -> Formula {
    let subst: BTreeMap<String, Term> = def
        .params
        .iter()
        .cloned()
        .zip(args.iter().cloned())
        .collect();
    match &def.body {
        RecBody::Formula(body) => Formula::Iff(
            Box::new(Formula::RecPred(def.name.clone(), args.to_vec())),
            Box::new(subst_formula(body, &subst)),
        ),
        RecBody::Term(body) => Formula::Eq(
            Term::RecFn(def.name.clone(), args.to_vec()),
            subst_term(body, &subst),
        ),
    }
}

fn instantiate_forall(f: &Formula, terms: &[Term], cap: usize, out: &mut Vec<Formula>) {
    match f {
        Formula::ForallLoc { vars, body } => {
            for tuple in tuples(terms, vars.len(), cap) {
                let subst: BTreeMap<String, Term> =
                    vars.iter().cloned().zip(tuple.into_iter()).collect();
                out.push(subst_formula(body, &subst));
            }
        }
        Formula::And(fs) => {
            for g in fs {
                instantiate_forall(g, terms, cap, out);
            }
        }
        other => out.push(other.clone()),
    }
}

/// Instantiate definitions (as fixpoint equations), frame rules and lemmas
/// on the gathered terms, producing labeled quantifier-free hypotheses.
pub fn unfold(
    vc: &FordVc,
    lemmas: &[StoredLemma],
    locs: &[Term],
    ints: &[Term],
) -> Vec<(String, Formula)> {
    let mut out = Vec::new();
    for (i, h) in vc.hypotheses.iter().enumerate() {
        out.push((format!("T[{i}]"), h.clone()));
    }
    let tuple_cap = 4096;
    for (name, param, body) in &vc.field_axioms {
        for t in locs {
            let mut m = BTreeMap::new();
            m.insert(param.clone(), t.clone());
            out.push((
                format!("heap {name}"),
                Formula::Eq(
                    Term::Field(name.clone(), Box::new(t.clone())),
                    subst_term(body, &m),
                ),
            ));
        }
    }
    for def in &vc.defs {
        for args in tuples(locs, def.params.len(), tuple_cap) {
            out.push((format!("unfold {}", def.name), def_equation(def, &args)));
        }
    }
    for (i, fr) in vc.frames.iter().enumerate() {
        let mut inst = Vec::new();
        instantiate_forall(fr, locs, tuple_cap, &mut inst);
        for f in inst {
            out.push((format!("frame[{i}]"), f));
        }
    }
    // lemmas lift to every definition family
    for lemma in lemmas {
        for rename in &vc.family_renames {
            let body = crate::ford::merge_support_symbols(&lemma.body, rename);
            for m in sort_instances(&lemma.vars, locs, ints) {
                out.push((format!("lemma {}", lemma.name), subst_formula(&body, &m)));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Proof drivers
// ---------------------------------------------------------------------------

fn persist_script(
    ctx: &ProverCtx,
    id: &str,
    round: usize,
    script: &str,
    scripts: &mut Vec<PathBuf>,
) {
    if let Some(dir) = &ctx.emit_dir {
        let _ = std::fs::create_dir_all(dir);
        let path = dir.join(format!("{id}_round{round}.smt2"));
        if std::fs::write(&path, script).is_ok() {
            scripts.push(path);
        }
    }
}

struct RoundLoop {
    start: Instant,
    scripts: Vec<PathBuf>,
    last_summary: String,
    rounds: usize,
}

impl RoundLoop {
    fn new() -> Self {
        RoundLoop {
            start: Instant::now(),
            scripts: Vec::new(),
            last_summary: String::new(),
            rounds: 0,
        }
    }

    fn finish(self, verdict: Verdict) -> ProofResult {
        ProofResult {
            verdict,
            rounds: self.rounds,
            wall: self.start.elapsed(),
            scripts: self.scripts,
        }
    }

    /// Returns Some(result) when the loop should stop.
    fn step(
        &mut self,
        ctx: &ProverCtx,
        id: &str,
        round: usize,
        input: &ScriptInput,
    ) -> Option<Verdict> {
        self.rounds = round + 1;
        let script = match emit_script(input) {
            Ok(s) => s,
            Err(e) => return Some(Verdict::SolverError(e.to_string())),
        };
        persist_script(ctx, id, round, &script, &mut self.scripts);
        match run_solver(&ctx.solver, &script, ctx.policy.timeout) {
            SolverAnswer::Unsat => Some(Verdict::Proved { round }),
            SolverAnswer::Sat(model) => {
                self.last_summary = model_summary(&model);
                None
            }
            SolverAnswer::Unknown(_) => {
                self.last_summary = "solver answered unknown".to_string();
                None
            }
            SolverAnswer::TimedOut => Some(Verdict::Timeout),
            SolverAnswer::Error(e) => Some(Verdict::SolverError(e)),
        }
    }
}

/// Round loop: gather → unfold → emit → solve. `unsat` proves the VC;
/// `sat`/`unknown` trigger the next round until the cap.
pub fn prove_vc(vc: &FordVc, ctx: &ProverCtx) -> ProofResult {
    let mut lp = RoundLoop::new();
    for round in 0..ctx.policy.max_rounds {
        let (locs, ints) = gather_terms(vc, round, &ctx.policy);
        let hyps = unfold(vc, &ctx.lemmas, &locs, &ints);
        let header = vec![
            format!("vc {} ({})", vc.id, vc.provenance),
            format!("round {round}; {} foreground terms", locs.len()),
        ];
        let input = ScriptInput {
            sig: &vc.sig,
            var_sorts: &vc.var_sorts,
            hypotheses: &hyps,
            goal: &vc.goal,
            header: &header,
        };
        if let Some(v) = lp.step(ctx, &vc.id, round, &input) {
            return lp.finish(v);
        }
    }
    let summary = lp.last_summary.clone();
    lp.finish(Verdict::Unknown { summary })
}

/// Pre-fixpoint induction: assert the lemma at every instantiation tuple
/// except the goal tuple (the lemma's own variables), unfold the
/// definitions one step, and prove the body at the goal tuple.
pub fn prove_lemma(
    name: &str,
    vars: &[(String, Sort)],
    body: &Formula,
    defs: &[RecDef],
    sig: &Signature,
    ctx: &ProverCtx,
) -> ProofResult {
    let mut var_sorts: BTreeMap<String, Sort> = vars.iter().cloned().collect();
    let presets = var_sorts.clone();
    for (v, s) in infer_var_sorts(body, sig, &presets) {
        var_sorts.entry(v).or_insert(s);
    }
    let shell_vc = FordVc {
        id: format!("lemma_{name}"),
        method: String::new(),
        block: 0,
        kind: ObKind::Exact,
        provenance: format!("lemma {name}"),
        hypotheses: vec![],
        frames: vec![],
        goal: body.clone(),
        defs: defs.to_vec(),
        sig: sig.clone(),
        var_sorts: var_sorts.clone(),
        family_renames: vec![BTreeMap::new()],
        field_axioms: Vec::new(),
    };
    let goal_tuple: Vec<Term> = vars.iter().map(|(v, _)| Term::Var(v.clone())).collect();

    let mut lp = RoundLoop::new();
    for round in 0..ctx.policy.max_rounds {
        let (locs, ints) = gather_terms(&shell_vc, round, &ctx.policy);
        let mut hyps: Vec<(String, Formula)> = Vec::new();
        for def in defs {
            for args in tuples(&locs, def.params.len(), 4096) {
                hyps.push((format!("unfold {}", def.name), def_equation(def, &args)));
            }
        }
        for prior in &ctx.lemmas {
            for m in sort_instances(&prior.vars, &locs, &ints) {
                hyps.push((
                    format!("lemma {}", prior.name),
                    subst_formula(&prior.body, &m),
                ));
            }
        }
        // induction hypothesis: the lemma itself, except at the goal tuple
        let mut tuple_insts: Vec<Vec<Term>> = vec![vec![]];
        for (_, sort) in vars {
            let domain: &[Term] = match sort {
                Sort::Loc => &locs,
                Sort::Int => &ints,
                _ => &[],
            };
            let mut next = Vec::new();
            for t in &tuple_insts {
                for term in domain {
                    let mut t2 = t.clone();
                    t2.push(term.clone());
                    next.push(t2);
                }
            }
            tuple_insts = next;
        }
        for tuple in tuple_insts {
            if tuple == goal_tuple {
                continue;
            }
            let m: BTreeMap<String, Term> = vars
                .iter()
                .map(|(v, _)| v.clone())
                .zip(tuple.into_iter())
                .collect();
            hyps.push(("induction hypothesis".to_string(), subst_formula(body, &m)));
        }
        let header = vec![format!("lemma {name}"), format!("round {round}")];
        let input = ScriptInput {
            sig,
            var_sorts: &var_sorts,
            hypotheses: &hyps,
            goal: body,
            header: &header,
        };
        if let Some(v) = lp.step(ctx, &format!("lemma_{name}"), round, &input) {
            return lp.finish(v);
        }
    }
    let summary = lp.last_summary.clone();
    lp.finish(Verdict::Unknown { summary })
}

/// Prove `∀x̄. Sp_I(x̄) = Sp_J(x̄)` by the same induction scheme. On
/// success the caller rewrites `Sp_J` to `Sp_I` everywhere downstream.
pub fn prove_same_support(
    i: &str,
    j: &str,
    arity: usize,
    defs: &[RecDef],
    sig: &Signature,
    ctx: &ProverCtx,
) -> ProofResult {
    prove_same_support_class(i, &[j.to_string()], arity, defs, sig, ctx)
}

/// Joint induction for a whole same-support class: mutually referring
/// definitions (a tree's shape, keys, min, max) need all the equalities as
/// a single induction hypothesis.
pub fn prove_same_support_class(
    rep: &str,
    members: &[String],
    arity: usize,
    defs: &[RecDef],
    sig: &Signature,
    ctx: &ProverCtx,
) -> ProofResult {
    let vars: Vec<(String, Sort)> = (0..arity)
        .map(|k| (format!("_sv{}", k + 1), Sort::Loc))
        .collect();
    let args: Vec<Term> = vars.iter().map(|(v, _)| Term::Var(v.clone())).collect();
    let body = Formula::and(
        members
            .iter()
            .map(|j| {
                Formula::Eq(
                    Term::RecFn(crate::ford::sp_name(rep), args.clone()),
                    Term::RecFn(crate::ford::sp_name(j), args.clone()),
                )
            })
            .collect(),
    );
    prove_lemma(
        &format!("same_support_{rep}"),
        &vars,
        &body,
        defs,
        sig,
        ctx,
    )
}
