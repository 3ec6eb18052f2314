//! Orchestration: parse → (optional SL-FL translation) → cloud
//! elimination → obligations → VC transformer → FORD translation →
//! natural-proofs discharge. Same-support declarations are proved first
//! (their equalities feed both lemma proofs and VCs), then lemmas in
//! file order, then all obligations. An optional finite-model oracle
//! cross-checks every obligation at a small bound.

use crate::ast::*;
use crate::cloudify;
use crate::ford;
use crate::oracle;
use crate::oracle::opsem::{CallMode, ExecCtx};
use crate::oracle::triples::{check_triple_bruteforce, TripleKind, TripleSpec, TripleVerdict};
use crate::parser;
use crate::prover::{
    self, solve::SolverCmd, FordVc, InstantiationPolicy, ProverCtx, StoredLemma, Verdict,
};
use crate::slfl;
use crate::vcgen::{self, blocks::ObKind, VcArtifact, VcOptions};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(#[from] parser::ParseError),
    #[error("well-formedness: {0}")]
    Wf(String),
    #[error("translation: {0}")]
    Translate(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub mode_override: Option<LogicMode>,
    /// obligations proved concurrently, each owning its solver process
    pub jobs: usize,
    /// apply the SL-FL translation-size optimizations
    pub slfl_opt: bool,
    pub vc: VcOptions,
    pub policy: InstantiationPolicy,
    pub solver: Option<String>,
    pub emit_smt: Option<PathBuf>,
    pub dump_vcs: Option<PathBuf>,
    pub dump_ford: Option<PathBuf>,
    /// run brute-force oracle cross-checks when set (≤ 4)
    pub oracle_bound: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            mode_override: None,
            jobs: 2,
            slfl_opt: true,
            vc: VcOptions::default(),
            policy: InstantiationPolicy::default(),
            solver: None,
            emit_smt: None,
            dump_vcs: None,
            dump_ford: None,
            oracle_bound: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObligationRecord {
    pub id: String,
    pub method: String,
    pub block: usize,
    pub kind: String,
    pub provenance: String,
    pub verdict: String,
    pub round: Option<usize>,
    pub detail: String,
    pub wall_ms: u128,
    pub scripts: Vec<String>,
    /// oracle cross-check result, when enabled
    pub oracle: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaRecord {
    pub name: String,
    pub verdict: String,
    pub round: Option<usize>,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub file: String,
    pub methods: Vec<String>,
    pub basic_blocks: usize,
    pub permission_checks: usize,
    pub same_support: Vec<LemmaRecord>,
    pub lemmas: Vec<LemmaRecord>,
    pub obligations: Vec<ObligationRecord>,
    pub proved: usize,
    pub unknown: usize,
    pub solver_errors: usize,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn all_proved(&self) -> bool {
        self.solver_errors == 0
            && self.unknown == 0
            && self.obligations.iter().all(|o| o.verdict == "proved")
            && self.lemmas.iter().all(|l| l.verdict == "proved")
    }

    pub fn exit_code(&self) -> i32 {
        if self.solver_errors > 0 {
            3
        } else if self.all_proved() {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "file: {}", self.file);
        let _ = writeln!(
            out,
            "basic blocks: {}  permission checks: {}",
            self.basic_blocks, self.permission_checks
        );
        for l in &self.same_support {
            let _ = writeln!(out, "same-support {}: {}", l.name, l.verdict);
        }
        for l in &self.lemmas {
            let _ = writeln!(out, "lemma {}: {}", l.name, l.verdict);
        }
        for o in &self.obligations {
            let round = o
                .round
                .map(|r| format!(" (round {r})"))
                .unwrap_or_default();
            let oracle = o
                .oracle
                .as_ref()
                .map(|s| format!(" [oracle: {s}]"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:<40} {:<6} {}{round}{oracle}",
                o.id, o.kind, o.verdict
            );
        }
        let _ = writeln!(
            out,
            "proved {}/{} ({} unknown, {} solver errors)",
            self.proved,
            self.obligations.len(),
            self.unknown,
            self.solver_errors
        );
        out
    }
}

/// A module with FL definitions and contracts, cloud-eliminated, ready for
/// VC generation.
pub struct Prepared {
    pub module: SourceModule,
    pub warnings: Vec<String>,
}

/// Parse and prepare: well-formedness, SL-FL→FL translation (per mode),
/// cloud elimination.
pub fn prepare(source: &str, opts: &PipelineOptions) -> Result<Prepared, PipelineError> {
    let module = parser::parse_module(source, opts.mode_override)?;
    let mut warnings = Vec::new();

    // one-way restriction on the signature
    let oneway = wf::check_oneway(&module.signature);
    if !oneway.is_empty() {
        return Err(PipelineError::Wf(
            oneway
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }

    let mut fl_module = module.clone();
    if module.mode == LogicMode::Slfl {
        let (defs, mut warns) = slfl::pi_defs(&module.sl_defs, &module.same_support, opts.slfl_opt)
            .map_err(|e| PipelineError::Translate(e.to_string()))?;
        warnings.append(&mut warns);
        fl_module.fl_defs = defs;
        fl_module.sl_defs.clear();
        for m in &mut fl_module.methods {
            let (pre, post) = match (&m.pre, &m.post) {
                (Spec::Sl(pre), Spec::Sl(post)) => (pre, post),
                _ => continue,
            };
            let tp = if opts.slfl_opt {
                slfl::pi_opt(pre, &module.same_support)
            } else {
                slfl::pi(pre)
            }
            .map_err(|e| PipelineError::Translate(e.to_string()))?;
            warnings.extend(tp.guard_warnings.clone());
            let tq = if opts.slfl_opt {
                slfl::pi_opt(post, &module.same_support)
            } else {
                slfl::pi(post)
            }
            .map_err(|e| PipelineError::Translate(e.to_string()))?;
            warnings.extend(tq.guard_warnings.clone());
            m.pre = Spec::Fl(tp.formula);
            m.post = Spec::Fl(tq.formula);
        }
        // SL-FL disjunction is supported but avoided in the corpus
        for d in &module.sl_defs {
            if let SlRecBody::Formula(f) = &d.body {
                if sl_mentions_or(f) {
                    warnings.push(format!(
                        "definition {} uses disjunction; ite is preferred",
                        d.name
                    ));
                }
            }
        }
    }

    // α-rename definition parameters to reserved names so that adapted
    // bodies (which mention program variables through heap terms) can
    // never capture them during instantiation
    for def in &mut fl_module.fl_defs {
        let fresh: Vec<String> = (0..def.params.len())
            .map(|i| format!("_p{}", i + 1))
            .collect();
        let map: BTreeMap<String, Term> = def
            .params
            .iter()
            .cloned()
            .zip(fresh.iter().map(|p| Term::Var(p.clone())))
            .collect();
        def.body = match &def.body {
            RecBody::Formula(f) => RecBody::Formula(subst_formula(f, &map)),
            RecBody::Term(t) => RecBody::Term(subst_term(t, &map)),
        };
        def.params = fresh;
    }

    // well-formedness of definitions
    for def in &fl_module.fl_defs {
        let diags = wf::check_recdef(def, &fl_module.signature);
        if !diags.is_empty() {
            return Err(PipelineError::Wf(format!(
                "definition {}: {}",
                def.name,
                diags
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )));
        }
    }
    // contracts
    for m in &fl_module.methods {
        let var_sorts: BTreeMap<String, Sort> = m
            .params
            .iter()
            .chain(m.returns.iter())
            .cloned()
            .collect();
        if let Spec::Fl(pre) = &m.pre {
            let diags = wf::check_wellformed(pre, &fl_module.signature, &var_sorts, WfOpts::default());
            if !diags.is_empty() {
                return Err(PipelineError::Wf(format!(
                    "method {} precondition: {}",
                    m.name, diags[0]
                )));
            }
        }
        if let Spec::Fl(post) = &m.post {
            let opts_post = WfOpts {
                allow_old: true,
                allow_forall: false,
            };
            let diags = wf::check_wellformed(post, &fl_module.signature, &var_sorts, opts_post);
            if !diags.is_empty() {
                return Err(PipelineError::Wf(format!(
                    "method {} postcondition: {}",
                    m.name, diags[0]
                )));
            }
        }
        check_conditions_deref_free(&m.body).map_err(PipelineError::Wf)?;
    }

    // cloud elimination on definitions and contracts
    for def in &mut fl_module.fl_defs {
        *def = cloudify::eliminate_def(def).map_err(|e| PipelineError::Translate(e.to_string()))?;
    }
    for m in &mut fl_module.methods {
        if let Spec::Fl(pre) = &m.pre {
            m.pre = Spec::Fl(
                cloudify::eliminate(pre).map_err(|e| PipelineError::Translate(e.to_string()))?,
            );
        }
        if let Spec::Fl(post) = &m.post {
            m.post = Spec::Fl(
                cloudify::eliminate(post)
                    .map_err(|e| PipelineError::Translate(e.to_string()))?,
            );
        }
    }

    Ok(Prepared {
        module: fl_module,
        warnings,
    })
}

use crate::ast::wf::{self, WfOpts};

fn sl_mentions_or(f: &SlFormula) -> bool {
    match f {
        SlFormula::Or(_, _) => true,
        SlFormula::Star(a, b) | SlFormula::And(a, b) | SlFormula::WeakAnd(a, b) => {
            sl_mentions_or(a) || sl_mentions_or(b)
        }
        SlFormula::Ite(g, a, b) => sl_mentions_or(g) || sl_mentions_or(a) || sl_mentions_or(b),
        SlFormula::Exists { body, .. } => sl_mentions_or(body),
        _ => false,
    }
}

fn check_conditions_deref_free(stmts: &[Stmt]) -> Result<(), String> {
    for s in stmts {
        match s {
            Stmt::Assume(f) | Stmt::If { cond: f, .. } => {
                let mut bad = false;
                visit_formula(f, &mut |node| match node {
                    FormulaOrTerm::Term(Term::Field(_, _))
                    | FormulaOrTerm::Term(Term::RecFn(_, _))
                    | FormulaOrTerm::Term(Term::Sp(_))
                    | FormulaOrTerm::Formula(Formula::RecPred(_, _)) => bad = true,
                    _ => {}
                });
                if bad {
                    return Err("branch/assume conditions must be dereference-free".into());
                }
                if let Stmt::If {
                    then_branch,
                    else_branch,
                    ..
                } = s
                {
                    check_conditions_deref_free(then_branch)?;
                    check_conditions_deref_free(else_branch)?;
                }
            }
            _ => {}
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// FORD lowering of one artifact
// ---------------------------------------------------------------------------

fn split_conjuncts(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::And(fs) => fs.clone(),
        other => vec![other.clone()],
    }
}

/// Lower an assembled FL artifact to FORD, applying same-support merges.
pub fn lower_artifact(
    art: &VcArtifact,
    merges: &BTreeMap<String, String>,
    method_vars: &BTreeMap<String, Sort>,
) -> Result<FordVc, PipelineError> {
    let mut sig = art.sig.clone();
    let mut defs = ford::derive_support_defs(&art.defs, &mut sig)
        .map_err(|e| PipelineError::Translate(e.to_string()))?;

    // extend base-level support merges to every family
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for fam in &art.families {
        for (base_j, base_i) in merges {
            // merges map SpJ -> SpI at base level; lift through the family
            // rename of the underlying symbols
            let strip = |sp: &str| sp.trim_start_matches("Sp").to_string();
            let j = strip(base_j);
            let i = strip(base_i);
            if let (Some(jf), Some(if_)) = (fam.rename.get(&j), fam.rename.get(&i)) {
                rename.insert(ford::sp_name(jf), ford::sp_name(if_));
            }
        }
    }

    let apply = |f: &Formula| -> Result<Formula, PipelineError> {
        let translated = ford::nabla(f).map_err(|e| PipelineError::Translate(e.to_string()))?;
        Ok(ford::merge_support_symbols(&translated, &rename))
    };

    let hypotheses: Vec<Formula> = split_conjuncts(&art.antecedent)
        .iter()
        .map(|f| apply(f))
        .collect::<Result<_, _>>()?;
    let frames: Vec<Formula> = art
        .frames
        .iter()
        .map(|f| apply(f))
        .collect::<Result<_, _>>()?;
    let goal = apply(&art.consequent)?;

    // rewrite definition bodies and drop merged support definitions
    defs = defs
        .into_iter()
        .filter(|d| !rename.contains_key(&d.name))
        .map(|d| RecDef {
            name: d.name.clone(),
            params: d.params.clone(),
            body: match &d.body {
                RecBody::Formula(f) => {
                    RecBody::Formula(ford::merge_support_symbols(f, &rename))
                }
                RecBody::Term(t) => {
                    let wrapped = Formula::IsEmpty(Term::Singleton(Box::new(t.clone())));
                    match ford::merge_support_symbols(&wrapped, &rename) {
                        Formula::IsEmpty(Term::Singleton(inner)) => RecBody::Term(*inner),
                        _ => unreachable!(),
                    }
                }
            },
            kind: d.kind,
        })
        .collect();
    for (from, _) in &rename {
        sig.rec_sigs.remove(from);
    }

    // variable sorts: program variables plus whatever the formulas mention
    let mut presets = method_vars.clone();
    let everything = Formula::and(
        hypotheses
            .iter()
            .cloned()
            .chain(std::iter::once(goal.clone()))
            .collect(),
    );
    presets = crate::ast::wf::infer_var_sorts(&everything, &sig, &presets);

    // defined heap functions, FORD-translated
    let mut field_axioms = Vec::new();
    for fam in &art.families {
        for (name, param, body) in &fam.field_defs {
            let translated = ford::nabla_term(body)
                .map_err(|e| PipelineError::Translate(e.to_string()))?;
            let wrapped = Formula::IsEmpty(Term::Singleton(Box::new(translated)));
            let merged = match ford::merge_support_symbols(&wrapped, &rename) {
                Formula::IsEmpty(Term::Singleton(inner)) => *inner,
                _ => unreachable!(),
            };
            field_axioms.push((name.clone(), param.clone(), merged));
        }
    }

    // family renames at FORD level (for lemma lifting)
    let family_renames: Vec<BTreeMap<String, String>> = art
        .families
        .iter()
        .map(|fam| {
            let mut m = BTreeMap::new();
            for (base, renamed) in &fam.rename {
                m.insert(base.clone(), renamed.clone());
                let sp_from = ford::sp_name(base);
                let sp_to_raw = ford::sp_name(renamed);
                let sp_to = rename.get(&sp_to_raw).cloned().unwrap_or(sp_to_raw);
                m.insert(sp_from, sp_to);
            }
            m
        })
        .collect();

    Ok(FordVc {
        id: art.id.clone(),
        method: art.method.clone(),
        block: art.block,
        kind: art.kind,
        provenance: art.provenance.clone(),
        hypotheses,
        frames,
        goal,
        defs,
        sig,
        var_sorts: presets,
        family_renames,
        field_axioms,
    })
}

// ---------------------------------------------------------------------------
// run_verify / run_bench
// ---------------------------------------------------------------------------

pub fn solver_from_options(opts: &PipelineOptions) -> SolverCmd {
    match &opts.solver {
        Some(s) => SolverCmd::parse(s),
        None => prover::solve::default_solver(),
    }
}

pub fn run_verify_source(
    file_label: &str,
    source: &str,
    opts: &PipelineOptions,
) -> Result<RunReport, PipelineError> {
    let prepared = prepare(source, opts)?;
    let module = &prepared.module;
    let mut report = RunReport {
        file: file_label.to_string(),
        methods: module.methods.iter().map(|m| m.name.clone()).collect(),
        basic_blocks: 0,
        permission_checks: 0,
        same_support: Vec::new(),
        lemmas: Vec::new(),
        obligations: Vec::new(),
        proved: 0,
        unknown: 0,
        solver_errors: 0,
        warnings: prepared.warnings.clone(),
    };

    let solver = solver_from_options(opts);
    let mut ctx = ProverCtx::new(opts.policy.clone(), solver);
    ctx.emit_dir = opts.emit_smt.clone();

    // base-level FORD definitions for same-support and lemma proofs
    let mut base_sig = module.signature.clone();
    let base_defs = ford::derive_support_defs(&module.fl_defs, &mut base_sig)
        .map_err(|e| PipelineError::Translate(e.to_string()))?;

    // stage 1: same-support declarations, proved jointly per class
    // (mutually referring definitions need each other's equalities as
    // induction hypotheses)
    let mut merges: BTreeMap<String, String> = BTreeMap::new();
    let mut classes: Vec<(String, Vec<String>)> = Vec::new();
    for (i, j) in &module.same_support {
        if let Some((rep, members)) = classes
            .iter_mut()
            .find(|(rep, members)| rep == i || members.contains(i) || rep == j || members.contains(j))
        {
            for sym in [i, j] {
                if sym != rep && !members.contains(sym) {
                    members.push(sym.clone());
                }
            }
        } else {
            classes.push((i.clone(), vec![j.clone()]));
        }
    }
    for (rep, members) in &classes {
        let arity = module
            .signature
            .rec_sigs
            .get(rep)
            .map(|r| r.params.len())
            .unwrap_or(1);
        let res =
            prover::prove_same_support_class(rep, members, arity, &base_defs, &base_sig, &ctx);
        for j in members {
            report.same_support.push(LemmaRecord {
                name: format!("Sp{rep} = Sp{j}"),
                verdict: res.verdict.label().to_string(),
                round: match res.verdict {
                    Verdict::Proved { round } => Some(round),
                    _ => None,
                },
                wall_ms: res.wall.as_millis(),
            });
            if res.verdict.is_proved() {
                merges.insert(ford::sp_name(j), ford::sp_name(rep));
            }
        }
    }
    // apply merges to the base definitions used by lemma proofs
    let base_defs_merged: Vec<RecDef> = base_defs
        .iter()
        .filter(|d| !merges.contains_key(&d.name))
        .map(|d| RecDef {
            name: d.name.clone(),
            params: d.params.clone(),
            body: match &d.body {
                RecBody::Formula(f) => {
                    RecBody::Formula(ford::merge_support_symbols(f, &merges))
                }
                RecBody::Term(t) => {
                    let wrapped = Formula::IsEmpty(Term::Singleton(Box::new(t.clone())));
                    match ford::merge_support_symbols(&wrapped, &merges) {
                        Formula::IsEmpty(Term::Singleton(inner)) => RecBody::Term(*inner),
                        _ => unreachable!(),
                    }
                }
            },
            kind: d.kind,
        })
        .collect();
    let mut base_sig_merged = base_sig.clone();
    for from in merges.keys() {
        base_sig_merged.rec_sigs.remove(from);
    }

    // stage 2: lemmas in file order; proved lemmas join the store
    for lemma in &module.lemmas {
        let body = cloudify::eliminate(&lemma.body)
            .map_err(|e| PipelineError::Translate(e.to_string()))?;
        let ford_body = ford::nabla(&body).map_err(|e| PipelineError::Translate(e.to_string()))?;
        let ford_body = ford::merge_support_symbols(&ford_body, &merges);
        let sorts = crate::ast::wf::infer_var_sorts(&ford_body, &base_sig_merged, &BTreeMap::new());
        let vars: Vec<(String, Sort)> = free_vars(&ford_body)
            .into_iter()
            .map(|v| {
                let s = sorts.get(&v).copied().unwrap_or(Sort::Loc);
                (v, s)
            })
            .collect();
        let res = prover::prove_lemma(
            &lemma.name,
            &vars,
            &ford_body,
            &base_defs_merged,
            &base_sig_merged,
            &ctx,
        );
        report.lemmas.push(LemmaRecord {
            name: lemma.name.clone(),
            verdict: res.verdict.label().to_string(),
            round: match res.verdict {
                Verdict::Proved { round } => Some(round),
                _ => None,
            },
            wall_ms: res.wall.as_millis(),
        });
        if res.verdict.is_proved() {
            ctx.lemmas.push(StoredLemma {
                name: lemma.name.clone(),
                vars,
                body: ford_body,
            });
        }
    }

    // stage 3: obligations — lowered sequentially, proved concurrently
    // (each proof owns its solver process; the lemma store is immutable
    // from here on)
    let mut queue: Vec<(usize, &Method, VcArtifact, FordVc)> = Vec::new();
    for method in &module.methods {
        let vcs = vcgen::method_vcs(module, method, opts.vc);
        report.basic_blocks += vcs.basic_blocks;
        report.permission_checks += vcs.artifacts.len();
        let method_vars = parser::method_var_sorts(method, module);
        for art in vcs.artifacts {
            if let Some(dir) = &opts.dump_vcs {
                std::fs::create_dir_all(dir)?;
                let text = format!(
                    "# method: {}\n# block: {}\n# kind: {}\n# provenance: {}\n{}\n",
                    art.method,
                    art.block,
                    art.kind,
                    art.provenance,
                    parser::pretty::print_formula(&art.vc)
                );
                std::fs::write(dir.join(format!("{}.flv.vc", art.id)), text)?;
            }
            let ford_vc = lower_artifact(&art, &merges, &method_vars)?;
            if let Some(dir) = &opts.dump_ford {
                std::fs::create_dir_all(dir)?;
                let enc = prover::smt::Encoder {
                    sig: &ford_vc.sig,
                    var_sorts: &ford_vc.var_sorts,
                };
                let mut text = String::new();
                for h in &ford_vc.hypotheses {
                    text.push_str(&format!(
                        "(hypothesis {})\n",
                        enc.formula(h).map_err(|e| PipelineError::Translate(e.to_string()))?
                    ));
                }
                text.push_str(&format!(
                    "(goal {})\n",
                    enc.formula(&ford_vc.goal)
                        .map_err(|e| PipelineError::Translate(e.to_string()))?
                ));
                std::fs::write(dir.join(format!("{}.ford", art.id)), text)?;
            }
            let idx = queue.len();
            queue.push((idx, method, art, ford_vc));
        }
    }

    let jobs = opts.jobs.max(1);
    let mut results: Vec<Option<ObligationRecord>> = vec![None; queue.len()];
    std::thread::scope(|scope| {
        let ctx = &ctx;
        let opts = &opts;
        let chunks: Vec<Vec<&(usize, &Method, VcArtifact, FordVc)>> = {
            let mut cs: Vec<Vec<&(usize, &Method, VcArtifact, FordVc)>> =
                (0..jobs).map(|_| Vec::new()).collect();
            for item in &queue {
                cs[item.0 % jobs].push(item);
            }
            cs
        };
        let mut handles = Vec::new();
        for chunk in chunks {
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                for (idx, method, art, ford_vc) in chunk {
                    let res = prover::prove_vc(ford_vc, ctx);
                    let oracle_note = match opts.oracle_bound {
                        Some(bound) if bound <= 4 => {
                            Some(oracle_cross_check(module, method, art, bound))
                        }
                        _ => None,
                    };
                    out.push((
                        *idx,
                        ObligationRecord {
                            id: art.id.clone(),
                            method: art.method.clone(),
                            block: art.block,
                            kind: art.kind.to_string(),
                            provenance: art.provenance.clone(),
                            verdict: res.verdict.label().to_string(),
                            round: match res.verdict {
                                Verdict::Proved { round } => Some(round),
                                _ => None,
                            },
                            detail: match &res.verdict {
                                Verdict::Unknown { summary } => summary.clone(),
                                Verdict::SolverError(e) => e.clone(),
                                _ => String::new(),
                            },
                            wall_ms: res.wall.as_millis(),
                            scripts: res
                                .scripts
                                .iter()
                                .map(|p| p.to_string_lossy().to_string())
                                .collect(),
                            oracle: oracle_note,
                        },
                    ));
                }
                out
            }));
        }
        for h in handles {
            for (idx, rec) in h.join().expect("prover worker panicked") {
                results[idx] = Some(rec);
            }
        }
    });
    for rec in results.into_iter().flatten() {
        match rec.verdict.as_str() {
            "proved" => report.proved += 1,
            "solver-error" => report.solver_errors += 1,
            _ => report.unknown += 1,
        }
        report.obligations.push(rec);
    }
    Ok(report)
}

/// Brute-force cross-check of one obligation at a small bound. Returns a
/// short verdict string; a "counterexample" paired with a "proved" SMT
/// verdict would indicate a soundness bug.
fn oracle_cross_check(
    module: &SourceModule,
    method: &Method,
    art: &VcArtifact,
    bound: usize,
) -> String {
    let pre = match &method.pre {
        Spec::Fl(f) => f.clone(),
        _ => return "skipped".to_string(),
    };
    // reconstruct the obligation triple
    let obligations = vcgen::blocks::generate_obligations(
        method,
        &module
            .signature
            .pointer_fields()
            .cloned()
            .collect::<Vec<_>>(),
    );
    let Some(ob) = obligations.iter().find(|o| {
        o.block == art.block && o.kind == art.kind && o.provenance.to_string() == art.provenance
    }) else {
        return "skipped".to_string();
    };
    let has_calls = ob.stmts.iter().any(|s| matches!(s, Stmt::Call { .. }));
    let bound = if has_calls { bound.min(3) } else { bound };
    let (post, kind) = match ob.kind {
        ObKind::Exact => (
            match &method.post {
                Spec::Fl(f) => f.clone(),
                _ => return "skipped".to_string(),
            },
            TripleKind::Exact,
        ),
        ObKind::Rp => {
            let (callee_name, args) = ob.call.as_ref().unwrap();
            let callee = module.method(callee_name).unwrap();
            let pre_g = match &callee.pre {
                Spec::Fl(f) => f.clone(),
                _ => return "skipped".to_string(),
            };
            let subst: BTreeMap<String, Term> = callee
                .params
                .iter()
                .map(|(p, _)| p.clone())
                .zip(args.iter().cloned())
                .collect();
            (subst_formula(&pre_g, &subst), TripleKind::Rp)
        }
        ObKind::Hp => (
            oracle::triples::hp_member(ob.checked_var.as_ref().unwrap()),
            TripleKind::Hp,
        ),
    };
    let ptr_fields: Vec<String> = module.signature.pointer_fields().cloned().collect();
    let data_fields: Vec<String> = module.signature.data_fields().cloned().collect();
    let enum_cfg = oracle::EnumCfg::new(
        bound,
        &ptr_fields.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        &data_fields.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
    );
    let mut exec = ExecCtx::new(module.methods.iter(), &module.fl_defs, bound);
    exec.mode = CallMode::Modular;
    let var_sorts = parser::method_var_sorts(method, module);
    let triple = TripleSpec {
        pre: &pre,
        stmts: &ob.stmts,
        post: &post,
        kind,
    };
    match check_triple_bruteforce(&triple, &module.fl_defs, &exec, &enum_cfg, &var_sorts) {
        TripleVerdict::Valid => format!("valid at bound {bound}"),
        TripleVerdict::UnknownAtBound => format!("unknown at bound {bound}"),
        TripleVerdict::Counterexample { reason, .. } => {
            format!("counterexample at bound {bound}: {reason}")
        }
    }
}

pub fn run_verify(path: &std::path::Path, opts: &PipelineOptions) -> Result<RunReport, PipelineError> {
    let source = std::fs::read_to_string(path)?;
    run_verify_source(&path.display().to_string(), &source, opts)
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub file: String,
    pub basic_blocks: usize,
    pub permission_checks: usize,
    pub proved: usize,
    pub total: usize,
    pub verdict: String,
    pub wall_ms: u128,
    pub error: Option<String>,
}

/// Run every `.flv` file in a directory; per-file failures are isolated.
pub fn run_bench(dir: &std::path::Path, opts: &PipelineOptions) -> Result<BenchReport, PipelineError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "flv"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for f in files {
        let started = std::time::Instant::now();
        match run_verify(&f, opts) {
            Ok(rep) => rows.push(BenchRow {
                file: f.file_name().unwrap().to_string_lossy().to_string(),
                basic_blocks: rep.basic_blocks,
                permission_checks: rep.permission_checks,
                proved: rep.proved,
                total: rep.obligations.len(),
                verdict: if rep.all_proved() {
                    "proved".to_string()
                } else if rep.solver_errors > 0 {
                    "solver-error".to_string()
                } else {
                    "unknown".to_string()
                },
                wall_ms: started.elapsed().as_millis(),
                error: None,
            }),
            Err(e) => rows.push(BenchRow {
                file: f.file_name().unwrap().to_string_lossy().to_string(),
                basic_blocks: 0,
                permission_checks: 0,
                proved: 0,
                total: 0,
                verdict: "error".to_string(),
                wall_ms: started.elapsed().as_millis(),
                error: Some(e.to_string()),
            }),
        }
    }
    Ok(BenchReport { rows })
}
