//! Verification-condition generation: the logical-configuration
//! transformer over basic blocks.
//!
//! A logical configuration is `(T, A, H, Fr, RD)`: the transformation
//! formula, the allocated-set term, the per-field heap term map, the frame
//! rules, and the recursive definitions adapted to intermediate heaps.
//! Each heap the block reaches gets a definition family `I_k` (`List_1`,
//! `Keys_1`, ...) obtained by substituting `H(f)` for every field in every
//! definition body; frame rules transfer definition values (and their
//! supports) across heaps when the mutated set misses their support. By
//! default new families and frame rules appear only at key points (before
//! and after calls and at block end), batching intermediate mutations;
//! per-statement generation is kept for differential testing.

pub mod blocks;

use crate::ast::*;
use blocks::{generate_obligations, ObKind, Obligation};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy)]
pub struct VcOptions {
    pub frame_at_keypoints: bool,
}

impl Default for VcOptions {
    fn default() -> Self {
        VcOptions {
            frame_at_keypoints: true,
        }
    }
}

/// One adapted-definition family: the base definitions re-interpreted over
/// the heap `H_tag`.
#[derive(Debug, Clone)]
pub struct DefFamily {
    pub tag: usize,
    /// field -> (param, body): `H(f) = λ param. body`
    pub heap: BTreeMap<String, (String, Term)>,
    /// base symbol -> adapted symbol (identity for the initial family)
    pub rename: BTreeMap<String, String>,
    pub defs: Vec<RecDef>,
    /// heap functions introduced at this family: `(name, param, body)`
    /// defines a new mutable symbol `name(param) = body`; adapted
    /// definitions dereference through these symbols so their supports
    /// are the new heap's footprints
    pub field_defs: Vec<(String, String, Term)>,
}

/// A frame rule `fr(X, H_from, H_to)`.
#[derive(Debug, Clone)]
pub struct FrameRule {
    pub mutated: Term,
    pub from: usize,
    pub to: usize,
}

/// The assembled artifact for one obligation.
#[derive(Debug, Clone)]
pub struct VcArtifact {
    pub id: String,
    pub method: String,
    pub block: usize,
    pub kind: ObKind,
    pub provenance: String,
    /// frame rules, each a universally quantified FL formula
    pub frames: Vec<Formula>,
    /// the transformation formula T
    pub antecedent: Formula,
    /// β (with its support condition for Exact/RP)
    pub consequent: Formula,
    /// `(⋀ Fr ∧ T) ⇒ consequent`
    pub vc: Formula,
    /// every definition in scope: base defs plus all adapted families
    pub defs: Vec<RecDef>,
    /// signature extended with fresh call functions and adapted symbols
    pub sig: Signature,
    /// structured frame rules (for thrifty instantiation)
    pub frame_rules: Vec<FrameRule>,
    /// adapted families (for lemma lifting)
    pub families: Vec<DefFamily>,
}

pub struct MethodVcs {
    pub method: String,
    pub basic_blocks: usize,
    pub artifacts: Vec<VcArtifact>,
}

/// The logical configuration threaded through a basic block.
struct Config<'a> {
    t: Vec<Formula>,
    alloc: Term,
    heap: BTreeMap<String, (String, Term)>,
    frames: Vec<FrameRule>,
    families: Vec<DefFamily>,
    cur_family: usize,
    last_keypoint_family: usize,
    pending_mutations: Vec<Term>,
    sig: Signature,
    gen: NameGen,
    module: &'a SourceModule,
    opts: VcOptions,
}

impl<'a> Config<'a> {
    fn new(module: &'a SourceModule, pre: &Formula, opts: VcOptions) -> Self {
        let mut sig = module.signature.clone();
        let mut gen = NameGen::new();
        for name in sig.consts.keys().chain(sig.fields.keys()) {
            gen.reserve(name);
        }
        for name in sig.rec_sigs.keys() {
            gen.reserve(name);
        }
        for m in &module.methods {
            gen.reserve(&m.name);
            for (v, _) in m.params.iter().chain(m.returns.iter()) {
                gen.reserve(v);
            }
        }
        // base family: identity heap, identity renaming
        let family0 = DefFamily {
            tag: 0,
            heap: BTreeMap::new(),
            rename: module
                .fl_defs
                .iter()
                .map(|d| (d.name.clone(), d.name.clone()))
                .collect(),
            defs: module.fl_defs.clone(),
            field_defs: Vec::new(),
        };
        // the initial allocated set is the support of the precondition
        let alloc = Term::Sp(Box::new(SpArg::Formula(pre.clone())));
        for d in &module.fl_defs {
            sig.rec_sigs
                .entry(d.name.clone())
                .or_insert_with(|| RecSig {
                    params: vec![Sort::Loc; d.params.len()],
                    result: Sort::Bool,
                });
        }
        Config {
            t: vec![pre.clone()],
            alloc,
            heap: BTreeMap::new(),
            frames: Vec::new(),
            families: vec![family0],
            cur_family: 0,
            last_keypoint_family: 0,
            pending_mutations: Vec::new(),
            sig,
            gen,
            module,
            opts,
        }
    }

    fn family(&self, tag: usize) -> &DefFamily {
        &self.families[tag]
    }

    /// Apply the current heap to a field lookup `f(arg)`.
    fn heap_apply(&self, field: &str, arg: Term) -> Term {
        match self.heap.get(field) {
            Some((param, body)) => {
                let mut m = BTreeMap::new();
                m.insert(param.clone(), arg);
                subst_term(body, &m)
            }
            None => Term::Field(field.to_string(), Box::new(arg)),
        }
    }

    /// Create (or reuse) the definition family for the current heap.
    /// Mutated fields get a fresh defined heap function `f_hk(_h) = body`
    /// (a mutable symbol, so adapted definitions keep dereference
    /// supports), and the heap map is reset to route through it.
    fn materialize_family(&mut self) -> usize {
        if let Some(f) = self.families.iter().find(|f| f.heap == self.heap) {
            return f.tag;
        }
        let tag = self.families.len();
        let mut field_defs = Vec::new();
        let dirty: Vec<(String, (String, Term))> = self
            .heap
            .iter()
            .filter(|(_, (param, body))| {
                !matches!(body, Term::Field(_, a) if matches!(a.as_ref(), Term::Var(v) if v == param))
            })
            .map(|(f, d)| (f.clone(), d.clone()))
            .collect();
        for (f, (param, body)) in dirty {
            let sort = *self.sig.fields.get(&f).unwrap_or(&Sort::Loc);
            let defined = self.gen.fresh(&format!("{f}_h{tag}"));
            self.sig.fields.insert(defined.clone(), sort);
            field_defs.push((defined.clone(), param.clone(), body));
            self.heap.insert(
                f,
                (
                    param.clone(),
                    Term::Field(defined, Box::new(Term::Var(param))),
                ),
            );
        }
        let mut rename = BTreeMap::new();
        for d in &self.module.fl_defs {
            let name = self.gen.fresh(&format!("{}_{}", d.name, tag));
            rename.insert(d.name.clone(), name);
        }
        let defs: Vec<RecDef> = self
            .module
            .fl_defs
            .iter()
            .map(|d| adapt_def(d, &self.heap, &rename))
            .collect();
        for d in &defs {
            self.sig.rec_sigs.insert(
                d.name.clone(),
                RecSig {
                    params: vec![Sort::Loc; d.params.len()],
                    result: match &d.body {
                        RecBody::Formula(_) => Sort::Bool,
                        RecBody::Term(t) => {
                            crate::ast::wf::infer_term_sort(t, &self.sig, &BTreeMap::new())
                                .unwrap_or(Sort::Int)
                        }
                    },
                },
            );
        }
        self.families.push(DefFamily {
            tag,
            heap: self.heap.clone(),
            rename,
            defs,
            field_defs,
        });
        tag
    }

    /// Record a heap change at `mutated` (a singleton term). In
    /// per-statement mode this immediately materializes the new family and
    /// its frame rule; in key-point mode it accumulates.
    fn heap_changed(&mut self, mutated: Term) {
        if self.opts.frame_at_keypoints {
            self.pending_mutations.push(mutated);
        } else {
            let from = self.cur_family;
            let to = self.materialize_family();
            if to != from {
                self.frames.push(FrameRule { mutated, from, to });
                self.cur_family = to;
                self.last_keypoint_family = to;
            }
        }
    }

    /// Key point: batch accumulated mutations into one family + frame rule.
    fn keypoint(&mut self) {
        if !self.opts.frame_at_keypoints {
            return;
        }
        if self.pending_mutations.is_empty() {
            return;
        }
        let from = self.last_keypoint_family;
        let to = self.materialize_family();
        if to != from {
            let mutated = union_of(std::mem::take(&mut self.pending_mutations));
            self.frames.push(FrameRule { mutated, from, to });
            self.cur_family = to;
            self.last_keypoint_family = to;
        } else {
            self.pending_mutations.clear();
        }
    }

    fn step(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::Assign { dst, src } => {
                self.t.push(Formula::Eq(Term::Var(dst.clone()), src.clone()));
            }
            Stmt::Load { dst, obj, field } => {
                let rhs = self.heap_apply(field, Term::Var(obj.clone()));
                self.t.push(Formula::Eq(Term::Var(dst.clone()), rhs));
            }
            Stmt::Store { obj, field, src } => {
                let param = "_h".to_string();
                let old = self.heap_apply(field, Term::Var(param.clone()));
                let body = Term::Ite(
                    Box::new(Formula::Eq(
                        Term::Var(param.clone()),
                        Term::Var(obj.clone()),
                    )),
                    Box::new(src.clone()),
                    Box::new(old),
                );
                self.heap.insert(field.clone(), (param, body));
                self.heap_changed(Term::Singleton(Box::new(Term::Var(obj.clone()))));
            }
            Stmt::Alloc(x) => {
                self.t.push(Formula::Not(Box::new(Formula::Member(
                    Term::Var(x.clone()),
                    self.alloc.clone(),
                ))));
                // allocation returns a location fresh in the whole
                // universe, in particular distinct from nil
                self.t.push(Formula::Not(Box::new(Formula::Eq(
                    Term::Var(x.clone()),
                    Term::Nil,
                ))));
                self.alloc = Term::Union(
                    Box::new(self.alloc.clone()),
                    Box::new(Term::Singleton(Box::new(Term::Var(x.clone())))),
                );
                let fields: Vec<(String, Sort)> = self
                    .sig
                    .fields
                    .iter()
                    .map(|(f, s)| (f.clone(), *s))
                    .collect();
                for (f, sort) in fields {
                    let param = "_h".to_string();
                    let old = self.heap_apply(&f, Term::Var(param.clone()));
                    let default = match sort {
                        Sort::Loc => Term::Nil,
                        _ => Term::IntLit(0),
                    };
                    let body = Term::Ite(
                        Box::new(Formula::Eq(
                            Term::Var(param.clone()),
                            Term::Var(x.clone()),
                        )),
                        Box::new(default),
                        Box::new(old),
                    );
                    self.heap.insert(f, (param, body));
                }
                self.heap_changed(Term::Singleton(Box::new(Term::Var(x.clone()))));
            }
            Stmt::Free(x) => {
                // H's terms do not change; the domain does, which the A
                // term tracks exactly (re-adaptation is a family cache hit)
                self.alloc = Term::Diff(
                    Box::new(self.alloc.clone()),
                    Box::new(Term::Singleton(Box::new(Term::Var(x.clone())))),
                );
            }
            Stmt::Assume(f) => self.t.push(f.clone()),
            Stmt::Call { outs, method, args } => {
                self.keypoint();
                let fam_before = self.cur_family;
                let callee = self
                    .module
                    .method(method)
                    .unwrap_or_else(|| panic!("unknown method {method}"));
                let pre_inst = self.instantiate_pre(callee, args, fam_before);
                let sp_pre = Term::Sp(Box::new(SpArg::Formula(pre_inst.clone())));

                // fresh function per field, guarded by the pre's support
                let new_tag = self.families.len();
                let fields: Vec<(String, Sort)> = self
                    .sig
                    .fields
                    .iter()
                    .filter(|(f, _)| self.module.signature.fields.contains_key(*f))
                    .map(|(f, s)| (f.clone(), *s))
                    .collect();
                for (f, sort) in fields {
                    let fresh_name = self.gen.fresh(&format!("{f}{new_tag}"));
                    self.sig.fields.insert(fresh_name.clone(), sort);
                    let param = "_h".to_string();
                    let old = self.heap_apply(&f, Term::Var(param.clone()));
                    let body = Term::Ite(
                        Box::new(Formula::Not(Box::new(Formula::Member(
                            Term::Var(param.clone()),
                            sp_pre.clone(),
                        )))),
                        Box::new(old),
                        Box::new(Term::Field(fresh_name, Box::new(Term::Var(param.clone())))),
                    );
                    self.heap.insert(f, (param, body));
                }
                let fam_after = self.materialize_family();
                let post_inst =
                    self.instantiate_post(callee, args, outs, fam_before, fam_after);
                let sp_post = Term::Sp(Box::new(SpArg::Formula(post_inst.clone())));
                self.t.push(post_inst);
                // the callee's final footprint cannot collide with the
                // caller's retained region (call-by-value premise:
                // (A \ A_g) ∩ A'_g = ∅); callee-allocated locations are
                // fresh with respect to everything the caller kept
                self.t.push(Formula::IsEmpty(Term::Inter(
                    Box::new(Term::Diff(
                        Box::new(self.alloc.clone()),
                        Box::new(sp_pre.clone()),
                    )),
                    Box::new(sp_post.clone()),
                )));
                self.alloc = Term::Union(
                    Box::new(Term::Diff(
                        Box::new(self.alloc.clone()),
                        Box::new(sp_pre.clone()),
                    )),
                    Box::new(sp_post),
                );
                self.frames.push(FrameRule {
                    mutated: sp_pre,
                    from: fam_before,
                    to: fam_after,
                });
                self.cur_family = fam_after;
                self.last_keypoint_family = fam_after;
                self.pending_mutations.clear();
            }
            Stmt::Return => {}
            Stmt::If { .. } => panic!("vc_step expects straight-line statements"),
        }
    }

    /// `α_H[x̄ ← ā]`: the callee precondition instantiated at the call.
    fn instantiate_pre(&self, callee: &Method, args: &[Term], fam: usize) -> Formula {
        let pre = match &callee.pre {
            Spec::Fl(f) => f,
            Spec::Sl(_) => panic!("contracts must be translated to FL before VC generation"),
        };
        let subst: BTreeMap<String, Term> = callee
            .params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(args.iter().cloned())
            .collect();
        let inst = subst_formula(pre, &subst);
        let family = self.family(fam);
        rewrite_heap_formula(&inst, &family.heap, &family.rename)
    }

    /// `β_H'[x̄ ← ā, ȳ ← b̄]` with `Old(e)` resolved against the heap at
    /// call entry (cloud-wrapped, so its support stays empty).
    fn instantiate_post(
        &mut self,
        callee: &Method,
        args: &[Term],
        outs: &[String],
        fam_before: usize,
        fam_after: usize,
    ) -> Formula {
        let post = match &callee.post {
            Spec::Fl(f) => f,
            Spec::Sl(_) => panic!("contracts must be translated to FL before VC generation"),
        };
        let mut subst: BTreeMap<String, Term> = callee
            .params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(args.iter().cloned())
            .collect();
        for ((r, _), o) in callee.returns.iter().zip(outs.iter()) {
            subst.insert(r.clone(), Term::Var(o.clone()));
        }
        let inst = subst_formula(post, &subst);
        // pull Old(e) subtrees out, adapt the remainder to the post-call
        // heap, then plug the entry-heap snapshots back in cloud-wrapped
        let (stripped, bindings) = strip_old(&inst, &mut self.gen);
        let after = self.family(fam_after);
        let adapted = rewrite_heap_formula(&stripped, &after.heap, &after.rename);
        let before = self.family(fam_before);
        let marker_subst: BTreeMap<String, Term> = bindings
            .into_iter()
            .map(|(name, e)| {
                let snap = rewrite_heap_term(&e, &before.heap, &before.rename);
                (name, Term::Cloud(Box::new(snap)))
            })
            .collect();
        subst_formula(&adapted, &marker_subst)
    }

    /// Frame-rule formula: for every base definition `I`,
    /// `∀ȳ. (X ∩ Sp(I_from(ȳ)) = ∅) ⇒ I_to(ȳ) = I_from(ȳ) ∧
    ///  Sp(I_to(ȳ)) = Sp(I_from(ȳ))`.
    fn frame_formula(&self, rule: &FrameRule) -> Formula {
        let from = self.family(rule.from);
        let to = self.family(rule.to);
        let mut conjuncts = Vec::new();
        for base in &self.module.fl_defs {
            let vars: Vec<String> = (0..base.params.len())
                .map(|i| format!("_fr{}", i + 1))
                .collect();
            let args: Vec<Term> = vars.iter().map(|v| Term::Var(v.clone())).collect();
            let name_from = from.rename[&base.name].clone();
            let name_to = to.rename[&base.name].clone();
            let sp_of = |name: &str, args: &[Term]| {
                Term::Sp(Box::new(match &base.body {
                    RecBody::Formula(_) => {
                        SpArg::Formula(Formula::RecPred(name.to_string(), args.to_vec()))
                    }
                    RecBody::Term(_) => {
                        SpArg::Term(Term::RecFn(name.to_string(), args.to_vec()))
                    }
                }))
            };
            let hyp = Formula::IsEmpty(Term::Inter(
                Box::new(rule.mutated.clone()),
                Box::new(sp_of(&name_from, &args)),
            ));
            let value_eq = match &base.body {
                RecBody::Formula(_) => Formula::Iff(
                    Box::new(Formula::RecPred(name_to.clone(), args.clone())),
                    Box::new(Formula::RecPred(name_from.clone(), args.clone())),
                ),
                RecBody::Term(_) => Formula::Eq(
                    Term::RecFn(name_to.clone(), args.clone()),
                    Term::RecFn(name_from.clone(), args.clone()),
                ),
            };
            let support_eq = Formula::Eq(sp_of(&name_to, &args), sp_of(&name_from, &args));
            conjuncts.push(Formula::ForallLoc {
                vars,
                body: Box::new(Formula::implies(
                    hyp,
                    Formula::and(vec![value_eq, support_eq]),
                )),
            });
        }
        Formula::and(conjuncts)
    }
}

fn union_of(parts: Vec<Term>) -> Term {
    let mut it = parts.into_iter();
    let first = it.next().unwrap_or(Term::Empty(Sort::SetLoc));
    it.fold(first, |acc, p| Term::Union(Box::new(acc), Box::new(p)))
}

/// Adapt one definition to a heap: substitute `H(f)` for every field and
/// rename every recursive symbol to its family version.
pub fn adapt_def(
    def: &RecDef,
    heap: &BTreeMap<String, (String, Term)>,
    rename: &BTreeMap<String, String>,
) -> RecDef {
    RecDef {
        name: rename
            .get(&def.name)
            .cloned()
            .unwrap_or_else(|| def.name.clone()),
        params: def.params.clone(),
        body: match &def.body {
            RecBody::Formula(f) => RecBody::Formula(rewrite_heap_formula(f, heap, rename)),
            RecBody::Term(t) => RecBody::Term(rewrite_heap_term(t, heap, rename)),
        },
        kind: def.kind,
    }
}

/// Generate every obligation of a method and assemble its VC.
pub fn method_vcs(module: &SourceModule, method: &Method, opts: VcOptions) -> MethodVcs {
    let pointer_fields: Vec<String> = module.signature.pointer_fields().cloned().collect();
    let blocks = blocks::basic_blocks(&method.body);
    let obligations = generate_obligations(method, &pointer_fields);
    let mut artifacts = Vec::new();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    for ob in &obligations {
        let art = assemble_vc(module, method, ob, opts, &mut counters);
        artifacts.push(art);
    }
    MethodVcs {
        method: method.name.clone(),
        basic_blocks: blocks.len(),
        artifacts,
    }
}

/// Run the transformer over one obligation and assemble
/// `(⋀Fr ∧ T) ⇒ (β ∧ SC)`.
pub fn assemble_vc(
    module: &SourceModule,
    method: &Method,
    ob: &Obligation,
    opts: VcOptions,
    counters: &mut BTreeMap<String, usize>,
) -> VcArtifact {
    let pre = match &method.pre {
        Spec::Fl(f) => f.clone(),
        Spec::Sl(_) => panic!("contracts must be translated to FL before VC generation"),
    };
    let mut cfg = Config::new(module, &pre, opts);

    // method-post snapshots: Old(e) becomes a fresh variable constrained at
    // entry (σ₀), where the heap is the identity
    let post = match &method.post {
        Spec::Fl(f) => f.clone(),
        Spec::Sl(_) => panic!("contracts must be translated to FL before VC generation"),
    };
    let (post_stripped, snapshots) = strip_old(&post, &mut cfg.gen);
    if ob.kind == ObKind::Exact {
        for (name, e) in &snapshots {
            cfg.t.push(Formula::Eq(Term::Var(name.clone()), e.clone()));
        }
    }

    for stmt in &ob.stmts {
        cfg.step(stmt);
    }
    cfg.keypoint();

    let final_family = cfg.cur_family;
    let (beta, support_cond): (Formula, Option<Formula>) = match ob.kind {
        ObKind::Exact => {
            let fam = cfg.family(final_family);
            let beta = rewrite_heap_formula(&post_stripped, &fam.heap, &fam.rename);
            let sc = Formula::Eq(
                Term::Sp(Box::new(SpArg::Formula(beta.clone()))),
                cfg.alloc.clone(),
            );
            (beta, Some(sc))
        }
        ObKind::Rp => {
            let (callee_name, args) =
                ob.call.as_ref().expect("RP obligation carries its call");
            let callee = module.method(callee_name).expect("resolved method");
            let beta = cfg.instantiate_pre(callee, args, final_family);
            let sc = Formula::Subset(
                Term::Sp(Box::new(SpArg::Formula(beta.clone()))),
                cfg.alloc.clone(),
            );
            (beta, Some(sc))
        }
        ObKind::Hp => {
            let var = ob
                .checked_var
                .clone()
                .expect("HP obligation checks a variable");
            (Formula::Member(Term::Var(var), cfg.alloc.clone()), None)
        }
    };

    let frames: Vec<Formula> = cfg.frames.iter().map(|r| cfg.frame_formula(r)).collect();
    let antecedent = Formula::and(cfg.t.clone());
    let consequent = Formula::and(
        std::iter::once(beta)
            .chain(support_cond)
            .collect::<Vec<_>>(),
    );
    let hyp = Formula::and(
        frames
            .iter()
            .cloned()
            .chain(std::iter::once(antecedent.clone()))
            .collect::<Vec<_>>(),
    );
    let vc = Formula::implies(hyp, consequent.clone());

    let defs: Vec<RecDef> = cfg
        .families
        .iter()
        .flat_map(|f| f.defs.iter().cloned())
        .collect();

    let kind_str = ob.kind.to_string();
    let counter_key = format!("{}_{}_{}", method.name, ob.block, kind_str);
    let n = counters.entry(counter_key.clone()).or_insert(0);
    *n += 1;
    let id = if *n == 1 {
        format!("{}_b{}_{}", method.name, ob.block, kind_str)
    } else {
        format!("{}_b{}_{}_{}", method.name, ob.block, kind_str, n)
    };

    VcArtifact {
        id,
        method: method.name.clone(),
        block: ob.block,
        kind: ob.kind,
        provenance: ob.provenance.to_string(),
        frames,
        antecedent,
        consequent,
        vc,
        defs,
        sig: cfg.sig,
        frame_rules: cfg.frames,
        families: cfg.families,
    }
}

/// All defined heap functions of an artifact, keyed by name.
pub fn artifact_field_defs(art: &VcArtifact) -> BTreeMap<String, (String, Term)> {
    art.families
        .iter()
        .flat_map(|f| f.field_defs.iter().cloned())
        .map(|(name, param, body)| (name, (param, body)))
        .collect()
}

/// Evaluate an artifact's assembled FL VC on a finite model and store
/// (frame-model semantics: recursive symbols get their least-fixpoint
/// interpretation, defined heap functions evaluate through their bodies).
pub fn eval_artifact_vc(
    art: &VcArtifact,
    model: &crate::oracle::FiniteModel,
    store: &crate::oracle::Store,
) -> bool {
    let field_defs = artifact_field_defs(art);
    let interp =
        crate::oracle::lfp::eval_lfp_in_store(&art.defs, model, &field_defs, store);
    let env = crate::oracle::flsem::Env::with_field_defs(model, &interp, &field_defs);
    crate::oracle::eval_formula(&art.vc, &env, store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_module;
    use crate::parser::pretty::{print_formula, print_term};

    fn prepared_revprepend() -> SourceModule {
        parse_module(
            r#"
List(x) := ite( x = nil, True, (next(x) = next(x)) and List([next(x)]) and Not(IsMember(x, Sp(List([next(x)])))))
Keys(x) := ite( x = nil, EmptySetInt, SetAdd(Keys(next(x)), key(x)))

RevPrepend(x, y) returns(ret)
@pre: List(x) and List(y) and IsEmpty( SetIntersect( Sp(List(x)), Sp(List(y))))
@post: List(ret) and (Keys(ret) = SetUnion( Old(Keys(x)), Old(Keys(y))))
(if (x = nil)
 then
   ret := y;
 else
   tmp := x.next;
   x.next := y;
   ret := RevPrepend(tmp, x);
)
return;
"#,
            None,
        )
        .unwrap()
    }

    #[test]
    fn deref_conjoins_heap_lookup() {
        let module = prepared_revprepend();
        let method = module.method("RevPrepend").unwrap();
        let mut cfg = Config::new(&module, method.pre.as_fl().unwrap(), VcOptions::default());
        cfg.step(&Stmt::Load {
            dst: "tmp".into(),
            obj: "x".into(),
            field: "next".into(),
        });
        assert_eq!(print_formula(cfg.t.last().unwrap()), "tmp = next(x)");
    }

    #[test]
    fn mutation_updates_heap_map_per_statement() {
        let module = prepared_revprepend();
        let method = module.method("RevPrepend").unwrap();
        let opts = VcOptions {
            frame_at_keypoints: false,
        };
        let mut cfg = Config::new(&module, method.pre.as_fl().unwrap(), opts);
        cfg.step(&Stmt::Store {
            obj: "x".into(),
            field: "next".into(),
            src: Term::Var("y".into()),
        });
        // H1 = H[next ← λ _h. ite(_h = x, y, next(_h))], introduced as the
        // defined heap function next_h1
        let fam = cfg.family(1);
        let (name, param, body) = fam
            .field_defs
            .iter()
            .find(|(n, _, _)| n.starts_with("next"))
            .unwrap();
        assert_eq!(name, "next_h1");
        assert_eq!(param, "_h");
        assert_eq!(print_term(body), "ite(_h = x, y, next(_h))");
        // one frame rule fr({x}, H, H1), one new family
        assert_eq!(cfg.frames.len(), 1);
        assert_eq!(print_term(&cfg.frames[0].mutated), "Singleton(x)");
        assert_eq!(cfg.families.len(), 2);
        // List_1 = List[H1]: the adapted body dereferences through next_h1
        assert_eq!(fam.rename["List"], "List_1");
        let list1 = fam.defs.iter().find(|d| d.name == "List_1").unwrap();
        let printed = crate::parser::pretty::print_recdef(list1);
        assert!(
            printed.contains("List_1([next_h1("),
            "adapted body should dereference through H1: {printed}"
        );
    }

    #[test]
    fn alloc_conjoins_freshness_and_extends_alloc_set() {
        let module = prepared_revprepend();
        let method = module.method("RevPrepend").unwrap();
        let mut cfg = Config::new(&module, method.pre.as_fl().unwrap(), VcOptions::default());
        let a0 = cfg.alloc.clone();
        cfg.step(&Stmt::Alloc("z".into()));
        let conj = print_formula(&Formula::and(cfg.t.clone()));
        assert!(conj.contains("Not(IsMember(z,"), "{conj}");
        assert!(conj.contains("z != nil"), "{conj}");
        assert_eq!(
            print_term(&cfg.alloc),
            format!("SetAdd({}, z)", print_term(&a0))
        );
    }

    #[test]
    fn revprepend_else_block_artifacts_match_walkthrough() {
        let module = prepared_revprepend();
        let method = module.method("RevPrepend").unwrap();
        let vcs = method_vcs(&module, method, VcOptions::default());
        assert_eq!(vcs.basic_blocks, 2);
        // obligations: deref-HP, mutation-HP, call-RP, 2 × Exact = 5
        assert_eq!(vcs.artifacts.len(), 5);

        let rp = vcs.artifacts.iter().find(|a| a.kind == ObKind::Rp).unwrap();
        // PreCall = List_1(tmp) ∧ List_1(x) ∧ Sp∩Sp=∅ over the mutated heap
        let beta = print_formula(&rp.consequent);
        assert!(beta.contains("List_1(tmp)"), "{beta}");
        assert!(beta.contains("List_1(x)"), "{beta}");

        let exact_else = vcs
            .artifacts
            .iter()
            .filter(|a| a.kind == ObKind::Exact)
            .find(|a| a.frames.len() == 2)
            .expect("else block has two frame rules");
        // H2 guards fresh functions by the call footprint, composing on H1
        let fam2 = &exact_else.families[2];
        let (_, _, h2_next) = fam2
            .field_defs
            .iter()
            .find(|(n, _, _)| n.starts_with("next"))
            .unwrap();
        let printed = print_term(h2_next);
        assert!(
            printed.starts_with("ite(Not(IsMember(_h, Sp(List_1(tmp)"),
            "{printed}"
        );
        assert!(printed.contains("next_h1(_h)"), "{printed}");
        assert!(printed.contains("next2(_h)"), "{printed}");
        // final consequent: List_2(ret) ∧ Keys_2(ret) = old ∪ old ∧ Sp(β)=A2
        let cons = print_formula(&exact_else.consequent);
        assert!(cons.contains("List_2(ret)"), "{cons}");
        assert!(cons.contains("Keys_2(ret)"), "{cons}");
    }

    #[test]
    fn skip_block_vc_shape() {
        let module = parse_module(
            r#"
List(x) := ite( x = nil, True, (next(x) = next(x)) and List([next(x)]) and Not(IsMember(x, Sp(List([next(x)])))))
m(x) returns (ret)
@pre: List(x)
@post: List(x)
ret := x;
return;
"#,
            None,
        )
        .unwrap();
        let method = module.method("m").unwrap();
        let vcs = method_vcs(&module, method, VcOptions::default());
        assert_eq!(vcs.basic_blocks, 1);
        assert_eq!(vcs.artifacts.len(), 1);
        let art = &vcs.artifacts[0];
        assert!(art.frames.is_empty());
        assert_eq!(
            print_formula(&art.vc),
            "List(x) and ret = x => List(x) and Sp(List(x)) = Sp(List(x))"
        );
    }
}
