//! Brute-force Hoare-triple checking: enumerate every configuration with a
//! bounded universe where the precondition holds with a tight allocated
//! set, run the program, and check the postcondition and the per-kind
//! support condition.

use super::enumerate::{stores, EnumCfg};
use super::flsem::{eval_formula, eval_support_formula, eval_term, Env};
use super::lfp::eval_lfp;
use super::model::{Config, Value};
use super::opsem::{exec_stmts, ExecCtx, Outcome};
use crate::ast::{free_vars, strip_old, Formula, NameGen, RecDef, Sort, Stmt, Term};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleKind {
    Exact,
    Rp,
    Hp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleVerdict {
    Valid,
    Counterexample { config: Config, reason: String },
    UnknownAtBound,
}

impl TripleVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, TripleVerdict::Valid)
    }
    pub fn is_counterexample(&self) -> bool {
        matches!(self, TripleVerdict::Counterexample { .. })
    }
}

/// Variables read by the statements before being assigned.
fn input_vars(stmts: &[Stmt], out: &mut BTreeSet<String>, assigned: &mut BTreeSet<String>) {
    let term_vars = |t: &Term, out: &mut BTreeSet<String>, assigned: &BTreeSet<String>| {
        for v in crate::ast::free_vars_of_term(t) {
            if !assigned.contains(&v) {
                out.insert(v);
            }
        }
    };
    for s in stmts {
        match s {
            Stmt::Assign { dst, src } => {
                term_vars(src, out, assigned);
                assigned.insert(dst.clone());
            }
            Stmt::Load { dst, obj, .. } => {
                if !assigned.contains(obj) {
                    out.insert(obj.clone());
                }
                assigned.insert(dst.clone());
            }
            Stmt::Store { obj, src, .. } => {
                if !assigned.contains(obj) {
                    out.insert(obj.clone());
                }
                term_vars(src, out, assigned);
            }
            Stmt::Alloc(v) => {
                assigned.insert(v.clone());
            }
            Stmt::Free(v) => {
                if !assigned.contains(v) {
                    out.insert(v.clone());
                }
            }
            Stmt::Call { outs, args, .. } => {
                for a in args {
                    term_vars(a, out, assigned);
                }
                for o in outs {
                    assigned.insert(o.clone());
                }
            }
            Stmt::Assume(f) => {
                for v in free_vars(f) {
                    if !assigned.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                for v in free_vars(cond) {
                    if !assigned.contains(&v) {
                        out.insert(v);
                    }
                }
                let mut a1 = assigned.clone();
                input_vars(then_branch, out, &mut a1);
                let mut a2 = assigned.clone();
                input_vars(else_branch, out, &mut a2);
                assigned.extend(a1);
                assigned.extend(a2);
            }
            Stmt::Return => {}
        }
    }
}

pub struct TripleSpec<'a> {
    pub pre: &'a Formula,
    pub stmts: &'a [Stmt],
    pub post: &'a Formula,
    pub kind: TripleKind,
}

/// Enumerate all configurations with at most `bound` locations where the
/// precondition holds tightly (`A = Sp(pre)`), run the statements, and
/// check the postcondition per path. `var_sorts` gives sorts for the
/// triple's free variables (inferred `Loc` when absent).
pub fn check_triple_bruteforce(
    triple: &TripleSpec,
    defs: &[RecDef],
    ctx: &ExecCtx,
    enum_cfg: &EnumCfg,
    var_sorts: &BTreeMap<String, Sort>,
) -> TripleVerdict {
    // the variables to enumerate: free in pre or post (they are the
    // triple's implicit constants), or read by the program — minus the
    // variables the program assigns
    let mut vars: BTreeSet<String> = free_vars(triple.pre);
    let mut assigned = BTreeSet::new();
    input_vars(triple.stmts, &mut vars, &mut assigned);

    let mut gen = NameGen::with_taken(
        vars.iter()
            .cloned()
            .chain(assigned.iter().cloned())
            .chain(free_vars(triple.post)),
    );
    let (post, old_bindings) = strip_old(triple.post, &mut gen);
    let snapshot_names: BTreeSet<String> =
        old_bindings.iter().map(|(n, _)| n.clone()).collect();
    for v in free_vars(&post) {
        if !assigned.contains(&v) && !snapshot_names.contains(&v) && v != "__A" {
            vars.insert(v);
        }
    }
    let var_sorts: BTreeMap<String, Sort> = vars
        .iter()
        .map(|v| (v.clone(), var_sorts.get(v).copied().unwrap_or(Sort::Loc)))
        .collect();

    let mut hit_cap = false;
    for model in enum_cfg.models() {
        let interp = eval_lfp(defs, &model);
        for store in stores(&model, &var_sorts, &enum_cfg.data_values) {
            let env = Env::new(&model, &interp);
            if !eval_formula(triple.pre, &env, &store) {
                continue;
            }
            let alloc = eval_support_formula(triple.pre, &env, &store);
            // resolve Old snapshots against the initial configuration
            let mut store_with_snaps = store.clone();
            let mut snaps_ok = true;
            for (name, expr) in &old_bindings {
                match eval_term(expr, &env, &store) {
                    Some(v) => {
                        store_with_snaps.insert(name.clone(), v);
                    }
                    None => snaps_ok = false,
                }
            }
            if !snaps_ok {
                continue;
            }
            let cfg = Config {
                store: store_with_snaps,
                model: model.clone(),
                alloc: alloc.clone(),
            };
            for outcome in exec_stmts(triple.stmts, cfg.clone(), ctx, ctx.call_depth) {
                match outcome {
                    Outcome::Bottom => {
                        return TripleVerdict::Counterexample {
                            config: cfg,
                            reason: "execution reaches the error configuration".into(),
                        };
                    }
                    Outcome::CapExceeded => hit_cap = true,
                    Outcome::Ok(final_cfg) => {
                        let interp2 = eval_lfp(defs, &final_cfg.model);
                        let env2 = Env::new(&final_cfg.model, &interp2);
                        // expose the final allocated set to HP posts
                        let mut st = final_cfg.store.clone();
                        st.insert("__A".into(), Value::SetLoc(final_cfg.alloc.clone()));
                        if !eval_formula(&post, &env2, &st) {
                            return TripleVerdict::Counterexample {
                                config: cfg,
                                reason: "postcondition fails".into(),
                            };
                        }
                        match triple.kind {
                            TripleKind::Exact => {
                                let sp = eval_support_formula(&post, &env2, &st);
                                if sp != final_cfg.alloc {
                                    return TripleVerdict::Counterexample {
                                        config: cfg,
                                        reason: format!(
                                            "support of post {sp:?} differs from allocated {:?}",
                                            final_cfg.alloc
                                        ),
                                    };
                                }
                            }
                            TripleKind::Rp => {
                                let sp = eval_support_formula(&post, &env2, &st);
                                if !sp.is_subset(&final_cfg.alloc) {
                                    return TripleVerdict::Counterexample {
                                        config: cfg,
                                        reason: format!(
                                            "support of post {sp:?} exceeds allocated {:?}",
                                            final_cfg.alloc
                                        ),
                                    };
                                }
                            }
                            TripleKind::Hp => {}
                        }
                    }
                }
            }
        }
    }
    if hit_cap {
        TripleVerdict::UnknownAtBound
    } else {
        TripleVerdict::Valid
    }
}

/// The allocated set after the program, for HP posts: `Member(y, Var "__A")`.
pub fn hp_member(var: &str) -> Formula {
    Formula::Member(Term::Var(var.into()), Term::Var("__A".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_module;

    fn list_defs() -> Vec<RecDef> {
        parse_module(
            r#"
List(x) := ite( x = nil, True, (next(x) = next(x)) and List([next(x)]) and Not(IsMember(x, Sp(List([next(x)])))))
"#,
            None,
        )
        .unwrap()
        .fl_defs
    }

    fn list_x() -> Formula {
        Formula::RecPred("List".into(), vec![Term::Var("x".into())])
    }

    #[test]
    fn skip_preserves_list() {
        let defs = list_defs();
        let ctx = ExecCtx::new([], &defs, 3);
        let cfg = EnumCfg::new(3, &["next"], &[]);
        let pre = list_x();
        let post = list_x();
        let triple = TripleSpec {
            pre: &pre,
            stmts: &[],
            post: &post,
            kind: TripleKind::Exact,
        };
        let verdict =
            check_triple_bruteforce(&triple, &defs, &ctx, &cfg, &BTreeMap::new());
        assert_eq!(verdict, TripleVerdict::Valid);
    }

    #[test]
    fn self_loop_mutation_breaks_list() {
        // {List(x)} x.next := x {List(x)} has a counterexample
        let defs = list_defs();
        let ctx = ExecCtx::new([], &defs, 2);
        let cfg = EnumCfg::new(2, &["next"], &[]);
        let pre = list_x();
        let post = list_x();
        let stmts = [Stmt::Store {
            obj: "x".into(),
            field: "next".into(),
            src: Term::Var("x".into()),
        }];
        let triple = TripleSpec {
            pre: &pre,
            stmts: &stmts,
            post: &post,
            kind: TripleKind::Exact,
        };
        let verdict =
            check_triple_bruteforce(&triple, &defs, &ctx, &cfg, &BTreeMap::new());
        assert!(verdict.is_counterexample(), "{verdict:?}");
    }

    #[test]
    fn deref_with_empty_footprint_faults() {
        // {⊤} x := y.f {⊤}: Sp(⊤)=∅ forces A=∅, so the dereference faults
        let defs: Vec<RecDef> = vec![];
        let ctx = ExecCtx::new([], &defs, 2);
        let cfg = EnumCfg::new(2, &["next"], &[]);
        let pre = Formula::True;
        let post = Formula::True;
        let stmts = [Stmt::Load {
            dst: "x".into(),
            obj: "y".into(),
            field: "next".into(),
        }];
        let triple = TripleSpec {
            pre: &pre,
            stmts: &stmts,
            post: &post,
            kind: TripleKind::Exact,
        };
        let verdict =
            check_triple_bruteforce(&triple, &defs, &ctx, &cfg, &BTreeMap::new());
        assert!(verdict.is_counterexample(), "{verdict:?}");
    }

    #[test]
    fn old_snapshot_in_post() {
        // {List(x)} skip {List(x) ∧ Keys-like snapshot}: Old(List(x)) is
        // exercised through an Old-wrapped support expression
        let defs = list_defs();
        let ctx = ExecCtx::new([], &defs, 2);
        let cfg = EnumCfg::new(2, &["next"], &[]);
        let pre = list_x();
        let post = Formula::And(vec![
            list_x(),
            Formula::Eq(
                Term::Sp(Box::new(crate::ast::SpArg::Formula(list_x()))),
                Term::Old(Box::new(Term::Sp(Box::new(crate::ast::SpArg::Formula(
                    list_x(),
                ))))),
            ),
        ]);
        let triple = TripleSpec {
            pre: &pre,
            stmts: &[],
            post: &post,
            kind: TripleKind::Exact,
        };
        let verdict =
            check_triple_bruteforce(&triple, &defs, &ctx, &cfg, &BTreeMap::new());
        assert_eq!(verdict, TripleVerdict::Valid);
    }
}
