//! Big-step operational semantics over finite configurations.
//!
//! Dereferences and mutations of unallocated locations, double frees, and
//! unsatisfied callee footprints transition to the error configuration ⊥
//! (a value, not an interpreter failure). Allocation grows the universe by
//! a genuinely fresh non-nil location with default field values; hitting
//! the location cap yields an explicit `CapExceeded` outcome. Calls run
//! either inlined (call-by-value, callee heaplet = support of its
//! precondition) or modularly (havoc the precondition's heaplet, replace
//! with an arbitrary enumerated heaplet satisfying the postcondition).

use super::enumerate::subsets;
use super::flsem::{eval_formula, eval_support_formula, eval_term, Env};
use super::lfp::eval_lfp;
use super::model::{Config, FiniteModel, Interp, Loc, Store, Value, NIL};
use crate::ast::{
    free_vars, strip_old, Formula, Method, NameGen, RecDef, Sort, Spec, Stmt, Term,
};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Ok(Config),
    Bottom,
    CapExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallMode {
    Inline,
    Modular,
}

pub struct ExecCtx<'a> {
    pub methods: BTreeMap<String, &'a Method>,
    pub defs: &'a [RecDef],
    /// maximum universe size (locations beyond nil)
    pub bound: usize,
    pub call_depth: usize,
    pub mode: CallMode,
    pub int_values: Vec<i64>,
}

impl<'a> ExecCtx<'a> {
    pub fn new(methods: impl IntoIterator<Item = &'a Method>, defs: &'a [RecDef], bound: usize) -> Self {
        ExecCtx {
            methods: methods.into_iter().map(|m| (m.name.clone(), m)).collect(),
            defs,
            bound,
            call_depth: 2 * bound + 4,
            mode: CallMode::Inline,
            int_values: vec![0, 1],
        }
    }

    pub fn modular(mut self) -> Self {
        self.mode = CallMode::Modular;
        self
    }
}

fn is_pointer_field(model: &FiniteModel, field: &str) -> bool {
    model.ptr.contains_key(field)
}

/// Evaluate a dereference-free term over the store.
fn eval_pure(t: &Term, model: &FiniteModel, store: &Store) -> Option<Value> {
    let interp = Interp::default();
    let env = Env::new(model, &interp);
    eval_term(t, &env, store)
}

fn eval_cond(f: &Formula, model: &FiniteModel, store: &Store) -> bool {
    let interp = Interp::default();
    let env = Env::new(model, &interp);
    eval_formula(f, &env, store)
}

pub fn exec_stmts(stmts: &[Stmt], cfg: Config, ctx: &ExecCtx, depth: usize) -> Vec<Outcome> {
    let mut current = vec![cfg];
    for (i, stmt) in stmts.iter().enumerate() {
        if let Stmt::Return = stmt {
            break;
        }
        let mut next = Vec::new();
        let mut terminal = Vec::new();
        for cfg in current {
            for out in exec_stmt(stmt, cfg, ctx, depth) {
                match out {
                    Outcome::Ok(c) => next.push(c),
                    other => terminal.push(other),
                }
            }
        }
        if next.is_empty() {
            return terminal;
        }
        if i + 1 == stmts.len() {
            let mut outs: Vec<Outcome> = next.into_iter().map(Outcome::Ok).collect();
            outs.extend(terminal);
            return outs;
        }
        current = next;
        if !terminal.is_empty() {
            // keep error outcomes from earlier branches
            let mut outs = terminal;
            for cfg in current {
                for o in exec_stmts(&stmts[i + 1..], cfg, ctx, depth) {
                    outs.push(o);
                }
            }
            return outs;
        }
    }
    current.into_iter().map(Outcome::Ok).collect()
}

fn exec_stmt(stmt: &Stmt, mut cfg: Config, ctx: &ExecCtx, depth: usize) -> Vec<Outcome> {
    match stmt {
        Stmt::Assign { dst, src } => match eval_pure(src, &cfg.model, &cfg.store) {
            Some(v) => {
                cfg.store.insert(dst.clone(), v);
                vec![Outcome::Ok(cfg)]
            }
            None => vec![Outcome::Bottom],
        },
        Stmt::Load { dst, obj, field } => {
            let Some(l) = cfg.store.get(obj).and_then(|v| v.as_loc()) else {
                return vec![Outcome::Bottom];
            };
            // pointer dereferences require the location to be allocated;
            // data-field reads do not fault (see §4.2's obligation list)
            if is_pointer_field(&cfg.model, field) && !cfg.alloc.contains(&l) {
                return vec![Outcome::Bottom];
            }
            match cfg.model.field_value(field, l) {
                Some(v) => {
                    cfg.store.insert(dst.clone(), v);
                    vec![Outcome::Ok(cfg)]
                }
                None => vec![Outcome::Bottom],
            }
        }
        Stmt::Store { obj, field, src } => {
            let Some(l) = cfg.store.get(obj).and_then(|v| v.as_loc()) else {
                return vec![Outcome::Bottom];
            };
            if !cfg.alloc.contains(&l) {
                return vec![Outcome::Bottom];
            }
            let Some(v) = eval_pure(src, &cfg.model, &cfg.store) else {
                return vec![Outcome::Bottom];
            };
            match v {
                Value::Loc(tgt) => {
                    if let Some(col) = cfg.model.ptr.get_mut(field) {
                        col[l] = tgt;
                    } else {
                        return vec![Outcome::Bottom];
                    }
                }
                Value::Int(n) => {
                    if let Some(col) = cfg.model.data.get_mut(field) {
                        col[l] = n;
                    } else {
                        return vec![Outcome::Bottom];
                    }
                }
                _ => return vec![Outcome::Bottom],
            }
            vec![Outcome::Ok(cfg)]
        }
        Stmt::Alloc(x) => {
            if cfg.model.num_locs + 1 > ctx.bound {
                return vec![Outcome::CapExceeded];
            }
            let l = cfg.model.grow();
            cfg.alloc.insert(l);
            cfg.store.insert(x.clone(), Value::Loc(l));
            vec![Outcome::Ok(cfg)]
        }
        Stmt::Free(x) => {
            let Some(l) = cfg.store.get(x).and_then(|v| v.as_loc()) else {
                return vec![Outcome::Bottom];
            };
            if !cfg.alloc.remove(&l) {
                return vec![Outcome::Bottom]; // double deallocation
            }
            vec![Outcome::Ok(cfg)]
        }
        Stmt::Assume(cond) => {
            if eval_cond(cond, &cfg.model, &cfg.store) {
                vec![Outcome::Ok(cfg)]
            } else {
                vec![] // refuted path: no outcome
            }
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            if eval_cond(cond, &cfg.model, &cfg.store) {
                exec_stmts(then_branch, cfg, ctx, depth)
            } else {
                exec_stmts(else_branch, cfg, ctx, depth)
            }
        }
        Stmt::Return => vec![Outcome::Ok(cfg)],
        Stmt::Call { outs, method, args } => exec_call(outs, method, args, cfg, ctx, depth),
    }
}

fn contract_fl(spec: &Spec) -> &Formula {
    match spec {
        Spec::Fl(f) => f,
        Spec::Sl(_) => panic!("operational semantics runs on FL-mode modules"),
    }
}

fn exec_call(
    outs: &[String],
    method: &str,
    args: &[Term],
    cfg: Config,
    ctx: &ExecCtx,
    depth: usize,
) -> Vec<Outcome> {
    let Some(callee) = ctx.methods.get(method).copied() else {
        return vec![Outcome::Bottom];
    };
    // callee entry store: params bound to argument values
    let mut callee_store = Store::new();
    for ((p, _), a) in callee.params.iter().zip(args.iter()) {
        match eval_pure(a, &cfg.model, &cfg.store) {
            Some(v) => {
                callee_store.insert(p.clone(), v);
            }
            None => return vec![Outcome::Bottom],
        }
    }
    let interp = eval_lfp(ctx.defs, &cfg.model);
    let env = Env::new(&cfg.model, &interp);
    let pre = contract_fl(&callee.pre);
    let footprint = eval_support_formula(pre, &env, &callee_store);
    if !footprint.is_subset(&cfg.alloc) {
        return vec![Outcome::Bottom];
    }
    match ctx.mode {
        CallMode::Inline => {
            if depth == 0 {
                return vec![Outcome::CapExceeded];
            }
            let callee_cfg = Config {
                store: callee_store,
                model: cfg.model.clone(),
                alloc: footprint.clone(),
            };
            let mut results = Vec::new();
            for out in exec_stmts(&callee.body, callee_cfg, ctx, depth - 1) {
                match out {
                    Outcome::Ok(final_g) => {
                        // returned locations must be owned or nil
                        let mut ret_vals = Vec::new();
                        let mut ok = true;
                        for (r, _) in &callee.returns {
                            match final_g.store.get(r) {
                                Some(Value::Loc(l)) => {
                                    if *l != NIL && !final_g.alloc.contains(l) {
                                        ok = false;
                                    }
                                    ret_vals.push(Value::Loc(*l));
                                }
                                Some(v) => ret_vals.push(v.clone()),
                                None => ok = false,
                            }
                        }
                        if !ok {
                            results.push(Outcome::Bottom);
                            continue;
                        }
                        let mut merged = cfg.clone();
                        merged.model = final_g.model;
                        let retained: BTreeSet<Loc> =
                            cfg.alloc.difference(&footprint).copied().collect();
                        debug_assert!(retained.is_disjoint(&final_g.alloc) || {
                            // callee kept part of its footprint allocated
                            retained
                                .intersection(&final_g.alloc)
                                .all(|l| footprint.contains(l))
                        });
                        merged.alloc = retained.union(&final_g.alloc).copied().collect();
                        for (o, v) in outs.iter().zip(ret_vals) {
                            merged.store.insert(o.clone(), v);
                        }
                        results.push(Outcome::Ok(merged));
                    }
                    other => results.push(other),
                }
            }
            results
        }
        CallMode::Modular => {
            if !eval_formula(pre, &env, &callee_store) {
                return vec![Outcome::Bottom];
            }
            modular_outcomes(outs, callee, callee_store, &footprint, cfg, ctx)
        }
    }
}

/// Havoc the precondition's heaplet: enumerate every replacement heaplet
/// (with up to `bound` total locations) and output values satisfying the
/// callee's postcondition with a tight support, per the modular semantics.
fn modular_outcomes(
    outs: &[String],
    callee: &Method,
    callee_store: Store,
    footprint: &BTreeSet<Loc>,
    cfg: Config,
    ctx: &ExecCtx,
) -> Vec<Outcome> {
    let mut results = Vec::new();
    let post = contract_fl(&callee.post);
    // resolve Old(..) against the entry state
    let mut gen = NameGen::with_taken(free_vars(post).into_iter());
    let (post_stripped, bindings) = strip_old(post, &mut gen);
    let entry_interp = eval_lfp(ctx.defs, &cfg.model);
    let mut snap_store = callee_store.clone();
    {
        let env = Env::new(&cfg.model, &entry_interp);
        for (name, expr) in &bindings {
            match eval_term(expr, &env, &callee_store) {
                Some(v) => {
                    snap_store.insert(name.clone(), v);
                }
                None => return vec![Outcome::Bottom],
            }
        }
    }

    let max_fresh = ctx.bound.saturating_sub(cfg.model.num_locs);
    for fresh in 0..=max_fresh {
        let mut grown = cfg.model.clone();
        let mut fresh_locs = Vec::new();
        for _ in 0..fresh {
            fresh_locs.push(grown.grow());
        }
        // cells the callee may have written: its footprint plus fresh locs
        let mut writable: Vec<Loc> = footprint.iter().copied().collect();
        writable.extend(fresh_locs.iter().copied());

        let ptr_fields: Vec<String> = grown.ptr.keys().cloned().collect();
        let data_fields: Vec<String> = grown.data.keys().cloned().collect();
        let ptr_cells: Vec<(String, Loc)> = ptr_fields
            .iter()
            .flat_map(|f| writable.iter().map(move |l| (f.clone(), *l)))
            .collect();
        let data_cells: Vec<(String, Loc)> = data_fields
            .iter()
            .flat_map(|f| writable.iter().map(move |l| (f.clone(), *l)))
            .collect();
        let ptr_domain = grown.num_locs + 1;
        let data_domain = ctx.int_values.len().max(1);
        let total_ptr = (ptr_domain as u128).pow(ptr_cells.len() as u32);
        let total_data = (data_domain as u128).pow(data_cells.len() as u32);

        for pi in 0..total_ptr {
            let mut m = grown.clone();
            let mut rem = pi;
            for (f, l) in &ptr_cells {
                let v = (rem % ptr_domain as u128) as Loc;
                rem /= ptr_domain as u128;
                m.ptr.get_mut(f).unwrap()[*l] = v;
            }
            for di in 0..total_data {
                let mut m2 = m.clone();
                let mut rem = di;
                for (f, l) in &data_cells {
                    let v = ctx.int_values[(rem % data_domain as u128) as usize];
                    rem /= data_domain as u128;
                    m2.data.get_mut(f).unwrap()[*l] = v;
                }
                // enumerate output values
                let mut out_choices: Vec<Vec<Value>> = vec![vec![]];
                for (_, sort) in &callee.returns {
                    let opts: Vec<Value> = match sort {
                        Sort::Loc => m2.universe().map(Value::Loc).collect(),
                        Sort::Int => ctx.int_values.iter().map(|i| Value::Int(*i)).collect(),
                        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
                        _ => vec![],
                    };
                    let mut next = Vec::new();
                    for c in &out_choices {
                        for o in &opts {
                            let mut c2 = c.clone();
                            c2.push(o.clone());
                            next.push(c2);
                        }
                    }
                    out_choices = next;
                }
                let interp2 = eval_lfp(ctx.defs, &m2);
                for choice in &out_choices {
                    let mut st = snap_store.clone();
                    for ((r, _), v) in callee.returns.iter().zip(choice.iter()) {
                        st.insert(r.clone(), v.clone());
                    }
                    let env2 = Env::new(&m2, &interp2);
                    if !eval_formula(&post_stripped, &env2, &st) {
                        continue;
                    }
                    let post_sp = eval_support_formula(&post_stripped, &env2, &st);
                    // the callee's final footprint is the post's support;
                    // it may only contain old-footprint or fresh locations
                    if !post_sp
                        .iter()
                        .all(|l| footprint.contains(l) || fresh_locs.contains(l))
                    {
                        continue;
                    }
                    let retained: BTreeSet<Loc> =
                        cfg.alloc.difference(footprint).copied().collect();
                    let mut merged = Config {
                        store: cfg.store.clone(),
                        model: m2.clone(),
                        alloc: retained.union(&post_sp).copied().collect(),
                    };
                    for (o, v) in outs.iter().zip(choice.iter()) {
                        merged.store.insert(o.clone(), v.clone());
                    }
                    results.push(Outcome::Ok(merged));
                }
            }
        }
    }
    // deduplicate outcomes
    results.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
    results.dedup();
    let _ = subsets::<usize>(&[]); // keep helper linked for doc purposes
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_module;

    fn chain_config() -> Config {
        // x -> e1 -> e2 -> nil, both allocated
        let mut m = FiniteModel::new(2, &["next"], &["key"]);
        m.ptr.get_mut("next").unwrap()[1] = 2;
        let mut store = Store::new();
        store.insert("x".into(), Value::Loc(1));
        store.insert("y".into(), Value::Loc(2));
        Config {
            store,
            model: m,
            alloc: [1, 2].into_iter().collect(),
        }
    }

    fn ctx_for<'a>(defs: &'a [RecDef]) -> ExecCtx<'a> {
        ExecCtx::new([], defs, 4)
    }

    #[test]
    fn deref_outside_alloc_is_bottom() {
        let defs = [];
        let ctx = ctx_for(&defs);
        let mut cfg = chain_config();
        cfg.alloc.remove(&2);
        let stmts = [Stmt::Load {
            dst: "t".into(),
            obj: "y".into(),
            field: "next".into(),
        }];
        assert_eq!(exec_stmts(&stmts, cfg, &ctx, 4), vec![Outcome::Bottom]);
    }

    #[test]
    fn data_read_does_not_fault_but_mutation_does() {
        let defs = [];
        let ctx = ctx_for(&defs);
        let mut cfg = chain_config();
        cfg.alloc.remove(&2);
        let read = [Stmt::Load {
            dst: "v".into(),
            obj: "y".into(),
            field: "key".into(),
        }];
        assert!(matches!(
            exec_stmts(&read, cfg.clone(), &ctx, 4)[0],
            Outcome::Ok(_)
        ));
        let write = [Stmt::Store {
            obj: "y".into(),
            field: "key".into(),
            src: Term::IntLit(1),
        }];
        assert_eq!(exec_stmts(&write, cfg, &ctx, 4), vec![Outcome::Bottom]);
    }

    #[test]
    fn double_free_is_bottom() {
        let defs = [];
        let ctx = ctx_for(&defs);
        let cfg = chain_config();
        let stmts = [Stmt::Free("x".into()), Stmt::Free("x".into())];
        assert_eq!(exec_stmts(&stmts, cfg, &ctx, 4), vec![Outcome::Bottom]);
    }

    #[test]
    fn alloc_grows_universe_with_defaults() {
        let defs = [];
        let ctx = ctx_for(&defs);
        let cfg = chain_config();
        let stmts = [Stmt::Alloc("z".into())];
        match &exec_stmts(&stmts, cfg, &ctx, 4)[0] {
            Outcome::Ok(c) => {
                let l = c.store.get("z").unwrap().as_loc().unwrap();
                assert_eq!(l, 3);
                assert!(c.alloc.contains(&l));
                assert_eq!(c.model.get_ptr("next", l), Some(NIL));
                assert_eq!(c.model.get_data("key", l), Some(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alloc_cap_reports_unknown() {
        let defs = [];
        let mut ctx = ctx_for(&defs);
        ctx.bound = 2;
        let cfg = chain_config();
        let stmts = [Stmt::Alloc("z".into())];
        assert_eq!(exec_stmts(&stmts, cfg, &ctx, 4), vec![Outcome::CapExceeded]);
    }

    #[test]
    fn assume_false_refutes_path() {
        let defs = [];
        let ctx = ctx_for(&defs);
        let cfg = chain_config();
        let stmts = [Stmt::Assume(Formula::Eq(
            Term::Var("x".into()),
            Term::Nil,
        ))];
        assert!(exec_stmts(&stmts, cfg, &ctx, 4).is_empty());
    }

    #[test]
    fn inline_call_runs_callee_on_its_footprint() {
        let module = parse_module(
            r#"
List(x) := ite( x = nil, True, (next(x) = next(x)) and List([next(x)]) and Not(IsMember(x, Sp(List([next(x)])))))

Tail(x) returns (ret)
@pre: List(x) and x != nil
@post: List(ret)
ret := x.next;
return;
"#,
            None,
        )
        .unwrap();
        let defs = module.fl_defs.clone();
        let ctx = ExecCtx::new(module.methods.iter(), &defs, 4);
        let cfg = chain_config();
        let stmts = [Stmt::Call {
            outs: vec!["r".into()],
            method: "Tail".into(),
            args: vec![Term::Var("x".into())],
        }];
        match &exec_stmts(&stmts, cfg, &ctx, 4)[0] {
            Outcome::Ok(c) => {
                assert_eq!(c.store.get("r"), Some(&Value::Loc(2)));
            }
            other => panic!("{other:?}"),
        }
    }
}
