//! Least-fixpoint interpretation of recursive definitions on a finite
//! model: Kleene iteration from bottom tables (false / undefined / empty
//! support), stratified by the definition dependency graph so that guards
//! mentioning support symbols of earlier heap families stay fixed.

use super::flsem::{eval_formula, eval_support_formula, eval_support_term, eval_term, Env};
use super::model::{FiniteModel, Interp, Loc, Store, Value};
use crate::ast::{rec_symbols_in_formula, Formula, RecBody, RecDef, Sort, Term};
use std::collections::{BTreeMap, BTreeSet};

/// Set-valued definition bodies take their least fixpoint in the
/// ⊆-lattice (start at the empty set); flat background sorts (Int) start
/// at bottom (`None`).
fn body_set_sort(t: &Term) -> Option<Sort> {
    match t {
        Term::Empty(s) => Some(*s),
        Term::Sp(_) => Some(Sort::SetLoc),
        Term::Singleton(_) => None,
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) => {
            body_set_sort(a).or_else(|| body_set_sort(b))
        }
        Term::Ite(_, a, b) => body_set_sort(a).or_else(|| body_set_sort(b)),
        Term::Cloud(a) | Term::Old(a) => body_set_sort(a),
        _ => None,
    }
}

const MAX_ROUNDS: usize = 100_000;

fn body_symbols(def: &RecDef) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    match &def.body {
        RecBody::Formula(f) => rec_symbols_in_formula(f, &mut out),
        RecBody::Term(t) => {
            let wrapper = Formula::IsEmpty(Term::Singleton(Box::new(t.clone())));
            rec_symbols_in_formula(&wrapper, &mut out);
        }
    }
    out
}

/// Strongly connected components of the definition graph in reverse
/// topological order (dependencies first).
fn sccs(defs: &[RecDef]) -> Vec<Vec<usize>> {
    let index: BTreeMap<&str, usize> = defs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.name.as_str(), i))
        .collect();
    let adj: Vec<Vec<usize>> = defs
        .iter()
        .map(|d| {
            body_symbols(d)
                .iter()
                .filter_map(|s| index.get(s.as_str()).copied())
                .collect()
        })
        .collect();

    // iterative Tarjan
    let n = defs.len();
    let mut idx = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut out: Vec<Vec<usize>> = Vec::new();

    enum Frame {
        Enter(usize),
        Resume(usize, usize),
    }
    for start in 0..n {
        if idx[start] != usize::MAX {
            continue;
        }
        let mut work = vec![Frame::Enter(start)];
        while let Some(frame) = work.pop() {
            match frame {
                Frame::Enter(v) => {
                    idx[v] = counter;
                    low[v] = counter;
                    counter += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    work.push(Frame::Resume(v, 0));
                }
                Frame::Resume(v, mut ei) => {
                    let mut descended = false;
                    while ei < adj[v].len() {
                        let w = adj[v][ei];
                        ei += 1;
                        if idx[w] == usize::MAX {
                            work.push(Frame::Resume(v, ei));
                            work.push(Frame::Enter(w));
                            descended = true;
                            break;
                        } else if on_stack[w] {
                            low[v] = low[v].min(idx[w]);
                        }
                    }
                    if descended {
                        continue;
                    }
                    if low[v] == idx[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        out.push(comp);
                    } else {
                        // propagate lowlink to parent
                        if let Some(Frame::Resume(p, _)) = work.last() {
                            let p = *p;
                            low[p] = low[p].min(low[v]);
                        }
                    }
                }
            }
        }
    }
    out
}

fn tuples(universe: usize, arity: usize) -> Vec<Vec<Loc>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &out {
            for l in 0..=universe {
                let mut t2 = t.clone();
                t2.push(l);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Compute the least-fixpoint interpretation of `defs` over `model`.
pub fn eval_lfp(defs: &[RecDef], model: &FiniteModel) -> Interp {
    static EMPTY: std::sync::OnceLock<std::collections::BTreeMap<String, (String, crate::ast::Term)>> =
        std::sync::OnceLock::new();
    eval_lfp_with_fields(defs, model, EMPTY.get_or_init(Default::default))
}

/// Least-fixpoint interpretation where formulas may dereference defined
/// heap functions (generated VC artifacts). Heap-function bodies mention
/// program variables, so the interpretation is relative to `base_store`.
pub fn eval_lfp_with_fields(
    defs: &[RecDef],
    model: &FiniteModel,
    field_defs: &std::collections::BTreeMap<String, (String, crate::ast::Term)>,
) -> Interp {
    eval_lfp_in_store(defs, model, field_defs, &Store::new())
}

pub fn eval_lfp_in_store(
    defs: &[RecDef],
    model: &FiniteModel,
    field_defs: &std::collections::BTreeMap<String, (String, crate::ast::Term)>,
    base_store: &Store,
) -> Interp {
    let mut interp = Interp::default();
    for comp in sccs(defs) {
        // initialize bottom tables for this component
        for &i in &comp {
            let def = &defs[i];
            let tups = tuples(model.num_locs, def.params.len());
            match &def.body {
                RecBody::Formula(_) => {
                    let table = interp.preds.entry(def.name.clone()).or_default();
                    for t in &tups {
                        table.insert(t.clone(), false);
                    }
                }
                RecBody::Term(body) => {
                    let bottom = match body_set_sort(body) {
                        Some(Sort::SetLoc) => Some(Value::SetLoc(BTreeSet::new())),
                        Some(Sort::SetInt) => Some(Value::SetInt(BTreeSet::new())),
                        _ => None,
                    };
                    let table = interp.funcs.entry(def.name.clone()).or_default();
                    for t in &tups {
                        table.insert(t.clone(), bottom.clone());
                    }
                }
            }
            let sp = interp.sps.entry(def.name.clone()).or_default();
            for t in &tups {
                sp.insert(t.clone(), BTreeSet::new());
            }
        }
        // joint Kleene iteration until all tables are stable
        let mut rounds = 0usize;
        loop {
            rounds += 1;
            if rounds > MAX_ROUNDS {
                panic!("lfp iteration did not stabilize (non-monotone definitions?)");
            }
            let mut changed = false;
            for &i in &comp {
                let def = &defs[i];
                let tups = tuples(model.num_locs, def.params.len());
                for t in &tups {
                    let mut store: Store = base_store.clone();
                    for (p, l) in def.params.iter().zip(t.iter()) {
                        store.insert(p.clone(), Value::Loc(*l));
                    }
                    let env = Env::with_field_defs(model, &interp, field_defs);
                    // support equation
                    let new_sp = match &def.body {
                        RecBody::Formula(f) => eval_support_formula(f, &env, &store),
                        RecBody::Term(tm) => eval_support_term(tm, &env, &store),
                    };
                    // truth / value equation
                    enum Upd {
                        Pred(bool),
                        Func(Option<Value>),
                    }
                    let upd = match &def.body {
                        RecBody::Formula(f) => Upd::Pred(eval_formula(f, &env, &store)),
                        RecBody::Term(tm) => Upd::Func(eval_term(tm, &env, &store)),
                    };
                    match upd {
                        Upd::Pred(v) => {
                            let slot = interp
                                .preds
                                .get_mut(&def.name)
                                .unwrap()
                                .get_mut(t)
                                .unwrap();
                            if *slot != v {
                                *slot = v;
                                changed = true;
                            }
                        }
                        Upd::Func(v) => {
                            let slot = interp
                                .funcs
                                .get_mut(&def.name)
                                .unwrap()
                                .get_mut(t)
                                .unwrap();
                            if *slot != v {
                                *slot = v;
                                changed = true;
                            }
                        }
                    }
                    let sp_slot = interp.sps.get_mut(&def.name).unwrap().get_mut(t).unwrap();
                    if *sp_slot != new_sp {
                        *sp_slot = new_sp;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    interp
}
