//! FL / FORD evaluation on finite models: truth, term values, and the
//! support semantics. Terms evaluate to `Option<Value>` where `None` is the
//! flat bottom (undefined recursive-function values on cyclic heaps); atoms
//! over bottom evaluate false.

use super::model::{FiniteModel, Interp, Loc, Store, Value};
use super::{ORACLE_NINF, ORACLE_PINF};
use crate::ast::{Formula, SpArg, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

fn empty_field_defs() -> &'static BTreeMap<String, (String, Term)> {
    static EMPTY: OnceLock<BTreeMap<String, (String, Term)>> = OnceLock::new();
    EMPTY.get_or_init(BTreeMap::new)
}

pub struct Env<'a> {
    pub model: &'a FiniteModel,
    pub interp: &'a Interp,
    /// defined heap functions (generated VC artifacts): name -> (param, body)
    pub field_defs: &'a BTreeMap<String, (String, Term)>,
}

impl<'a> Env<'a> {
    pub fn new(model: &'a FiniteModel, interp: &'a Interp) -> Self {
        Env {
            model,
            interp,
            field_defs: empty_field_defs(),
        }
    }

    pub fn with_field_defs(
        model: &'a FiniteModel,
        interp: &'a Interp,
        field_defs: &'a BTreeMap<String, (String, Term)>,
    ) -> Self {
        Env {
            model,
            interp,
            field_defs,
        }
    }

    /// Value of `field(l)`: a model column or a defined heap function.
    pub fn field_at(&self, field: &str, l: Loc, store: &Store) -> Option<Value> {
        if let Some(v) = self.model.field_value(field, l) {
            return Some(v);
        }
        let (param, body) = self.field_defs.get(field)?;
        let mut st = store.clone();
        st.insert(param.clone(), Value::Loc(l));
        eval_term(body, self, &st)
    }
}

pub fn eval_term(t: &Term, env: &Env, store: &Store) -> Option<Value> {
    match t {
        Term::Var(v) => store.get(v).cloned(),
        Term::Nil => Some(Value::Loc(super::model::NIL)),
        Term::Const(c) => match c.as_str() {
            "PInf" => Some(Value::Int(ORACLE_PINF)),
            "NInf" => Some(Value::Int(ORACLE_NINF)),
            _ => store.get(c).cloned(),
        },
        Term::IntLit(n) => Some(Value::Int(*n)),
        Term::Field(f, a) => {
            let l = eval_term(a, env, store)?.as_loc()?;
            env.field_at(f, l, store)
        }
        Term::App(_, _) => None, // uninterpreted background functions are not oracle-evaluable
        Term::RecFn(f, args) => {
            let mut locs = Vec::with_capacity(args.len());
            for a in args {
                locs.push(eval_term(a, env, store)?.as_loc()?);
            }
            env.interp.func(f, &locs)
        }
        Term::Ite(g, a, b) => {
            if eval_formula(g, env, store) {
                eval_term(a, env, store)
            } else {
                eval_term(b, env, store)
            }
        }
        Term::Sp(arg) => Some(Value::SetLoc(eval_support_sparg(arg, env, store))),
        Term::Cloud(a) => eval_term(a, env, store),
        Term::Old(_) => panic!("Old(..) must be resolved before oracle evaluation"),
        Term::Empty(s) => Some(Value::empty_of(*s)),
        Term::Singleton(a) => match eval_term(a, env, store)? {
            Value::Loc(l) => Some(Value::SetLoc([l].into_iter().collect())),
            Value::Int(i) => Some(Value::SetInt([i].into_iter().collect())),
            _ => None,
        },
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) => {
            let va = eval_term(a, env, store)?;
            let vb = eval_term(b, env, store)?;
            set_op(t, va, vb)
        }
        Term::Add(a, b) => Some(Value::Int(
            eval_term(a, env, store)?.as_int()? + eval_term(b, env, store)?.as_int()?,
        )),
        Term::Sub(a, b) => Some(Value::Int(
            eval_term(a, env, store)?.as_int()? - eval_term(b, env, store)?.as_int()?,
        )),
    }
}

fn set_op(op: &Term, va: Value, vb: Value) -> Option<Value> {
    match (va, vb) {
        (Value::SetLoc(a), Value::SetLoc(b)) => Some(Value::SetLoc(apply_set(op, &a, &b))),
        (Value::SetInt(a), Value::SetInt(b)) => Some(Value::SetInt(apply_set(op, &a, &b))),
        _ => None,
    }
}

fn apply_set<T: Ord + Clone>(op: &Term, a: &BTreeSet<T>, b: &BTreeSet<T>) -> BTreeSet<T> {
    match op {
        Term::Union(_, _) => a.union(b).cloned().collect(),
        Term::Inter(_, _) => a.intersection(b).cloned().collect(),
        Term::Diff(_, _) => a.difference(b).cloned().collect(),
        _ => unreachable!(),
    }
}

pub fn eval_formula(f: &Formula, env: &Env, store: &Store) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => match (eval_term(a, env, store), eval_term(b, env, store)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        },
        Formula::Lt(a, b) => cmp(a, b, env, store, |x, y| x < y),
        Formula::Le(a, b) => cmp(a, b, env, store, |x, y| x <= y),
        Formula::Member(e, s) => {
            match (eval_term(e, env, store), eval_term(s, env, store)) {
                (Some(Value::Loc(l)), Some(Value::SetLoc(set))) => set.contains(&l),
                (Some(Value::Int(i)), Some(Value::SetInt(set))) => set.contains(&i),
                _ => false,
            }
        }
        Formula::Subset(a, b) => match (eval_term(a, env, store), eval_term(b, env, store)) {
            (Some(Value::SetLoc(x)), Some(Value::SetLoc(y))) => x.is_subset(&y),
            (Some(Value::SetInt(x)), Some(Value::SetInt(y))) => x.is_subset(&y),
            _ => false,
        },
        Formula::IsEmpty(a) => match eval_term(a, env, store) {
            Some(Value::SetLoc(s)) => s.is_empty(),
            Some(Value::SetInt(s)) => s.is_empty(),
            _ => false,
        },
        Formula::RecPred(p, args) => {
            let mut locs = Vec::with_capacity(args.len());
            for a in args {
                match eval_term(a, env, store).and_then(|v| v.as_loc()) {
                    Some(l) => locs.push(l),
                    None => return false,
                }
            }
            env.interp.pred(p, &locs)
        }
        Formula::Rel(_, _) => false, // uninterpreted relations: not oracle-evaluable
        Formula::Not(a) => !eval_formula(a, env, store),
        Formula::And(fs) => fs.iter().all(|g| eval_formula(g, env, store)),
        Formula::Or(fs) => fs.iter().any(|g| eval_formula(g, env, store)),
        Formula::Iff(a, b) => eval_formula(a, env, store) == eval_formula(b, env, store),
        Formula::Ite(g, a, b) => {
            if eval_formula(g, env, store) {
                eval_formula(a, env, store)
            } else {
                eval_formula(b, env, store)
            }
        }
        Formula::Exists {
            var, field, arg, body, ..
        } => {
            // truth of ∃y: y=f(x).φ equals φ[y ↦ f(x)]
            let l = match eval_term(arg, env, store).and_then(|v| v.as_loc()) {
                Some(l) => l,
                None => return false,
            };
            let v = match env.field_at(field, l, store) {
                Some(v) => v,
                None => return false,
            };
            let mut st = store.clone();
            st.insert(var.clone(), v);
            eval_formula(body, env, &st)
        }
        Formula::Cloud(a) => eval_formula(a, env, store),
        Formula::ForallLoc { vars, body } => {
            let universe: Vec<Loc> = env.model.universe().collect();
            let mut assignment = vec![0usize; vars.len()];
            loop {
                let mut st = store.clone();
                for (v, idx) in vars.iter().zip(assignment.iter()) {
                    st.insert(v.clone(), Value::Loc(universe[*idx]));
                }
                if !eval_formula(body, env, &st) {
                    return false;
                }
                // odometer
                let mut i = 0;
                loop {
                    if i == assignment.len() {
                        return true;
                    }
                    assignment[i] += 1;
                    if assignment[i] < universe.len() {
                        break;
                    }
                    assignment[i] = 0;
                    i += 1;
                }
            }
        }
    }
}

fn cmp(
    a: &Term,
    b: &Term,
    env: &Env,
    store: &Store,
    op: impl Fn(i64, i64) -> bool,
) -> bool {
    match (
        eval_term(a, env, store).and_then(|v| v.as_int()),
        eval_term(b, env, store).and_then(|v| v.as_int()),
    ) {
        (Some(x), Some(y)) => op(x, y),
        _ => false,
    }
}

/// Support of a formula per the least-fixpoint support equations; recursive
/// symbols use the precomputed support tables.
pub fn eval_support_formula(f: &Formula, env: &Env, store: &Store) -> BTreeSet<Loc> {
    match f {
        Formula::True | Formula::False => BTreeSet::new(),
        Formula::Eq(a, b) | Formula::Lt(a, b) | Formula::Le(a, b) => {
            union(eval_support_term(a, env, store), eval_support_term(b, env, store))
        }
        Formula::Member(a, b) | Formula::Subset(a, b) => {
            union(eval_support_term(a, env, store), eval_support_term(b, env, store))
        }
        Formula::IsEmpty(a) => eval_support_term(a, env, store),
        Formula::RecPred(p, args) => {
            let mut out = BTreeSet::new();
            let mut locs = Vec::with_capacity(args.len());
            let mut ok = true;
            for a in args {
                out.extend(eval_support_term(a, env, store));
                match eval_term(a, env, store).and_then(|v| v.as_loc()) {
                    Some(l) => locs.push(l),
                    None => ok = false,
                }
            }
            if ok {
                out.extend(env.interp.sp(p, &locs));
            }
            out
        }
        Formula::Rel(_, args) => {
            let mut out = BTreeSet::new();
            for a in args {
                out.extend(eval_support_term(a, env, store));
            }
            out
        }
        Formula::Not(a) => eval_support_formula(a, env, store),
        Formula::And(fs) | Formula::Or(fs) => {
            let mut out = BTreeSet::new();
            for g in fs {
                out.extend(eval_support_formula(g, env, store));
            }
            out
        }
        Formula::Iff(a, b) => union(
            eval_support_formula(a, env, store),
            eval_support_formula(b, env, store),
        ),
        Formula::Ite(g, a, b) => {
            let mut out = eval_support_formula(g, env, store);
            if eval_formula(g, env, store) {
                out.extend(eval_support_formula(a, env, store));
            } else {
                out.extend(eval_support_formula(b, env, store));
            }
            out
        }
        Formula::Exists {
            var, field, arg, body, ..
        } => {
            // {⟦arg⟧} ∪ Sp(arg) ∪ Sp(φ)[var ↦ f(arg)]
            let mut out = eval_support_term(arg, env, store);
            if let Some(l) = eval_term(arg, env, store).and_then(|v| v.as_loc()) {
                out.insert(l);
                if let Some(v) = env.field_at(field, l, store) {
                    let mut st = store.clone();
                    st.insert(var.clone(), v);
                    out.extend(eval_support_formula(body, env, &st));
                }
            }
            out
        }
        Formula::Cloud(_) => BTreeSet::new(),
        Formula::ForallLoc { .. } => {
            panic!("support of a universally quantified formula is outside the fragment")
        }
    }
}

pub fn eval_support_term(t: &Term, env: &Env, store: &Store) -> BTreeSet<Loc> {
    match t {
        Term::Var(_) | Term::Nil | Term::Const(_) | Term::IntLit(_) | Term::Empty(_) => {
            BTreeSet::new()
        }
        Term::Field(_, a) => {
            // mutable function: {⟦a⟧} ∪ Sp(a)
            let mut out = eval_support_term(a, env, store);
            if let Some(l) = eval_term(a, env, store).and_then(|v| v.as_loc()) {
                out.insert(l);
            }
            out
        }
        Term::App(_, args) => {
            let mut out = BTreeSet::new();
            for a in args {
                out.extend(eval_support_term(a, env, store));
            }
            out
        }
        Term::RecFn(f, args) => {
            let mut out = BTreeSet::new();
            let mut locs = Vec::with_capacity(args.len());
            let mut ok = true;
            for a in args {
                out.extend(eval_support_term(a, env, store));
                match eval_term(a, env, store).and_then(|v| v.as_loc()) {
                    Some(l) => locs.push(l),
                    None => ok = false,
                }
            }
            if ok {
                out.extend(env.interp.sp(f, &locs));
            }
            out
        }
        Term::Ite(g, a, b) => {
            let mut out = eval_support_formula(g, env, store);
            if eval_formula(g, env, store) {
                out.extend(eval_support_term(a, env, store));
            } else {
                out.extend(eval_support_term(b, env, store));
            }
            out
        }
        Term::Sp(arg) => eval_support_sparg(arg, env, store),
        Term::Cloud(_) => BTreeSet::new(),
        Term::Old(_) => panic!("Old(..) must be resolved before oracle evaluation"),
        Term::Singleton(a) => eval_support_term(a, env, store),
        Term::Union(a, b) | Term::Inter(a, b) | Term::Diff(a, b) | Term::Add(a, b)
        | Term::Sub(a, b) => union(
            eval_support_term(a, env, store),
            eval_support_term(b, env, store),
        ),
    }
}

fn eval_support_sparg(arg: &SpArg, env: &Env, store: &Store) -> BTreeSet<Loc> {
    match arg {
        SpArg::Formula(f) => eval_support_formula(f, env, store),
        SpArg::Term(t) => eval_support_term(t, env, store),
    }
}

fn union(mut a: BTreeSet<Loc>, b: BTreeSet<Loc>) -> BTreeSet<Loc> {
    a.extend(b);
    a
}
