//! SL-FL semantics on finite heaplets: the mutually recursive support and
//! satisfaction definitions, extended to recursive definitions by
//! unfolding (least fixpoint via in-progress-bottom memoization).
//!
//! Set operations on supports that evaluate to ⊥ evaluate to ⊥; ⊥ sits
//! above all sets. Existential heaplet splits (`⋆` pins its operands'
//! domains through the support map; `∧∧`, `∨` and `ite` quantify over
//! subheaplets) are enumerated literally.

use super::enumerate::subsets;
use super::model::{FiniteModel, Loc, Store, Value, NIL};
use super::{ORACLE_NINF, ORACLE_PINF};
use crate::ast::{SlFormula, SlRecBody, SlRecDef, SlTerm, Sort};

fn sl_body_set_sort(t: &SlTerm) -> Option<Sort> {
    match t {
        SlTerm::Empty(s) => Some(*s),
        SlTerm::Union(a, b) | SlTerm::Inter(a, b) | SlTerm::Diff(a, b) => {
            sl_body_set_sort(a).or_else(|| sl_body_set_sort(b))
        }
        SlTerm::Ite(_, a, b) => sl_body_set_sort(a).or_else(|| sl_body_set_sort(b)),
        SlTerm::Old(a) => sl_body_set_sort(a),
        _ => None,
    }
}
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Supp {
    Set(BTreeSet<Loc>),
    Bot,
}

impl Supp {
    pub fn set(self) -> Option<BTreeSet<Loc>> {
        match self {
            Supp::Set(s) => Some(s),
            Supp::Bot => None,
        }
    }
    fn union(self, other: Supp) -> Supp {
        match (self, other) {
            (Supp::Set(mut a), Supp::Set(b)) => {
                a.extend(b);
                Supp::Set(a)
            }
            _ => Supp::Bot,
        }
    }
}

/// A heaplet: a model plus the common domain of its field functions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dom(pub BTreeSet<Loc>);

pub struct SlEval<'a> {
    pub model: &'a FiniteModel,
    pub defs: BTreeMap<String, &'a SlRecDef>,
    // memo tables keyed by (symbol, args, domain); `None` marks in-progress
    sat_memo: RefCell<HashMap<(String, Vec<Loc>, Vec<Loc>), Option<bool>>>,
    supp_memo: RefCell<HashMap<(String, Vec<Loc>, Vec<Loc>), Option<Supp>>>,
    val_memo: RefCell<HashMap<(String, Vec<Loc>, Vec<Loc>), Option<Option<Value>>>>,
}

impl<'a> SlEval<'a> {
    pub fn new(model: &'a FiniteModel, defs: &'a [SlRecDef]) -> Self {
        SlEval {
            model,
            defs: defs.iter().map(|d| (d.name.clone(), d)).collect(),
            sat_memo: RefCell::new(HashMap::new()),
            supp_memo: RefCell::new(HashMap::new()),
            val_memo: RefCell::new(HashMap::new()),
        }
    }

    fn restricted(&self, dom: &BTreeSet<Loc>, sub: &BTreeSet<Loc>) -> BTreeSet<Loc> {
        dom.intersection(sub).copied().collect()
    }

    // -- terms ---------------------------------------------------------------

    /// Term value within a heaplet; dereferences outside the domain are
    /// undefined.
    pub fn term(&self, t: &SlTerm, s: &Store, dom: &BTreeSet<Loc>) -> Option<Value> {
        match t {
            SlTerm::Var(v) => s.get(v).cloned(),
            SlTerm::Nil => Some(Value::Loc(NIL)),
            SlTerm::Const(c) => match c.as_str() {
                "PInf" => Some(Value::Int(ORACLE_PINF)),
                "NInf" => Some(Value::Int(ORACLE_NINF)),
                _ => s.get(c).cloned(),
            },
            SlTerm::IntLit(n) => Some(Value::Int(*n)),
            SlTerm::Deref(base, f) => {
                let l = self.term(base, s, dom)?.as_loc()?;
                if !dom.contains(&l) {
                    return None;
                }
                self.model.field_value(f, l)
            }
            SlTerm::RecFn(name, args) => {
                let locs = self.arg_locs(args, s, dom)?;
                self.rec_value(name, &locs, dom)
            }
            SlTerm::Ite(g, a, b) => {
                let sg = self.supp(g, s, dom).set()?;
                if self.sat(g, s, &self.restricted(dom, &sg)) {
                    self.term(a, s, dom)
                } else {
                    self.term(b, s, dom)
                }
            }
            SlTerm::Old(_) => panic!("Old(..) must be resolved before SL-FL evaluation"),
            SlTerm::Empty(sort) => Some(Value::empty_of(*sort)),
            SlTerm::Singleton(a) => match self.term(a, s, dom)? {
                Value::Loc(l) => Some(Value::SetLoc([l].into_iter().collect())),
                Value::Int(i) => Some(Value::SetInt([i].into_iter().collect())),
                _ => None,
            },
            SlTerm::Union(a, b) | SlTerm::Inter(a, b) | SlTerm::Diff(a, b) => {
                let va = self.term(a, s, dom)?;
                let vb = self.term(b, s, dom)?;
                match (va, vb) {
                    (Value::SetInt(x), Value::SetInt(y)) => Some(Value::SetInt(match t {
                        SlTerm::Union(_, _) => x.union(&y).cloned().collect(),
                        SlTerm::Inter(_, _) => x.intersection(&y).cloned().collect(),
                        _ => x.difference(&y).cloned().collect(),
                    })),
                    (Value::SetLoc(x), Value::SetLoc(y)) => Some(Value::SetLoc(match t {
                        SlTerm::Union(_, _) => x.union(&y).cloned().collect(),
                        SlTerm::Inter(_, _) => x.intersection(&y).cloned().collect(),
                        _ => x.difference(&y).cloned().collect(),
                    })),
                    _ => None,
                }
            }
            SlTerm::Add(a, b) => Some(Value::Int(
                self.term(a, s, dom)?.as_int()? + self.term(b, s, dom)?.as_int()?,
            )),
            SlTerm::Sub(a, b) => Some(Value::Int(
                self.term(a, s, dom)?.as_int()? - self.term(b, s, dom)?.as_int()?,
            )),
        }
    }

    fn arg_locs(&self, args: &[SlTerm], s: &Store, dom: &BTreeSet<Loc>) -> Option<Vec<Loc>> {
        args.iter()
            .map(|a| self.term(a, s, dom).and_then(|v| v.as_loc()))
            .collect()
    }

    /// Support of a term: dereferenced locations, ⊥ when a dereference
    /// falls outside the heaplet.
    pub fn supp_term(&self, t: &SlTerm, s: &Store, dom: &BTreeSet<Loc>) -> Supp {
        match t {
            SlTerm::Var(_) | SlTerm::Nil | SlTerm::Const(_) | SlTerm::IntLit(_)
            | SlTerm::Empty(_) => Supp::Set(BTreeSet::new()),
            SlTerm::Deref(base, _) => {
                let inner = self.supp_term(base, s, dom);
                match self.term(base, s, dom).and_then(|v| v.as_loc()) {
                    Some(l) if dom.contains(&l) => {
                        inner.union(Supp::Set([l].into_iter().collect()))
                    }
                    _ => Supp::Bot,
                }
            }
            SlTerm::RecFn(name, args) => {
                let mut acc = Supp::Set(BTreeSet::new());
                for a in args {
                    acc = acc.union(self.supp_term(a, s, dom));
                }
                match self.arg_locs(args, s, dom) {
                    Some(locs) => acc.union(self.rec_supp(name, &locs, dom)),
                    None => Supp::Bot,
                }
            }
            SlTerm::Ite(g, a, b) => {
                let sg = match self.supp(g, s, dom) {
                    Supp::Set(s) => s,
                    Supp::Bot => return Supp::Bot,
                };
                let branch = if self.sat(g, s, &self.restricted(dom, &sg)) {
                    self.supp_term(a, s, dom)
                } else {
                    self.supp_term(b, s, dom)
                };
                Supp::Set(sg).union(branch)
            }
            SlTerm::Old(_) => panic!("Old(..) must be resolved before SL-FL evaluation"),
            SlTerm::Singleton(a) => self.supp_term(a, s, dom),
            SlTerm::Union(a, b)
            | SlTerm::Inter(a, b)
            | SlTerm::Diff(a, b)
            | SlTerm::Add(a, b)
            | SlTerm::Sub(a, b) => self.supp_term(a, s, dom).union(self.supp_term(b, s, dom)),
        }
    }

    // -- recursive definitions -----------------------------------------------

    fn rec_key(&self, name: &str, args: &[Loc], dom: &BTreeSet<Loc>) -> (String, Vec<Loc>, Vec<Loc>) {
        (
            name.to_string(),
            args.to_vec(),
            dom.iter().copied().collect(),
        )
    }

    fn rec_store(&self, def: &SlRecDef, args: &[Loc]) -> Store {
        def.params
            .iter()
            .zip(args.iter())
            .map(|(p, l)| (p.clone(), Value::Loc(*l)))
            .collect()
    }

    fn rec_sat(&self, name: &str, args: &[Loc], dom: &BTreeSet<Loc>) -> bool {
        let key = self.rec_key(name, args, dom);
        if let Some(state) = self.sat_memo.borrow().get(&key) {
            return state.unwrap_or(false); // in-progress ⇒ bottom (false)
        }
        let Some(def) = self.defs.get(name).copied() else {
            return false;
        };
        self.sat_memo.borrow_mut().insert(key.clone(), None);
        let st = self.rec_store(def, args);
        let result = match &def.body {
            SlRecBody::Formula(body) => self.sat(body, &st, dom),
            SlRecBody::Term(_) => false,
        };
        self.sat_memo.borrow_mut().insert(key, Some(result));
        result
    }

    fn rec_supp(&self, name: &str, args: &[Loc], dom: &BTreeSet<Loc>) -> Supp {
        let key = self.rec_key(name, args, dom);
        if let Some(state) = self.supp_memo.borrow().get(&key) {
            return match state {
                Some(s) => s.clone(),
                None => Supp::Set(BTreeSet::new()), // in-progress ⇒ least element
            };
        }
        let Some(def) = self.defs.get(name).copied() else {
            return Supp::Set(BTreeSet::new());
        };
        self.supp_memo.borrow_mut().insert(key.clone(), None);
        let st = self.rec_store(def, args);
        let mut result = match &def.body {
            SlRecBody::Formula(body) => self.supp(body, &st, dom),
            SlRecBody::Term(body) => self.supp_term(body, &st, dom),
        };
        // iterate the unfolding until the support stabilizes (the memo
        // carries the previous approximation through recursive occurrences)
        for _ in 0..dom.len() + 2 {
            self.supp_memo
                .borrow_mut()
                .insert(key.clone(), Some(result.clone()));
            let next = match &def.body {
                SlRecBody::Formula(body) => self.supp(body, &st, dom),
                SlRecBody::Term(body) => self.supp_term(body, &st, dom),
            };
            if next == result {
                break;
            }
            result = next;
        }
        self.supp_memo.borrow_mut().insert(key, Some(result.clone()));
        result
    }

    fn rec_value(&self, name: &str, args: &[Loc], dom: &BTreeSet<Loc>) -> Option<Value> {
        let key = self.rec_key(name, args, dom);
        let def = self.defs.get(name).copied()?;
        // set-valued definitions take their least fixpoint in the
        // ⊆-lattice: the in-progress value is the empty set and the
        // unfolding iterates until stable; flat sorts bottom out at None
        let bottom = match &def.body {
            SlRecBody::Term(body) => match sl_body_set_sort(body) {
                Some(Sort::SetLoc) => Some(Value::SetLoc(BTreeSet::new())),
                Some(Sort::SetInt) => Some(Value::SetInt(BTreeSet::new())),
                _ => None,
            },
            SlRecBody::Formula(_) => None,
        };
        if let Some(state) = self.val_memo.borrow().get(&key) {
            return match state {
                Some(v) => v.clone(),
                None => bottom.clone(), // in-progress
            };
        }
        self.val_memo.borrow_mut().insert(key.clone(), None);
        let st = self.rec_store(def, args);
        let eval_once = |me: &Self| match &def.body {
            SlRecBody::Term(body) => me.term(body, &st, dom),
            SlRecBody::Formula(_) => None,
        };
        let mut result = eval_once(self);
        if bottom.is_some() {
            for _ in 0..dom.len() + 2 {
                self.val_memo
                    .borrow_mut()
                    .insert(key.clone(), Some(result.clone()));
                let next = eval_once(self);
                if next == result {
                    break;
                }
                result = next;
            }
        }
        self.val_memo.borrow_mut().insert(key, Some(result.clone()));
        result
    }

    // -- formulas --------------------------------------------------------------

    /// Support of a formula with respect to a heaplet.
    pub fn supp(&self, f: &SlFormula, s: &Store, dom: &BTreeSet<Loc>) -> Supp {
        match f {
            SlFormula::True | SlFormula::False => Supp::Set(BTreeSet::new()),
            SlFormula::Eq(a, b)
            | SlFormula::Ne(a, b)
            | SlFormula::Lt(a, b)
            | SlFormula::Le(a, b)
            | SlFormula::Member(a, b) => {
                self.supp_term(a, s, dom).union(self.supp_term(b, s, dom))
            }
            SlFormula::IsEmpty(a) => self.supp_term(a, s, dom),
            SlFormula::PointsTo { src, .. } => match s.get(src).and_then(|v| v.as_loc()) {
                Some(l) if dom.contains(&l) => Supp::Set([l].into_iter().collect()),
                _ => Supp::Bot,
            },
            SlFormula::Star(a, b) | SlFormula::And(a, b) | SlFormula::WeakAnd(a, b)
            | SlFormula::Or(a, b) => self.supp(a, s, dom).union(self.supp(b, s, dom)),
            SlFormula::Ite(g, a, b) => {
                // branch selection depends on the guard alone (evaluated on
                // its own heaplet); the union with the selected branch's
                // support is strict in ⊥
                let sg = match self.supp(g, s, dom) {
                    Supp::Set(x) => x,
                    Supp::Bot => return Supp::Bot,
                };
                let guard_holds = self.sat(g, s, &self.restricted(dom, &sg));
                if guard_holds {
                    Supp::Set(sg).union(self.supp(a, s, dom))
                } else {
                    Supp::Set(sg).union(self.supp(b, s, dom))
                }
            }
            SlFormula::Exists {
                var,
                src,
                field,
                body,
            } => {
                let l = match s.get(src).and_then(|v| v.as_loc()) {
                    Some(l) => l,
                    None => return Supp::Bot,
                };
                if !dom.contains(&l) {
                    return Supp::Bot;
                }
                let v = match self.model.field_value(field, l) {
                    Some(v) => v,
                    None => return Supp::Bot,
                };
                let mut st = s.clone();
                st.insert(var.clone(), v);
                Supp::Set([l].into_iter().collect()).union(self.supp(body, &st, dom))
            }
            SlFormula::RecPred(name, args) => {
                let mut acc = Supp::Set(BTreeSet::new());
                for a in args {
                    acc = acc.union(self.supp_term(a, s, dom));
                }
                match self.arg_locs(args, s, dom) {
                    Some(locs) => acc.union(self.rec_supp(name, &locs, dom)),
                    None => Supp::Bot,
                }
            }
        }
    }

    /// Satisfaction `(s, h↾dom) ⊨ f`.
    pub fn sat(&self, f: &SlFormula, s: &Store, dom: &BTreeSet<Loc>) -> bool {
        match f {
            // heap-independent and extended atoms: the heaplet must be
            // exactly the atom's support and the atom must hold
            SlFormula::True
            | SlFormula::False
            | SlFormula::Eq(_, _)
            | SlFormula::Ne(_, _)
            | SlFormula::Lt(_, _)
            | SlFormula::Le(_, _)
            | SlFormula::Member(_, _)
            | SlFormula::IsEmpty(_) => {
                match self.supp(f, s, dom) {
                    Supp::Set(sp) if sp == *dom => self.atom_holds(f, s, dom),
                    _ => false,
                }
            }
            SlFormula::PointsTo { src, field, dst } => {
                let Some(l) = s.get(src).and_then(|v| v.as_loc()) else {
                    return false;
                };
                if *dom != [l].into_iter().collect::<BTreeSet<_>>() {
                    return false;
                }
                let Some(actual) = self.model.field_value(field, l) else {
                    return false;
                };
                match self.term(dst, s, dom) {
                    Some(v) => v == actual,
                    None => false,
                }
            }
            SlFormula::Star(a, b) => {
                let Some(s1) = self.supp(a, s, dom).set() else {
                    return false;
                };
                let Some(s2) = self.supp(b, s, dom).set() else {
                    return false;
                };
                if !s1.is_subset(dom) || !s2.is_subset(dom) {
                    return false;
                }
                let union: BTreeSet<Loc> = s1.union(&s2).copied().collect();
                if union != *dom || !s1.is_disjoint(&s2) {
                    return false;
                }
                self.sat(a, s, &s1) && self.sat(b, s, &s2)
            }
            SlFormula::And(a, b) => self.sat(a, s, dom) && self.sat(b, s, dom),
            SlFormula::WeakAnd(a, b) => {
                let elems: Vec<Loc> = dom.iter().copied().collect();
                for s1 in subsets(&elems) {
                    for s2 in subsets(&elems) {
                        if s1.union(&s2).copied().collect::<BTreeSet<_>>() != *dom {
                            continue;
                        }
                        if self.sat(a, s, &s1) && self.sat(b, s, &s2) {
                            return true;
                        }
                    }
                }
                false
            }
            SlFormula::Or(a, b) => {
                let elems: Vec<Loc> = dom.iter().copied().collect();
                for s1 in subsets(&elems) {
                    let self_supported_a = self.supp(a, s, &s1) == Supp::Set(s1.clone());
                    if !self_supported_a {
                        continue;
                    }
                    for s2 in subsets(&elems) {
                        if s1.union(&s2).copied().collect::<BTreeSet<_>>() != *dom {
                            continue;
                        }
                        if self.supp(b, s, &s2) != Supp::Set(s2.clone()) {
                            continue;
                        }
                        if self.sat(a, s, &s1) || self.sat(b, s, &s2) {
                            return true;
                        }
                    }
                }
                false
            }
            SlFormula::Ite(g, a, b) => {
                let elems: Vec<Loc> = dom.iter().copied().collect();
                for s1 in subsets(&elems) {
                    if self.supp(g, s, &s1) != Supp::Set(s1.clone()) {
                        continue;
                    }
                    let guard_holds = self.sat(g, s, &s1);
                    for s2 in subsets(&elems) {
                        if s1.union(&s2).copied().collect::<BTreeSet<_>>() != *dom {
                            continue;
                        }
                        if guard_holds {
                            if self.supp(a, s, &s2) == Supp::Set(s2.clone())
                                && self.sat(a, s, &s2)
                            {
                                return true;
                            }
                        } else if self.supp(b, s, &s2) == Supp::Set(s2.clone())
                            && self.sat(b, s, &s2)
                        {
                            return true;
                        }
                    }
                }
                false
            }
            SlFormula::Exists {
                var,
                src,
                field,
                body,
            } => {
                let Some(l) = s.get(src).and_then(|v| v.as_loc()) else {
                    return false;
                };
                if !dom.contains(&l) {
                    return false;
                }
                let Some(v) = self.model.field_value(field, l) else {
                    return false;
                };
                let mut st = s.clone();
                st.insert(var.clone(), v);
                self.sat(body, &st, dom)
            }
            SlFormula::RecPred(name, args) => match self.arg_locs(args, s, dom) {
                Some(locs) => self.rec_sat(name, &locs, dom),
                None => false,
            },
        }
    }

    fn atom_holds(&self, f: &SlFormula, s: &Store, dom: &BTreeSet<Loc>) -> bool {
        match f {
            SlFormula::True => true,
            SlFormula::False => false,
            SlFormula::Eq(a, b) => match (self.term(a, s, dom), self.term(b, s, dom)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            },
            SlFormula::Ne(a, b) => match (self.term(a, s, dom), self.term(b, s, dom)) {
                (Some(x), Some(y)) => x != y,
                _ => false,
            },
            SlFormula::Lt(a, b) => match (
                self.term(a, s, dom).and_then(|v| v.as_int()),
                self.term(b, s, dom).and_then(|v| v.as_int()),
            ) {
                (Some(x), Some(y)) => x < y,
                _ => false,
            },
            SlFormula::Le(a, b) => match (
                self.term(a, s, dom).and_then(|v| v.as_int()),
                self.term(b, s, dom).and_then(|v| v.as_int()),
            ) {
                (Some(x), Some(y)) => x <= y,
                _ => false,
            },
            SlFormula::Member(e, st) => match (self.term(e, s, dom), self.term(st, s, dom)) {
                (Some(Value::Int(i)), Some(Value::SetInt(set))) => set.contains(&i),
                (Some(Value::Loc(l)), Some(Value::SetLoc(set))) => set.contains(&l),
                _ => false,
            },
            SlFormula::IsEmpty(a) => match self.term(a, s, dom) {
                Some(Value::SetInt(set)) => set.is_empty(),
                Some(Value::SetLoc(set)) => set.is_empty(),
                _ => false,
            },
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::LogicMode;
    use crate::parser::parse_module;

    fn model() -> FiniteModel {
        // e1 -> e2 -> nil, keys 5, 7
        let mut m = FiniteModel::new(2, &["next"], &["key"]);
        m.ptr.get_mut("next").unwrap()[1] = 2;
        m.data.get_mut("key").unwrap()[1] = 5;
        m.data.get_mut("key").unwrap()[2] = 7;
        m
    }

    fn store(pairs: &[(&str, Loc)]) -> Store {
        pairs
            .iter()
            .map(|(n, l)| (n.to_string(), Value::Loc(*l)))
            .collect()
    }

    fn pto(x: &str, f: &str, y: &str) -> SlFormula {
        SlFormula::PointsTo {
            src: x.into(),
            field: f.into(),
            dst: SlTerm::Var(y.into()),
        }
    }

    #[test]
    fn points_to_requires_singleton_domain() {
        let m = model();
        let ev = SlEval::new(&m, &[]);
        let s = store(&[("x", 1), ("y", 2)]);
        let f = pto("x", "next", "y");
        assert!(ev.sat(&f, &s, &[1].into_iter().collect()));
        assert!(!ev.sat(&f, &s, &[1, 2].into_iter().collect()));
        assert!(!ev.sat(&f, &s, &BTreeSet::new()));
    }

    #[test]
    fn supp_of_points_to_outside_domain_is_bot() {
        let m = model();
        let ev = SlEval::new(&m, &[]);
        let s = store(&[("x", 1), ("y", 2)]);
        let f = pto("x", "next", "y");
        assert_eq!(ev.supp(&f, &s, &[2].into_iter().collect()), Supp::Bot);
        assert_eq!(
            ev.supp(&f, &s, &[1, 2].into_iter().collect()),
            Supp::Set([1].into_iter().collect())
        );
    }

    #[test]
    fn heap_independent_needs_empty_domain() {
        let m = model();
        let ev = SlEval::new(&m, &[]);
        let s = store(&[("x", 1)]);
        assert!(ev.sat(&SlFormula::True, &s, &BTreeSet::new()));
        assert!(!ev.sat(&SlFormula::True, &s, &[1].into_iter().collect()));
        let eq = SlFormula::Eq(SlTerm::Var("x".into()), SlTerm::Var("x".into()));
        assert!(ev.sat(&eq, &s, &BTreeSet::new()));
        assert!(!ev.sat(&eq, &s, &[1].into_iter().collect()));
    }

    #[test]
    fn star_splits_deterministically() {
        let m = model();
        let ev = SlEval::new(&m, &[]);
        let s = store(&[("x", 1), ("y", 2), ("z", 0)]);
        // x↪next y ⋆ y↪next z holds exactly on {1,2}
        let f = SlFormula::Star(
            Box::new(pto("x", "next", "y")),
            Box::new(pto("y", "next", "z")),
        );
        assert!(ev.sat(&f, &s, &[1, 2].into_iter().collect()));
        assert!(!ev.sat(&f, &s, &[1].into_iter().collect()));
        // overlapping star is unsatisfiable: x↪y ⋆ x↪y
        let g = SlFormula::Star(
            Box::new(pto("x", "next", "y")),
            Box::new(pto("x", "next", "y")),
        );
        assert!(!ev.sat(&g, &s, &[1].into_iter().collect()));
    }

    #[test]
    fn sl_list_definition() {
        let module = parse_module(
            r#"
logic slfl;
List(x) := ite( x = nil, True, Exists y:  next(x). (next(x) = next(x)) * List(y))
"#,
            Some(LogicMode::Slfl),
        )
        .unwrap();
        let m = model();
        let ev = SlEval::new(&m, &module.sl_defs);
        let s = store(&[("x", 1)]);
        let list_x = SlFormula::RecPred("List".into(), vec![SlTerm::Var("x".into())]);
        // List(e1) holds exactly on {e1, e2}
        assert!(ev.sat(&list_x, &s, &[1, 2].into_iter().collect()));
        assert!(!ev.sat(&list_x, &s, &[1].into_iter().collect()));
        assert!(!ev.sat(&list_x, &s, &BTreeSet::new()));
        assert_eq!(
            ev.supp(&list_x, &s, &[1, 2].into_iter().collect()),
            Supp::Set([1, 2].into_iter().collect())
        );
        // List(nil) holds exactly on ∅
        let s0 = store(&[("x", 0)]);
        assert!(ev.sat(&list_x, &s0, &BTreeSet::new()));
        assert!(!ev.sat(&list_x, &s0, &[1].into_iter().collect()));
    }

    #[test]
    fn sl_list_false_on_cycle() {
        let module = parse_module(
            r#"
logic slfl;
List(x) := ite( x = nil, True, Exists y:  next(x). (next(x) = next(x)) * List(y))
"#,
            Some(LogicMode::Slfl),
        )
        .unwrap();
        let mut m = FiniteModel::new(2, &["next"], &["key"]);
        m.ptr.get_mut("next").unwrap()[1] = 2;
        m.ptr.get_mut("next").unwrap()[2] = 1;
        let ev = SlEval::new(&m, &module.sl_defs);
        let s = store(&[("x", 1)]);
        let list_x = SlFormula::RecPred("List".into(), vec![SlTerm::Var("x".into())]);
        for dom in crate::oracle::enumerate::domains(&m) {
            assert!(!ev.sat(&list_x, &s, &dom), "cycle satisfied List on {dom:?}");
        }
    }
}
