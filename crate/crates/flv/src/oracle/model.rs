//! Finite first-order models with explicit small universes.

use crate::ast::Sort;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Locations are small indices; `NIL` is location 0. The universe of a
/// model with `num_locs = n` is `{0, 1, ..., n}`.
pub type Loc = usize;
pub const NIL: Loc = 0;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Loc(Loc),
    Int(i64),
    Bool(bool),
    SetLoc(BTreeSet<Loc>),
    SetInt(BTreeSet<i64>),
}

impl Value {
    pub fn as_loc(&self) -> Option<Loc> {
        match self {
            Value::Loc(l) => Some(*l),
            _ => None,
        }
    }
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
    pub fn empty_of(sort: Sort) -> Value {
        match sort {
            Sort::SetLoc => Value::SetLoc(BTreeSet::new()),
            _ => Value::SetInt(BTreeSet::new()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Loc(NIL) => write!(f, "nil"),
            Value::Loc(l) => write!(f, "l{l}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::SetLoc(s) => {
                let parts: Vec<String> = s
                    .iter()
                    .map(|l| {
                        if *l == NIL {
                            "nil".to_string()
                        } else {
                            format!("l{l}")
                        }
                    })
                    .collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            Value::SetInt(s) => {
                let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

pub type Store = BTreeMap<String, Value>;

/// A finite model: universe `{nil} ∪ {1..num_locs}`, total maps for every
/// mutable function, and an allocated set for configurations. Heap maps
/// are indexed by location (length `num_locs + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    pub num_locs: usize,
    pub ptr: BTreeMap<String, Vec<Loc>>,
    pub data: BTreeMap<String, Vec<i64>>,
}

impl FiniteModel {
    pub fn new(num_locs: usize, ptr_fields: &[&str], data_fields: &[&str]) -> Self {
        let mut ptr = BTreeMap::new();
        for f in ptr_fields {
            ptr.insert(f.to_string(), vec![NIL; num_locs + 1]);
        }
        let mut data = BTreeMap::new();
        for f in data_fields {
            data.insert(f.to_string(), vec![0; num_locs + 1]);
        }
        FiniteModel {
            num_locs,
            ptr,
            data,
        }
    }

    pub fn universe(&self) -> impl Iterator<Item = Loc> {
        0..=self.num_locs
    }

    /// Non-nil locations.
    pub fn locations(&self) -> impl Iterator<Item = Loc> {
        1..=self.num_locs
    }

    pub fn get_ptr(&self, field: &str, l: Loc) -> Option<Loc> {
        self.ptr.get(field).and_then(|v| v.get(l)).copied()
    }

    pub fn get_data(&self, field: &str, l: Loc) -> Option<i64> {
        self.data.get(field).and_then(|v| v.get(l)).copied()
    }

    pub fn field_value(&self, field: &str, l: Loc) -> Option<Value> {
        if let Some(v) = self.get_ptr(field, l) {
            return Some(Value::Loc(v));
        }
        self.get_data(field, l).map(Value::Int)
    }

    /// Grow the universe by one fresh location with default field values
    /// (nil pointers, zero data); returns the new location.
    pub fn grow(&mut self) -> Loc {
        self.num_locs += 1;
        for v in self.ptr.values_mut() {
            v.push(NIL);
        }
        for v in self.data.values_mut() {
            v.push(0);
        }
        self.num_locs
    }

    /// One line per location: `l1: next=l2 key=5 [alloc]`.
    pub fn render(&self, alloc: &BTreeSet<Loc>) -> String {
        let mut out = String::new();
        for l in self.universe() {
            let name = if l == NIL {
                "nil".to_string()
            } else {
                format!("l{l}")
            };
            out.push_str(&name);
            out.push(':');
            for (f, v) in &self.ptr {
                let tgt = v[l];
                let tname = if tgt == NIL {
                    "nil".to_string()
                } else {
                    format!("l{tgt}")
                };
                out.push_str(&format!(" {f}={tname}"));
            }
            for (f, v) in &self.data {
                out.push_str(&format!(" {f}={}", v[l]));
            }
            if alloc.contains(&l) {
                out.push_str(" [alloc]");
            }
            out.push('\n');
        }
        out
    }
}

/// Interpretation of recursive symbols over a fixed model: truth tables for
/// predicates, value tables for background-valued functions (`None` is the
/// flat bottom), and support tables for the `Sp` semantics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interp {
    pub preds: BTreeMap<String, BTreeMap<Vec<Loc>, bool>>,
    pub funcs: BTreeMap<String, BTreeMap<Vec<Loc>, Option<Value>>>,
    pub sps: BTreeMap<String, BTreeMap<Vec<Loc>, BTreeSet<Loc>>>,
}

impl Interp {
    pub fn pred(&self, name: &str, args: &[Loc]) -> bool {
        self.preds
            .get(name)
            .and_then(|t| t.get(args))
            .copied()
            .unwrap_or(false)
    }

    pub fn func(&self, name: &str, args: &[Loc]) -> Option<Value> {
        self.funcs.get(name).and_then(|t| t.get(args)).cloned().flatten()
    }

    pub fn sp(&self, name: &str, args: &[Loc]) -> BTreeSet<Loc> {
        self.sps
            .get(name)
            .and_then(|t| t.get(args))
            .cloned()
            .unwrap_or_default()
    }
}

/// A program configuration `(S, H, A)`; the error configuration is
/// represented by `opsem::Outcome::Bottom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub store: Store,
    pub model: FiniteModel,
    pub alloc: BTreeSet<Loc>,
}
