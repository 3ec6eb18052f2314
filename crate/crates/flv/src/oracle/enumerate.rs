//! Exhaustive enumeration of small models, stores, and heaplet domains.

use super::model::{FiniteModel, Loc, Store, Value, NIL};
use crate::ast::Sort;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone)]
pub struct EnumCfg {
    pub max_locs: usize,
    pub ptr_fields: Vec<String>,
    pub data_fields: Vec<String>,
    pub data_values: Vec<i64>,
    /// When set, nil's field entries are fixed (next=nil, data=first value)
    /// instead of enumerated; formulas in the corpus never dereference nil.
    pub fix_nil_fields: bool,
}

impl EnumCfg {
    pub fn new(max_locs: usize, ptr_fields: &[&str], data_fields: &[&str]) -> Self {
        EnumCfg {
            max_locs,
            ptr_fields: ptr_fields.iter().map(|s| s.to_string()).collect(),
            data_fields: data_fields.iter().map(|s| s.to_string()).collect(),
            data_values: vec![0, 1],
            fix_nil_fields: true,
        }
    }

    pub fn with_data_values(mut self, vals: &[i64]) -> Self {
        self.data_values = vals.to_vec();
        self
    }

    pub fn enumerate_nil_fields(mut self) -> Self {
        self.fix_nil_fields = false;
        self
    }

    /// All models with universe sizes `0..=max_locs`.
    pub fn models(&self) -> Vec<FiniteModel> {
        let mut out = Vec::new();
        for n in 0..=self.max_locs {
            self.models_of_size(n, &mut out);
        }
        out
    }

    fn models_of_size(&self, n: usize, out: &mut Vec<FiniteModel>) {
        let ptr_names: Vec<&str> = self.ptr_fields.iter().map(|s| s.as_str()).collect();
        let data_names: Vec<&str> = self.data_fields.iter().map(|s| s.as_str()).collect();
        let base = FiniteModel::new(n, &ptr_names, &data_names);
        // cells to fill: for each ptr field, locations (1..=n) plus nil when
        // not fixed; same for data fields
        let start = if self.fix_nil_fields { 1 } else { 0 };
        let mut ptr_cells = Vec::new();
        for f in &self.ptr_fields {
            for l in start..=n {
                ptr_cells.push((f.clone(), l));
            }
        }
        let mut data_cells = Vec::new();
        for f in &self.data_fields {
            for l in start..=n {
                data_cells.push((f.clone(), l));
            }
        }
        let ptr_domain = n + 1; // values 0..=n
        let data_domain = self.data_values.len().max(1);
        let total_ptr = (ptr_domain as u128).pow(ptr_cells.len() as u32);
        let total_data = (data_domain as u128).pow(data_cells.len() as u32);
        for pi in 0..total_ptr {
            let mut m = base.clone();
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
                    let v = self.data_values[(rem % data_domain as u128) as usize];
                    rem /= data_domain as u128;
                    m2.data.get_mut(f).unwrap()[*l] = v;
                }
                out.push(m2);
            }
        }
    }
}

/// All stores assigning the given variables: `Loc` variables range over the
/// universe (nil included), `Int` variables over `int_values`.
pub fn stores(
    model: &FiniteModel,
    vars: &BTreeMap<String, Sort>,
    int_values: &[i64],
) -> Vec<Store> {
    let mut out = vec![Store::new()];
    for (v, sort) in vars {
        let choices: Vec<Value> = match sort {
            Sort::Loc => model.universe().map(Value::Loc).collect(),
            Sort::Int => int_values.iter().map(|i| Value::Int(*i)).collect(),
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::SetLoc => subsets(&model.locations().collect::<Vec<_>>())
                .into_iter()
                .map(Value::SetLoc)
                .collect(),
            Sort::SetInt => subsets(int_values)
                .into_iter()
                .map(|s| Value::SetInt(s.into_iter().collect()))
                .collect(),
        };
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for st in &out {
            for c in &choices {
                let mut st2 = st.clone();
                st2.insert(v.clone(), c.clone());
                next.push(st2);
            }
        }
        out = next;
    }
    out
}

/// All subsets of a slice, as `BTreeSet`s.
pub fn subsets<T: Ord + Copy>(items: &[T]) -> Vec<BTreeSet<T>> {
    let mut out = Vec::with_capacity(1 << items.len());
    for mask in 0u32..(1u32 << items.len()) {
        let mut s = BTreeSet::new();
        for (i, item) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s.insert(*item);
            }
        }
        out.push(s);
    }
    out
}

/// All heaplet domains over a model: subsets of the non-nil locations.
pub fn domains(model: &FiniteModel) -> Vec<BTreeSet<Loc>> {
    let locs: Vec<Loc> = model.locations().collect();
    subsets(&locs)
}

/// Convenience: nil never sits in a heaplet domain.
pub fn is_valid_domain(dom: &BTreeSet<Loc>) -> bool {
    !dom.contains(&NIL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_counts() {
        // 1 ptr field, no data, sizes 0..=2, nil fixed:
        // n=0: 1 model; n=1: 2 (next(l1) ∈ {nil,l1}); n=2: 9
        let cfg = EnumCfg::new(2, &["next"], &[]);
        assert_eq!(cfg.models().len(), 1 + 2 + 9);
    }

    #[test]
    fn store_counts() {
        let m = FiniteModel::new(2, &["next"], &[]);
        let mut vars = BTreeMap::new();
        vars.insert("x".to_string(), Sort::Loc);
        vars.insert("k".to_string(), Sort::Int);
        let st = stores(&m, &vars, &[0, 1, 2]);
        assert_eq!(st.len(), 3 * 3); // 3 locations × 3 ints
    }

    #[test]
    fn domains_exclude_nil() {
        let m = FiniteModel::new(2, &["next"], &[]);
        let ds = domains(&m);
        assert_eq!(ds.len(), 4);
        assert!(ds.iter().all(is_valid_domain));
    }
}
