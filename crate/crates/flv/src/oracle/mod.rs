//! Finite-model ground truth: least-fixpoint evaluation of recursive
//! definitions, FL support semantics, SL-FL heaplet semantics, the
//! operational semantics, and brute-force triple checking.

pub mod enumerate;
pub mod flsem;
pub mod lfp;
pub mod model;
pub mod opsem;
pub mod slflsem;
pub mod triples;

pub use enumerate::EnumCfg;
pub use flsem::{eval_formula, eval_support_formula, eval_support_term, eval_term};
pub use lfp::eval_lfp;
pub use model::{Config, FiniteModel, Interp, Store, Value};

/// Oracle-side integer sentinels for the PInf/NInf surface literals. They
/// sit outside every enumeration window (default -8..8).
pub const ORACLE_PINF: i64 = 100;
pub const ORACLE_NINF: i64 = -100;
