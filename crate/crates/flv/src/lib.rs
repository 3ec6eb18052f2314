//! Frame Logic verifier library.
//!
//! Pipeline: parse → (optional SL-FL → FL translation) → cloud elimination →
//! basic blocks and proof obligations → logical-configuration VC transformer →
//! FORD translation → natural-proofs discharge through an external SMT
//! solver. A finite-model oracle provides brute-force ground truth at desk
//! scale.

pub mod ast;
pub mod cloudify;
pub mod ford;
pub mod oracle;
pub mod parser;
pub mod pipeline;
pub mod prover;
pub mod slfl;
pub mod vcgen;
