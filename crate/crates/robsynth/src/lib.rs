//! Robust controller synthesis from interval temporal logic specifications.
//!
//! Pipeline: QDDC formulas ([`ast`]) are compiled ([`compile`]) to minimal
//! automata ([`dfa`]); supervisors and controllers are synthesized from them
//! ([`synth`]); robustness criteria ([`robust`]) are layered on top and the
//! resulting controllers are measured ([`analyze`]). [`semantics`] is an
//! automaton-free reference evaluator used for cross-checking.

pub mod analyze;
pub mod ast;
pub mod casestudies;
pub mod compile;
pub mod dfa;
pub mod error;
pub mod exec;
pub mod robust;
pub mod semantics;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Exec;
