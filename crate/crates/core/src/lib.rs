//! Multiplication-table languages of finitely generated groups.
//!
//! Groups are given by a choice of generators ([`groups::GroupSpec`]), and
//! the table `M = {u#v#w : u, v, w ∈ R, ūv̄w̄ = 1}` over a regular combing
//! `R` is studied through acceptors, transducers and context-free grammars.

pub mod automata;
pub mod error;
pub mod grammars;
pub mod groups;
pub mod hyperbolicity;
pub mod limits;
pub mod table;
pub mod transducers;
pub mod words;

pub use error::{Error, Result};
pub use limits::Limits;
