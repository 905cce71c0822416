//! Exact computations with algebraic cellular automata.
//!
//! Alphabets are point sets of affine varieties over `F_p` or `Q` (or
//! explicit finite tables), local rules are polynomial maps, and groups
//! are `Z^d` or finite groups given by a multiplication table.

pub mod algebra;
pub mod alphabet;
pub mod automaton;
pub mod error;
pub mod groups;
pub mod limits;
pub mod periodic;

pub use error::{Error, Result};
