//! Exact arithmetic: prime fields, rationals, polynomials, interpolation
//! and linear solving.

mod field;
mod interp;
mod linear;
mod parse;
mod poly;
mod univariate;

pub use field::{is_prime, Field, FieldElement, MAX_MODULUS};
pub use interp::{interpolate, interpolate_dense};
pub use linear::{solve_linear, LinearSolution, LinearSystem};
pub use parse::{parse_poly, parse_rule_body, variable_name};
pub use poly::{Monomial, MultiPoly};
pub use univariate::{rational_roots, UniPoly};
