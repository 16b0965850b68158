//! Parsing, model checking, model transforms and proof checking for the
//! epistemic logic of knowing why.

pub mod cli;
pub mod fuzz;
pub mod model;
pub mod proofs;
pub mod semantics;
pub mod syntax;
pub mod terms;
pub mod transforms;
pub mod worlds;
