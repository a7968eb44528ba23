//! Exact computation of differential graded cell structures for
//! finite-dimensional dg algebras.

pub mod algebra;
pub mod bimodule;
pub mod cells;
pub mod cli;
pub mod commutative;
pub mod examples;
pub mod graded;
pub mod homotopy;
pub mod input;
pub mod linalg;
pub mod poly;
pub mod twisted;
