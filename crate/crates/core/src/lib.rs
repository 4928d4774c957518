//! Heat equation on the half-line with a non-local dynamic boundary condition.

pub mod cli;
pub mod error;
pub mod functions;
pub mod laplace;
pub mod num;
pub mod operators;
pub mod paths;
pub mod pde;
pub mod problem;
pub mod quad;
pub mod stats;
pub mod symbols;

pub use error::{Error, Result};
pub use problem::Problem;
pub use symbols::{BernsteinSymbol, BoundaryClass};
