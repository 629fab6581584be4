//! Exact arithmetic for counting and sieving integer points on quadrics.

pub mod arith;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod lattice;
pub mod linalg;
pub mod localdensity;
mod parse;
pub mod poly;
pub mod quadform;

pub use error::{Error, Result};
pub use exec::ExecMode;
pub use poly::IntegerPolynomial;
pub use quadform::{classify_prime, HyperbolicNormalization, QuadraticForm, SplitType};
