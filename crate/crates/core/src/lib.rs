mod error;
pub mod cache;
pub mod cohomology;
pub mod experiment;
pub mod field;
pub mod forms;
pub mod grassmannian;
pub mod jacobi;
pub mod linalg;
pub mod poly;

pub use error::{Error, Result};
pub use field::{Field, PrimeField, Rational, Rationals};
