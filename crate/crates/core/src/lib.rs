//! Gowers uniformity norms over prime fields, the symmetric-polynomial
//! derivative machinery used to analyse them, GF(2) quadratic forms, and
//! low-degree correlation search.

pub mod bits;
pub mod correlation;
pub mod error;
pub mod field;
pub mod functions;
pub mod gowers;
pub mod harness;
pub mod matrix_funcs;
pub mod mc;
pub mod polynomial;
pub mod quadratic;
pub mod symmetric;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldVector, PrimeField};
pub use functions::{FiniteFunction, FunctionDescriptor, MaterializeMode};
pub use matrix_funcs::{ColumnExclusion, MatrixFunction, RowMatrix};
pub use polynomial::MultiIndexPolynomial;
pub use symmetric::SymmetricSpec;
