//! Matrix Schrödinger operators `-∂² I_n + V(x)`: construction of Hamiltonians
//! with a prescribed constant symmetry matrix, matrix intertwining operators
//! built from kernel data, and minimization of intertwiners by right division
//! with polynomials in the Hamiltonian.
//!
//! Every operator identity is certified by sampling coefficient functions on a
//! grid; see [`sampling`].

pub mod cli;
pub mod diffop;
pub mod error;
pub mod expr;
pub mod kernelbuild;
pub mod linalg;
pub mod minimize;
pub mod sampling;
pub mod symmetry;

pub use error::{Error, Result};
pub use expr::{FnMatrix, ScalarFn};
pub use linalg::{CMatrix, JordanSpec};
pub use sampling::{Grid, Residual, Tolerances};
