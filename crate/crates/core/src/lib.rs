//! Exact quaternion linear algebra for the five-matrix array `(A, B, C, D, E)`.
//!
//! ```
//! use quatrank::simdecomp::QuintInput;
//! use quatrank::solver::{is_consistent, min_rank_solution_witness, Which};
//! use quatrank::QMatrix;
//!
//! let m = |s: &str| QMatrix::parse_rows(&[&[s]]).unwrap();
//! let q = QuintInput::new(m("k"), m("i"), m("0"), m("j"), m("0"))?;
//! assert!(is_consistent(&q)?.consistent());
//! let (x, y) = min_rank_solution_witness(&q, Which::X)?;
//! assert!(q.residual(&x, &y)?.is_zero());
//! # Ok::<(), quatrank::Error>(())
//! ```

pub mod elimination;
pub mod error;
pub mod extremal;
pub mod gen;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod scalar;
pub mod selftest;
pub mod simdecomp;
pub mod solver;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use matrix::{BlockSpec, QMatrix, RealMatrix};
pub use scalar::{Quaternion, Rational};
