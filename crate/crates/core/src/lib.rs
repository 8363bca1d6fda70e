//! Numerical verification of dynamical r-matrices, Poisson-Lie momentum maps
//! and the associated Poisson groupoids in the defining representations of
//! sl(n) and su(n).

pub mod compact;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod matfun;
pub mod poisson;
pub mod rmatrix;
pub mod sampling;

pub use error::{Error, Result};
