//! Dominative p-Laplace operator, fundamental solutions, and numerical
//! certificates for superposition of p-superharmonic functions.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fields;
pub mod fundsol;
pub mod linalg;
pub mod operators;
pub mod radial;
pub mod sampling;
pub mod scenario;
pub mod superposition;

pub use error::{Error, Result};
pub use fields::{fd_jet, Isometry, Jet2, ScalarField, Term};
pub use fundsol::{CylFundamental, RadialFundamental};
pub use linalg::{Matrix, SymMatrix, Vector};
pub use operators::PValue;
pub use radial::RadialProfile;
