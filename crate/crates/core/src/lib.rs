//! Horizontal curves of polynomial distributions in graphical normal form.
//!
//! Exact rational arithmetic drives the symbolic layers (Lie flags, the
//! annihilator and its Liouville form, jets, rank strata); `f64` drives the
//! numerical ones (curve lifting, endpoint Jacobians, characteristic
//! integration). Most algebraic routines are generic over [`Scalar`].

pub mod annih;
pub mod cli;
pub mod dist;
pub mod endpoint;
pub mod error;
pub mod jets;
pub mod linalg;
pub mod models;
pub mod scalar;
pub mod strata;
pub mod symca;

pub use dist::Distribution;
pub use error::{Error, ErrorKind, Result};
pub use models::Model;
pub use scalar::{Dual, Rational, Scalar};
