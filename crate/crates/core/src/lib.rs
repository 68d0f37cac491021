//! Proximity force approximation and derivative expansion for interactions
//! between gently curved surfaces.
//!
//! Natural units are used throughout (hbar = c = 1). Lengths carry whatever
//! unit the caller chooses; energies come out in the matching inverse unit.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod casimir_polder;
pub mod de;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod numerics;
pub mod perturbative;
pub mod proximity;
pub mod thermal;

pub use error::{Error, Result};
pub use numerics::{QuadOptions, QuadratureResult, SmallKFit};
