//! Rumin complex and its Laplacians on homogeneous Sasakian models, realized
//! as exact finite matrices per Peter–Weyl block.

pub mod error;
pub mod exterior;
pub mod linalg;
pub mod model;
pub mod operators;
pub mod spectral;
pub mod suite;
pub mod torsion;

pub use error::{Error, Result};
