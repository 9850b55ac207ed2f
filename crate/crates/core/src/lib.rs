//! Computational workbench for Veronese varieties over small finite fields.
//!
//! The crate constructs the plane Veronese varieties of the ternions, the
//! degenerate split quaternions and the sextonions over GF(q), constructs
//! the half dual Segre, dual Segre and dual line Grassmannian varieties
//! independently, and verifies the point-quadric axioms (S1), (S2), (S3)
//! plus the structural parameter claims on the resulting models.

pub mod algebra;
pub mod check;
pub mod dual;
pub mod error;
pub mod field;
pub mod fingerprint;
pub mod geom;
pub mod model;
pub mod quadric;
pub mod symps;
pub mod veronese;

pub use error::{Error, Result};
pub use field::{gf_make, Fe, Field};
pub use model::{Params, VarietyModel};
