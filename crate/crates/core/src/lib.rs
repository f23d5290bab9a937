//! Gaussian continuous-variable correlation measures, entanglement
//! distribution protocols and two-degree-of-freedom vector-field polarimetry.

// Negated comparisons are the NaN-rejecting input guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod measures;
pub mod optimize;
pub mod protocols;
pub mod quadrature;
pub mod random_states;
pub mod vector_fields;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, ModeBipartition};
