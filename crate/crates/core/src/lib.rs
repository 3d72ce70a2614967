//! Long-wave models over uneven bottoms.
//!
//! Three models are integrated and compared: the symmetric Boussinesq
//! system, the uncoupled KdV approximation, and its topographically
//! modified variant whose bottom terms are integrated explicitly along
//! characteristics from the KdV solutions.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod boussinesq;
pub mod error;
pub mod experiment;
pub mod findiff;
pub mod grid;
pub mod kdv;
pub mod output;
pub mod scenario;
pub mod trajectory;

pub use error::{Error, Result};
pub use grid::{BathymetryProfile, Field, Grid1D, ModelCoefficients, SolitonSpec, TimeGrid};
pub use trajectory::Trajectory;
