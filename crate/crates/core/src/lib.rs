//! Numerical and exact tools for Hitchin sections, opers, and the conformal
//! limit of harmonic metrics on a genus-two surface.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod exact;
pub mod general_oper;
pub mod hitchin;
pub mod lie;
pub mod linalg;
pub mod oper;
pub mod parallel;
pub mod scaling;
pub mod solver;
pub mod sparse;
pub mod surface;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
