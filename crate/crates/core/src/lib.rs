//! Complex rotation numbers of analytic circle diffeomorphisms.
//!
//! The crate computes real rotation numbers and periodic cycles, complex
//! rotation numbers through a least-squares uniformizer, linearizing charts
//! and the moduli of the resulting tori, and the limiting "bubble" shapes
//! that complex rotation numbers trace above rational plateaus.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_map;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod hyperbolic;
pub mod io;
mod quadrature;
mod spectral;
pub mod linearizer;
pub mod real_dynamics;
pub mod uniformizer;
pub mod welder;

pub use circle_map::{CircleMap, Lift, MapDescriptor, C64};
pub use error::{Error, Result};
