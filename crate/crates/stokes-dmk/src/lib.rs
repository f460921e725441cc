//! Dual-space multilevel kernel summation for Stokeslets, stresslets and
//! rotlets in two and three dimensions, free-space and periodic.

// Index loops mirror the tensor formulas; `!(x > 0.0)` checks reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dmk;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod split;
pub mod tree;
pub mod windows;

pub use error::{Error, Result};
pub use oracle::{Mode, ParticleSystem};
pub use split::Kernel;
