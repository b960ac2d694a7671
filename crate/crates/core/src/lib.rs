//! Quaternion calculus with the left and right restricted HR gradient
//! operators.

pub mod error;
pub mod fd;
pub mod hr;
pub mod qlms;
pub mod quaternion;
pub mod regular;
pub mod samples;
pub mod validation;

pub use error::{Error, Result};
pub use hr::*;
pub use quaternion::{components_from_involutions, AxisUnit, PolarForm, Quaternion};
