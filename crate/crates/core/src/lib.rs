//! Three-vertex geometric phases of N-level pure states, drawn on the Bloch
//! sphere through the Majorana representation.

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod eraser;
pub mod geomphase;
pub mod majorana;
pub mod roots;
pub mod statekit;
pub mod sweepfamily;

pub use error::{Error, Result};
pub use num_complex::Complex64;
