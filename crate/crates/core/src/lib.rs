//! Rotating Gross-Pitaevskii simulator with independent verification paths.

pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod galilean;
pub mod grid;
pub mod oracle;
pub mod propagator;
pub mod snapshot;
pub mod solver;

pub use error::{GpeError, Result};
pub use grid::{Axis, ComplexField, GridSpec, Norms, PhysicsParams};
