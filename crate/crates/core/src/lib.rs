//! Verification kernel for constant-curvature surfaces of the
//! supersymmetric CP^{N-1} sigma model.
//!
//! Arithmetic is exact within a finite truncation: holomorphic data lives in
//! dense bivariate Taylor jets, odd directions in a finite exterior algebra,
//! so every identity checked here either holds to rounding or fails loudly.

pub mod error;
pub mod geometry;
pub mod grassmann;
pub mod jet;
pub mod superfield;
pub mod verify;

pub use error::{Error, Result};
