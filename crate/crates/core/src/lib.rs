//! Curves of constant torsion on totally umbilical surfaces of the
//! three-dimensional space forms: frames, detection and synthesis.
//!
//! Space forms are modeled as hyperquadrics of `R^{n+2}` (see [`spaceform`]).
//! [`frames`] computes Frenet and rotation-minimizing frames of sampled curves,
//! [`detect`] decides membership in umbilical surfaces and recovers them, and
//! [`synth`] generates constant-torsion curves on a given surface.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod detect;
pub mod error;
pub mod frames;
pub mod io;
pub mod par;
pub mod spaceform;
pub mod stencil;
pub mod synth;

pub use error::{GeomError, Result};
pub use par::Execution;
pub use spaceform::{AmbientVector, SpaceForm};
