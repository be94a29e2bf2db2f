//! Verification toolkit for VC-dimension bounds on symmetric-difference set
//! families over GF(2).
//!
//! * [`setfam`]: set families, shattering, VC dimension, `F Δ G`.
//! * [`gf2`]: dense bit matrices and multilinear polynomials over GF(2).
//! * [`stdmon`]: deglex order, the `D_{k,n}` sets, standard monomials and
//!   normal forms for vanishing ideals of 0/1 point sets.
//! * [`clpcore`]: the indicator-polynomial pipeline, Gram matrices and
//!   replayable rank certificates.
//! * [`verify`]: closed-form bound checks, exhaustive verification and the
//!   extremal-family search.

pub mod clpcore;
pub mod error;
pub mod gf2;
pub mod setfam;
pub mod stdmon;
pub mod verify;

pub use error::{Error, Result};
pub use setfam::{SetFamily, SubsetMask};
