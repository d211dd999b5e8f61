//! Constructive total positivity.
//!
//! Every space handled here (the totally nonnegative Grassmannian, the
//! totally nonnegative unipotent slice, the cyclically symmetric
//! amplituhedron and the compactified space of planar electrical networks)
//! carries a flow that contracts it onto a single fixed point. The crate
//! implements those flows, the coordinates in which they become contractive,
//! and a generic engine ([`flow`]) that turns any contractive flow plus a
//! region oracle into the pair of mutually inverse maps between the region
//! closure and a small ball.
//!
//! Exact identities are checked over [`Rational`]; anything involving
//! `exp`, `sin` or `cos` runs over `f64` with explicit tolerances.

pub mod amplituhedron;
pub mod cyclic;
pub mod electrical;
pub mod error;
pub mod flow;
pub mod grassmann;
pub mod io;
pub mod matrix;
pub mod scalar;
pub mod subsets;
pub mod unipotent;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Rational, Scalar, Sign};

/// Default absolute tolerance for float positivity classification.
pub const DEFAULT_TOL: f64 = 1e-9;
