//! Numerical laboratory for the curvature algebra of constant-curvature
//! spaces and the geodesics of their tangent bundles.
//!
//! The crate has five layers:
//!
//! * [`algebra`] — the standard complex/quaternionic structure operators and
//!   the curvature operators of the real, complex, and quaternionic families,
//!   plus their product tables and auxiliary identities.
//! * [`recurrence`] — powers of a curvature operator computed directly (the
//!   oracle) and through closed forms / low-dimensional span reductions.
//! * [`geodesic`] — the projected-geodesic system of the tangent and unit
//!   tangent bundles, integrated in a parallel orthonormal frame, with both an
//!   RK4 path and a closed-form path.
//! * [`frenet`] — generalized Frenet curvatures of the projected curves,
//!   vanishing-tail and span-rank certification, and constancy checks.
//! * [`suite`] — seeded randomized trials that tie the layers together and
//!   emit machine-readable [`report::TrialReport`]s.
//!
//! All randomness flows through explicit seeds; every function is pure, so
//! trials can run concurrently and reproduce exactly.

pub mod algebra;
pub mod error;
pub mod frenet;
pub mod geodesic;
pub mod linalg;
pub mod recurrence;
pub mod report;
pub mod sampling;
pub mod suite;
pub mod tables;

pub use error::{Error, Result};
pub use linalg::{Operator, Vector};
