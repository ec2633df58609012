//! CMV matrix models for circular and compact-group random matrix
//! ensembles, their truncations, closed-form eigenvalue densities and a
//! statistical verification harness.

// Numerical style: `!(x > 0.0)` guards reject NaN on purpose, parity tests
// read clearer as `n % 2`, and index loops mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of)]
#![allow(clippy::needless_range_loop)]

pub mod cmv;
pub mod densities;
pub mod ensembles;
pub mod error;
pub mod io;
pub mod linalg;
pub mod opuc;
pub mod quaternion;
pub mod spectra;
pub mod verify;
