//! Explicit rational approximation bounds for `e^{s/t}`.
//!
//! The crate builds the generalized continued fraction convergents of
//! `e^{s/t}`, extracts the large common divisor `D_n` of their shifted
//! numerators, evaluates the resulting explicit lower bounds for
//! `|e^{s/t} - M/N|`, and certifies those bounds numerically with ball
//! arithmetic.

pub mod ball;
pub mod bounds;
pub mod convergents;
pub mod error;
pub mod gcf;
pub mod padic;
pub mod verify;
pub mod zsolve;

pub use ball::{BallReal, CertifiedSign};
pub use error::{Error, Result};
pub use padic::{ArithmeticProfile, ExpArg};
