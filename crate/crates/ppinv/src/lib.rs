//! Permutation polynomials over finite fields of characteristic three and
//! their compositional inverses.
//!
//! The crate builds small fields GF(p^n) exactly ([`gf`]), does canonical
//! polynomial arithmetic modulo x^q - x ([`polyring`]), and computes
//! compositional inverses of several permutation-polynomial families three
//! independent ways:
//!
//! * brute force — tabulate, invert the table, Lagrange-interpolate
//!   ([`polyring::invert_permutation`]);
//! * the generic piecewise engine over the square/non-square cosets
//!   ([`piecewise`]);
//! * closed-form expressions for the specific families ([`dickson`],
//!   [`cyclotomic`]), whose binomial-coefficient patterns live in [`binom`].
//!
//! All three routes agree exactly on every supported field; the test suites
//! cross-verify them. The [`cli`] module exposes the whole thing as a
//! command-line tool.

pub mod binom;
pub mod cli;
pub mod cyclotomic;
pub mod dickson;
mod error;
pub mod gf;
pub mod piecewise;
pub mod polyring;

pub use error::{Error, Result};
