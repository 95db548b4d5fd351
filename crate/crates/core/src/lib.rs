//! Exact symbolic workbench for finite systems of difference equations.
//!
//! A difference operator acts on real functions as `(Df)(x) = sum a_i f(x + b_i)`.
//! Shifts `b_i` are formal reals: rational vectors over a declared basis of
//! symbols assumed independent over the rationals. On top of that model the
//! crate decides solvability of finite systems, produces certificates of
//! unsolvability, and builds solutions in a few exactly representable
//! function classes.

pub mod error;
pub mod exact;
pub mod function;
pub mod gallery;
pub mod operator;
pub mod solver;

pub use error::{Error, Result};
