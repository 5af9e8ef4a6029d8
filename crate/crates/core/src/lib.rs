//! Executable combinatorics of zip data.
//!
//! The crate models the stratification poset `^I W` of the stack of G-zips,
//! classifies concrete F-zips over finite fields, implements the truncated
//! display action over Galois rings, and provides an exhaustive finite-group
//! laboratory that serves as ground truth for all of the above.

pub mod cli;
pub mod coxeter;
pub mod fzip;
pub mod grouplab;
pub mod witt;
pub mod zipdatum;

pub use coxeter::{CoxeterError, Family, Parabolic, WeylElement, WeylGroup};
