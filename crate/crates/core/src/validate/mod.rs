//! Schedule reconstruction from solver models and the independent checker.
//!
//! The checker simulates each vehicle from the problem rules and never looks
//! at the encoding, so it can catch encoder bugs.

mod check;
mod decode;

pub use check::{validate, FamilyCheck, ValidationReport, Witness};
pub use decode::{decode, DecodeError};
