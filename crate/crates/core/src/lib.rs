//! Permutation-group machinery for certifying that groups with an element
//! of order 8 fail the directed Cayley isomorphism (DCI) property.
//!
//! The crate builds explicit pairs of regular permutation groups sharing a
//! 2-closed ambient group, decides conjugacy exhaustively, computes
//! 2-closures as orbital-coloring automorphism groups, and packages the
//! results as self-contained certificates that an independent verifier can
//! re-check from the serialized data alone.

#![forbid(unsafe_code)]

pub mod abstract_group;
pub mod construction;
pub mod dci;
pub mod error;
pub mod group;
pub mod orbital;
pub mod perm;
mod refine;
pub mod textio;

pub use error::{Error, Result};
