//! Exact-arithmetic toolkit for intersection theory on complete simplicial
//! toric varieties: fans and their validation, Mori cones and extremal rays,
//! toric foliations with their extremal-ray lengths, and a checker for the
//! bundle structure of long extremal rays.

pub mod contraction;
pub mod corpus;
pub mod error;
pub mod fan;
pub mod foliation;
pub mod intersection;
pub mod linalg;

pub use error::Error;
