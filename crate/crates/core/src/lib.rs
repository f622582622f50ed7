//! Exact computation of Davenport constants of lattice boxes and balls, with
//! certified constructions, polytope lattice counts and the supporting
//! geometric optimizations.

pub mod bounds;
pub mod constructions;
pub mod geometry;
pub mod lattice;
pub mod linalg;
pub mod optimize;
pub mod primes;
pub mod support;
pub mod zerosum;
