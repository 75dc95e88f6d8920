//! Exact arithmetic for the local-global theory of positive definite integral
//! quadratic forms: p-adic invariants, local representation certificates,
//! lattice enumeration, genus exploration and the experiment driver built on
//! top of them.

pub mod arith;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod genus;
pub mod local;
pub mod local_reps;
pub mod report;

pub use error::{Error, Result};
pub use exact::{GramMatrix, IntMatrix};
