//! Exact counts and numerical diagnostics for representations of integers as
//! `x1^2 + x2^2 + x3^3 + x4^3 + x5^6 + x6^6` in positive integers.

pub mod arith;
pub mod cache;
pub mod cli;
pub mod error;
pub mod expsum;
pub mod moments;
pub mod ntt;
pub mod quad;
pub mod reps;
pub mod residue;
pub mod scan;
pub mod series;

pub use error::{Error, Result};
