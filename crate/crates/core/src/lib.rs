//! Algebraic entropy of three-point rational mappings: exact arithmetic,
//! degree growth, singularity tracing, the express method and Diophantine
//! height growth.

#![allow(clippy::needless_range_loop, clippy::result_large_err)]

pub mod analysis;
pub mod arith;
pub mod degree;
pub mod diophantine;
pub mod express;
pub mod mapping;
mod qserde;
pub mod singularity;
