//! Exact-real machinery for showing that continuous optimization problems
//! cannot be solved uniformly from finite-precision input.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adversary;
pub mod computable;
pub mod families;
pub mod solvers;
pub mod rational;
