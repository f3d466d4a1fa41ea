//! Classification and iteration diagnostics for generalized nonexpansive
//! mappings on finite-dimensional lp spaces.
//!
//! The crate checks a mapping `T` of a bounded convex domain `K` against the
//! nonexpansive, Suzuki (C), Reich-Suzuki-(C) (RSC), quasi-nonexpansive and
//! Senter-Dotson Condition (I) properties by sweeping sample pairs, runs the
//! Krasnoselskii-Mann iteration `x_{n+1} = a*T(x_n) + (1-a)*x_n`, and checks
//! the trajectory-level inequalities that convergence arguments for RSC
//! mappings rely on.

// `!(a < b)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditions;
pub mod error;
pub mod iterate;
pub mod manifest;
pub mod mapping;
pub mod space;
pub mod tolerance;
pub mod verdict;

pub use error::{Error, Result};
pub use tolerance::Tolerance;
pub use verdict::Verdict;
