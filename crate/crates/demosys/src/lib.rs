//! demosys: exact L^p computations for a two-sided orthonormal family of
//! dyadic steps and Rademacher functions on [-1,1].
//!
//! The crate materializes the family, computes L^p norms of finite spans in
//! closed form (disjoint-support sums on the left half, exact sign-sum
//! moments on the right half), evaluates fundamental and dual fundamental
//! functions over searched profile spaces, and certifies the
//! democracy/bidemocracy regime map numerically.

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod fundamental;
pub mod indexing;
pub mod logdomain;
pub mod oracle;
pub mod precision;
pub mod rademacher;
pub mod regimes;
pub mod system;
pub mod util;

pub use error::{Error, Result};
pub use logdomain::LogNum;
