//! Cohen-Ramanujan sums, Jordan totients, and numerical verification of the
//! Cohen-Ramanujan expansion of `J_k(n)/n^k` and of the shifted convolution
//! asymptotic for Jordan totients.

pub mod arith;
pub mod asymptotics;
pub mod cohen;
mod error;
pub mod expansions;
pub mod report;
pub mod summation;

pub use error::{Error, Result};
