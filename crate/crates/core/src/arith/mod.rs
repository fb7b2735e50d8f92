//! Exact arithmetic primitives: factorization, sieves and the scalar
//! arithmetic functions used throughout the crate.

mod factor;
mod functions;
mod primes;
mod sieve;

pub use factor::{factorize, FactoredInteger, FACTORIZE_BOUND};
pub use functions::{
    cohen_totient, generalized_gcd, jordan, jordan_ratio, mobius, sigma, tau, tau_s, zeta,
    zeta_with_cutoff,
};
pub use primes::{is_prime, primes_up_to};
pub use sieve::{SieveKind, SieveTable, CACHE_MAGIC, DEFAULT_MEMORY_BUDGET};

/// Exact rationals in lowest terms.
pub type BigRational = num_rational::BigRational;
