//! The Cohen-Ramanujan expansion of the Jordan totient,
//!
//! ```text
//! ζ(s+k) J_k(n) / n^k = Σ_{q >= 1} μ(q) c_q^s(n^s) / J_{s+k}(q),
//! ```
//!
//! checked three ways: truncated series against the closed form, exact
//! rational Euler factors over finite prime sets, and the analogous k-vector
//! series `Σ μ(r) c^s(n, r) / J_{s+k}(r)`.
//!
//! With `s = 1` the series is Ramanujan's classical expansion
//! `Σ μ(r) c_r(n) / J_{k+1}(r) = ζ(k+1) J_k(n)/n^k`. The denominator index
//! there is `k + 1`; some printed statements of it carry `s + 1` instead,
//! which only agrees when `s = k`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{
    factorize, is_prime, jordan, jordan_ratio, mobius, sigma, zeta, BigRational, FactoredInteger,
    SieveKind, SieveTable, DEFAULT_MEMORY_BUDGET,
};
use crate::cohen::{crs_factored, kvector_sum, BRUTE_FORCE_TERM_LIMIT};
use crate::error::{Error, Result};
use crate::summation::checkpointed_sum;

/// Checkpoints reported by the series evaluators, besides the cutoff itself.
pub const DEFAULT_CHECKPOINTS: [u64; 3] = [10, 100, 1000];

/// Absolute accuracy of the ζ value in every target.
pub const ZETA_PRECISION: f64 = 1e-12;

/// Floor of the convergence envelope for the expansion series.
pub const SERIES_TOLERANCE_FLOOR: f64 = 1e-3;

/// Relative tolerance for the (evidence-only) k-vector series.
pub const KVECTOR_RELATIVE_TOLERANCE: f64 = 1e-1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpansionQuery {
    pub s: u32,
    pub k: u32,
    pub n: u64,
    /// Series cutoff.
    pub q_max: u64,
}

impl ExpansionQuery {
    pub fn new(s: u32, k: u32, n: u64, q_max: u64) -> Result<Self> {
        if s == 0 || k == 0 || n == 0 || q_max == 0 {
            return Err(Error::invalid(
                "s, k, n and the cutoff must all be positive",
            ));
        }
        Ok(Self { s, k, n, q_max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub q: u64,
    pub partial_sum: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub query: ExpansionQuery,
    /// `ζ(s+k) J_k(n) / n^k`.
    pub target: f64,
    pub partial_sums: Vec<Checkpoint>,
    pub final_abs_error: f64,
    pub tolerance: f64,
    pub converged: bool,
}

impl ExpansionReport {
    fn assemble(query: ExpansionQuery, target: f64, sums: Vec<(u64, f64)>, tolerance: f64) -> Self {
        let partial_sums: Vec<Checkpoint> = sums
            .into_iter()
            .map(|(q, partial_sum)| Checkpoint {
                q,
                partial_sum,
                abs_error: (partial_sum - target).abs(),
            })
            .collect();
        let final_abs_error = partial_sums.last().map_or(f64::INFINITY, |c| c.abs_error);
        Self {
            query,
            target,
            partial_sums,
            final_abs_error,
            tolerance,
            converged: final_abs_error < tolerance,
        }
    }

    /// Absolute error at checkpoint `q`, if it was reported.
    pub fn error_at(&self, q: u64) -> Option<f64> {
        self.partial_sums
            .iter()
            .find(|c| c.q == q)
            .map(|c| c.abs_error)
    }
}

/// `ζ(s+k) J_k(n) / n^k`.
pub fn expansion_target(s: u32, k: u32, n: &FactoredInteger) -> Result<f64> {
    Ok(zeta(s + k, ZETA_PRECISION)? * jordan_ratio(k, n))
}

/// Convergence envelope `max(10^-3, 2 σ(n)^s Q^(1-s-k))`.
pub fn series_tolerance(s: u32, k: u32, n: &FactoredInteger, q_max: u64) -> f64 {
    let c = 2.0 * (sigma(n) as f64).powi(s as i32);
    SERIES_TOLERANCE_FLOOR.max(c * (q_max as f64).powf(1.0 - (s + k) as f64))
}

// J_m(q) as a float; exact when it fits, else via the product formula.
fn jordan_f64(m: u32, q: &FactoredInteger) -> f64 {
    match jordan(m, q) {
        Ok(j) => j as f64,
        Err(_) => jordan_ratio(m, q) * (q.value() as f64).powi(m as i32),
    }
}

/// Partial sums of the expansion at 10, 100, 1000 and the cutoff.
pub fn expansion_partial_sum(query: &ExpansionQuery) -> Result<ExpansionReport> {
    expansion_partial_sum_at(query, &DEFAULT_CHECKPOINTS)
}

/// Partial sums of the expansion at caller-chosen checkpoints.
///
/// Non-squarefree `q` contribute nothing (`μ(q) = 0`) and are skipped.
pub fn expansion_partial_sum_at(
    query: &ExpansionQuery,
    checkpoints: &[u64],
) -> Result<ExpansionReport> {
    let ExpansionQuery { s, k, n, q_max } = *query;
    let n_factored = factorize(n)?;
    let argument = n_factored.pow(s)?.value();
    if argument >= 1 << 63 {
        return Err(Error::InputTooLarge {
            value: argument as u128,
            max: (1 << 63) - 1,
        });
    }
    let target = expansion_target(s, k, &n_factored)?;
    let spf = SieveTable::build_with_budget(
        SieveKind::SmallestPrimeFactor,
        q_max,
        DEFAULT_MEMORY_BUDGET,
    )?;
    let sums = checkpointed_sum(q_max, checkpoints, |q| -> Result<f64> {
        let qf = spf.factorize(q)?;
        let mu = mobius(&qf);
        if mu == 0 {
            return Ok(0.0);
        }
        let c = crs_factored(&qf, s, argument)?;
        Ok(mu as f64 * c as f64 / jordan_f64(s + k, &qf))
    })?;
    let tolerance = series_tolerance(s, k, &n_factored, q_max);
    Ok(ExpansionReport::assemble(*query, target, sums, tolerance))
}

/// Both sides of the finite Euler factorization over a prime set `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFactorCheck {
    /// Series over squarefree `q` built from primes in `P`.
    pub lhs: BigRational,
    /// Product of the local factors at `p in P`.
    pub rhs: BigRational,
}

impl LocalFactorCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn ratio(num: i128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

// μ(q) c_q^s(n^s) / J_{s+k}(q), exactly.
fn exact_term(q: &FactoredInteger, s: u32, k: u32, argument: u64) -> Result<BigRational> {
    let mu = mobius(q);
    if mu == 0 {
        return Ok(BigRational::zero());
    }
    let c = crs_factored(q, s, argument)?;
    Ok(ratio(mu as i128 * c, jordan(s + k, q)?))
}

/// Exact rational check of
///
/// ```text
/// Σ_{q squarefree, p | q ⇒ p ∈ P} μ(q) c_q^s(n^s) / J_{s+k}(q)
///     = Π_{p ∈ P} (1 + μ(p) c_p^s(n^s) / J_{s+k}(p)).
/// ```
pub fn local_factor_exact(s: u32, k: u32, n: u64, primes: &[u64]) -> Result<LocalFactorCheck> {
    if s == 0 || k == 0 {
        return Err(Error::invalid("s and k must be positive"));
    }
    let primes: BTreeSet<u64> = primes.iter().copied().collect();
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    if primes.len() > 24 {
        return Err(Error::invalid("at most 24 primes (2^|P| series terms)"));
    }
    let argument = factorize(n)?.pow(s)?.value();
    let primes: Vec<u64> = primes.into_iter().collect();

    let mut lhs = BigRational::zero();
    for mask in 0u32..(1 << primes.len()) {
        let chosen: Vec<(u64, u32)> = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| (p, 1))
            .collect();
        let q = FactoredInteger::from_factors(chosen)?;
        lhs += exact_term(&q, s, k, argument)?;
    }

    let mut rhs = BigRational::one();
    for &p in &primes {
        rhs *= local_factor_generic(s, k, p, argument)?;
    }
    Ok(LocalFactorCheck { lhs, rhs })
}

// 1 + μ(p) c_p^s(argument) / J_{s+k}(p) through the general evaluators.
fn local_factor_generic(s: u32, k: u32, p: u64, argument: u64) -> Result<BigRational> {
    let pf = FactoredInteger::from_factors(vec![(p, 1)])?;
    Ok(BigRational::one() + exact_term(&pf, s, k, argument)?)
}

/// `1 + μ(p) c_p^s(n^s) / J_{s+k}(p)` from its closed form:
/// `1 - (p^s - 1)/(p^(s+k) - 1)` when `p | n`, else `1 + 1/(p^(s+k) - 1)`.
pub fn local_factor_cases(s: u32, k: u32, p: u64, n: u64) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 || k == 0 {
        return Err(Error::invalid("s and k must be positive"));
    }
    let big_p = BigInt::from(p);
    let denominator = num_traits::pow(big_p.clone(), (s + k) as usize) - BigInt::one();
    let numerator = if n % p == 0 {
        -(num_traits::pow(big_p, s as usize) - BigInt::one())
    } else {
        BigInt::one()
    };
    Ok(BigRational::one() + BigRational::new(numerator, denominator))
}

/// Generic local factor, for comparison with [`local_factor_cases`].
pub fn local_factor_via_sums(s: u32, k: u32, p: u64, n: u64) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let argument = factorize(n)?.pow(s)?.value();
    local_factor_generic(s, k, p, argument)
}

/// Partial sums of `Σ_{r <= R} μ(r) c^s(n, r) / J_{s+k}(r)` with Cohen's
/// k-vector sum, against the same target. Brute force, so `R^s <= 10^7`.
pub fn sivaramakrishnan_check(s: u32, k: u32, n: u64, r_max: u64) -> Result<ExpansionReport> {
    let query = ExpansionQuery::new(s, k, n, r_max)?;
    let terms = (r_max as u128).checked_pow(s).unwrap_or(u128::MAX);
    if terms > BRUTE_FORCE_TERM_LIMIT as u128 {
        return Err(Error::GuardExceeded {
            terms,
            limit: BRUTE_FORCE_TERM_LIMIT as u128,
        });
    }
    let n_signed = i64::try_from(n).map_err(|_| Error::invalid("n exceeds i64"))?;
    let n_factored = factorize(n)?;
    let target = expansion_target(s, k, &n_factored)?;
    let sums = checkpointed_sum(r_max, &DEFAULT_CHECKPOINTS, |r| -> Result<f64> {
        let rf = factorize(r)?;
        let mu = mobius(&rf);
        if mu == 0 {
            return Ok(0.0);
        }
        let c = kvector_sum(s, n_signed, r)?;
        Ok(mu as f64 * c as f64 / jordan_f64(s + k, &rf))
    })?;
    let tolerance = KVECTOR_RELATIVE_TOLERANCE * target.abs();
    Ok(ExpansionReport::assemble(query, target, sums, tolerance))
}
