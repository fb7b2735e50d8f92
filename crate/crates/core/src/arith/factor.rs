use num_integer::Integer;
use serde::Serialize;

use super::primes::{is_prime, mul_mod, trial_primes, TRIAL_DIVISION_LIMIT};
use crate::error::{Error, Result};

/// Inputs to [`factorize`] must lie below this bound.
pub const FACTORIZE_BOUND: u64 = 1 << 63;

/// A positive integer together with its prime factorization.
///
/// Primes are strictly increasing and every exponent is at least one; the
/// value 1 carries no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Builds from an explicit factorization, checking every invariant.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value: u64 = 1;
        let mut last = 1;
        for &(p, e) in &factors {
            if p <= last {
                return Err(Error::invalid("primes must be strictly increasing"));
            }
            if e == 0 {
                return Err(Error::invalid("exponents must be positive"));
            }
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let pe = p.checked_pow(e).ok_or_else(|| overflow("factored value"))?;
            value = value
                .checked_mul(pe)
                .ok_or_else(|| overflow("factored value"))?;
            last = p;
        }
        Ok(Self { value, factors })
    }

    // Caller guarantees the invariants (used by the sieve-backed factorizer).
    pub(crate) fn from_parts_unchecked(value: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert_eq!(
            factors.iter().map(|&(p, e)| p.pow(e)).product::<u64>(),
            value
        );
        Self { value, factors }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    /// Exponent of `p` in this integer (0 when `p` does not divide it).
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The factorization of `value^k`, if it fits in 64 bits.
    pub fn pow(&self, k: u32) -> Result<Self> {
        let value = self.value.checked_pow(k).ok_or_else(|| Error::Overflow {
            what: format!("{}^{}", self.value, k),
            required_bits: required_bits(self.value, k),
        })?;
        let factors = self.factors.iter().map(|&(p, e)| (p, e * k)).collect();
        Ok(Self { value, factors })
    }

    /// All positive divisors, unordered.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs
    }
}

fn overflow(what: &str) -> Error {
    Error::Overflow {
        what: what.to_string(),
        required_bits: 65,
    }
}

/// Bits needed to hold `base^exp`.
pub(crate) fn required_bits(base: u64, exp: u32) -> u32 {
    if base <= 1 {
        return 1;
    }
    ((base as f64).log2() * exp as f64).floor() as u32 + 1
}

/// Factorizes `1 <= n < 2^63`.
///
/// Trial division by the primes below 10^6, then Miller-Rabin and Brent's
/// variant of Pollard rho for whatever cofactor survives.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if n >= FACTORIZE_BOUND {
        return Err(Error::InputTooLarge {
            value: n as u128,
            max: FACTORIZE_BOUND as u128 - 1,
        });
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for &p in trial_primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        if rest < TRIAL_DIVISION_LIMIT * TRIAL_DIVISION_LIMIT {
            factors.push((rest, 1));
        } else {
            let mut large = Vec::new();
            split_large(rest, &mut large);
            large.sort_unstable();
            for p in large {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    Ok(FactoredInteger { value: n, factors })
}

// Every prime factor of `n` exceeds the trial-division limit.
fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = brent_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Finds a nontrivial divisor of the odd composite `n`.
fn brent_rho(n: u64) -> u64 {
    const BATCH: u64 = 128;
    for c in 1..n {
        let step = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut x = y;
        let mut ys = y;
        let mut g = 1u64;
        let mut q = 1u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // The batch overshot; replay one step at a time.
            loop {
                ys = step(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("no rho cycle splits composite {n}")
}
