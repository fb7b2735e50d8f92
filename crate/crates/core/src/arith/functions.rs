//! Scalar arithmetic functions over factored integers.

use num_integer::Integer;

use super::factor::{factorize, required_bits, FactoredInteger};
use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

/// The Möbius function.
pub fn mobius(n: &FactoredInteger) -> i8 {
    if n.is_squarefree() {
        if n.factors().len() % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Jordan's totient `J_k(n) = n^k Π_{p|n} (1 - p^-k)`, evaluated exactly as
/// the product of `p^(ek) - p^((e-1)k)` over the prime powers of `n`.
///
/// Fails when `n^k` does not fit in 128 bits.
pub fn jordan(k: u32, n: &FactoredInteger) -> Result<u128> {
    if k == 0 {
        return Err(Error::invalid("jordan: k must be positive"));
    }
    let overflow = || Error::Overflow {
        what: format!("J_{k}({})", n.value()),
        required_bits: required_bits(n.value(), k),
    };
    (n.value() as u128).checked_pow(k).ok_or_else(overflow)?;
    let mut acc: u128 = 1;
    for &(p, e) in n.factors() {
        let p = p as u128;
        let low = p.pow((e - 1) * k);
        let high = low * p.pow(k);
        acc *= high - low;
    }
    Ok(acc)
}

/// Cohen's totient: the count of `1 <= a <= r^k` with `(a, r^k)_k = 1`.
/// It coincides with [`jordan`].
pub fn cohen_totient(k: u32, r: &FactoredInteger) -> Result<u128> {
    jordan(k, r)
}

/// `J_k(n) / n^k` in floating point, i.e. `Π_{p|n} (1 - p^-k)`.
pub fn jordan_ratio(k: u32, n: &FactoredInteger) -> f64 {
    n.primes()
        .map(|p| 1.0 - (p as f64).powi(-(k as i32)))
        .product()
}

/// The largest perfect `s`-th power dividing both `m` and `n`.
pub fn generalized_gcd(m: u64, n: u64, s: u32) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::Zero);
    }
    if s == 0 {
        return Err(Error::invalid("generalized gcd: s must be positive"));
    }
    let g = factorize(m.gcd(&n))?;
    Ok(largest_power_divisor(g.factors(), s))
}

/// `Π p^(s·⌊e/s⌋)`: the largest `s`-th power dividing the factored number.
fn largest_power_divisor(factors: &[(u64, u32)], s: u32) -> u64 {
    factors.iter().map(|&(p, e)| p.pow(s * (e / s))).product()
}

/// Number of divisors of `n` that are perfect `s`-th powers.
pub fn tau_s(s: u32, n: &FactoredInteger) -> u64 {
    assert!(s >= 1, "tau_s: s must be positive");
    n.factors()
        .iter()
        .map(|&(_, e)| (e / s) as u64 + 1)
        .product()
}

/// Ordinary divisor count.
pub fn tau(n: &FactoredInteger) -> u64 {
    tau_s(1, n)
}

/// Sum of divisors.
pub fn sigma(n: &FactoredInteger) -> u128 {
    n.factors()
        .iter()
        .map(|&(p, e)| {
            let p = p as u128;
            (p.pow(e + 1) - 1) / (p - 1)
        })
        .product()
}

/// Riemann zeta at an integer `z >= 2` to absolute error `precision`.
///
/// Sums `n^-z` for `n < M` and adds the Euler-Maclaurin tail
/// `M^(1-z)/(z-1) + M^-z/2`. The neglected remainder is below
/// `z / (12 M^(z+1))`, and `M` is the smallest cutoff pushing that under
/// half of `precision`.
pub fn zeta(z: u32, precision: f64) -> Result<f64> {
    if z < 2 {
        return Err(Error::Divergent(z));
    }
    if !(precision > 0.0) {
        return Err(Error::invalid("zeta: precision must be positive"));
    }
    let zf = z as f64;
    let cutoff = (zf / (6.0 * precision))
        .powf(1.0 / (zf + 1.0))
        .ceil()
        .max(2.0);
    if cutoff > 1e8 {
        return Err(Error::invalid(format!(
            "zeta: precision {precision:e} needs too many terms"
        )));
    }
    Ok(zeta_with_cutoff(z, cutoff as u64))
}

/// The same series with an explicit cutoff `M >= 2`.
pub fn zeta_with_cutoff(z: u32, cutoff: u64) -> f64 {
    assert!(z >= 2 && cutoff >= 2);
    let zf = z as f64;
    let m = cutoff as f64;
    // Smallest terms first.
    let mut acc: CompensatedSum = (1..cutoff).rev().map(|n| (n as f64).powf(-zf)).sum();
    acc.add(m.powf(1.0 - zf) / (zf - 1.0));
    acc.add(0.5 * m.powf(-zf));
    acc.value()
}
