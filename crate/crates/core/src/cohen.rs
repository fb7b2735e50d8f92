//! Evaluators for the Cohen-Ramanujan sum
//!
//! ```text
//! c_r^s(n) = Σ_{1 <= h <= r^s, (h, r^s)_s = 1} exp(2πi n h / r^s)
//! ```
//!
//! and for Cohen's k-vector sum `c^k(n, r)`. Three independent routes compute
//! `c_r^s(n)`: the literal exponential sum, a divisor sum, and the
//! multiplicative prime-power rule. They must agree exactly.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorize, mobius, FactoredInteger};
use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

/// Most terms a brute-force evaluator will enumerate.
pub const BRUTE_FORCE_TERM_LIMIT: u64 = 10_000_000;

/// Allowed distance between a floating exponential sum and its integer value.
pub const ROUNDING_TOLERANCE: f64 = 1e-6;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CohenSumQuery {
    pub r: u64,
    pub s: u32,
    pub n: u64,
}

impl CohenSumQuery {
    pub fn new(r: u64, s: u32, n: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("r must be positive"));
        }
        if s == 0 {
            return Err(Error::invalid("s must be positive"));
        }
        Ok(Self { r, s, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluator {
    Direct,
    DivisorSum,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CohenSumValue {
    pub value: i128,
    pub evaluator: Evaluator,
}

impl CohenSumValue {
    fn new(value: i128, evaluator: Evaluator) -> Self {
        Self { value, evaluator }
    }
}

fn checked_pow(base: u64, exp: u32, what: impl FnOnce() -> String) -> Result<u128> {
    (base as u128)
        .checked_pow(exp)
        .ok_or_else(|| Error::Overflow {
            what: what(),
            required_bits: ((base as f64).log2() * exp as f64).floor() as u32 + 1,
        })
}

fn modulus_of(q: &CohenSumQuery) -> Result<u64> {
    let m = checked_pow(q.r, q.s, || format!("{}^{}", q.r, q.s))?;
    if m > BRUTE_FORCE_TERM_LIMIT as u128 {
        return Err(Error::GuardExceeded {
            terms: m,
            limit: BRUTE_FORCE_TERM_LIMIT as u128,
        });
    }
    Ok(m as u64)
}

/// Sums `exp(2πi·j/modulus)` over `j = phase(t)` for `t` in `0..terms`,
/// skipping `None`, and rounds to the integer the sum must be.
///
/// Fixed-size chunks are summed in parallel and merged in index order, so
/// the result does not depend on the thread count.
fn rounded_exponential_sum<F>(terms: u64, modulus: u64, phase: F) -> Result<i128>
where
    F: Fn(u64) -> Option<u64> + Sync,
{
    let scale = std::f64::consts::TAU / modulus as f64;
    let chunks = terms.div_ceil(CHUNK);
    let partials: Vec<(CompensatedSum, CompensatedSum)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for t in c * CHUNK..((c + 1) * CHUNK).min(terms) {
                if let Some(j) = phase(t) {
                    let (sin, cos) = (scale * j as f64).sin_cos();
                    re.add(cos);
                    im.add(sin);
                }
            }
            (re, im)
        })
        .collect();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (r, i) in &partials {
        re.merge(r);
        im.merge(i);
    }
    let (re, im) = (re.value(), im.value());
    let rounded = re.round();
    if (re - rounded).abs() >= ROUNDING_TOLERANCE || im.abs() >= ROUNDING_TOLERANCE {
        return Err(Error::RoundingAssertion { re, im });
    }
    Ok(rounded as i128)
}

/// `(h, r^s)_s` given the primes of `r`: each `p` contributes
/// `p^(s·⌊v_p(h)/s⌋)` with the valuation capped at `v_p(r^s)`.
fn generalized_gcd_with_modulus(h: u64, r: &FactoredInteger, s: u32) -> u64 {
    let mut g = 1;
    for &(p, e) in r.factors() {
        let mut v = 0;
        let mut rest = h;
        while v < s * e && rest % p == 0 {
            rest /= p;
            v += 1;
        }
        g *= p.pow(s * (v / s));
    }
    g
}

/// Literal evaluation of the defining exponential sum. Needs `r^s <= 10^7`.
pub fn crs_direct(q: &CohenSumQuery) -> Result<CohenSumValue> {
    let modulus = modulus_of(q)?;
    let r = factorize(q.r)?;
    let n = q.n % modulus;
    let value = rounded_exponential_sum(modulus, modulus, |t| {
        let h = t + 1;
        (generalized_gcd_with_modulus(h, &r, q.s) == 1)
            .then(|| ((n as u128 * h as u128) % modulus as u128) as u64)
    })?;
    Ok(CohenSumValue::new(value, Evaluator::Direct))
}

/// `Σ_{d | r, d^s | n} d^s μ(r/d)`.
pub fn crs_divisor_sum(q: &CohenSumQuery) -> Result<CohenSumValue> {
    let r = factorize(q.r)?;
    let mut total: i128 = 0;
    for d in r.divisors() {
        let ds = match checked_pow(d, q.s, || format!("{d}^{}", q.s)) {
            Ok(ds) => ds,
            // Too large to divide a nonzero 64-bit n.
            Err(_) if q.n != 0 => continue,
            Err(e) => return Err(e),
        };
        if q.n != 0 && q.n as u128 % ds != 0 {
            continue;
        }
        let cofactor = quotient(&r, d);
        let term = i128::try_from(ds)
            .ok()
            .and_then(|ds| ds.checked_mul(mobius(&cofactor) as i128))
            .ok_or_else(|| overflow_i128(q))?;
        total = total.checked_add(term).ok_or_else(|| overflow_i128(q))?;
    }
    Ok(CohenSumValue::new(total, Evaluator::DivisorSum))
}

fn overflow_i128(q: &CohenSumQuery) -> Error {
    Error::Overflow {
        what: format!("c_{}^{}({})", q.r, q.s, q.n),
        required_bits: 129,
    }
}

// Factorization of r/d, for d | r.
fn quotient(r: &FactoredInteger, d: u64) -> FactoredInteger {
    let mut rest = d;
    let factors = r
        .factors()
        .iter()
        .filter_map(|&(p, e)| {
            let mut v = 0;
            while rest % p == 0 {
                rest /= p;
                v += 1;
            }
            (e > v).then_some((p, e - v))
        })
        .collect();
    FactoredInteger::from_parts_unchecked(r.value() / d, factors)
}

/// Multiplicative evaluation; the production route.
pub fn crs_fast(q: &CohenSumQuery) -> Result<CohenSumValue> {
    let r = factorize(q.r)?;
    let value = crs_factored(&r, q.s, q.n)?;
    Ok(CohenSumValue::new(value, Evaluator::Multiplicative))
}

/// `c_r^s(n)` for an already factored `r`, by the prime-power rule
///
/// ```text
/// c_{p^e}^s(n) = p^(se) - p^(s(e-1))   if p^(se) | n
///              = -p^(s(e-1))           if p^(s(e-1)) | n but p^(se) ∤ n
///              = 0                     otherwise
/// ```
pub fn crs_factored(r: &FactoredInteger, s: u32, n: u64) -> Result<i128> {
    let mut acc: i128 = 1;
    for &(p, e) in r.factors() {
        let v = valuation(n, p);
        let (high, low) = (s * e, s * (e - 1));
        let local = if v >= high {
            let top = pow_i128(p, high, r, s)?;
            top - pow_i128(p, low, r, s)?
        } else if v >= low {
            -pow_i128(p, low, r, s)?
        } else {
            return Ok(0);
        };
        acc = acc.checked_mul(local).ok_or_else(|| Error::Overflow {
            what: format!("c_{}^{s}({n})", r.value()),
            required_bits: 129,
        })?;
    }
    Ok(acc)
}

fn pow_i128(p: u64, exp: u32, r: &FactoredInteger, s: u32) -> Result<i128> {
    (p as i128).checked_pow(exp).ok_or_else(|| Error::Overflow {
        what: format!("c_{}^{s}", r.value()),
        required_bits: ((p as f64).log2() * exp as f64).floor() as u32 + 2,
    })
}

// v_p(n), with v_p(0) treated as infinite.
fn valuation(n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    let mut rest = n;
    while rest % p == 0 {
        rest /= p;
        v += 1;
    }
    v
}

/// The unique split `h = m^s · k` with `k` free of `s`-th powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftDecomposition {
    pub h: u64,
    pub s: u32,
    pub m: u64,
    pub k: u64,
}

impl ShiftDecomposition {
    pub fn new(h: u64, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("s must be positive"));
        }
        let f = factorize(h)?;
        let mut m = 1;
        let mut k = 1;
        for &(p, e) in f.factors() {
            m *= p.pow(e / s);
            k *= p.pow(e % s);
        }
        Ok(Self { h, s, m, k })
    }

    /// `m^s`, which divides `h` and so always fits.
    pub fn m_pow_s(&self) -> u64 {
        self.m.pow(self.s)
    }
}

/// `c_r^s(h)` evaluated as `c_r^s(m^s)` where `h = m^s k`.
pub fn crs_of_shift(r: u64, s: u32, h: u64) -> Result<CohenSumValue> {
    if h == 0 {
        return Err(Error::Zero);
    }
    let split = ShiftDecomposition::new(h, s)?;
    crs_fast(&CohenSumQuery::new(r, s, split.m_pow_s())?)
}

/// Cohen's k-vector sum `c^k(n, r)` by enumeration over `[0, r)^k`.
pub fn kvector_sum(k: u32, n: i64, r: u64) -> Result<i128> {
    let offsets = vec![0i64; k as usize];
    kvector_sum_in_residues(k, n, r, &offsets)
}

/// `c^k(n, r)` with coordinate `i` ranging over `offsets[i]..offsets[i] + r`,
/// any complete residue system mod `r`.
pub fn kvector_sum_in_residues(k: u32, n: i64, r: u64, offsets: &[i64]) -> Result<i128> {
    if k == 0 || r == 0 {
        return Err(Error::invalid("k and r must be positive"));
    }
    if offsets.len() != k as usize {
        return Err(Error::invalid("need one offset per coordinate"));
    }
    let terms = checked_pow(r, k, || format!("{r}^{k}"))?;
    if terms > BRUTE_FORCE_TERM_LIMIT as u128 {
        return Err(Error::GuardExceeded {
            terms,
            limit: BRUTE_FORCE_TERM_LIMIT as u128,
        });
    }
    let modulus = r as i128;
    rounded_exponential_sum(terms as u64, r, |t| {
        let mut rest = t;
        let mut g = r;
        let mut total: i128 = 0;
        for &offset in offsets {
            let x = offset as i128 + (rest % r) as i128;
            rest /= r;
            g = g.gcd(&(x.rem_euclid(modulus) as u64));
            total += x;
        }
        (g == 1).then(|| (n as i128 * total).rem_euclid(modulus) as u64)
    })
}
