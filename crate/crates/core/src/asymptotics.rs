//! Shifted convolution sums of Jordan totient ratios,
//!
//! ```text
//! Σ_{n <= N} J_a(n)/n^a · J_b(n+h)/(n+h)^b
//! ```
//!
//! compared against `N` times the Euler product
//!
//! ```text
//! Π_{p | m} [(1 - p^-(s+a))(1 - p^-(s+b)) + (p^s - 1) p^-(a+b+2s)]
//! × Π_{p ∤ m} [(1 - p^-(s+a))(1 - p^-(s+b)) - p^-(a+b+2s)]
//! ```
//!
//! where `h = m^s k` with `k` free of `s`-th powers. The dividing-prime term
//! uses `p^s - 1`, which is `c_p^s(m^s)`; the form `p^(s-1)` is a misprint.

use serde::Serialize;

use crate::arith::{
    factorize, jordan_ratio, mobius, primes_up_to, zeta, FactoredInteger, SieveKind, SieveTable,
    DEFAULT_MEMORY_BUDGET,
};
use crate::cohen::{crs_factored, CohenSumQuery, ShiftDecomposition};
use crate::error::{Error, Result};
use crate::expansions::ZETA_PRECISION;
use crate::summation::{checkpointed_sum, CompensatedSum};

/// Decade checkpoints for the `N` sweep; `N` itself is always added.
pub const LHS_CHECKPOINTS: [u64; 3] = [10_000, 100_000, 1_000_000];

pub const DEFAULT_PRIME_CUTOFF: u64 = 100_000;

/// Shift-invariance `c_r^s(h) = c_r^s(m^s)` is re-checked for `r` up to this.
pub const SHIFT_RECHECK_LIMIT: u64 = 100;

/// Human-readable form of the dividing-prime correction used.
pub const DIVIDING_TERM: &str = "(p^s - 1) / p^(a+b+2s)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AsymptoticQuery {
    pub s: u32,
    pub a: u32,
    pub b: u32,
    pub h: u64,
    pub n_max: u64,
    pub prime_cutoff: u64,
}

impl AsymptoticQuery {
    /// Enforces `s > 1` and `a, b > 1 + s/2`.
    pub fn new(s: u32, a: u32, b: u32, h: u64, n_max: u64, prime_cutoff: u64) -> Result<Self> {
        if s <= 1 {
            return Err(Error::invalid(format!("need s > 1, got s = {s}")));
        }
        for (name, v) in [("a", a), ("b", b)] {
            if 2 * v as u64 <= 2 + s as u64 {
                return Err(Error::invalid(format!(
                    "need {name} > 1 + s/2, got {name} = {v} with s = {s}"
                )));
            }
        }
        if h == 0 || n_max == 0 {
            return Err(Error::invalid("h and N must be positive"));
        }
        Ok(Self {
            s,
            a,
            b,
            h,
            n_max,
            prime_cutoff,
        })
    }

    pub fn decomposition(&self) -> Result<ShiftDecomposition> {
        ShiftDecomposition::new(self.h, self.s)
    }
}

/// Local factors of the main-term Euler product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerProductSpec {
    pub prime_cutoff: u64,
    pub s: u32,
    pub a: u32,
    pub b: u32,
    pub m: u64,
}

impl EulerProductSpec {
    pub fn new(query: &AsymptoticQuery) -> Result<Self> {
        Ok(Self {
            prime_cutoff: query.prime_cutoff,
            s: query.s,
            a: query.a,
            b: query.b,
            m: query.decomposition()?.m,
        })
    }

    fn base(&self, p: f64) -> f64 {
        (1.0 - p.powi(-((self.s + self.a) as i32))) * (1.0 - p.powi(-((self.s + self.b) as i32)))
    }

    fn cross(&self, p: f64) -> f64 {
        p.powi(-((self.a + self.b + 2 * self.s) as i32))
    }

    /// `(1 - p^-(s+a))(1 - p^-(s+b)) + (p^s - 1) p^-(a+b+2s)`.
    pub fn dividing_factor(&self, p: u64) -> f64 {
        let pf = p as f64;
        self.base(pf) + (pf.powi(self.s as i32) - 1.0) * self.cross(pf)
    }

    /// `(1 - p^-(s+a))(1 - p^-(s+b)) - p^-(a+b+2s)`.
    pub fn nondividing_factor(&self, p: u64) -> f64 {
        let pf = p as f64;
        self.base(pf) - self.cross(pf)
    }

    pub fn factor(&self, p: u64) -> f64 {
        if self.m % p == 0 {
            self.dividing_factor(p)
        } else {
            self.nondividing_factor(p)
        }
    }

    /// `(1 - p^-(s+a))(1 - p^-(s+b))(1 + c / ((p^(s+a) - 1)(p^(s+b) - 1)))`
    /// with `c = c_p^s(m^s)`; algebraically equal to [`Self::factor`].
    pub fn factor_from_sum(&self, p: u64) -> Result<f64> {
        let pf = FactoredInteger::from_factors(vec![(p, 1)])?;
        let m_pow = self.m.checked_pow(self.s).ok_or_else(|| Error::Overflow {
            what: format!("{}^{}", self.m, self.s),
            required_bits: 65,
        })?;
        let c = crs_factored(&pf, self.s, m_pow)? as f64;
        let p = p as f64;
        let ja = p.powi((self.s + self.a) as i32) - 1.0;
        let jb = p.powi((self.s + self.b) as i32) - 1.0;
        Ok(self.base(p) * (1.0 + c / (ja * jb)))
    }

    pub fn describe(&self) -> [String; 2] {
        let (s, a, b) = (self.s, self.a, self.b);
        [
            format!(
                "p | {m}: (1 - p^-{sa})(1 - p^-{sb}) + (p^{s} - 1) p^-{t}",
                m = self.m,
                sa = s + a,
                sb = s + b,
                t = a + b + 2 * s
            ),
            format!(
                "p ∤ {m}: (1 - p^-{sa})(1 - p^-{sb}) - p^-{t}",
                m = self.m,
                sa = s + a,
                sb = s + b,
                t = a + b + 2 * s
            ),
        ]
    }

    /// Bound on `|Π_{p > P} factor(p) - 1|`.
    ///
    /// Beyond `P` every factor is `1 - x` with `0 < x <= 2 p^-σ`,
    /// `σ = s + min(a, b)`, so `|log(1 - x)| <= x / (1 - x)`, and
    /// `Σ_{p > P} p^-σ <= ∫_P^∞ t^-σ dt = P^(1-σ) / (σ - 1)`.
    pub fn tail_bound(&self) -> f64 {
        let sigma = (self.s + self.a.min(self.b)) as f64;
        let cutoff = self.prime_cutoff.max(1) as f64;
        let x_max = 2.0 * (cutoff + 1.0).powf(-sigma);
        let log_bound = 2.0 * cutoff.powf(1.0 - sigma) / (sigma - 1.0) / (1.0 - x_max);
        log_bound.exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhsProduct {
    pub value: f64,
    pub tail_bound: f64,
    pub m: u64,
    pub k: u64,
    pub primes_used: usize,
}

/// The truncated Euler product over primes `p <= prime_cutoff`.
pub fn rhs_product(query: &AsymptoticQuery) -> Result<RhsProduct> {
    let split = query.decomposition()?;
    let largest = factorize(split.m)?.largest_prime().unwrap_or(1);
    if query.prime_cutoff < largest {
        return Err(Error::PrimeCutoffTooSmall {
            cutoff: query.prime_cutoff,
            needed: largest,
        });
    }
    let spec = EulerProductSpec::new(query)?;
    let primes = primes_up_to(query.prime_cutoff);
    let value = primes.iter().map(|&p| spec.factor(p)).product();
    Ok(RhsProduct {
        value,
        tail_bound: spec.tail_bound(),
        m: split.m,
        k: split.k,
        primes_used: primes.len(),
    })
}

/// Prefix sums of `J_a(n)/n^a · J_b(n+h)/(n+h)^b` at the decade
/// checkpoints and at `N`, from sieved Jordan tables.
pub fn lhs_sum(query: &AsymptoticQuery) -> Result<Vec<(u64, f64)>> {
    lhs_sum_with_budget(query, DEFAULT_MEMORY_BUDGET)
}

pub fn lhs_sum_with_budget(query: &AsymptoticQuery, budget: u64) -> Result<Vec<(u64, f64)>> {
    let limit = query
        .n_max
        .checked_add(query.h)
        .ok_or_else(|| Error::invalid("N + h overflows"))?;
    let tables = if query.a == query.b { 1 } else { 2 };
    let requested = SieveTable::bytes_needed(limit) * tables;
    if requested > budget {
        return Err(Error::MemoryBudget {
            requested,
            allowed: budget,
        });
    }
    let ja = SieveTable::build_with_budget(SieveKind::Jordan(query.a), limit, budget)?;
    let jb_owned;
    let jb = if query.a == query.b {
        &ja
    } else {
        jb_owned = SieveTable::build_with_budget(SieveKind::Jordan(query.b), limit, budget)?;
        &jb_owned
    };
    let (a, b, h) = (query.a as i32, query.b as i32, query.h);
    checkpointed_sum(query.n_max, &LHS_CHECKPOINTS, |n| -> Result<f64> {
        let f = ja.get(n) as f64 / (n as f64).powi(a);
        let g = jb.get(n + h) as f64 / ((n + h) as f64).powi(b);
        Ok(f * g)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioPoint {
    pub n: u64,
    pub lhs: f64,
    pub main_term: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub query: AsymptoticQuery,
    pub m: u64,
    pub k: u64,
    pub rhs: f64,
    pub rhs_tail_bound: f64,
    pub local_factors: [String; 2],
    pub dividing_term: &'static str,
    pub lhs_checkpoints: Vec<(u64, f64)>,
    pub ratios: Vec<RatioPoint>,
    pub tolerance: f64,
    pub final_deviation: f64,
    pub converged: bool,
}

/// Runs both sides and compares them.
///
/// Converged means `|ratio - 1| < tolerance` at `N` and `|ratio - 1|` did not
/// grow between the last two checkpoints.
pub fn asymptotic_verify(query: &AsymptoticQuery, tolerance: f64) -> Result<AsymptoticReport> {
    asymptotic_verify_with_budget(query, tolerance, DEFAULT_MEMORY_BUDGET)
}

pub fn asymptotic_verify_with_budget(
    query: &AsymptoticQuery,
    tolerance: f64,
    budget: u64,
) -> Result<AsymptoticReport> {
    let spec = EulerProductSpec::new(query)?;
    let rhs = rhs_product(query)?;
    recheck_shift_invariance(query.s, query.h, rhs.m)?;
    let lhs = lhs_sum_with_budget(query, budget)?;
    let ratios: Vec<RatioPoint> = lhs
        .iter()
        .map(|&(n, sum)| RatioPoint {
            n,
            lhs: sum,
            main_term: n as f64 * rhs.value,
            ratio: sum / (n as f64 * rhs.value),
        })
        .collect();
    if ratios
        .iter()
        .any(|r| !(r.ratio.is_finite() && r.ratio > 0.0))
    {
        return Err(Error::Consistency(
            "non-finite or non-positive ratio".into(),
        ));
    }
    let deviations: Vec<f64> = ratios.iter().map(|r| (r.ratio - 1.0).abs()).collect();
    let final_deviation = *deviations.last().expect("at least one checkpoint");
    let non_increasing = match deviations.as_slice() {
        [.., prev, last] => last <= prev,
        _ => true,
    };
    Ok(AsymptoticReport {
        query: *query,
        m: rhs.m,
        k: rhs.k,
        rhs: rhs.value,
        rhs_tail_bound: rhs.tail_bound,
        local_factors: spec.describe(),
        dividing_term: DIVIDING_TERM,
        lhs_checkpoints: lhs,
        ratios,
        tolerance,
        final_deviation,
        converged: final_deviation < tolerance && non_increasing,
    })
}

fn recheck_shift_invariance(s: u32, h: u64, m: u64) -> Result<()> {
    let m_pow = m.pow(s);
    for r in 1..=SHIFT_RECHECK_LIMIT {
        let rf = factorize(r)?;
        let direct = crs_factored(&rf, s, h)?;
        let reduced = crs_factored(&rf, s, m_pow)?;
        if direct != reduced {
            return Err(Error::Consistency(format!(
                "c_{r}^{s}({h}) = {direct} but c_{r}^{s}({m_pow}) = {reduced}"
            )));
        }
    }
    Ok(())
}

/// `Σ_{r <= R} fhat(r) ghat(r) c_r^s(h)`: the main-term constant for a pair
/// of absolutely convergent Cohen-Ramanujan expansions.
pub fn general_main_term<F, G>(fhat: F, ghat: G, s: u32, h: u64, r_max: u64) -> Result<f64>
where
    F: Fn(&FactoredInteger) -> f64,
    G: Fn(&FactoredInteger) -> f64,
{
    let query = CohenSumQuery::new(1, s, h)?;
    if r_max == 0 {
        return Ok(0.0);
    }
    let spf = SieveTable::build(SieveKind::SmallestPrimeFactor, r_max)?;
    let mut acc = CompensatedSum::new();
    for r in 1..=r_max {
        let rf = spf.factorize(r)?;
        let weight = fhat(&rf) * ghat(&rf);
        if weight != 0.0 {
            acc.add(weight * crs_factored(&rf, query.s, query.n)? as f64);
        }
    }
    Ok(acc.value())
}

/// Coefficients `μ(r) / (J_{s+a}(r) ζ(s+a))` of `J_a(n)/n^a`.
pub fn jordan_coefficients(s: u32, a: u32) -> Result<impl Fn(&FactoredInteger) -> f64> {
    let order = s + a;
    let z = zeta(order, ZETA_PRECISION)?;
    Ok(move |r: &FactoredInteger| {
        let mu = mobius(r);
        if mu == 0 {
            return 0.0;
        }
        let j = jordan_ratio(order, r) * (r.value() as f64).powi(order as i32);
        mu as f64 / (j * z)
    })
}

/// [`general_main_term`] with the Jordan coefficients of the query.
pub fn jordan_main_term(query: &AsymptoticQuery, r_max: u64) -> Result<f64> {
    general_main_term(
        jordan_coefficients(query.s, query.a)?,
        jordan_coefficients(query.s, query.b)?,
        query.s,
        query.h,
        r_max,
    )
}
