//! Acceptance criteria, one test each. Every test prints a single
//! `[PASS]` / `[FAIL]` line with the observed numbers
//! (`cargo test --test acceptance -- --nocapture --test-threads 1` to see them).

use cohen_ramanujan::arith::{
    factorize, jordan, primes_up_to, tau, tau_s, zeta, BigRational, FactoredInteger,
};
use cohen_ramanujan::asymptotics::{
    asymptotic_verify, jordan_main_term, lhs_sum, rhs_product, AsymptoticQuery,
};
use cohen_ramanujan::cohen::{
    crs_direct, crs_divisor_sum, crs_fast, crs_of_shift, kvector_sum, CohenSumQuery,
    ShiftDecomposition,
};
use cohen_ramanujan::expansions::{expansion_partial_sum_at, local_factor_exact, ExpansionQuery};
use cohen_ramanujan::summation::CompensatedSum;
use num_bigint::BigInt;
use num_traits::Zero;

fn report(id: u32, title: &str, failures: &[String], detail: String) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {id}: {title} -- {detail}");
    assert!(
        failures.is_empty(),
        "criterion {id} failed in {} case(s); first: {}",
        failures.len(),
        failures[0]
    );
}

/// Asymptotic grid: (s, a, b, h).
const ASYMPTOTIC_GRID: [(u32, u32, u32, u64); 2] = [(2, 3, 3, 12), (2, 4, 3, 4)];

#[test]
fn criterion_1_exact_euler_factors() {
    let primes = primes_up_to(13);
    let mut cases = 0;
    let mut failures = Vec::new();
    for mask in 0u32..1 << primes.len() {
        let subset: Vec<u64> = (0..primes.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| primes[i])
            .collect();
        for s in 1..=3 {
            for k in 1..=3 {
                for n in 1..=30 {
                    cases += 1;
                    let check = local_factor_exact(s, k, n, &subset).unwrap();
                    if check.lhs != check.rhs {
                        failures.push(format!("P={subset:?} s={s} k={k} n={n}"));
                    }
                }
            }
        }
    }
    report(
        1,
        "exact Euler-factor identity over subsets of {2..13}",
        &failures,
        format!("{cases} cases, exact rational equality"),
    );
}

#[test]
fn criterion_2_expansion_converges() {
    const TOLERANCE: f64 = 1e-3;
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for s in 1..=3 {
        for k in 1..=3 {
            for n in 1..=20 {
                let query = ExpansionQuery::new(s, k, n, 10_000).unwrap();
                let r = expansion_partial_sum_at(&query, &[100, 2000]).unwrap();
                let (e100, e2000, e_final) = (
                    r.error_at(100).unwrap(),
                    r.error_at(2000).unwrap(),
                    r.final_abs_error,
                );
                worst = worst.max(e_final);
                if !(e_final < TOLERANCE) {
                    failures.push(format!(
                        "s={s} k={k} n={n}: |S_10^4 - target| = {e_final:e}"
                    ));
                }
                if !(e2000 < e100) {
                    failures.push(format!(
                        "s={s} k={k} n={n}: err(2000) = {e2000:e} >= err(100) = {e100:e}"
                    ));
                }
            }
        }
    }
    report(
        2,
        "truncated expansion matches zeta(s+k) J_k(n)/n^k",
        &failures,
        format!("180 cases, worst |S_10^4 - target| = {worst:.3e} (< {TOLERANCE:e})"),
    );
}

#[test]
fn criterion_3_cross_evaluator_exactness() {
    let mut failures = Vec::new();
    let mut cases = 0;
    for r in 1..=30u64 {
        for s in 1..=3u32 {
            for n in 0..=100u64 {
                cases += 1;
                let q = CohenSumQuery::new(r, s, n).unwrap();
                let values = [
                    crs_direct(&q).unwrap().value,
                    crs_divisor_sum(&q).unwrap().value,
                    crs_fast(&q).unwrap().value,
                ];
                if values.iter().any(|&v| v != values[0]) {
                    failures.push(format!("r={r} s={s} n={n}: {values:?}"));
                }
            }
        }
    }
    for r in 1..=30u64 {
        for n in 0..=50u64 {
            cases += 1;
            let fast = crs_fast(&CohenSumQuery::new(r, 1, n).unwrap())
                .unwrap()
                .value;
            let kv = kvector_sum(1, n as i64, r).unwrap();
            if kv != fast {
                failures.push(format!("kvector r={r} n={n}: {kv} vs {fast}"));
            }
        }
    }
    report(
        3,
        "direct = divisor-sum = fast; kvector(1) = fast",
        &failures,
        format!("{cases} cases, zero tolerance"),
    );
}

// The prime-power rule written out independently of the library.
fn prime_power_rule(p: u64, e: u32, s: u32, n: u64) -> i128 {
    let high = (p as u128).pow(s * e);
    let low = (p as u128).pow(s * (e - 1));
    let n = n as u128;
    if n % high == 0 {
        high as i128 - low as i128
    } else if n % low == 0 {
        -(low as i128)
    } else {
        0
    }
}

#[test]
fn criterion_4_prime_power_rule() {
    let mut failures = Vec::new();
    let mut cases = 0;
    for p in primes_up_to(100) {
        let mut e = 1;
        while p.pow(e) <= 100 {
            let r = p.pow(e);
            for s in 1..=3 {
                for n in 0..=200 {
                    cases += 1;
                    let q = CohenSumQuery::new(r, s, n).unwrap();
                    let rule = prime_power_rule(p, e, s, n);
                    let fast = crs_fast(&q).unwrap().value;
                    let direct = crs_direct(&q).unwrap().value;
                    if fast != rule || direct != rule {
                        failures.push(format!(
                            "{p}^{e} s={s} n={n}: rule {rule} fast {fast} direct {direct}"
                        ));
                    }
                }
            }
            e += 1;
        }
    }
    report(
        4,
        "prime-power rule agrees with crs_fast and crs_direct",
        &failures,
        format!("{cases} cases, zero tolerance"),
    );
}

#[test]
fn criterion_5_shifted_convolution_asymptotic() {
    const TOLERANCE: f64 = 0.02;
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for (s, a, b, h) in ASYMPTOTIC_GRID {
        let query = AsymptoticQuery::new(s, a, b, h, 1_000_000, 100_000).unwrap();
        let r = asymptotic_verify(&query, TOLERANCE).unwrap();
        let at = |n: u64| r.ratios.iter().find(|p| p.n == n).unwrap().ratio;
        let (r4, r6) = (at(10_000), at(1_000_000));
        let (d4, d6) = ((r4 - 1.0).abs(), (r6 - 1.0).abs());
        details.push(format!(
            "(s={s},a={a},b={b},h={h}) ratio {r4:.7} @1e4, {r6:.7} @1e6"
        ));
        if !(d6 < TOLERANCE) {
            failures.push(format!(
                "(s={s},a={a},b={b},h={h}): |ratio - 1| = {d6:.5} at N=1e6"
            ));
        }
        if !(d6 < d4) {
            failures.push(format!(
                "(s={s},a={a},b={b},h={h}): |ratio - 1| not decreasing ({d4:.9} -> {d6:.9})"
            ));
        }
    }
    report(
        5,
        "sum ~ N * Euler product (|ratio - 1| < 0.02 at N = 1e6, decreasing)",
        &failures,
        details.join("; "),
    );
}

#[test]
fn criterion_6_series_matches_product() {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for (s, a, b, h) in ASYMPTOTIC_GRID {
        let query = AsymptoticQuery::new(s, a, b, h, 1, 10_000).unwrap();
        let series = jordan_main_term(&query, 10_000).unwrap();
        let product = rhs_product(&query).unwrap().value;
        let gap = (series - product).abs();
        details.push(format!("(s={s},a={a},b={b},h={h}) gap {gap:.2e}"));
        if !(gap < 1e-6) {
            failures.push(format!("(s={s},a={a},b={b},h={h}): {series} vs {product}"));
        }
    }
    report(
        6,
        "main-term series (R=1e4) = Euler product (P=1e4) within 1e-6",
        &failures,
        details.join("; "),
    );
}

#[test]
fn criterion_7_sieve_matches_naive_sum() {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for (s, a, b, h) in ASYMPTOTIC_GRID {
        let query = AsymptoticQuery::new(s, a, b, h, 10_000, 100_000).unwrap();
        let sieved = lhs_sum(&query).unwrap().last().unwrap().1;
        let mut naive = CompensatedSum::new();
        for n in 1..=10_000u64 {
            let f = jordan(a, &factorize(n).unwrap()).unwrap() as f64 / (n as f64).powi(a as i32);
            let g = jordan(b, &factorize(n + h).unwrap()).unwrap() as f64
                / ((n + h) as f64).powi(b as i32);
            naive.add(f * g);
        }
        let rel = ((sieved - naive.value()) / naive.value()).abs();
        details.push(format!("(s={s},a={a},b={b},h={h}) rel {rel:.1e}"));
        if !(rel < 1e-9) {
            failures.push(format!(
                "(s={s},a={a},b={b},h={h}): {sieved} vs {}",
                naive.value()
            ));
        }
    }
    report(
        7,
        "sieved sum = naive per-n sum to 1e-9 relative at N = 1e4",
        &failures,
        details.join("; "),
    );
}

// Exact lower bound for zeta(s): the partial sum Σ_{n <= terms} n^-s.
fn zeta_lower_bound(s: u32, terms: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for n in 1..=terms {
        acc += BigRational::new(BigInt::from(1), BigInt::from(n).pow(s));
    }
    acc
}

#[test]
fn criterion_8_arithmetic_identities() {
    let mut failures = Vec::new();
    let mut cases = 0u64;
    let factored: Vec<FactoredInteger> = (1..=10_000).map(|n| factorize(n).unwrap()).collect();

    for (n, f) in (1u64..).zip(&factored) {
        for s in 1..=4 {
            cases += 1;
            if tau_s(s, &f.pow(s).unwrap()) != tau(f) {
                failures.push(format!("tau_{s}({n}^{s}) != tau({n})"));
            }
        }
        for k in 1..=4 {
            cases += 1;
            let total: u128 = f
                .divisors()
                .into_iter()
                .map(|d| jordan(k, &factored[d as usize - 1]).unwrap())
                .sum();
            if total != (n as u128).pow(k) {
                failures.push(format!("sum_(d|{n}) J_{k}(d) = {total}"));
            }
        }
    }

    // r^s <= J_s(r) ζ(s), certified with a rational lower bound for ζ(s).
    for s in [2u32, 3] {
        let lower = zeta_lower_bound(s, 200);
        let upper_float = zeta(s, 1e-12).unwrap() + 1e-12;
        for (r, f) in (1u64..).zip(&factored) {
            cases += 1;
            let j = BigInt::from(jordan(s, f).unwrap());
            let lhs = BigRational::from_integer(BigInt::from(r).pow(s));
            if lhs > BigRational::from_integer(j) * &lower {
                failures.push(format!("r^s > J_s(r) zeta(s) for r={r} s={s}"));
            }
            // Same bound in floating point with the upper value of ζ.
            if 1.0 / jordan(s, f).unwrap() as f64
                > upper_float / (r as f64).powi(s as i32) * (1.0 + 1e-15)
            {
                failures.push(format!("1/J_s(r) > zeta(s)/r^s (float) for r={r} s={s}"));
            }
        }
    }

    for s in [2u32, 3] {
        for h in 1..=500u64 {
            let m_pow = ShiftDecomposition::new(h, s).unwrap().m_pow_s();
            for r in 1..=50u64 {
                cases += 1;
                let direct = crs_fast(&CohenSumQuery::new(r, s, h).unwrap())
                    .unwrap()
                    .value;
                let reduced = crs_fast(&CohenSumQuery::new(r, s, m_pow).unwrap())
                    .unwrap()
                    .value;
                let shifted = crs_of_shift(r, s, h).unwrap().value;
                if direct != reduced || direct != shifted {
                    failures.push(format!("c_{r}^{s}({h}) != c_{r}^{s}({m_pow})"));
                }
            }
        }
    }
    report(
        8,
        "tau_s(n^s) = tau(n), sum J_k(d) = n^k, 1/J_s(r) <= zeta(s)/r^s, c_r^s(h) = c_r^s(m^s)",
        &failures,
        format!("{cases} cases, exact comparisons"),
    );
}
