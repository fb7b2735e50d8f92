use std::fs::File;
use std::io::{BufReader, BufWriter};

use cohen_ramanujan::arith::{
    cohen_totient, factorize, generalized_gcd, jordan, mobius, primes_up_to, tau_s, zeta,
    FactoredInteger, SieveKind, SieveTable,
};
use cohen_ramanujan::asymptotics::{
    asymptotic_verify_with_budget, jordan_main_term, rhs_product, AsymptoticQuery,
};
use cohen_ramanujan::cohen::{
    crs_direct, crs_divisor_sum, crs_fast, crs_of_shift, kvector_sum, CohenSumQuery,
};
use cohen_ramanujan::expansions::{
    expansion_partial_sum, local_factor_cases, local_factor_exact, local_factor_via_sums,
    sivaramakrishnan_check, ExpansionQuery, ExpansionReport,
};
use cohen_ramanujan::report::{write_asymptotic_csv, write_expansion_csv, write_plot_data};
use cohen_ramanujan::{Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::config::*;
use crate::output::Output;

pub fn dispatch(config: &RunConfig) -> Result<Output> {
    let budget = config.memory_budget;
    match &config.command {
        Command::Sum(args) => sum(args),
        Command::Jordan(args) => jordan_profile(args),
        Command::GcdS(args) => gcd_s(args),
        Command::Expansion(args) => expansion(args),
        Command::LocalCheck(args) => local_check(args),
        Command::Sivaramakrishnan(args) => kvector_series(args),
        Command::Asymptotic(args) => asymptotic(args, budget),
        Command::MainTerm(args) => main_term(args),
        Command::SieveCache(args) => sieve_cache(args, budget),
        Command::ReproAll(args) => repro_all(args, budget),
    }
}

fn sum(args: &SumArgs) -> Result<Output> {
    let query = CohenSumQuery::new(args.r, args.s, args.n)?;
    let value = match args.evaluator {
        EvaluatorChoice::Fast => crs_fast(&query)?.value,
        EvaluatorChoice::Direct => crs_direct(&query)?.value,
        EvaluatorChoice::DivisorSum => crs_divisor_sum(&query)?.value,
        EvaluatorChoice::Shift => crs_of_shift(args.r, args.s, args.n)?.value,
        EvaluatorChoice::Kvector => {
            let n = i64::try_from(args.n)
                .map_err(|_| Error::InvalidParameter("n exceeds i64".into()))?;
            kvector_sum(args.s, n, args.r)?
        }
        EvaluatorChoice::All => {
            let values = [
                crs_direct(&query)?.value,
                crs_divisor_sum(&query)?.value,
                crs_fast(&query)?.value,
            ];
            if values.iter().any(|&v| v != values[0]) {
                return Err(Error::Consistency(format!(
                    "evaluators disagree on {query:?}: direct, divisor-sum, fast = {values:?}"
                )));
            }
            values[0]
        }
    };
    let evaluator = format!("{:?}", args.evaluator).to_lowercase();
    Ok(Output::record(
        "sum",
        vec![
            ("r", json!(args.r)),
            ("s", json!(args.s)),
            ("n", json!(args.n)),
            ("evaluator", json!(evaluator)),
            ("value", json!(value.to_string())),
        ],
        format!("{value}\n"),
    ))
}

fn format_factors(f: &FactoredInteger) -> String {
    if f.factors().is_empty() {
        return "1".into();
    }
    f.factors()
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

fn jordan_profile(args: &JordanArgs) -> Result<Output> {
    let f = factorize(args.n)?;
    let j = jordan(args.k, &f)?;
    let cohen = cohen_totient(args.k, &f)?;
    let mu = mobius(&f);
    let tau = tau_s(args.s, &f);
    let mut fields = vec![
        ("n", json!(args.n)),
        ("factors", json!(format_factors(&f))),
        ("k", json!(args.k)),
        ("jordan", json!(j.to_string())),
        ("cohen_totient", json!(cohen.to_string())),
        ("mobius", json!(mu)),
        ("s", json!(args.s)),
        ("tau_s", json!(tau)),
    ];
    let mut plain = format!(
        "n = {} = {}\nJ_{}(n) = {j}\nmu(n) = {mu}\ntau_{}(n) = {tau}\n",
        args.n,
        format_factors(&f),
        args.k,
        args.s
    );
    if let Some(z) = args.zeta {
        let value = zeta(z, 1e-12)?;
        fields.push(("zeta_z", json!(z)));
        fields.push(("zeta", json!(value)));
        plain.push_str(&format!("zeta({z}) = {value:.15}\n"));
    }
    Ok(Output::record("jordan", fields, plain))
}

fn gcd_s(args: &GcdArgs) -> Result<Output> {
    let g = generalized_gcd(args.m, args.n, args.s)?;
    Ok(Output::record(
        "gcd-s",
        vec![
            ("m", json!(args.m)),
            ("n", json!(args.n)),
            ("s", json!(args.s)),
            ("value", json!(g)),
        ],
        format!("{g}\n"),
    ))
}

fn expansion_plain(title: &str, report: &ExpansionReport) -> String {
    let q = &report.query;
    let mut out = format!(
        "{title} s={} k={} n={}\ntarget = {:.15}\n",
        q.s, q.k, q.n, report.target
    );
    for c in &report.partial_sums {
        out.push_str(&format!(
            "Q = {:>10}  S_Q = {:.15}  |S_Q - target| = {:.3e}\n",
            c.q, c.partial_sum, c.abs_error
        ));
    }
    out.push_str(&format!(
        "final_abs_error = {:.3e} (tolerance {:.3e}) converged = {}\n",
        report.final_abs_error, report.tolerance, report.converged
    ));
    out
}

fn expansion_output(kind: &'static str, title: &str, report: &ExpansionReport) -> Result<Output> {
    let mut csv = Vec::new();
    write_expansion_csv(report, &mut csv)?;
    Output::from_report(
        kind,
        report,
        String::from_utf8_lossy(&csv).into_owned(),
        expansion_plain(title, report),
    )
}

fn expansion(args: &ExpansionArgs) -> Result<Output> {
    let query = ExpansionQuery::new(args.s, args.k, args.n, args.q_max)?;
    let report = expansion_partial_sum(&query)?;
    expansion_output("expansion", "cohen-ramanujan expansion", &report)
}

fn kvector_series(args: &KvectorSeriesArgs) -> Result<Output> {
    let report = sivaramakrishnan_check(args.s, args.k, args.n, args.r_max)?;
    expansion_output("sivaramakrishnan", "k-vector expansion", &report)
}

#[derive(Serialize)]
struct PrimeCase {
    p: u64,
    closed_form: String,
    via_sums: String,
    agree: bool,
}

#[derive(Serialize)]
struct LocalCheckReport {
    s: u32,
    k: u32,
    n: u64,
    primes: Vec<u64>,
    lhs: String,
    rhs: String,
    holds: bool,
    per_prime: Vec<PrimeCase>,
}

fn local_check(args: &LocalCheckArgs) -> Result<Output> {
    let check = local_factor_exact(args.s, args.k, args.n, &args.primes)?;
    let mut primes = args.primes.clone();
    primes.sort_unstable();
    primes.dedup();
    let per_prime = primes
        .iter()
        .map(|&p| {
            let closed = local_factor_cases(args.s, args.k, p, args.n)?;
            let generic = local_factor_via_sums(args.s, args.k, p, args.n)?;
            Ok(PrimeCase {
                p,
                closed_form: closed.to_string(),
                via_sums: generic.to_string(),
                agree: closed == generic,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = LocalCheckReport {
        s: args.s,
        k: args.k,
        n: args.n,
        primes,
        lhs: check.lhs.to_string(),
        rhs: check.rhs.to_string(),
        holds: check.holds(),
        per_prime,
    };
    if !report.holds || report.per_prime.iter().any(|c| !c.agree) {
        return Err(Error::Consistency(format!(
            "local factors disagree: lhs = {}, rhs = {}",
            report.lhs, report.rhs
        )));
    }
    let mut csv = String::from("p,closed_form,via_sums,agree\n");
    let mut plain = format!(
        "lhs = {}\nrhs = {}\nholds = {}\n",
        report.lhs, report.rhs, report.holds
    );
    for c in &report.per_prime {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            c.p, c.closed_form, c.via_sums, c.agree
        ));
        plain.push_str(&format!("p = {}: local factor {}\n", c.p, c.closed_form));
    }
    Output::from_report("local-check", &report, csv, plain)
}

fn asymptotic(args: &AsymptoticArgs, budget: u64) -> Result<Output> {
    let query = AsymptoticQuery::new(
        args.s,
        args.a,
        args.b,
        args.h,
        args.n_max,
        args.prime_cutoff,
    )?;
    if !(args.tolerance > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let report = asymptotic_verify_with_budget(&query, args.tolerance, budget)?;
    if let Some(path) = &args.emit_plot_data {
        write_plot_data(&report, BufWriter::new(File::create(path)?))?;
    }
    let mut csv = Vec::new();
    write_asymptotic_csv(&report, &mut csv)?;
    let mut plain = format!(
        "s={} a={} b={} h={} (m={}, k={}) P={}\nrhs = {:.15} (tail bound {:.3e})\n",
        args.s,
        args.a,
        args.b,
        args.h,
        report.m,
        report.k,
        args.prime_cutoff,
        report.rhs,
        report.rhs_tail_bound
    );
    for r in &report.ratios {
        plain.push_str(&format!(
            "N = {:>10}  lhs = {:.12e}  N*rhs = {:.12e}  ratio = {:.9}\n",
            r.n, r.lhs, r.main_term, r.ratio
        ));
    }
    plain.push_str(&format!(
        "|ratio - 1| = {:.3e} (tolerance {}) converged = {}\n",
        report.final_deviation, report.tolerance, report.converged
    ));
    Output::from_report(
        "asymptotic",
        &report,
        String::from_utf8_lossy(&csv).into_owned(),
        plain,
    )
}

fn main_term(args: &MainTermArgs) -> Result<Output> {
    let query = AsymptoticQuery::new(args.s, args.a, args.b, args.h, 1, args.prime_cutoff)?;
    let series = jordan_main_term(&query, args.r_max)?;
    let product = rhs_product(&query)?;
    let difference = (series - product.value).abs();
    Ok(Output::record(
        "main-term",
        vec![
            ("s", json!(args.s)),
            ("a", json!(args.a)),
            ("b", json!(args.b)),
            ("h", json!(args.h)),
            ("R", json!(args.r_max)),
            ("P", json!(args.prime_cutoff)),
            ("series", json!(series)),
            ("product", json!(product.value)),
            ("product_tail_bound", json!(product.tail_bound)),
            ("abs_difference", json!(difference)),
        ],
        format!(
            "series (R={}) = {series:.15}\nproduct (P={}) = {:.15}\n|difference| = {difference:.3e}\n",
            args.r_max, args.prime_cutoff, product.value
        ),
    ))
}

fn sieve_kind(args: &SieveCacheArgs) -> SieveKind {
    match args.kind {
        SieveKindChoice::Mobius => SieveKind::Mobius,
        SieveKindChoice::Jordan => SieveKind::Jordan(args.k),
        SieveKindChoice::Spf => SieveKind::SmallestPrimeFactor,
    }
}

fn sieve_cache(args: &SieveCacheArgs, budget: u64) -> Result<Output> {
    let kind = sieve_kind(args);
    let fresh = SieveTable::build_with_budget(kind, args.limit, budget)?;
    let (action, path, matches) = if let Some(path) = &args.verify {
        let cached = SieveTable::read_cache(BufReader::new(File::open(path)?))?;
        ("verify", path, cached == fresh)
    } else {
        let path = args.out.as_ref().expect("clap requires --out or --verify");
        fresh.write_cache(BufWriter::new(File::create(path)?))?;
        ("write", path, true)
    };
    let output = Output::record(
        "sieve-cache",
        vec![
            ("action", json!(action)),
            ("kind", json!(kind.to_string())),
            ("limit", json!(args.limit)),
            ("path", json!(path.display().to_string())),
            ("matches", json!(matches)),
        ],
        format!(
            "{action} {} {kind} table up to {}: {}\n",
            path.display(),
            args.limit,
            if matches { "ok" } else { "MISMATCH" }
        ),
    );
    if !matches {
        return Err(Error::CacheFormat(format!(
            "{} does not match a freshly built {kind} table",
            path.display()
        )));
    }
    Ok(output)
}

#[derive(Serialize)]
struct ReproCheck {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct ReproSummary {
    checks: Vec<ReproCheck>,
    all_passed: bool,
}

/// Exact Euler factors over every subset of {2..13}, s, k <= 3, n <= 30,
/// then the default asymptotic verification.
fn repro_all(args: &ReproArgs, budget: u64) -> Result<Output> {
    let primes = primes_up_to(13);
    let mut cases = 0u64;
    let mut failures = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let subset: Vec<u64> = (0..primes.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| primes[i])
            .collect();
        for s in 1..=3 {
            for k in 1..=3 {
                for n in 1..=30 {
                    cases += 1;
                    if !local_factor_exact(s, k, n, &subset)?.holds() {
                        failures.push(format!("P={subset:?} s={s} k={k} n={n}"));
                    }
                }
            }
        }
    }
    let mut checks = vec![ReproCheck {
        name: "exact local Euler factors".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{cases} cases, all exact")
        } else {
            format!(
                "{} of {cases} failed, first {}",
                failures.len(),
                failures[0]
            )
        },
    }];

    let query = AsymptoticQuery::new(2, 3, 3, 12, args.n_max, 100_000)?;
    let report = asymptotic_verify_with_budget(&query, 0.02, budget)?;
    let trail: Vec<String> = report
        .ratios
        .iter()
        .map(|r| format!("N={}: {:.9}", r.n, r.ratio))
        .collect();
    checks.push(ReproCheck {
        name: "shifted convolution asymptotic (s=2, a=3, b=3, h=12)".into(),
        passed: report.converged,
        detail: format!(
            "ratios {}; |ratio - 1| = {:.3e}, tolerance 0.02",
            trail.join(", "),
            report.final_deviation
        ),
    });

    let all_passed = checks.iter().all(|c| c.passed);
    let summary = ReproSummary { checks, all_passed };
    let mut csv = String::from("check,passed,detail\n");
    let mut plain = String::new();
    for c in &summary.checks {
        csv.push_str(&format!("\"{}\",{},\"{}\"\n", c.name, c.passed, c.detail));
        plain.push_str(&format!(
            "[{}] {}: {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    plain.push_str(&format!("all passed: {}\n", summary.all_passed));
    Output::from_report("repro-all", &summary, csv, plain)
}
