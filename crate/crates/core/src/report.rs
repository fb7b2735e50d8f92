//! Report serialization.
//!
//! JSON documents carry `"schema": 1` and a `"report"` kind next to the
//! report's own fields. CSV output has a header row and one checkpoint per
//! row.

use std::io::Write;

use serde::Serialize;

use crate::asymptotics::AsymptoticReport;
use crate::error::Result;
use crate::expansions::ExpansionReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    report: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty-printed JSON with the schema envelope.
pub fn to_json<T: Serialize>(kind: &str, body: &T) -> Result<String> {
    let envelope = Envelope {
        schema: SCHEMA_VERSION,
        report: kind,
        body,
    };
    Ok(serde_json::to_string_pretty(&envelope)?)
}

/// Rows `Q, partial_sum, abs_error`.
pub fn write_expansion_csv<W: Write>(report: &ExpansionReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["Q", "partial_sum", "abs_error"])?;
    for c in &report.partial_sums {
        out.write_record([
            c.q.to_string(),
            format!("{:e}", c.partial_sum),
            format!("{:e}", c.abs_error),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Rows `N, lhs, N_rhs, ratio`.
pub fn write_asymptotic_csv<W: Write>(report: &AsymptoticReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["N", "lhs", "N_rhs", "ratio"])?;
    for r in &report.ratios {
        out.write_record([
            r.n.to_string(),
            format!("{:e}", r.lhs),
            format!("{:e}", r.main_term),
            format!("{:e}", r.ratio),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Two whitespace-separated columns, `N ratio`, for external plotting.
pub fn write_plot_data<W: Write>(report: &AsymptoticReport, mut w: W) -> Result<()> {
    writeln!(w, "# N ratio")?;
    for r in &report.ratios {
        writeln!(w, "{} {:.17e}", r.n, r.ratio)?;
    }
    w.flush()?;
    Ok(())
}
