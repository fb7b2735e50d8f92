use cohen_ramanujan::report::to_json;
use cohen_ramanujan::Result;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::OutputFormat;

/// A finished command result in all three formats.
pub struct Output {
    pub kind: &'static str,
    pub json: Value,
    pub csv: String,
    pub plain: String,
}

impl Output {
    /// A flat record: CSV is a header and one row; plain is the given text.
    pub fn record(kind: &'static str, fields: Vec<(&str, Value)>, plain: String) -> Self {
        let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let row: Vec<String> = fields.iter().map(|(_, v)| csv_cell(v)).collect();
        let csv = format!("{}\n{}\n", header.join(","), row.join(","));
        let json = Value::Object(
            fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect::<Map<_, _>>(),
        );
        Self {
            kind,
            json,
            csv,
            plain,
        }
    }

    pub fn from_report<T: Serialize>(
        kind: &'static str,
        report: &T,
        csv: String,
        plain: String,
    ) -> Result<Self> {
        Ok(Self {
            kind,
            json: serde_json::to_value(report)?,
            csv,
            plain,
        })
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        Ok(match format {
            OutputFormat::Json => to_json(self.kind, &self.json)? + "\n",
            OutputFormat::Csv => self.csv.clone(),
            OutputFormat::Plain => self.plain.clone(),
        })
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}
