//! Machine-readable emission: CSV (RFC-style quoting, LF line endings) and
//! JSON (single top-level object), byte-deterministic for fixed inputs.

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";

/// One emission: every value is pre-rendered to its canonical string, so
/// the CSV cells and JSON fields are identical by construction.
pub struct OutputRecord {
    pub command: &'static str,
    pub parameters: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub provenance: Vec<(&'static str, &'static str)>,
}

impl OutputRecord {
    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            &self
                .columns
                .iter()
                .map(|c| csv_escape(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            out.push_str(
                &row.iter()
                    .map(|v| csv_escape(v))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let mut top = Map::new();
        top.insert(
            "schema_version".into(),
            Value::String(SCHEMA_VERSION.into()),
        );
        top.insert("command".into(), Value::String(self.command.into()));
        let mut params = Map::new();
        for (k, v) in &self.parameters {
            params.insert((*k).into(), Value::String(v.clone()));
        }
        top.insert("parameters".into(), Value::Object(params));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, value) in self.columns.iter().zip(row) {
                    obj.insert((*col).into(), Value::String(value.clone()));
                }
                Value::Object(obj)
            })
            .collect();
        top.insert("rows".into(), Value::Array(rows));
        let mut prov = Map::new();
        for (k, v) in &self.provenance {
            prov.insert((*k).into(), Value::String((*v).into()));
        }
        top.insert("provenance".into(), Value::Object(prov));
        let mut s = serde_json::to_string_pretty(&Value::Object(top))
            .expect("string-valued JSON cannot fail");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Canonical rendering of approximate (float) columns: 12 significant
/// digits, plain decimal within a sane exponent window, scientific
/// otherwise.
pub fn format_approx(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=11).contains(&exp) {
        format!("{x:.11e}")
    } else {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

/// Join a list with commas (one CSV cell, quoted by the writer).
pub fn join_list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
