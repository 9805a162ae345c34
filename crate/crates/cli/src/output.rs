//! Rendering of results. Everything written here is deterministic; timings
//! and cache counters go to the diagnostic stream instead.

use std::str::FromStr;

use ellchi_core::engine::{TableRow, ENGINE_VERSION};
use ellchi_core::oracles::{Report, Status};
use ellchi_core::{Mode, TruncatedSeries};
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::args::Format;

/// One `chi` value with its request.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub n: usize,
    pub hodge: i64,
    pub exps: Vec<i64>,
    /// The mode actually used, after resolving `auto`.
    pub mode: Mode,
    pub chi: Number,
    pub engine: String,
}

impl OutputRecord {
    pub fn from_row(row: &TableRow, mode: Mode) -> Self {
        OutputRecord {
            n: row.n,
            hodge: row.hodge,
            exps: row.exps.clone(),
            mode,
            chi: Number::from_str(&row.chi.to_string()).expect("decimal integer"),
            engine: ENGINE_VERSION.to_string(),
        }
    }
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

fn table_header(n: usize) -> Vec<String> {
    let mut h = vec!["n".to_string(), "hodge".to_string()];
    h.extend((1..=n).map(|i| format!("d{i}")));
    h.push("chi".into());
    h
}

fn table_fields(r: &TableRow) -> Vec<String> {
    let mut f = vec![r.n.to_string(), r.hodge.to_string()];
    f.extend(r.exps.iter().map(ToString::to_string));
    f.push(r.chi.to_string());
    f
}

/// CSV: header `n,hodge,d1..dn,chi` then one line per row; JSON: an array
/// of [`OutputRecord`]s; text: whitespace-separated columns.
pub fn emit_table(n: usize, rows: &[TableRow], mode: Mode, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => csv_bytes(&table_header(n), rows.iter().map(table_fields)),
        Format::Json => {
            let recs: Vec<OutputRecord> = rows
                .iter()
                .map(|r| OutputRecord::from_row(r, mode))
                .collect();
            json_bytes(&recs)
        }
        Format::Text => {
            let mut s = table_header(n).join(" ");
            s.push('\n');
            for r in rows {
                s.push_str(&table_fields(r).join(" "));
                s.push('\n');
            }
            s.into_bytes()
        }
    }
}

/// A single value: text is just the integer.
pub fn emit_chi(row: &TableRow, mode: Mode, format: Format) -> Vec<u8> {
    match format {
        Format::Text => format!("{}\n", row.chi).into_bytes(),
        Format::Json => json_bytes(&OutputRecord::from_row(row, mode)),
        Format::Csv => emit_table(row.n, std::slice::from_ref(row), mode, format),
    }
}

#[derive(Serialize)]
struct SeriesTerm {
    exps: Vec<u32>,
    coefficient: String,
}

#[derive(Serialize)]
struct SeriesRecord<'a> {
    n: usize,
    orders: &'a [u32],
    total: Option<u32>,
    terms: Vec<SeriesTerm>,
    engine: &'a str,
}

/// Nonzero coefficients in canonical term order.
pub fn emit_series(n: usize, s: &TruncatedSeries, format: Format) -> Vec<u8> {
    let terms = s.terms().map(|(m, c)| SeriesTerm {
        exps: m.exponents().to_vec(),
        coefficient: c.to_string(),
    });
    match format {
        Format::Text => format!("{s}\n").into_bytes(),
        Format::Csv => {
            let mut h = vec!["q".to_string()];
            h.extend((1..=n).map(|i| format!("q{i}")));
            h.push("coefficient".into());
            csv_bytes(
                &h,
                terms.map(|t| {
                    let mut f: Vec<String> = t.exps.iter().map(ToString::to_string).collect();
                    f.push(t.coefficient);
                    f
                }),
            )
        }
        Format::Json => json_bytes(&SeriesRecord {
            n,
            orders: s.orders(),
            total: s.total(),
            terms: terms.collect(),
            engine: ENGINE_VERSION,
        }),
    }
}

#[derive(Serialize)]
struct GenfunRecord<'a> {
    n: usize,
    m: usize,
    genfun: String,
    engine: &'a str,
}

pub fn emit_genfun(n: usize, m: usize, text: &str, format: Format) -> Vec<u8> {
    match format {
        Format::Text => format!("{text}\n").into_bytes(),
        Format::Csv => csv_bytes(
            &["n".into(), "m".into(), "genfun".into()],
            [vec![n.to_string(), m.to_string(), text.to_string()]],
        ),
        Format::Json => json_bytes(&GenfunRecord {
            n,
            m,
            genfun: text.to_string(),
            engine: ENGINE_VERSION,
        }),
    }
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => json_bytes(report),
        Format::Csv => csv_bytes(
            &[
                "name".into(),
                "status".into(),
                "detail".into(),
                "witness".into(),
            ],
            report.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    status_word(c.status).to_lowercase(),
                    c.detail.clone(),
                    c.witness.clone().unwrap_or_default(),
                ]
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                s.push_str(&format!(
                    "{} {}: {}\n",
                    status_word(c.status),
                    c.name,
                    c.detail
                ));
                if let Some(w) = &c.witness {
                    s.push_str(&format!("    witness: {w}\n"));
                }
            }
            let failed = report.failures().count();
            s.push_str(&format!(
                "{} checks, {} failed\n",
                report.checks.len(),
                failed
            ));
            s.into_bytes()
        }
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(d: i64, chi: i64) -> TableRow {
        TableRow {
            n: 1,
            hodge: 0,
            exps: vec![d],
            chi: chi.into(),
        }
    }

    #[test]
    fn csv_rows() {
        let out = emit_table(1, &[row(12, 2)], Mode::Exact, Format::Csv);
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "n,hodge,d1,chi\n1,0,12,2\n"
        );
        let empty = emit_table(2, &[], Mode::Exact, Format::Csv);
        assert_eq!(String::from_utf8(empty).unwrap(), "n,hodge,d1,d2,chi\n");
    }

    #[test]
    fn json_round_trip() {
        let rows = [row(0, 1), row(4, 1)];
        let out = emit_table(1, &rows, Mode::Exact, Format::Json);
        assert!(out.ends_with(b"\n"));
        let back: Vec<OutputRecord> = serde_json::from_slice(&out).unwrap();
        let want: Vec<OutputRecord> = rows
            .iter()
            .map(|r| OutputRecord::from_row(r, Mode::Exact))
            .collect();
        assert_eq!(back, want);
    }

    #[test]
    fn huge_values_stay_exact() {
        let r = TableRow {
            n: 1,
            hodge: 0,
            exps: vec![0],
            chi: "123456789012345678901234567890".parse().unwrap(),
        };
        let out = String::from_utf8(emit_chi(&r, Mode::Exact, Format::Json)).unwrap();
        assert!(out.contains("\"chi\": 123456789012345678901234567890"));
    }
}
