use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::experiment::ExperimentResult;
use crate::harness::stats::RunStatistics;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown report format {other:?} (expected text or csv)"
            ))),
        }
    }
}

pub const COLUMNS: [&str; 5] = ["experiment", "split", "mean", "std", "n_runs"];

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub split: String,
    pub mean: f64,
    pub std: f64,
    pub n_runs: usize,
}

impl ReportRow {
    pub fn new(experiment: &str, split: &str, stats: &RunStatistics) -> Self {
        ReportRow {
            experiment: experiment.to_string(),
            split: split.to_string(),
            mean: stats.mean,
            std: stats.std,
            n_runs: stats.runs(),
        }
    }
}

/// A validation and a test row per experiment, in input order.
pub fn report_rows(results: &[ExperimentResult]) -> Vec<ReportRow> {
    results
        .iter()
        .flat_map(|r| {
            [
                ReportRow::new(&r.name, "validation", &r.validation),
                ReportRow::new(&r.name, "test", &r.test),
            ]
        })
        .collect()
}

/// Four decimals without the leading zero: 0.76081 → ".7608". NaN (no
/// surviving runs) renders as "nan".
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let s = format!("{x:.4}");
    match s.strip_prefix("0.") {
        Some(rest) => format!(".{rest}"),
        None => s,
    }
}

/// Renders rows (and, in text form, trailing notes). Output depends only on
/// the inputs.
pub fn render_report(rows: &[ReportRow], notes: &[String], format: ReportFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Config("nothing to report".into()));
    }
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for r in rows {
                w.write_record([
                    r.experiment.clone(),
                    r.split.clone(),
                    format_value(r.mean),
                    format_value(r.std),
                    r.n_runs.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        ReportFormat::Text => {
            let name_width = rows
                .iter()
                .map(|r| r.experiment.len())
                .chain([10])
                .max()
                .unwrap_or(10);
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<name_width$}  {:<10}  {:>6}  {:>6}  {:>6}",
                "experiment", "split", "mean", "std", "n_runs"
            );
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:<name_width$}  {:<10}  {:>6}  {:>6}  {:>6}",
                    r.experiment,
                    r.split,
                    format_value(r.mean),
                    format_value(r.std),
                    r.n_runs
                );
            }
            for n in notes {
                let _ = writeln!(out, "note: {n}");
            }
            Ok(out)
        }
    }
}

pub fn emit_report(
    path: &Path,
    rows: &[ReportRow],
    notes: &[String],
    format: ReportFormat,
) -> Result<()> {
    let text = render_report(rows, notes, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(mean: f64, std: f64) -> ReportRow {
        ReportRow {
            experiment: "char/3-5-7".into(),
            split: "test".into(),
            mean,
            std,
            n_runs: 10,
        }
    }

    #[test]
    fn four_decimals_without_leading_zero() {
        assert_eq!(format_value(0.76081), ".7608");
        assert_eq!(format_value(0.00331), ".0033");
        assert_eq!(format_value(1.0), "1.0000");
        let csv = render_report(&[row(0.76081, 0.00331)], &[], ReportFormat::Csv).unwrap();
        assert_eq!(
            csv,
            "experiment,split,mean,std,n_runs\nchar/3-5-7,test,.7608,.0033,10\n"
        );
    }

    #[test]
    fn csv_round_trips_to_four_decimals() {
        let rows: Vec<ReportRow> = (0..20)
            .map(|i| row(i as f64 / 19.3, i as f64 / 211.0))
            .collect();
        let text = render_report(&rows, &["ignored".into()], ReportFormat::Csv).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(reader.headers().unwrap(), COLUMNS.as_slice());
        for (rec, r) in reader.records().zip(&rows) {
            let rec = rec.unwrap();
            assert_eq!(&rec[0], r.experiment);
            assert!((rec[2].parse::<f64>().unwrap() - r.mean).abs() <= 5e-5 + 1e-12);
            assert!((rec[3].parse::<f64>().unwrap() - r.std).abs() <= 5e-5 + 1e-12);
            assert_eq!(rec[4].parse::<usize>().unwrap(), r.n_runs);
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let rows = vec![row(0.5, 0.1), row(0.25, 0.0)];
        let notes = vec!["a note".to_string()];
        for f in [ReportFormat::Text, ReportFormat::Csv] {
            assert_eq!(
                render_report(&rows, &notes, f).unwrap(),
                render_report(&rows, &notes, f).unwrap()
            );
        }
        let text = render_report(&rows, &notes, ReportFormat::Text).unwrap();
        assert!(text.lines().next().unwrap().starts_with("experiment"));
        assert!(text.ends_with("note: a note\n"));
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(render_report(&[], &[], ReportFormat::Text).is_err());
    }
}
