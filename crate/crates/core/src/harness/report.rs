//! CSV output for score tables and summaries.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use super::aggregate::SummaryRow;
use super::run::{record_order, ScoreRecord};
use crate::error::{Error, Result};

pub const RAW_HEADER: [&str; 10] = [
    "image_id",
    "kind",
    "severity",
    "axis_name",
    "axis_value",
    "region",
    "metric",
    "raw",
    "normalized",
    "error",
];

pub const SUMMARY_HEADER: [&str; 8] = [
    "kind",
    "axis_name",
    "axis_value",
    "region",
    "metric",
    "median_normalized",
    "n",
    "errors",
];

/// A row type with a fixed column layout and a canonical order.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
    fn order(&self, other: &Self) -> Ordering;
}

/// Six decimal places; non-finite values spelled `inf`, `-inf`, `nan`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let s = format!("{v:.6}");
        if s == "-0.000000" {
            "0.000000".into()
        } else {
            s
        }
    }
}

fn format_axis(name: &str, v: f64) -> String {
    if name == "coverage" || v.fract() != 0.0 {
        format_real(v)
    } else {
        format!("{v:.0}")
    }
}

impl CsvRecord for ScoreRecord {
    fn header() -> &'static [&'static str] {
        &RAW_HEADER
    }

    fn fields(&self) -> Vec<String> {
        let v = &self.variant;
        let (raw, normalized, error) = match &self.score {
            Ok(s) => (format_real(s.raw), format_real(s.normalized), String::new()),
            Err(e) => (String::new(), String::new(), e.clone()),
        };
        vec![
            self.image_id.clone(),
            v.label(),
            v.severity().map(|s| s.to_string()).unwrap_or_default(),
            v.axis_name().into(),
            format_axis(v.axis_name(), v.axis_value()),
            v.region().map(|r| r.name().to_owned()).unwrap_or_default(),
            self.metric.clone(),
            raw,
            normalized,
            error,
        ]
    }

    fn order(&self, other: &Self) -> Ordering {
        record_order(self, other)
    }
}

impl CsvRecord for SummaryRow {
    fn header() -> &'static [&'static str] {
        &SUMMARY_HEADER
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.kind.clone(),
            self.axis_name.into(),
            format_axis(self.axis_name, self.axis_value),
            self.region.map(|r| r.name().to_owned()).unwrap_or_default(),
            self.metric.clone(),
            self.median_normalized.map(format_real).unwrap_or_default(),
            self.n.to_string(),
            self.errors.to_string(),
        ]
    }

    fn order(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then_with(|| self.metric.cmp(&other.metric))
            .then_with(|| self.axis_value.total_cmp(&other.axis_value))
            .then_with(|| self.region.cmp(&other.region))
    }
}

/// Writes `rows` as RFC 4180 CSV (CRLF line ends, header first), in canonical order.
pub fn write_csv<R: CsvRecord>(rows: &[R], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&R> = rows.iter().collect();
    sorted.sort_by(|a, b| a.order(b));

    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    out.write_record(R::header()).map_err(to_err)?;
    for row in sorted {
        out.write_record(row.fields()).map_err(to_err)?;
    }
    let bytes = out
        .into_inner()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(kind: &str, metric: &str, axis: f64, median: f64) -> SummaryRow {
        SummaryRow {
            kind: kind.into(),
            axis_name: "severity",
            axis_value: axis,
            region: None,
            metric: metric.into(),
            median_normalized: Some(median),
            n: 5,
            errors: 0,
        }
    }

    #[test]
    fn header_only_for_empty() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_csv::<SummaryRow>(&[], &p).unwrap();
        assert_eq!(
            fs::read_to_string(&p).unwrap(),
            "kind,axis_name,axis_value,region,metric,median_normalized,n,errors\r\n"
        );
    }

    #[test]
    fn six_decimals_and_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let rows = vec![
            row("blur", "ssim", 10.0, 0.5),
            row("blur", "psnr", 2.0, 0.123456789),
            row("blur", "psnr", 1.0, 1.0),
        ];
        write_csv(&rows, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.split("\r\n").collect();
        assert_eq!(lines[1], "blur,severity,1,,psnr,1.000000,5,0");
        assert_eq!(lines[2], "blur,severity,2,,psnr,0.123457,5,0");
        assert_eq!(lines[3], "blur,severity,10,,ssim,0.500000,5,0");

        let again = dir.path().join("t.csv");
        write_csv(&rows, &again).unwrap();
        assert_eq!(fs::read(&p).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn reals() {
        assert_eq!(format_real(f64::INFINITY), "inf");
        assert_eq!(format_real(-1e-9), "0.000000");
        assert_eq!(format_real(28.13080360867), "28.130804");
    }

    #[test]
    fn quotes_fields_with_commas() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_csv(&[row("a,b", "m\"x", 0.0, 1.0)], &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"a,b\",severity,0,,\"m\"\"x\""), "{text}");
    }
}
