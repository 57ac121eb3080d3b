//! CSV and JSON output of sweep records.
//!
//! Floats are written in shortest round-trip form, so parsing a file and
//! writing it again reproduces it byte for byte.

use std::path::Path;
use std::str::FromStr;

use crate::error::{HarnessError, Result};
use crate::sweep::SweepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`; expected csv or json")),
        }
    }
}

pub fn to_csv_string(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn from_csv_str(text: &str) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Array of flat objects with the same keys as the CSV header.
pub fn to_json_string(records: &[SweepRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

pub fn from_json_str(text: &str) -> Result<Vec<SweepRecord>> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(records: &[SweepRecord], format: Format) -> Result<String> {
    if records.is_empty() {
        return Err(HarnessError::Empty);
    }
    match format {
        Format::Csv => to_csv_string(records),
        Format::Json => to_json_string(records).map(|s| s + "\n"),
    }
}

pub fn emit(records: &[SweepRecord], format: Format, path: &Path) -> Result<()> {
    let text = render(records, format)?;
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(i: usize) -> SweepRecord {
        SweepRecord {
            index: i,
            param: "lambda_c".into(),
            value: 1e-6 * (i as f64 + 1.0) / 3.0,
            p0: Some(0.1 + i as f64 / 7.0),
            pi: Some(std::f64::consts::PI / 100.0),
            p0_oma: Some(1.0 / 3.0),
            sum_rate_nnoma: Some(1.234_567_890_123_456_7),
            sum_rate_oma: Some(5e-324),
            m_a: Some(17),
            poisson_tail: Some(3.3e-5),
            overshoot: Some(0.0),
            series_tail_bound: Some(2.5e2),
            quad_delta: Some(1e-12),
            mc_p0_hat: if i.is_multiple_of(2) { Some(0.5) } else { None },
            mc_pi_hat: None,
            mc_ci95_p0: Some(0.002_191_3),
            mc_ci95_pi: None,
            mc_trials: Some(1000),
            mc_seed: Some(u64::MAX - i as u64),
            wall_time_s: 0.25,
            error: if i == 3 {
                Some("point failed, badly".into())
            } else {
                None
            },
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let recs: Vec<_> = (0..20).map(record).collect();
        let text = to_csv_string(&recs).unwrap();
        assert_eq!(text.lines().count(), 21);
        let back = from_csv_str(&text).unwrap();
        assert_eq!(back, recs);
        assert_eq!(to_csv_string(&back).unwrap(), text);
    }

    #[test]
    fn json_carries_the_same_values() {
        let recs: Vec<_> = (0..5).map(record).collect();
        let json = to_json_string(&recs).unwrap();
        assert_eq!(from_json_str(&json).unwrap(), recs);
        let csv = to_csv_string(&recs).unwrap();
        assert_eq!(from_csv_str(&csv).unwrap(), from_json_str(&json).unwrap());
        let header: Vec<String> = csv.lines().next().unwrap().split(',').map(String::from).collect();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let keys: Vec<String> = value[0].as_object().unwrap().keys().cloned().collect();
        let mut sorted = header.clone();
        sorted.sort();
        assert_eq!(sorted, keys);
    }

    #[test]
    fn nothing_to_emit() {
        assert!(matches!(render(&[], Format::Csv), Err(HarnessError::Empty)));
    }
}
