//! CSV ingestion and result serialization.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ResultSet, SearchParams, SearchStats, TimeSeriesPair};

/// One CSV source column, optionally keyed by a timestamp column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub path: PathBuf,
    pub value_column: String,
    pub timestamp_column: Option<String>,
}

/// How to turn one or two CSV files into an aligned pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestSpec {
    pub x: ColumnSpec,
    pub y: ColumnSpec,
    /// Bucket width for mean aggregation: timestamp units when timestamps
    /// are present, rows otherwise. `None` keeps full resolution.
    pub aggregate: Option<u64>,
    /// Seed for the tie-breaking jitter applied after ingestion.
    pub jitter_seed: u64,
}

/// Reads, aligns, and cleans the two series.
///
/// Rows with a missing or non-finite value in either series are dropped
/// pairwise. With timestamp columns the series are inner-joined on the
/// timestamp; without, they are aligned by row order and must match in
/// length. A tiny value-scaled jitter de-duplicates exact ties, which the
/// neighbor-based estimator cannot tolerate.
pub fn ingest(spec: &IngestSpec) -> Result<TimeSeriesPair> {
    let xs = read_column(&spec.x)?;
    let ys = read_column(&spec.y)?;
    let joined: Vec<(i64, f64, f64)> = match (
        spec.x.timestamp_column.is_some(),
        spec.y.timestamp_column.is_some(),
    ) {
        (true, true) => {
            let mut ys_sorted = ys;
            ys_sorted.sort_by_key(|r| r.0);
            let mut xs_sorted = xs;
            xs_sorted.sort_by_key(|r| r.0);
            let mut out = Vec::new();
            let mut j = 0;
            for (t, x) in xs_sorted {
                while j < ys_sorted.len() && ys_sorted[j].0 < t {
                    j += 1;
                }
                if j < ys_sorted.len() && ys_sorted[j].0 == t {
                    out.push((t, x, ys_sorted[j].1));
                }
            }
            out
        }
        (false, false) => {
            if xs.len() != ys.len() {
                return Err(Error::Ingest(format!(
                    "series lengths differ ({} vs {}) and no timestamps to join on",
                    xs.len(),
                    ys.len()
                )));
            }
            xs.into_iter().zip(ys).map(|((t, x), (_, y))| (t, x, y)).collect()
        }
        _ => {
            return Err(Error::Ingest(
                "either both series or neither must have a timestamp column".into(),
            ))
        }
    };
    let mut rows: Vec<(i64, f64, f64)> =
        joined.into_iter().filter(|(_, x, y)| x.is_finite() && y.is_finite()).collect();
    if let Some(res) = spec.aggregate {
        if res == 0 {
            return Err(Error::Config("aggregation bucket must be positive".into()));
        }
        rows = aggregate_mean(&rows, res);
    }
    if rows.len() < 2 {
        return Err(Error::Ingest(format!(
            "only {} usable rows after alignment and cleaning",
            rows.len()
        )));
    }
    let start_time = rows[0].0;
    let xs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let mut pair = TimeSeriesPair::with_time(xs, ys, start_time, 1.0)?;
    pair.apply_jitter(spec.jitter_seed);
    Ok(pair)
}

/// Returns (timestamp-or-row-index, value); unparseable values become NaN so
/// the pairwise drop handles them uniformly.
fn read_column(spec: &ColumnSpec) -> Result<Vec<(i64, f64)>> {
    let mut reader =
        csv::Reader::from_path(&spec.path).map_err(|e| Error::Ingest(e.to_string()))?;
    let headers = reader.headers().map_err(|e| Error::Ingest(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Ingest(format!("column '{name}' not found in {:?}", spec.path)))
    };
    let value_idx = col(&spec.value_column)?;
    let ts_idx = spec.timestamp_column.as_deref().map(col).transpose()?;
    let mut out = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Ingest(e.to_string()))?;
        let value: f64 = record.get(value_idx).and_then(|v| v.trim().parse().ok())
            .unwrap_or(f64::NAN);
        let t = match ts_idx {
            Some(i) => record
                .get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Ingest(format!("bad timestamp in row {row_no}")))?,
            None => row_no as i64,
        };
        out.push((t, value));
    }
    Ok(out)
}

fn aggregate_mean(rows: &[(i64, f64, f64)], res: u64) -> Vec<(i64, f64, f64)> {
    let mut out: Vec<(i64, f64, f64, usize)> = Vec::new();
    for &(t, x, y) in rows {
        let bucket = t.div_euclid(res as i64);
        match out.last_mut() {
            Some(last) if last.0 == bucket => {
                last.1 += x;
                last.2 += y;
                last.3 += 1;
            }
            _ => out.push((bucket, x, y, 1)),
        }
    }
    out.into_iter()
        .map(|(b, x, y, c)| (b * res as i64, x / c as f64, y / c as f64))
        .collect()
}

/// One reported window, with indices and wall-clock-ish times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub start_index: usize,
    pub end_index: usize,
    pub start_time: i64,
    pub end_time: i64,
    pub mi: f64,
    pub normalized_mi: f64,
    pub method: String,
}

/// Full run output; serializes losslessly to JSON and flattens to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub windows: Vec<ReportRow>,
    pub params: SearchParams,
    pub stats: SearchStats,
}

impl WindowReport {
    pub fn new(
        results: &ResultSet,
        pair: &TimeSeriesPair,
        params: &SearchParams,
        stats: SearchStats,
    ) -> Self {
        let time_of = |i: usize| pair.start_time + (i as f64 * pair.step).round() as i64;
        let windows = results
            .iter()
            .map(|w| ReportRow {
                start_index: w.window.start,
                end_index: w.window.end,
                start_time: time_of(w.window.start),
                end_time: time_of(w.window.end),
                mi: w.mi,
                normalized_mi: w.normalized_mi,
                method: format!("{:?}", w.method_tag),
            })
            .collect();
        Self { windows, params: *params, stats }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Ingest(format!("bad report JSON: {e}")))
    }

    /// CSV with one row per window; run metadata is JSON-only.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.windows {
            w.serialize(row).map_err(|e| Error::Ingest(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Ingest(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Ingest(e.to_string()))
    }
}

/// Writes a pair as `t,x,y` CSV, the format `ingest` reads back.
pub fn write_pair_csv<W: std::io::Write>(pair: &TimeSeriesPair, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y"]).map_err(|e| Error::Ingest(e.to_string()))?;
    for i in 0..pair.len() {
        let (x, y) = pair.point(i);
        let t = pair.start_time + (i as f64 * pair.step).round() as i64;
        w.write_record([t.to_string(), x.to_string(), y.to_string()])
            .map_err(|e| Error::Ingest(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn col(f: &tempfile::NamedTempFile, value: &str, ts: Option<&str>) -> ColumnSpec {
        ColumnSpec {
            path: f.path().to_path_buf(),
            value_column: value.into(),
            timestamp_column: ts.map(String::from),
        }
    }

    #[test]
    fn matching_timestamps_join() {
        let fx = write_tmp("t,v\n10,1.0\n11,2.0\n12,3.0\n");
        let fy = write_tmp("t,v\n10,5.0\n11,6.0\n12,7.0\n");
        let spec = IngestSpec {
            x: col(&fx, "v", Some("t")),
            y: col(&fy, "v", Some("t")),
            aggregate: None,
            jitter_seed: 0,
        };
        let pair = ingest(&spec).unwrap();
        assert_eq!(pair.len(), 3);
        assert_eq!(pair.start_time, 10);
    }

    #[test]
    fn nan_rows_dropped_pairwise() {
        let fx = write_tmp("v\n1.0\nnot_a_number\n3.0\n4.0\n");
        let fy = write_tmp("v\n5.0\n6.0\n7.0\n8.0\n");
        let spec = IngestSpec {
            x: col(&fx, "v", None),
            y: col(&fy, "v", None),
            aggregate: None,
            jitter_seed: 0,
        };
        let pair = ingest(&spec).unwrap();
        assert_eq!(pair.len(), 3);
        assert!((pair.ys()[1] - 7.0).abs() < 1e-6);
    }

    #[test]
    fn bucket_mean_aggregation() {
        // 120 per-second rows to minute resolution: two buckets of means.
        let mut cx = String::from("t,v\n");
        let mut cy = String::from("t,v\n");
        for t in 0..120 {
            cx.push_str(&format!("{t},{}\n", t as f64));
            cy.push_str(&format!("{t},{}\n", 2.0 * t as f64));
        }
        let fx = write_tmp(&cx);
        let fy = write_tmp(&cy);
        let spec = IngestSpec {
            x: col(&fx, "v", Some("t")),
            y: col(&fy, "v", Some("t")),
            aggregate: Some(60),
            jitter_seed: 0,
        };
        let pair = ingest(&spec).unwrap();
        assert_eq!(pair.len(), 2);
        assert!((pair.xs()[0] - 29.5).abs() < 1e-3);
        assert!((pair.xs()[1] - 89.5).abs() < 1e-3);
    }

    #[test]
    fn length_mismatch_without_timestamps() {
        let fx = write_tmp("v\n1.0\n2.0\n");
        let fy = write_tmp("v\n1.0\n2.0\n3.0\n");
        let spec = IngestSpec {
            x: col(&fx, "v", None),
            y: col(&fy, "v", None),
            aggregate: None,
            jitter_seed: 0,
        };
        assert!(matches!(ingest(&spec), Err(Error::Ingest(_))));
    }

    #[test]
    fn report_round_trip() {
        use crate::types::{CorrelatedWindow, MethodTag, Window};
        let pair = crate::datagen::gaussian_pair(100, 0.5, 1).unwrap();
        let mut rs = ResultSet::default();
        rs.insert_disjoint(CorrelatedWindow {
            window: Window::new(5, 50),
            mi: 0.75,
            normalized_mi: 0.31,
            method_tag: MethodTag::TD,
        })
        .unwrap();
        let report =
            WindowReport::new(&rs, &pair, &SearchParams::default(), SearchStats::default());
        let json = report.to_json();
        let back = WindowReport::from_json(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), json);
        assert!(report.to_csv().unwrap().contains("5,50"));
    }
}
